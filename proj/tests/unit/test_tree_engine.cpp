// SPDX-License-Identifier: Apache-2.0
#include "toolplanner/tree_engine.hpp"

#include "../support/fixtures.hpp"
#include "../support/oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace toolplanner;
using fixtures::answer;
using fixtures::give_up;

namespace {

RoundProposal up() { return finish_round(FinishKind::GiveUpAndRestart, std::nullopt, "restart"); }
RoundProposal done(const std::string& text = fixtures::kAnswer) { return finish_round(FinishKind::GiveAnswer, text); }

TaskContext fig51_task() {
    Instruction inst = fixtures::travel_instruction(Level::Tool);
    inst.gold_tags = derive_tag_list(make_path({"A1", "B1", "B2"}), fixtures::travel_registry());
    return {inst, inst.gold_tags, make_path({"A1", "B1", "B2"})};
}

// A1 -> A2 -> A3, two restarts under A3, one under A2, then A1 -> B1 -> B2 -> answer.
std::vector<RoundProposal> fig51_script() {
    return {call_round("A1"), call_round("A2"), call_round("A3"), up(), up(), up(),
            call_round("B1"), call_round("B2"), done()};
}

class AlwaysGiveUp : public Policy {
public:
    TagList extract_tags(const Instruction& i) override { return i.gold_tags; }
    SolutionPath plan_path(const Instruction&, const TagList& t) override { return make_path(t.apis); }
    RoundProposal propose_round(const RoundState&, Rng&) override { return up(); }
};

std::vector<std::vector<int>> engine_paths(const SolutionTree& tree) {
    std::vector<std::vector<int>> out;
    for (const auto& solution : enumerate_solutions(tree)) out.push_back(solution.node_ids);
    return out;
}

} // namespace

TEST_CASE("replaying the restart sequence") {
    auto task = fig51_task();
    ScriptedPolicy policy(fig51_script(), task.tags, task.path);
    Rng rng(0);
    const auto episode = generate_tree(task, policy, EnvFixture{}, EngineLimits{}, rng);
    REQUIRE(episode.trees.size() == 1);
    const auto solutions = enumerate_solutions(episode.trees);
    REQUIRE(solutions.size() == 4);
    CHECK(solutions[0].actions() == std::vector<std::string>{"A1", "A2", "A3"});
    CHECK(solutions[0].leaf == LeafKind::GiveUp);
    CHECK(solutions[1].actions() == std::vector<std::string>{"A1", "A2", "A3"});
    CHECK(solutions[2].actions() == std::vector<std::string>{"A1", "A2"});
    CHECK(solutions[3].actions() == std::vector<std::string>{"A1", "B1", "B2"});
    CHECK(solutions[3].leaf == LeafKind::GiveAnswer);
    REQUIRE(episode.final.has_value());
    CHECK(*episode.final == solutions[3]);
    CHECK(extract_solution_path(*episode.final).steps == std::vector<std::string>{"A1", "B1", "B2", "Finish"});
    CHECK(episode.total_rounds == 9);
    CHECK_NOTHROW(check_structure(episode, EngineLimits{}));
}

TEST_CASE("a policy that always gives up exhausts every tree") {
    auto task = fig51_task();
    AlwaysGiveUp policy;
    Rng rng(0);
    const auto episode = generate_tree(task, policy, EnvFixture{}, EngineLimits{}, rng);
    CHECK_FALSE(episode.final.has_value());
    CHECK(episode.trees.size() == 2);
    CHECK(episode.total_rounds <= 30);
    CHECK_FALSE(final_solution(episode.trees).has_value());
    for (const auto& tree : episode.trees) CHECK(tree.nodes.front().children.size() == 1);
}

TEST_CASE("never-finishing worst case uses exactly 30 rounds") {
    auto task = fig51_task();
    StochasticPolicy policy(StochasticPolicy::preset("never_finish", {"A1", "A2", "B1", "C1"}));
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        Rng rng(seed);
        const auto episode = generate_tree(task, policy, EnvFixture{}, EngineLimits{}, rng);
        CHECK(episode.total_rounds == 30);
        CHECK(episode.trees.size() == 2);
        for (const auto& tree : episode.trees) {
            CHECK(tree.rounds() == 15);
            // Full binary shape below the single first round: 8 leaves at depth 4.
            const auto solutions = enumerate_solutions(tree);
            CHECK(solutions.size() == 8);
            for (const auto& s : solutions) CHECK(s.rounds.size() == 4);
        }
        CHECK_FALSE(episode.final.has_value());
    }
}

TEST_CASE("the two travel trees enumerate eight solutions") {
    const auto trees = fixtures::travel_trees();
    const auto solutions = enumerate_solutions(trees);
    REQUIRE(solutions.size() == 8);
    const std::vector<std::vector<std::string>> expected{
        {"A1", "A2", "A3"}, {"A1", "A2", "B1"}, {"A1", "C1"},       {"A1", "C1"},
        {"A1", "A3"},       {"A1", "B2", "C2"}, {"A1", "B2", "B3", "A3"}, {"A1", "B2", "B3"}};
    for (std::size_t i = 0; i < 8; ++i) CHECK(solutions[i].actions() == expected[i]);
    CHECK(solutions[3].leaf == LeafKind::GiveAnswer);
    CHECK(solutions[6].leaf == LeafKind::RoundLimit);

    const auto final = final_solution(trees);
    REQUIRE(final.has_value());
    CHECK(*final == solutions[7]);
    CHECK(final->tree_index == 2);
    CHECK(extract_solution_path(*final).steps == std::vector<std::string>{"A1", "B2", "B3", "Finish"});
}

TEST_CASE("single-path tree") {
    SolutionTree tree;
    const int a = tree.add(0, fixtures::tool("A1"));
    const int b = tree.add(a, fixtures::tool("B1"));
    tree.add(b, give_up(), LeafKind::GiveUp);
    const auto solutions = enumerate_solutions(tree);
    REQUIRE(solutions.size() == 1);
    CHECK(extract_solution_path(solutions[0]).steps == std::vector<std::string>{"A1", "B1", "Finish"});
    CHECK_FALSE(final_solution(std::vector<SolutionTree>{tree}).has_value());
}

TEST_CASE("solution path of the numbers and trivia trace") {
    const auto trace =
        parse_solution_trace_text(fixtures::slurp(fixtures::fixture_path("traces/numbers_trivia.json")));
    CHECK(extract_solution_path(trace).steps ==
          std::vector<std::string>{"get_math_fact_for_numbers", "get_math_fact_for_numbers", "get_math_fact_for_numbers",
                                   "v1_trivia_for_trivia_by_api_ninjas", "Finish"});
}

TEST_CASE("replaying a recorded trace through the engine") {
    const auto trace =
        parse_solution_trace_text(fixtures::slurp(fixtures::fixture_path("traces/numbers_trivia.json")));
    auto policy = ScriptedPolicy::from_trace(trace, TagList{});
    Instruction inst;
    inst.id = "numbers";
    inst.text = trace.messages[1].content;
    const TaskContext task{inst, TagList{}, policy.plan_path(inst, {})};
    const auto env = EnvFixture::from_trace(trace);
    EngineLimits limits;
    // Four tool calls plus Finish make a five-round path.
    limits.max_rounds_per_path = 5;
    Rng rng(0);
    const auto episode = generate_tree(task, policy, env, limits, rng);
    REQUIRE(episode.final.has_value());
    const auto replayed = solution_trace(*episode.final);
    CHECK(replayed.rounds == trace.rounds);
    CHECK(replayed.final == trace.final);
}

TEST_CASE("enumeration agrees with the brute-force oracle on random trees") {
    Rng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        SolutionTree tree;
        const auto n = 1 + uniform_index(rng, 25);
        for (std::size_t i = 0; i < n; ++i) {
            const int parent = static_cast<int>(uniform_index(rng, tree.nodes.size()));
            tree.add(parent, fixtures::tool("A" + std::to_string(i)));
        }
        const auto engine = engine_paths(tree);
        const auto oracle = oracles::brute_force_paths(tree);
        CHECK(std::set<std::vector<int>>(engine.begin(), engine.end()) ==
              std::set<std::vector<int>>(oracle.begin(), oracle.end()));
        CHECK(engine.size() == oracle.size());
    }
}

TEST_CASE("randomized episodes respect every limit") {
    const std::vector<std::string> pool{"A1", "A2", "A3", "B1", "B2", "C1"};
    auto task = fig51_task();
    for (const char* preset : {"default", "restart_heavy", "chaotic", "never_finish", "plan_follower"}) {
        StochasticPolicy policy(StochasticPolicy::preset(preset, pool));
        for (std::uint64_t seed = 0; seed < 40; ++seed) {
            Rng rng(derive_seed(seed, preset));
            const auto episode = generate_tree(task, policy, EnvFixture{}, EngineLimits{}, rng);
            CHECK_NOTHROW(check_structure(episode, EngineLimits{}));
            const auto report = inspect(episode);
            CHECK(report.max_children <= 2);
            CHECK(report.max_path_rounds <= 4);
            CHECK(report.trees <= 2);
            CHECK(report.total_rounds <= 30);
            CHECK(report.give_answer_leaves <= 1);
            for (const auto& tree : episode.trees) CHECK(engine_paths(tree) == oracles::brute_force_paths(tree));
        }
    }
}

TEST_CASE("chain limits give single-child attempts") {
    auto task = fig51_task();
    AlwaysGiveUp policy;
    Rng rng(0);
    const auto limits = EngineLimits::chain(3);
    const auto episode = generate_tree(task, policy, EnvFixture{}, limits, rng);
    CHECK(episode.trees.size() == 3);
    CHECK(inspect(episode).max_children <= 1);
}

TEST_CASE("zero limits are rejected") {
    EngineLimits limits;
    limits.max_trees = 0;
    CHECK_THROWS_AS(limits.validate(), Error);
}

TEST_CASE("structure checks catch broken episodes") {
    auto task = fig51_task();
    ScriptedPolicy policy(fig51_script(), task.tags, task.path);
    Rng rng(0);
    const auto episode = generate_tree(task, policy, EnvFixture{}, EngineLimits{}, rng);
    CHECK_NOTHROW(check_structure(episode, EngineLimits{}));
    auto wide = episode;
    wide.trees[0].add(1, fixtures::tool("C2"));
    CHECK_THROWS_AS(check_structure(wide, EngineLimits{}), Error);
    auto deep = episode;
    const int a3 = fixtures::node_of(deep.trees, 1, {"A1", "A2", "A3"});
    const int extra = deep.trees[0].add(a3, fixtures::tool("C1"));
    deep.trees[0].add(extra, fixtures::tool("C2"));
    CHECK_THROWS_AS(check_structure(deep, EngineLimits{}), Error);
    // The hand-built two-tree fixture answers twice, which the engine never does.
    CHECK_THROWS_AS(check_structure(fixtures::travel_episode("x"), EngineLimits{}), Error);
}

TEST_CASE("episode dumps round-trip") {
    std::vector<Episode> episodes{fixtures::travel_episode("fig"), fixtures::travel_episode("fig2")};
    episodes[1].trees.pop_back();
    episodes[1].final = final_solution(episodes[1].trees);
    episodes[1].total_rounds = episodes[1].trees[0].rounds();
    const auto dir = fixtures::scratch_dir("episodes");
    CHECK(write_episodes(episodes, dir / "ep.jsonl") > 0);
    CHECK(read_episodes(dir / "ep.jsonl") == episodes);

    std::vector<std::string> lines = dump_episode(episodes[0]);
    std::swap(lines[1], lines[2]);
    CHECK_THROWS_AS(parse_episode_dump(lines), Error);
}

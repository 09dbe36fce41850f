// SPDX-License-Identifier: Apache-2.0
#include "toolplanner/evaluator.hpp"
#include "toolplanner/llm_client.hpp"

#include "../support/fixtures.hpp"

#include <doctest.h>

#include <cmath>

using namespace toolplanner;

namespace {

TaskLabel task(Level level, bool has_final, bool pass, bool cat, bool tool, bool api) {
    TaskLabel t;
    t.instruction_id = "t";
    t.level = level;
    t.has_final = has_final;
    t.label = {pass, cat, tool, api};
    return t;
}

Episode answered_episode(const std::string& id, const std::vector<std::string>& apis,
                         const std::string& text = fixtures::kAnswer) {
    Episode episode;
    episode.instruction_id = id;
    SolutionTree tree;
    int at = 0;
    for (const auto& api : apis) at = tree.add(at, fixtures::tool(api));
    tree.add(at, fixtures::answer(text), LeafKind::GiveAnswer);
    episode.trees.push_back(tree);
    episode.final = final_solution(episode.trees);
    episode.total_rounds = tree.rounds();
    return episode;
}

Episode restart_episode(const std::string& id) {
    Episode episode;
    episode.instruction_id = id;
    SolutionTree tree;
    const int a = tree.add(0, fixtures::tool("A1"));
    tree.add(a, fixtures::give_up(), LeafKind::GiveUp);
    episode.trees.push_back(tree);
    episode.total_rounds = 2;
    return episode;
}

Instruction with_id(Level level, const std::string& id) {
    auto inst = fixtures::travel_instruction(level);
    inst.id = id;
    return inst;
}

} // namespace

TEST_CASE("match rate is a plain proportion") {
    const std::vector<TaskLabel> tasks{task(Level::Api, true, true, true, true, true),
                                       task(Level::Api, true, true, true, true, false),
                                       task(Level::Api, true, true, true, true, true)};
    const auto result = match_rate(tasks, TagLevel::Api);
    CHECK(result.overall.favorable == 2);
    CHECK(result.overall.total == 3);
    CHECK(result.overall.rate() == doctest::Approx(2.0 / 3.0));
    CHECK(result.parents.at(TagLevel::Tool).rate() == 1.0);
}

TEST_CASE("statement tasks are excluded from match denominators") {
    std::vector<TaskLabel> tasks{task(Level::Tool, true, true, true, true, false),
                                 task(Level::Statement, true, true, false, false, false),
                                 task(Level::Statement, false, false, false, false, false)};
    CHECK(match_rate(tasks, TagLevel::Tool).overall.total == 1);
    CHECK(match_rate(tasks, TagLevel::Tool).overall.rate() == 1.0);
    const std::vector<TaskLabel> only_statements{tasks[1], tasks[2]};
    try {
        match_rate(only_statements, TagLevel::Category);
        FAIL("rated");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyEvalSet);
    }
}

TEST_CASE("the travel episode matches at tool level but not at API level") {
    const auto registry = fixtures::travel_registry();
    const std::vector<Episode> episodes{fixtures::travel_episode(fixtures::travel_instruction(Level::Tool).id)};
    const std::vector<Instruction> instructions{fixtures::travel_instruction(Level::Tool)};
    CHECK(match_rate(episodes, instructions, TagLevel::Tool, registry).overall.rate() == 1.0);
    CHECK(match_rate(episodes, instructions, TagLevel::Api, registry).overall.rate() == 0.0);
    CHECK(match_rate(episodes, instructions, TagLevel::Category, registry).overall.rate() == 1.0);
}

TEST_CASE("gold-path finals match everywhere") {
    const auto registry = fixtures::travel_registry();
    std::vector<Episode> episodes;
    std::vector<Instruction> instructions;
    for (Level level : {Level::Category, Level::Tool, Level::Api, Level::Hybrid}) {
        const auto id = "gold-" + std::string(to_string(level));
        episodes.push_back(answered_episode(id, {"A1", "A2", "B1"}));
        instructions.push_back(with_id(level, id));
    }
    for (auto level : kAllTagLevels) CHECK(match_rate(episodes, instructions, level, registry).overall.rate() == 1.0);
}

TEST_CASE("only the final solution counts") {
    const auto registry = fixtures::travel_registry();
    // Tree 1 walks the gold apis but gives up; the final answer uses A1 only.
    Episode episode;
    episode.instruction_id = "final-only";
    SolutionTree first(1);
    int at = 0;
    for (const char* api : {"A1", "A2", "B1"}) at = first.add(at, fixtures::tool(api));
    first.add(at, fixtures::give_up(), LeafKind::GiveUp);
    episode.trees.push_back(first);
    SolutionTree second(2);
    const int a = second.add(0, fixtures::tool("A1"));
    second.add(a, fixtures::answer(), LeafKind::GiveAnswer);
    episode.trees.push_back(second);
    episode.final = final_solution(episode.trees);
    const auto label = label_episode(episode, with_id(Level::Api, "final-only"), registry);
    CHECK(label.has_final);
    CHECK(label.label.pass);
    CHECK_FALSE(label.label.match_api);
    CHECK_FALSE(label.label.match_tool);
    CHECK(label.label.match_category == false);
}

TEST_CASE("pass rate") {
    const auto registry = fixtures::travel_registry();
    const std::vector<Episode> episodes{answered_episode("p", {"A1"}), restart_episode("r"),
                                        answered_episode("s", {"A1"}, "Sorry, I couldn't do it")};
    std::vector<Instruction> instructions{with_id(Level::Tool, "p"), with_id(Level::Tool, "r"),
                                          with_id(Level::Tool, "s")};
    const auto labels = label_episodes(episodes, instructions, registry);
    CHECK(pass_rate(labels).rate() == doctest::Approx(1.0 / 3.0));
    CHECK_FALSE(labels[1].has_final);

    const std::vector<Episode> all{answered_episode("p", {"A1"})};
    const std::vector<Instruction> one{with_id(Level::Tool, "p")};
    CHECK(pass_rate(label_episodes(all, one, registry)).rate() == 1.0);

    try {
        pass_rate(std::vector<TaskLabel>{});
        FAIL("rated");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyEvalSet);
    }
}

TEST_CASE("labelling needs a matching instruction") {
    const std::vector<Episode> episodes{answered_episode("orphan", {"A1"})};
    const std::vector<Instruction> instructions{with_id(Level::Tool, "other")};
    CHECK_THROWS_AS(label_episodes(episodes, instructions, fixtures::travel_registry()), Error);
}

TEST_CASE("parallel labelling keeps episode order") {
    const auto registry = fixtures::travel_registry();
    std::vector<Episode> episodes;
    std::vector<Instruction> instructions;
    for (int i = 0; i < 40; ++i) {
        const auto id = "t" + std::to_string(i);
        episodes.push_back(i % 3 == 0 ? restart_episode(id) : answered_episode(id, {"A1", "A2", "B1"}));
        instructions.push_back(with_id(i % 2 ? Level::Api : Level::Tool, id));
    }
    CHECK(label_episodes(episodes, instructions, registry, {}, 8) == label_episodes(episodes, instructions, registry));
}

TEST_CASE("win rate with the mock judge") {
    MockJudge judge;
    const std::vector<Instruction> instructions(3, fixtures::travel_instruction());
    const std::vector<std::string> longer{"aaaa", "bbbbb", "cccccc"};
    const std::vector<std::string> shorter{"a", "b", "c"};
    CHECK(win_rate(longer, shorter, instructions, judge).rate() == 1.0);
    CHECK(win_rate(shorter, shorter, instructions, judge).rate() == 0.5);
    CHECK(win_rate(shorter, longer, instructions, judge).rate() == 0.0);

    const std::vector<std::string> empty;
    const std::vector<Instruction> none;
    try {
        win_rate(empty, empty, none, judge);
        FAIL("rated");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyEvalSet);
    }
    const std::vector<std::string> two{"x", "y"};
    CHECK_THROWS_AS(win_rate(two, shorter, instructions, judge), Error);
}

TEST_CASE("alternating preferences give one half") {
    class Alternating : public Judge {
    public:
        int n = 0;
        Preference compare(const Instruction&, const std::string&, const std::string&) override {
            return (n++ % 2 == 0) ? Preference::Candidate : Preference::Reference;
        }
    } judge;
    const std::vector<Instruction> instructions(4, fixtures::travel_instruction());
    const std::vector<std::string> answers(4, "x");
    const auto tally = win_rate(answers, answers, instructions, judge);
    CHECK(tally.candidate == 2);
    CHECK(tally.reference == 2);
    CHECK(tally.rate() == 0.5);
}

TEST_CASE("model judge verdicts") {
    CHECK(LlmJudge::parse_verdict("A") == Preference::Candidate);
    CHECK(LlmJudge::parse_verdict(" Answer B. ") == Preference::Reference);
    CHECK(LlmJudge::parse_verdict("tie") == Preference::Tie);
    try {
        LlmJudge::parse_verdict("both are fine");
        FAIL("parsed");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::JudgeFailure);
    }

    MockClient client;
    client.add_rule("Answer A", "B");
    LlmJudge judge(client);
    CHECK(judge.compare(fixtures::travel_instruction(), "short", "longer") == Preference::Reference);
    const auto prompt = LlmJudge::prompt(fixtures::travel_instruction(), "cand", "ref");
    CHECK(prompt.find(fixtures::travel_instruction().text) != std::string::npos);
}

TEST_CASE("precision, recall and F1") {
    const auto s = prf1({"a", "b"}, {"b", "c"});
    CHECK(s.precision == 0.5);
    CHECK(s.recall == 0.5);
    CHECK(s.f1 == 0.5);
    const auto same = prf1({"a", "b"}, {"a", "b"});
    CHECK(same.precision == 1.0);
    CHECK(same.recall == 1.0);
    CHECK(same.f1 == 1.0);
    CHECK(f1_score(0.0, 0.0) == 0.0);
    const auto none = prf1({}, {"a"});
    CHECK(none.precision == 0.0);
    CHECK(none.recall == 0.0);
}

TEST_CASE("F1 from P = 0.86 and R = 0.305") {
    // Harmonic mean 2PR / (P + R) of P = 0.86, R = 0.305.
    const double expected = 2 * 0.86 * 0.305 / (0.86 + 0.305);
    CHECK(std::abs(f1_score(0.86, 0.305) - 0.4503) <= 5e-4);
    CHECK(std::abs(f1_score(0.86, 0.305) - expected) < 1e-15);
}

TEST_CASE("upward closure holds on random label batches") {
    Rng rng(99);
    for (int batch = 0; batch < 100; ++batch) {
        std::vector<TaskLabel> tasks;
        const auto n = 1 + uniform_index(rng, 30);
        for (std::size_t i = 0; i < n; ++i) {
            // Matching at a finer level implies the coarser ones.
            const bool api = uniform_unit(rng) < 0.3;
            const bool tool = api || uniform_unit(rng) < 0.4;
            const bool cat = tool || uniform_unit(rng) < 0.5;
            tasks.push_back(task(kAllLevels[uniform_index(rng, 5)], uniform_unit(rng) < 0.9, uniform_unit(rng) < 0.7,
                                 cat, tool, api));
        }
        bool any = false;
        for (const auto& t : tasks) any = any || t.level != Level::Statement;
        if (!any) continue;
        const auto a = match_rate(tasks, TagLevel::Api).overall.rate();
        const auto t = match_rate(tasks, TagLevel::Tool).overall.rate();
        const auto c = match_rate(tasks, TagLevel::Category).overall.rate();
        CHECK(a <= t);
        CHECK(t <= c);
    }
}

TEST_CASE("tag extraction against lexical retrieval") {
    const auto registry = fixtures::travel_registry();
    std::vector<Instruction> instructions{with_id(Level::Tool, "x"), with_id(Level::Api, "y"),
                                          with_id(Level::Statement, "z")};
    OraclePolicy oracle;
    const auto rows = compare_extraction(instructions, oracle, registry);
    // Two levels with three retriever rows and one extraction row each.
    CHECK(rows.size() == 8);
    for (const auto& row : rows) {
        CHECK(row.level != Level::Statement);
        if (row.method == "Tag Extraction") {
            CHECK(row.scores.f1 == 1.0);
        }
    }
    CHECK(format_extraction(rows).find("Retriever@3") != std::string::npos);
}

TEST_CASE("reports") {
    const auto registry = fixtures::travel_registry();
    std::vector<Episode> episodes{fixtures::travel_episode("a"), answered_episode("b", {"A1", "A2", "B1"}),
                                  restart_episode("c")};
    std::vector<Instruction> instructions{with_id(Level::Tool, "a"), with_id(Level::Api, "b"),
                                          with_id(Level::Statement, "c")};
    MockJudge judge;
    EvalOptions options;
    options.judge = &judge;
    options.references = {{"a", "short"}, {"b", std::string(200, 'x')}};
    const auto report = evaluate(episodes, instructions, registry, options);
    CHECK(report.tasks.size() == 3);
    CHECK(report.match_overall.at(TagLevel::Api).total == 2);
    CHECK(report.match_overall.at(TagLevel::Api).favorable == 1);
    CHECK(report.pass_overall.favorable == 2);
    REQUIRE(report.win_overall.has_value());
    CHECK(report.win_overall->candidate == 1);
    CHECK(report.win_overall->reference == 1);

    const auto text = format_report(report);
    CHECK(text.find("Match Rate (%)") != std::string::npos);
    CHECK(text.find("Tool.T") != std::string::npos);

    const auto records = report_records(report);
    const auto again = aggregate_report(parse_task_records(records));
    CHECK(again.tasks == report.tasks);
    CHECK(format_report(again) == text);

    CHECK_THROWS_AS(evaluate(std::vector<Episode>{}, instructions, registry), Error);
}

// SPDX-License-Identifier: Apache-2.0
#include "fixtures.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#ifndef TOOLPLANNER_SOURCE_DIR
#define TOOLPLANNER_SOURCE_DIR "."
#endif

namespace fixtures {

std::filesystem::path source_dir() {
    if (const char* env = std::getenv("TOOLPLANNER_SOURCE_DIR")) return env;
    return TOOLPLANNER_SOURCE_DIR;
}

std::filesystem::path fixture_path(const std::string& relative) { return source_dir() / "fixtures" / relative; }

std::vector<RegistryEntry> travel_entries() {
    return {
        {"Travel", "Priceline", "A1", "search flights by route"},
        {"Travel", "Priceline", "A2", "search hotels by city"},
        {"Travel", "Priceline", "A3", "search rental cars"},
        {"Travel", "BookingX", "A4", "book a room"},
        {"Transportation", "ADSBx", "B1", "live aircraft by registration"},
        {"Transportation", "ADSBx", "B2", "aircraft near a location"},
        {"Transportation", "ADSBx", "B3", "aircraft by call sign"},
        {"Data", "Weather", "C1", "current weather"},
        {"Data", "Weather", "C2", "five day forecast"},
    };
}

Registry travel_registry() {
    const auto entries = travel_entries();
    return Registry::load(entries);
}

Instruction travel_instruction(Level level) {
    const auto registry = travel_registry();
    Instruction inst;
    inst.id = instruction_id(7, level);
    inst.level = level;
    inst.source_seed = 7;
    inst.gold_tags = derive_tag_list(make_path({"A1", "A2", "B1"}), registry);
    inst.text = "I am flying to Denver next week. Using Priceline and ADSBx, please plan my arrival.";
    return inst;
}

Round tool(const std::string& api) {
    Round round;
    static_cast<RoundProposal&>(round) = call_round(api, "{}", "Call " + api + ".");
    round.observation = {"", api + " returned data"};
    return round;
}

Round give_up() {
    Round round;
    static_cast<RoundProposal&>(round) =
        finish_round(FinishKind::GiveUpAndRestart, std::nullopt, "This is not working, restart.");
    return round;
}

Round answer(const std::string& text) {
    Round round;
    static_cast<RoundProposal&>(round) = finish_round(FinishKind::GiveAnswer, text, "I can answer now.");
    return round;
}

std::vector<SolutionTree> travel_trees() {
    SolutionTree first(1);
    {
        const int a1 = first.add(0, tool("A1"));
        const int a2 = first.add(a1, tool("A2"));
        const int a3 = first.add(a2, tool("A3"));
        first.add(a3, give_up(), LeafKind::GiveUp);
        const int b1 = first.add(a2, tool("B1"));
        first.add(b1, give_up(), LeafKind::GiveUp);
        const int c1 = first.add(a1, tool("C1"));
        first.add(c1, give_up(), LeafKind::GiveUp);
        first.add(c1, answer(), LeafKind::GiveAnswer);
    }
    SolutionTree second(2);
    {
        const int a1 = second.add(0, tool("A1"));
        const int a3 = second.add(a1, tool("A3"));
        second.add(a3, give_up(), LeafKind::GiveUp);
        const int b2 = second.add(a1, tool("B2"));
        const int c2 = second.add(b2, tool("C2"));
        second.add(c2, give_up(), LeafKind::GiveUp);
        const int b3 = second.add(b2, tool("B3"));
        second.add(b3, tool("A3"), LeafKind::RoundLimit);
        second.add(b3, answer(), LeafKind::GiveAnswer);
    }
    return {first, second};
}

Episode travel_episode(const std::string& instruction_id) {
    Episode episode;
    episode.instruction_id = instruction_id;
    episode.trees = travel_trees();
    episode.final = final_solution(episode.trees);
    for (const auto& tree : episode.trees) episode.total_rounds += tree.rounds();
    return episode;
}

int node_of(const std::vector<SolutionTree>& trees, int tree_index, const std::vector<std::string>& actions) {
    const auto& tree = trees.at(static_cast<std::size_t>(tree_index - 1));
    int at = 0;
    for (const auto& action : actions) {
        int next = -1;
        for (int child : tree.nodes[static_cast<std::size_t>(at)].children) {
            if (tree.nodes[static_cast<std::size_t>(child)].round.action == action) {
                next = child;
                break;
            }
        }
        if (next < 0) throw std::runtime_error("fixture path not found: " + action);
        at = next;
    }
    return at;
}

SeedTask beach_seed() {
    for (auto& seed : bundled_seeds()) {
        if (seed.query_id == 1001) return seed;
    }
    throw std::runtime_error("beach-party seed missing from fixtures/seeds.jsonl");
}

SeedTask trivia_seed() {
    for (auto& seed : bundled_seeds()) {
        if (seed.query_id == 101) return seed;
    }
    throw std::runtime_error("trivia seed missing from fixtures/seeds.jsonl");
}

std::vector<SeedTask> bundled_seeds() { return read_seed_tasks(fixture_path("seeds.jsonl")); }

Registry bundled_registry() {
    const auto seeds = bundled_seeds();
    const auto entries = registry_entries_from_seeds(seeds);
    return Registry::load(entries);
}

std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("toolplanner_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

} // namespace fixtures

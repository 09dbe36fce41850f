// SPDX-License-Identifier: Apache-2.0
//
// Shared fixtures: the small travel registry, the two-tree episode with
// solutions S1..S8, and the beach-party seed.
#pragma once

#include "toolplanner/corpus.hpp"
#include "toolplanner/registry.hpp"
#include "toolplanner/tree_engine.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace fixtures {

using namespace toolplanner;

std::filesystem::path source_dir();
std::filesystem::path fixture_path(const std::string& relative);

// Travel -> Priceline {A1, A2, A3}, BookingX {A4}; Transportation -> ADSBx
// {B1, B2, B3}; Data -> Weather {C1, C2}.
std::vector<RegistryEntry> travel_entries();
Registry travel_registry();

/// Instruction whose gold tags come from the path A1, A2, B1.
Instruction travel_instruction(Level level = Level::Tool);

inline const std::string kAnswer = "Flights AB12 and CD34 land before noon; Priceline lists hotel rooms from $89.";

Round tool(const std::string& api);
Round give_up();
Round answer(const std::string& text = kAnswer);

/// Tree 1: A1 -> {A2 -> {A3 -> give up, B1 -> give up}, C1 -> {give up, answer}}
/// Tree 2: A1 -> {A3 -> give up, B2 -> {C2 -> give up, B3 -> {A3 (round limit), answer}}}
std::vector<SolutionTree> travel_trees();
/// Episode over travel_trees with the rightmost answer as final.
Episode travel_episode(const std::string& instruction_id);

/// Node id of the round reached by following `actions` from the root of
/// tree `tree_index` ("Finish" matches any Finish round).
int node_of(const std::vector<SolutionTree>& trees, int tree_index, const std::vector<std::string>& actions);

SeedTask beach_seed();
SeedTask trivia_seed();

std::vector<SeedTask> bundled_seeds();
Registry bundled_registry();

/// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);
std::string slurp(const std::filesystem::path& path);

} // namespace fixtures

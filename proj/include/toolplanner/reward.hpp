// SPDX-License-Identifier: Apache-2.0
//
// Pass / Match labels, the four-valued solution reward and its propagation
// to rounds.
#pragma once

#include "toolplanner/common.hpp"
#include "toolplanner/corpus.hpp"
#include "toolplanner/registry.hpp"
#include "toolplanner/tree_engine.hpp"

#include <span>
#include <string>
#include <vector>

namespace toolplanner {

struct RewardConfig {
    /// Case-insensitive substrings that make a final answer meaningless.
    std::vector<std::string> give_up_patterns{"sorry", "i couldn't", "unable to", "cannot handle"};
};

bool is_meaningful_answer(std::string_view answer, const RewardConfig& config = {});

/// give_answer leaf with a meaningful final answer.
bool is_pass(const Solution& solution, const RewardConfig& config = {});

/// Accessed names at `level` (through the registry) equal the gold names
/// as sets. Finish is never an accessed name. Throws UnknownApi.
bool match_at_level(std::span<const std::string> accessed_apis, const TagList& gold, TagLevel level,
                    const Registry& registry);
bool match_at_level(const Solution& solution, const TagList& gold, TagLevel level, const Registry& registry);

struct RewardLabel {
    bool pass = false;
    bool match_category = false;
    bool match_tool = false;
    bool match_api = false;

    bool match(TagLevel level) const;
    bool operator==(const RewardLabel&) const = default;
};

RewardLabel label_solution(const Solution& solution, const TagList& gold, const Registry& registry,
                           const RewardConfig& config = {});

/// Match requirement of an instruction level: nothing for Statement, the
/// category for Category, tool and category for Tool, all three for API and
/// Hybrid.
bool meets_instruction_level(const RewardLabel& label, Level level);

/// (pass, match) -> 1, (fail, match) -> -1, (pass, miss) -> -2, (fail, miss) -> -3.
int reward_value(bool pass, bool match);

int score_solution(const Solution& solution, const Instruction& instruction, const Registry& registry,
                   const RewardConfig& config = {});

/// Highest score among the solutions that pass through the node.
int round_reward(int tree_index, int node_id, std::span<const SolutionTree> trees, const Instruction& instruction,
                 const Registry& registry, const RewardConfig& config = {});

struct SolutionScore {
    std::string solution_id;
    int tree_index = 1;
    int leaf_node = 0;
    RewardLabel label;
    int score = 0;

    bool operator==(const SolutionScore&) const = default;
};

/// Scores every enumerated solution; ids are S1, S2, ... in enumeration order.
std::vector<SolutionScore> score_episode(const Episode& episode, const Instruction& instruction,
                                         const Registry& registry, const RewardConfig& config = {});

/// "score" records for the episode dump.
std::vector<std::string> dump_scores(const std::string& episode_id, std::span<const SolutionScore> scores);
std::vector<SolutionScore> parse_score_records(std::span<const std::string> lines, const std::string& episode_id);

} // namespace toolplanner

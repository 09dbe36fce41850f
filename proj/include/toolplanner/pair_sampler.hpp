// SPDX-License-Identifier: Apache-2.0
//
// Pairwise (positive, negative | history) responses from scored trees.
#pragma once

#include "toolplanner/common.hpp"
#include "toolplanner/corpus.hpp"
#include "toolplanner/registry.hpp"
#include "toolplanner/reward.hpp"
#include "toolplanner/tree_engine.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace toolplanner {

struct PairOptions {
    /// Plan recorded with each pair for featurization. Defaults to the gold
    /// APIs followed by Finish.
    std::optional<SolutionPath> plan;
    RewardConfig reward;
};

struct SampledNegative {
    RoundProposal round;
    NegativeOrigin origin = NegativeOrigin::GiveUp;
    /// Reward of the hypothetical solution history + round.
    int reward = -3;
};

/// Strategies usable after `history` for this instruction:
///   GiveUp           always;
///   OtherTool        when the instruction has a tag requirement and the
///                    registry holds an API whose name at that level is
///                    outside the gold tags;
///   PrematureAnswer  when answering right after `history` scores below 0.
std::vector<NegativeOrigin> applicable_strategies(std::span<const RoundProposal> history,
                                                  const Instruction& instruction, const Registry& registry,
                                                  const RewardConfig& config = {});

/// Reward of the solution history + round, scored as if the round were its
/// leaf (a tool round is treated as an unfinished path).
int hypothetical_reward(std::span<const RoundProposal> history, const RoundProposal& round,
                        const Instruction& instruction, const Registry& registry, const RewardConfig& config = {});

/// Picks one applicable strategy uniformly and builds its round. Other-tool
/// candidates prefer APIs whose category is also outside the gold tags.
/// The result is verified to score below 0; GiveUp is the fallback.
SampledNegative sample_negative(const RoundProposal& positive, std::span<const RoundProposal> history,
                                std::span<const SolutionTree> trees, const Instruction& instruction,
                                const Registry& registry, Rng& rng, const RewardConfig& config = {});

/// For every round of every reward-1 solution: one pair per distinct
/// negative-reward round sharing its history (across trees, in creation
/// order), or a single sampled negative when there is none. Pairs are
/// deduplicated on (history, positive, negative).
std::vector<PairwiseResponse> extract_pairs(std::span<const SolutionTree> trees, const Instruction& instruction,
                                            const Registry& registry, Rng& rng, const PairOptions& options = {});

/// Distinct (history, positive) rounds of a pair list, in first-seen order.
std::vector<PositiveRound> positives_from_pairs(std::span<const PairwiseResponse> pairs);

struct PairReport {
    std::size_t total = 0;
    std::map<NegativeOrigin, std::size_t> by_origin;
};

/// Throws InvariantViolation naming the first bad pair index.
PairReport validate_pairs(std::span<const PairwiseResponse> pairs);

} // namespace toolplanner

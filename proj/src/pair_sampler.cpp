// SPDX-License-Identifier: Apache-2.0
#include "toolplanner/pair_sampler.hpp"

#include "toolplanner/policy.hpp"

#include <algorithm>
#include <set>

namespace toolplanner {

namespace {

std::string history_key(std::span<const RoundProposal> history) {
    std::string out;
    for (const auto& round : history) {
        out += round.key();
        out += '\x1e';
    }
    return out;
}

std::vector<Round> as_rounds(std::span<const RoundProposal> history) {
    std::vector<Round> out;
    for (const auto& proposal : history) {
        Round round;
        static_cast<RoundProposal&>(round) = proposal;
        out.push_back(std::move(round));
    }
    return out;
}

std::vector<std::string> other_tool_candidates(const Instruction& instruction, const Registry& registry) {
    const auto required = required_tag_level(instruction.level);
    if (!required) return {};
    const auto& gold_names = instruction.gold_tags.at(*required);
    const std::set<std::string> gold(gold_names.begin(), gold_names.end());
    const std::set<std::string> gold_categories(instruction.gold_tags.categories.begin(),
                                                instruction.gold_tags.categories.end());
    std::vector<std::string> outside;
    std::vector<std::string> far;
    for (const auto& api : registry.apis()) {
        if (gold.contains(registry.resolve(api, *required))) continue;
        outside.push_back(api);
        if (!gold_categories.contains(registry.category_of(api))) far.push_back(api);
    }
    return far.empty() ? outside : far;
}

RoundProposal premature_answer(std::span<const RoundProposal> history) {
    const auto rounds = as_rounds(history);
    return finish_round(FinishKind::GiveAnswer, summarize_answer(rounds), "I think I can answer already.");
}

} // namespace

int hypothetical_reward(std::span<const RoundProposal> history, const RoundProposal& round,
                        const Instruction& instruction, const Registry& registry, const RewardConfig& config) {
    Solution solution;
    solution.rounds = as_rounds(history);
    Round last;
    static_cast<RoundProposal&>(last) = round;
    solution.rounds.push_back(std::move(last));
    if (!round.finish) {
        solution.leaf = LeafKind::RoundLimit;
    } else {
        solution.leaf = round.finish->kind == FinishKind::GiveAnswer ? LeafKind::GiveAnswer : LeafKind::GiveUp;
    }
    return score_solution(solution, instruction, registry, config);
}

std::vector<NegativeOrigin> applicable_strategies(std::span<const RoundProposal> history,
                                                  const Instruction& instruction, const Registry& registry,
                                                  const RewardConfig& config) {
    std::vector<NegativeOrigin> out{NegativeOrigin::GiveUp};
    if (!other_tool_candidates(instruction, registry).empty()) out.push_back(NegativeOrigin::OtherTool);
    if (hypothetical_reward(history, premature_answer(history), instruction, registry, config) < 0) {
        out.push_back(NegativeOrigin::PrematureAnswer);
    }
    return out;
}

SampledNegative sample_negative(const RoundProposal& positive, std::span<const RoundProposal> history,
                                std::span<const SolutionTree> trees, const Instruction& instruction,
                                const Registry& registry, Rng& rng, const RewardConfig& config) {
    (void)trees;  // sampled negatives are virtual rounds, never tree nodes
    const auto strategies = applicable_strategies(history, instruction, registry, config);
    const auto origin = strategies[uniform_index(rng, strategies.size())];

    SampledNegative out;
    out.origin = origin;
    switch (origin) {
    case NegativeOrigin::OtherTool: {
        const auto candidates = other_tool_candidates(instruction, registry);
        const auto& api = candidates[uniform_index(rng, candidates.size())];
        out.round = call_round(api, "{}", "Let me try " + api + " instead.");
        break;
    }
    case NegativeOrigin::PrematureAnswer:
        out.round = premature_answer(history);
        break;
    case NegativeOrigin::GiveUp:
    case NegativeOrigin::Sibling:
        out.origin = NegativeOrigin::GiveUp;
        out.round = finish_round(FinishKind::GiveUpAndRestart, std::nullopt, "I give up and restart.");
        break;
    }
    out.reward = hypothetical_reward(history, out.round, instruction, registry, config);
    if (out.reward >= 0 || out.round.key() == positive.key()) {
        out.origin = NegativeOrigin::GiveUp;
        out.round = finish_round(FinishKind::GiveUpAndRestart, std::nullopt, "I give up and restart.");
        out.reward = hypothetical_reward(history, out.round, instruction, registry, config);
        if (out.reward >= 0 || out.round.key() == positive.key()) {
            fail(ErrorCode::NoApplicableStrategy, "no negative round scores below 0 after this history");
        }
    }
    return out;
}

std::vector<PairwiseResponse> extract_pairs(std::span<const SolutionTree> trees, const Instruction& instruction,
                                            const Registry& registry, Rng& rng, const PairOptions& options) {
    const auto plan = options.plan ? *options.plan : make_path(instruction.gold_tags.apis);
    const auto solutions = enumerate_solutions(trees);
    std::vector<int> scores;
    for (const auto& solution : solutions) scores.push_back(score_solution(solution, instruction, registry, options.reward));

    // Round reward per (tree, node): the max over solutions through it.
    std::map<std::pair<int, int>, int> node_reward;
    for (std::size_t i = 0; i < solutions.size(); ++i) {
        for (int id : solutions[i].node_ids) {
            auto [it, inserted] = node_reward.emplace(std::pair{solutions[i].tree_index, id}, scores[i]);
            if (!inserted) it->second = std::max(it->second, scores[i]);
        }
    }

    // Rounds grouped by the history they extend, across trees, in creation
    // order. Rounds with the same key collapse, keeping the best reward.
    struct Alternative {
        std::string key;
        RoundProposal round;
        int reward;
    };
    std::map<std::string, std::vector<Alternative>> alternatives;
    for (const auto& tree : trees) {
        for (std::size_t id = 1; id < tree.nodes.size(); ++id) {
            std::vector<RoundProposal> history;
            for (int step : tree.path_to(tree.nodes[id].parent)) history.push_back(tree.nodes[static_cast<std::size_t>(step)].round);
            const auto& round = tree.nodes[id].round;
            const int reward = node_reward.at({tree.tree_index, static_cast<int>(id)});
            auto& group = alternatives[history_key(history)];
            auto it = std::find_if(group.begin(), group.end(), [&](const Alternative& a) { return a.key == round.key(); });
            if (it == group.end()) {
                group.push_back({round.key(), round, reward});
            } else {
                it->reward = std::max(it->reward, reward);
            }
        }
    }

    std::vector<PairwiseResponse> pairs;
    std::set<std::string> seen;
    const auto emit = [&](const std::vector<RoundProposal>& history, const RoundProposal& positive,
                          const RoundProposal& negative, int negative_reward, NegativeOrigin origin) {
        const auto identity = history_key(history) + '\x1d' + positive.key() + '\x1d' + negative.key();
        if (!seen.insert(identity).second) return;
        PairwiseResponse pair;
        pair.instruction_id = instruction.id;
        pair.path = plan;
        pair.history = history;
        pair.positive = positive;
        pair.negative = negative;
        pair.positive_reward = 1;
        pair.negative_reward = negative_reward;
        pair.origin = origin;
        pairs.push_back(std::move(pair));
    };

    for (std::size_t i = 0; i < solutions.size(); ++i) {
        if (scores[i] != 1) continue;
        const auto& solution = solutions[i];
        std::vector<RoundProposal> history;
        for (const auto& round : solution.rounds) {
            const RoundProposal positive = round;
            bool paired = false;
            if (auto it = alternatives.find(history_key(history)); it != alternatives.end()) {
                for (const auto& alt : it->second) {
                    if (alt.key == positive.key() || alt.reward >= 0) continue;
                    emit(history, positive, alt.round, alt.reward, NegativeOrigin::Sibling);
                    paired = true;
                }
            }
            if (!paired) {
                const auto negative = sample_negative(positive, history, trees, instruction, registry, rng, options.reward);
                emit(history, positive, negative.round, negative.reward, negative.origin);
            }
            history.push_back(positive);
        }
    }
    return pairs;
}

std::vector<PositiveRound> positives_from_pairs(std::span<const PairwiseResponse> pairs) {
    std::vector<PositiveRound> out;
    std::set<std::string> seen;
    for (const auto& pair : pairs) {
        const auto identity = pair.instruction_id + '\x1d' + history_key(pair.history) + '\x1d' + pair.positive.key();
        if (!seen.insert(identity).second) continue;
        out.push_back({pair.instruction_id, pair.path, pair.history, pair.positive});
    }
    return out;
}

PairReport validate_pairs(std::span<const PairwiseResponse> pairs) {
    PairReport report;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& pair = pairs[i];
        const auto violation = [&](const std::string& what) {
            fail(ErrorCode::InvariantViolation, "pair " + std::to_string(i) + ": " + what);
        };
        if (pair.positive_reward != 1) violation("positive reward is " + std::to_string(pair.positive_reward));
        if (pair.negative_reward >= 0) violation("negative reward is " + std::to_string(pair.negative_reward));
        if (pair.positive.key() == pair.negative.key()) violation("positive and negative are the same round");
        if ((pair.positive.action == kFinish) != pair.positive.finish.has_value() ||
            (pair.negative.action == kFinish) != pair.negative.finish.has_value()) {
            violation("round with inconsistent Finish payload");
        }
        ++report.total;
        ++report.by_origin[pair.origin];
    }
    return report;
}

} // namespace toolplanner

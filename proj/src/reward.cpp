// SPDX-License-Identifier: Apache-2.0
#include "toolplanner/reward.hpp"

#include "json_util.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace toolplanner {

using detail::ordered_json;

bool is_meaningful_answer(std::string_view answer, const RewardConfig& config) {
    if (trim(answer).empty()) return false;
    return std::none_of(config.give_up_patterns.begin(), config.give_up_patterns.end(),
                        [&](const std::string& pattern) { return contains_ci(answer, pattern); });
}

bool is_pass(const Solution& solution, const RewardConfig& config) {
    const auto answer = solution.final_answer();
    return answer && is_meaningful_answer(*answer, config);
}

bool match_at_level(std::span<const std::string> accessed_apis, const TagList& gold, TagLevel level,
                    const Registry& registry) {
    std::set<std::string> accessed;
    for (const auto& api : accessed_apis) {
        if (api == kFinish) continue;
        accessed.insert(registry.resolve(api, level));
    }
    const auto& names = gold.at(level);
    const std::set<std::string> wanted(names.begin(), names.end());
    return accessed == wanted;
}

bool match_at_level(const Solution& solution, const TagList& gold, TagLevel level, const Registry& registry) {
    const auto actions = solution.actions();
    return match_at_level(actions, gold, level, registry);
}

bool RewardLabel::match(TagLevel level) const {
    switch (level) {
    case TagLevel::Category: return match_category;
    case TagLevel::Tool: return match_tool;
    case TagLevel::Api: return match_api;
    }
    return false;
}

RewardLabel label_solution(const Solution& solution, const TagList& gold, const Registry& registry,
                           const RewardConfig& config) {
    const auto actions = solution.actions();
    RewardLabel label;
    label.pass = is_pass(solution, config);
    label.match_category = match_at_level(actions, gold, TagLevel::Category, registry);
    label.match_tool = match_at_level(actions, gold, TagLevel::Tool, registry);
    label.match_api = match_at_level(actions, gold, TagLevel::Api, registry);
    return label;
}

bool meets_instruction_level(const RewardLabel& label, Level level) {
    const auto required = required_tag_level(level);
    if (!required) return true;
    for (auto tag_level : kAllTagLevels) {
        if (!label.match(tag_level)) return false;
        if (tag_level == *required) break;
    }
    return true;
}

int reward_value(bool pass, bool match) {
    if (pass && match) return 1;
    if (match) return -1;
    if (pass) return -2;
    return -3;
}

int score_solution(const Solution& solution, const Instruction& instruction, const Registry& registry,
                   const RewardConfig& config) {
    const auto label = label_solution(solution, instruction.gold_tags, registry, config);
    return reward_value(label.pass, meets_instruction_level(label, instruction.level));
}

int round_reward(int tree_index, int node_id, std::span<const SolutionTree> trees, const Instruction& instruction,
                 const Registry& registry, const RewardConfig& config) {
    int best = std::numeric_limits<int>::min();
    for (const auto& solution : enumerate_solutions(trees)) {
        if (!solution.contains(tree_index, node_id)) continue;
        best = std::max(best, score_solution(solution, instruction, registry, config));
    }
    if (best == std::numeric_limits<int>::min()) {
        fail(ErrorCode::InvalidRequest, "node " + std::to_string(node_id) + " of tree " + std::to_string(tree_index) +
                                            " lies on no solution");
    }
    return best;
}

std::vector<SolutionScore> score_episode(const Episode& episode, const Instruction& instruction,
                                         const Registry& registry, const RewardConfig& config) {
    std::vector<SolutionScore> out;
    const auto solutions = enumerate_solutions(episode.trees);
    for (std::size_t i = 0; i < solutions.size(); ++i) {
        const auto& solution = solutions[i];
        SolutionScore score;
        score.solution_id = "S" + std::to_string(i + 1);
        score.tree_index = solution.tree_index;
        score.leaf_node = solution.node_ids.back();
        score.label = label_solution(solution, instruction.gold_tags, registry, config);
        score.score = reward_value(score.label.pass, meets_instruction_level(score.label, instruction.level));
        out.push_back(std::move(score));
    }
    return out;
}

std::vector<std::string> dump_scores(const std::string& episode_id, std::span<const SolutionScore> scores) {
    std::vector<std::string> lines;
    for (const auto& score : scores) {
        ordered_json doc;
        doc["record"] = "score";
        doc["episode"] = episode_id;
        doc["solution_id"] = score.solution_id;
        doc["tree_index"] = score.tree_index;
        doc["leaf_node"] = score.leaf_node;
        doc["pass"] = score.label.pass;
        doc["match"] = {{"category", score.label.match_category},
                        {"tool", score.label.match_tool},
                        {"api", score.label.match_api}};
        doc["score"] = score.score;
        lines.push_back(detail::dump_line(doc));
    }
    return lines;
}

std::vector<SolutionScore> parse_score_records(std::span<const std::string> lines, const std::string& episode_id) {
    std::vector<SolutionScore> out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto what = "score record " + std::to_string(i + 1);
        const auto doc = detail::parse_json(lines[i], what);
        if (detail::optional_string(doc, "record") != "score") continue;
        if (detail::require_string(doc, "episode", what) != episode_id) continue;
        const auto flag = [&](const detail::json& obj, const char* key) {
            const auto& value = detail::require(obj, key, what);
            if (!value.is_boolean()) fail(ErrorCode::MalformedRecord, what + ": '" + key + "' is not a boolean");
            return value.get<bool>();
        };
        const auto integer = [&](const char* key) {
            const auto& value = detail::require(doc, key, what);
            if (!value.is_number_integer()) fail(ErrorCode::MalformedRecord, what + ": '" + key + "' is not an integer");
            return value.get<int>();
        };
        SolutionScore score;
        score.solution_id = detail::require_string(doc, "solution_id", what);
        score.tree_index = integer("tree_index");
        score.leaf_node = integer("leaf_node");
        score.label.pass = flag(doc, "pass");
        const auto& match = detail::require(doc, "match", what);
        score.label.match_category = flag(match, "category");
        score.label.match_tool = flag(match, "tool");
        score.label.match_api = flag(match, "api");
        score.score = integer("score");
        out.push_back(std::move(score));
    }
    return out;
}

} // namespace toolplanner

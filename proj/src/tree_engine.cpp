// SPDX-License-Identifier: Apache-2.0
#include "toolplanner/tree_engine.hpp"

#include "json_util.hpp"

#include <algorithm>
#include <map>

namespace toolplanner {

using detail::json;
using detail::ordered_json;

std::string_view to_string(LeafKind kind) {
    switch (kind) {
    case LeafKind::None: return "none";
    case LeafKind::GiveAnswer: return "give_answer";
    case LeafKind::GiveUp: return "give_up_and_restart";
    case LeafKind::RoundLimit: return "round_limit";
    }
    return "none";
}

LeafKind parse_leaf_kind(std::string_view text) {
    if (text == "none") return LeafKind::None;
    if (text == "give_answer") return LeafKind::GiveAnswer;
    if (text == "give_up_and_restart") return LeafKind::GiveUp;
    if (text == "round_limit") return LeafKind::RoundLimit;
    fail(ErrorCode::MalformedRecord, "unknown leaf kind '" + std::string(text) + "'");
}

SolutionTree::SolutionTree() : SolutionTree(1) {}

SolutionTree::SolutionTree(int index) : tree_index(index) {
    TreeNode root;
    root.id = 0;
    nodes.push_back(std::move(root));
}

int SolutionTree::add(int parent, Round round, LeafKind leaf) {
    if (parent < 0 || static_cast<std::size_t>(parent) >= nodes.size()) {
        fail(ErrorCode::InvalidRequest, "parent node " + std::to_string(parent) + " does not exist");
    }
    TreeNode node;
    node.id = static_cast<int>(nodes.size());
    node.parent = parent;
    node.round = std::move(round);
    node.leaf = leaf;
    node.depth = nodes[static_cast<std::size_t>(parent)].depth + 1;
    nodes[static_cast<std::size_t>(parent)].children.push_back(node.id);
    nodes.push_back(std::move(node));
    return nodes.back().id;
}

std::vector<int> SolutionTree::path_to(int node) const {
    std::vector<int> out;
    for (int at = node; at > 0; at = nodes.at(static_cast<std::size_t>(at)).parent) out.push_back(at);
    std::reverse(out.begin(), out.end());
    return out;
}

std::optional<std::string> Solution::final_answer() const {
    if (leaf != LeafKind::GiveAnswer || rounds.empty() || !rounds.back().finish) return std::nullopt;
    return rounds.back().finish->final_answer;
}

std::vector<std::string> Solution::actions() const {
    std::vector<std::string> out;
    for (const auto& round : rounds) {
        if (!round.is_finish()) out.push_back(round.action);
    }
    return out;
}

bool Solution::contains(int tree, int node_id) const {
    return tree == tree_index && std::find(node_ids.begin(), node_ids.end(), node_id) != node_ids.end();
}

void EngineLimits::validate() const {
    if (max_rounds_per_path == 0 || max_children == 0 || max_trees == 0 || max_total_rounds == 0) {
        fail(ErrorCode::InvalidRequest, "engine limits must all be positive");
    }
}

EngineLimits EngineLimits::chain(std::size_t attempts) {
    EngineLimits limits;
    limits.max_children = 1;
    limits.max_trees = attempts;
    return limits;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<Round> history_of(const SolutionTree& tree, int node) {
    std::vector<Round> out;
    for (int id : tree.path_to(node)) out.push_back(tree.nodes[static_cast<std::size_t>(id)].round);
    return out;
}

std::size_t capacity(const SolutionTree& tree, int node, const EngineLimits& limits) {
    // The virtual root holds a single first round; restarts below it happen
    // inside that subtree, and a fresh start means a new tree.
    (void)tree;
    return node == 0 ? 1 : limits.max_children;
}

Solution make_solution(const SolutionTree& tree, int leaf) {
    Solution solution;
    solution.tree_index = tree.tree_index;
    solution.node_ids = tree.path_to(leaf);
    for (int id : solution.node_ids) solution.rounds.push_back(tree.nodes[static_cast<std::size_t>(id)].round);
    solution.leaf = tree.nodes[static_cast<std::size_t>(leaf)].leaf;
    return solution;
}

} // namespace

Episode generate_tree(const TaskContext& task, Policy& policy, const EnvFixture& env, const EngineLimits& limits,
                      Rng& rng) {
    limits.validate();
    Episode episode;
    episode.instruction_id = task.instruction.id;
    CallCounter counter;

    for (std::size_t t = 1; t <= limits.max_trees; ++t) {
        if (episode.total_rounds >= limits.max_total_rounds) break;
        SolutionTree tree(static_cast<int>(t));
        int current = 0;
        bool finished = false;
        while (true) {
            if (episode.total_rounds >= limits.max_total_rounds) {
                auto& node = tree.nodes[static_cast<std::size_t>(current)];
                if (current != 0 && node.children.empty()) node.leaf = LeafKind::RoundLimit;
                episode.budget_exhausted = true;
                break;
            }
            RoundState state;
            state.task = &task;
            state.history = history_of(tree, current);
            state.step = episode.total_rounds;
            state.tree_index = tree.tree_index;
            for (int child : tree.nodes[static_cast<std::size_t>(current)].children) {
                state.tried.push_back(tree.nodes[static_cast<std::size_t>(child)].round);
            }

            Round round;
            static_cast<RoundProposal&>(round) = propose_round(state, policy, rng);
            if (!round.is_finish()) {
                try {
                    round.observation = execute(make_request(round), env, counter);
                } catch (const Error& e) {
                    // Unusable arguments are reported back like any tool error.
                    round.observation = {std::string(to_string(e.code())) + ": " + e.what(), ""};
                }
            }
            const bool is_finish = round.is_finish();
            const auto kind = is_finish ? round.finish->kind : FinishKind::GiveAnswer;
            const int id = tree.add(current, std::move(round));
            ++episode.total_rounds;
            auto& node = tree.nodes[static_cast<std::size_t>(id)];

            if (is_finish && kind == FinishKind::GiveAnswer) {
                node.leaf = LeafKind::GiveAnswer;
                episode.final = make_solution(tree, id);
                finished = true;
                break;
            }
            if (is_finish) {
                node.leaf = LeafKind::GiveUp;
            } else if (static_cast<std::size_t>(node.depth) >= limits.max_rounds_per_path) {
                node.leaf = LeafKind::RoundLimit;
            } else {
                current = id;
                continue;
            }
            // Backtrack to the deepest ancestor that can take another child.
            int at = tree.nodes[static_cast<std::size_t>(id)].parent;
            while (at >= 0 && tree.nodes[static_cast<std::size_t>(at)].children.size() >= capacity(tree, at, limits)) {
                at = tree.nodes[static_cast<std::size_t>(at)].parent;
            }
            if (at < 0) break;
            current = at;
        }
        episode.trees.push_back(std::move(tree));
        if (finished || episode.budget_exhausted) break;
    }
    return episode;
}

std::vector<Solution> enumerate_solutions(const SolutionTree& tree) {
    std::vector<Solution> out;
    // Explicit stack, children pushed in reverse to visit left to right.
    std::vector<int> stack(tree.nodes.front().children.rbegin(), tree.nodes.front().children.rend());
    while (!stack.empty()) {
        const int id = stack.back();
        stack.pop_back();
        const auto& node = tree.nodes[static_cast<std::size_t>(id)];
        if (node.children.empty()) {
            out.push_back(make_solution(tree, id));
            continue;
        }
        stack.insert(stack.end(), node.children.rbegin(), node.children.rend());
    }
    return out;
}

std::vector<Solution> enumerate_solutions(std::span<const SolutionTree> trees) {
    std::vector<Solution> out;
    for (const auto& tree : trees) {
        auto part = enumerate_solutions(tree);
        out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    return out;
}

std::optional<Solution> final_solution(std::span<const SolutionTree> trees) {
    std::optional<Solution> found;
    for (auto& solution : enumerate_solutions(trees)) {
        if (solution.leaf == LeafKind::GiveAnswer) found = std::move(solution);
    }
    return found;
}

SolutionPath extract_solution_path(const Solution& solution) {
    if (solution.rounds.empty()) fail(ErrorCode::InvalidRequest, "solution has no rounds");
    return make_path(solution.actions());
}

SolutionPath extract_solution_path(const SolutionTrace& trace) { return make_path(trace.actions()); }

SolutionTrace solution_trace(const Solution& solution) {
    std::vector<Message> messages;
    for (const auto& round : solution.rounds) {
        Message call;
        call.role = Role::Assistant;
        call.content = round.thought;
        call.function_call = FunctionCall{round.action, round.action_input};
        messages.push_back(std::move(call));
        if (round.is_finish()) break;
        Message obs;
        obs.role = Role::Function;
        obs.content = observation_text(round.observation);
        messages.push_back(std::move(obs));
    }
    return parse_solution_trace(messages);
}

// ---------------------------------------------------------------------------

StructureReport inspect(const Episode& episode) {
    StructureReport report;
    report.trees = episode.trees.size();
    for (const auto& tree : episode.trees) {
        report.total_rounds += tree.rounds();
        report.max_root_children = std::max(report.max_root_children, tree.nodes.front().children.size());
        for (std::size_t i = 1; i < tree.nodes.size(); ++i) {
            const auto& node = tree.nodes[i];
            report.max_children = std::max(report.max_children, node.children.size());
            report.max_path_rounds = std::max(report.max_path_rounds, static_cast<std::size_t>(node.depth));
            if (node.leaf == LeafKind::GiveAnswer) ++report.give_answer_leaves;
            if (node.children.empty() && node.leaf == LeafKind::None) ++report.unmarked_leaves;
        }
    }
    return report;
}

void check_structure(const Episode& episode, const EngineLimits& limits) {
    const auto report = inspect(episode);
    const auto violation = [&](const std::string& what) {
        fail(ErrorCode::InvariantViolation, "episode " + episode.instruction_id + ": " + what);
    };
    if (report.trees > limits.max_trees) violation(std::to_string(report.trees) + " trees");
    if (report.total_rounds > limits.max_total_rounds) violation(std::to_string(report.total_rounds) + " rounds");
    if (report.total_rounds != episode.total_rounds) violation("round count disagrees with the trees");
    if (report.max_children > limits.max_children) violation("a node has " + std::to_string(report.max_children) + " children");
    if (report.max_root_children > 1) violation("a root has more than one first round");
    if (report.max_path_rounds > limits.max_rounds_per_path) {
        violation("a path has " + std::to_string(report.max_path_rounds) + " rounds");
    }
    if (report.give_answer_leaves > 1) violation("more than one give_answer leaf");
    if (report.unmarked_leaves > 0) violation("a childless node has no leaf kind");
    const auto final = final_solution(episode.trees);
    if (final != episode.final) violation("recorded final solution is not the give_answer path");
    if (final) {
        const auto all = enumerate_solutions(episode.trees);
        if (!(all.back() == *final)) violation("final solution is not the rightmost path");
    }
}

// ---------------------------------------------------------------------------

std::vector<std::string> dump_episode(const Episode& episode) {
    std::vector<std::string> lines;
    ordered_json header;
    header["record"] = "episode";
    header["episode"] = episode.instruction_id;
    header["trees"] = episode.trees.size();
    header["total_rounds"] = episode.total_rounds;
    header["budget_exhausted"] = episode.budget_exhausted;
    if (episode.final) {
        header["final"] = {{"tree_index", episode.final->tree_index}, {"node_id", episode.final->node_ids.back()}};
    } else {
        header["final"] = nullptr;
    }
    lines.push_back(detail::dump_line(header));
    for (const auto& tree : episode.trees) {
        for (std::size_t i = 1; i < tree.nodes.size(); ++i) {
            const auto& node = tree.nodes[i];
            ordered_json doc;
            doc["record"] = "node";
            doc["episode"] = episode.instruction_id;
            doc["tree_index"] = tree.tree_index;
            doc["node_id"] = node.id;
            doc["parent_id"] = node.parent;
            doc["round"] = detail::round_to_json(node.round);
            doc["leaf"] = std::string(to_string(node.leaf));
            lines.push_back(detail::dump_line(doc));
        }
    }
    return lines;
}

namespace {

int require_index(const json& doc, const char* key, std::string_view what) {
    const auto& value = detail::require(doc, key, what);
    if (!value.is_number_integer()) fail(ErrorCode::MalformedRecord, std::string(what) + ": '" + key + "' is not an integer");
    return value.get<int>();
}

} // namespace

std::vector<Episode> parse_episode_dump(std::span<const std::string> lines) {
    std::vector<Episode> episodes;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto what = "episode dump line " + std::to_string(i + 1);
        const auto doc = detail::parse_json(lines[i], what);
        const auto kind = detail::require_string(doc, "record", what);
        if (kind == "episode") {
            Episode episode;
            episode.instruction_id = detail::require_string(doc, "episode", what);
            episode.total_rounds = static_cast<std::size_t>(require_index(doc, "total_rounds", what));
            const auto& flag = detail::require(doc, "budget_exhausted", what);
            episode.budget_exhausted = flag.is_boolean() && flag.get<bool>();
            const auto trees = require_index(doc, "trees", what);
            for (int t = 1; t <= trees; ++t) episode.trees.emplace_back(t);
            const auto& final = detail::require(doc, "final", what);
            if (!final.is_null()) {
                // Resolved after the nodes are read; stash the leaf in the
                // optional as a marker.
                Solution marker;
                marker.tree_index = require_index(final, "tree_index", what);
                marker.node_ids = {require_index(final, "node_id", what)};
                episode.final = std::move(marker);
            }
            episodes.push_back(std::move(episode));
            continue;
        }
        if (kind != "node") continue;
        if (episodes.empty()) fail(ErrorCode::MalformedRecord, what + ": node before any episode header");
        auto& episode = episodes.back();
        if (detail::require_string(doc, "episode", what) != episode.instruction_id) {
            fail(ErrorCode::MalformedRecord, what + ": node belongs to a different episode");
        }
        const auto t = require_index(doc, "tree_index", what);
        if (t < 1 || static_cast<std::size_t>(t) > episode.trees.size()) {
            fail(ErrorCode::MalformedRecord, what + ": tree index out of range");
        }
        auto& tree = episode.trees[static_cast<std::size_t>(t - 1)];
        const auto id = require_index(doc, "node_id", what);
        const auto parent = require_index(doc, "parent_id", what);
        if (id != static_cast<int>(tree.nodes.size()) || parent < 0 || parent >= id) {
            fail(ErrorCode::MalformedRecord, what + ": nodes must be listed in creation order");
        }
        tree.add(parent, detail::round_from_json(detail::require(doc, "round", what), what),
                 parse_leaf_kind(detail::require_string(doc, "leaf", what)));
    }
    for (auto& episode : episodes) {
        if (!episode.final) continue;
        const auto tree_index = episode.final->tree_index;
        const auto leaf = episode.final->node_ids.front();
        if (tree_index < 1 || static_cast<std::size_t>(tree_index) > episode.trees.size() || leaf < 1 ||
            static_cast<std::size_t>(leaf) >= episode.trees[static_cast<std::size_t>(tree_index - 1)].nodes.size()) {
            fail(ErrorCode::MalformedRecord, "episode " + episode.instruction_id + ": final node does not exist");
        }
        episode.final = make_solution(episode.trees[static_cast<std::size_t>(tree_index - 1)], leaf);
    }
    return episodes;
}

std::size_t write_episodes(std::span<const Episode> episodes, const std::filesystem::path& path) {
    std::vector<std::string> lines;
    for (const auto& episode : episodes) {
        auto part = dump_episode(episode);
        lines.insert(lines.end(), part.begin(), part.end());
    }
    write_lines(lines, path);
    return episodes.size();
}

std::vector<Episode> read_episodes(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    return parse_episode_dump(lines);
}

} // namespace toolplanner

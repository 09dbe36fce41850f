// SPDX-License-Identifier: Apache-2.0
//
// Depth-first solution-tree generation, solution enumeration and the
// line-delimited episode dump.
#pragma once

#include "toolplanner/common.hpp"
#include "toolplanner/corpus.hpp"
#include "toolplanner/policy.hpp"
#include "toolplanner/tool_env.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace toolplanner {

enum class LeafKind { None, GiveAnswer, GiveUp, RoundLimit };
std::string_view to_string(LeafKind kind);
LeafKind parse_leaf_kind(std::string_view text);

struct TreeNode {
    int id = 0;
    /// -1 for the virtual root.
    int parent = -1;
    /// Empty for the virtual root.
    Round round;
    LeafKind leaf = LeafKind::None;
    std::vector<int> children;
    /// Rounds from the root; the root itself is 0.
    int depth = 0;

    bool operator==(const TreeNode&) const = default;
};

/// nodes[0] is the virtual start node. Child lists are in creation order.
struct SolutionTree {
    int tree_index = 1;
    std::vector<TreeNode> nodes;

    SolutionTree();
    explicit SolutionTree(int index);

    /// Appends a node under `parent` and returns its id.
    int add(int parent, Round round, LeafKind leaf = LeafKind::None);
    std::size_t rounds() const { return nodes.size() - 1; }
    /// Node ids from the first round down to `node`.
    std::vector<int> path_to(int node) const;

    bool operator==(const SolutionTree&) const = default;
};

struct Solution {
    int tree_index = 1;
    std::vector<int> node_ids;
    std::vector<Round> rounds;
    LeafKind leaf = LeafKind::None;

    /// Final answer of a give_answer leaf.
    std::optional<std::string> final_answer() const;
    /// Non-Finish actions in order.
    std::vector<std::string> actions() const;
    bool contains(int tree_index, int node_id) const;

    bool operator==(const Solution&) const = default;
};

struct EngineLimits {
    std::size_t max_rounds_per_path = 4;
    std::size_t max_children = 2;
    std::size_t max_trees = 2;
    std::size_t max_total_rounds = 30;

    /// Throws InvalidRequest when any limit is zero.
    void validate() const;
    /// Chain-of-thought baseline: single-child nodes, up to n attempts.
    static EngineLimits chain(std::size_t attempts);
};

struct Episode {
    std::string instruction_id;
    std::vector<SolutionTree> trees;
    std::optional<Solution> final;
    std::size_t total_rounds = 0;
    bool budget_exhausted = false;

    bool operator==(const Episode&) const = default;
};

/// Depth-first expansion. The virtual root takes a single first round; a
/// give-up leaf or a round at the depth limit backtracks to the deepest
/// ancestor with spare capacity; a give_answer leaf ends the episode. When
/// a tree has no spare capacity left, the next tree starts.
Episode generate_tree(const TaskContext& task, Policy& policy, const EnvFixture& env, const EngineLimits& limits,
                      Rng& rng);

/// Root-to-leaf paths in creation order.
std::vector<Solution> enumerate_solutions(const SolutionTree& tree);
std::vector<Solution> enumerate_solutions(std::span<const SolutionTree> trees);

/// The give_answer solution, if any.
std::optional<Solution> final_solution(std::span<const SolutionTree> trees);

SolutionPath extract_solution_path(const Solution& solution);
SolutionPath extract_solution_path(const SolutionTrace& trace);

/// Chat messages for a solution: assistant call, function observation, and
/// the closing Finish call.
SolutionTrace solution_trace(const Solution& solution);

struct StructureReport {
    std::size_t trees = 0;
    std::size_t total_rounds = 0;
    std::size_t max_children = 0;
    std::size_t max_root_children = 0;
    std::size_t max_path_rounds = 0;
    std::size_t give_answer_leaves = 0;
    std::size_t unmarked_leaves = 0;
};

StructureReport inspect(const Episode& episode);
/// Throws InvariantViolation when the episode breaks a limit or the
/// single-final-solution rule.
void check_structure(const Episode& episode, const EngineLimits& limits);

// Episode dump: an "episode" header record followed by one "node" record per
// non-root node. Score records (see reward.hpp) may follow and are skipped
// when reading.
std::vector<std::string> dump_episode(const Episode& episode);
std::vector<Episode> parse_episode_dump(std::span<const std::string> lines);
std::size_t write_episodes(std::span<const Episode> episodes, const std::filesystem::path& path);
std::vector<Episode> read_episodes(const std::filesystem::path& path);

} // namespace toolplanner

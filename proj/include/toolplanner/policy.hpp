// SPDX-License-Identifier: Apache-2.0
//
// Decision-maker contract: tag extraction, solution path planning and
// per-round proposals. Implementations: oracle path follower, scripted
// replay, seeded stochastic, toy softmax and a remote chat-model adapter.
#pragma once

#include "toolplanner/common.hpp"
#include "toolplanner/corpus.hpp"
#include "toolplanner/llm_client.hpp"
#include "toolplanner/registry.hpp"

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace toolplanner {

/// Everything a policy sees about the task being solved.
struct TaskContext {
    Instruction instruction;
    TagList tags;
    SolutionPath path;
};

struct RoundState {
    const TaskContext* task = nullptr;
    /// Rounds from the tree root down to the node being expanded.
    std::vector<Round> history;
    /// Rounds generated so far in the whole episode.
    std::size_t step = 0;
    int tree_index = 1;
    /// Earlier children of the node being expanded, left to right.
    std::vector<RoundProposal> tried;
};

class Policy {
public:
    virtual ~Policy() = default;
    virtual TagList extract_tags(const Instruction& instruction) = 0;
    virtual SolutionPath plan_path(const Instruction& instruction, const TagList& tags) = 0;
    virtual RoundProposal propose_round(const RoundState& state, Rng& rng) = 0;
};

// Checked entry points. They enforce the output invariants (aligned tags,
// well-formed path, action == Finish iff a finish payload) and report
// violations as PolicyFailure.
TagList extract_tags(const Instruction& instruction, Policy& policy);
SolutionPath plan_path(const Instruction& instruction, const TagList& tags, Policy& policy);
RoundProposal propose_round(const RoundState& state, Policy& policy, Rng& rng);

/// Answer text a path follower gives once its plan is executed.
std::string summarize_answer(std::span<const Round> history);

/// Gold tags, a plan made of the gold APIs, and a path-following round
/// policy: call the next planned API, then give the answer.
class OraclePolicy : public Policy {
public:
    TagList extract_tags(const Instruction& instruction) override;
    SolutionPath plan_path(const Instruction& instruction, const TagList& tags) override;
    RoundProposal propose_round(const RoundState& state, Rng& rng) override;
};

/// Replays a fixed proposal sequence indexed by the episode step.
class ScriptedPolicy : public Policy {
public:
    ScriptedPolicy(std::vector<RoundProposal> script, TagList tags, SolutionPath path);
    /// Script made of a trace's rounds; the path is the trace's actions.
    static ScriptedPolicy from_trace(const SolutionTrace& trace, TagList tags);

    TagList extract_tags(const Instruction& instruction) override;
    SolutionPath plan_path(const Instruction& instruction, const TagList& tags) override;
    /// Throws PolicyFailure once the script is exhausted.
    RoundProposal propose_round(const RoundState& state, Rng& rng) override;

    const std::vector<RoundProposal>& script() const { return script_; }

private:
    std::vector<RoundProposal> script_;
    TagList tags_;
    SolutionPath path_;
};

struct StochasticConfig {
    double give_up = 0.15;
    double premature_answer = 0.05;
    double deviate = 0.2;
    /// When set, give_answer is never proposed and the plan is followed
    /// by further random calls instead.
    bool never_finish = false;
    /// APIs a deviation may call. Empty means the planned APIs.
    std::vector<std::string> action_pool;
};

/// Noisy path follower. Each round draws one of give-up, premature answer,
/// deviation to a random API, or the planned step.
class StochasticPolicy : public Policy {
public:
    explicit StochasticPolicy(StochasticConfig config);

    TagList extract_tags(const Instruction& instruction) override;
    SolutionPath plan_path(const Instruction& instruction, const TagList& tags) override;
    RoundProposal propose_round(const RoundState& state, Rng& rng) override;

    /// Presets used for stress runs: "never_finish", "restart_heavy",
    /// "chaotic", "plan_follower".
    static StochasticConfig preset(std::string_view name, std::vector<std::string> action_pool);

private:
    StochasticConfig config_;
};

// ---------------------------------------------------------------------------
// Toy trainable policy

/// Atomic action set: API names plus the two Finish kinds.
class ActionVocab {
public:
    explicit ActionVocab(std::vector<std::string> apis);

    static std::string token(const RoundProposal& round);
    static constexpr std::string_view kGiveAnswer = "Finish:give_answer";
    static constexpr std::string_view kGiveUp = "Finish:give_up_and_restart";

    std::size_t size() const { return keys_.size(); }
    const std::string& key(std::size_t index) const { return keys_.at(index); }
    /// Throws UnknownAction.
    std::size_t index_of(std::string_view key) const;
    std::size_t index_of(const RoundProposal& round) const { return index_of(token(round)); }
    bool contains(std::string_view key) const;
    const std::vector<std::string>& keys() const { return keys_; }

private:
    std::vector<std::string> keys_;
};

/// One feature row per action; the score of action a is theta . row[a].
struct ToyState {
    std::vector<std::vector<double>> rows;

    std::size_t actions() const { return rows.size(); }
};

class ToySoftmaxPolicy {
public:
    ToySoftmaxPolicy(std::size_t dimension, double temperature = 1.0);

    std::size_t dimension() const { return theta_.size(); }
    double temperature() const { return temperature_; }
    std::vector<double>& parameters() { return theta_; }
    const std::vector<double>& parameters() const { return theta_; }

    std::vector<double> logits(const ToyState& state) const;
    std::vector<double> log_probs(const ToyState& state) const;
    /// Throws UnknownAction when action is outside the state's action set.
    double action_logprob(const ToyState& state, std::size_t action) const;
    /// d log p(action | state) / d theta.
    std::vector<double> grad_logprob(const ToyState& state, std::size_t action) const;

private:
    void check(const ToyState& state) const;

    std::vector<double> theta_;
    double temperature_;
};

double action_logprob(const ToySoftmaxPolicy& policy, const ToyState& state, std::size_t action);

/// phi(s, a) = e_a (x) f(s) with f(s) = [bias, rounds-taken one-hot,
/// last-action one-hot, executed flags for each path element].
class Featurizer {
public:
    explicit Featurizer(ActionVocab vocab, std::size_t max_steps = 4, std::size_t path_slots = 8);

    const ActionVocab& vocab() const { return vocab_; }
    std::size_t max_steps() const { return max_steps_; }
    std::size_t path_slots() const { return path_slots_; }
    std::size_t state_width() const;
    std::size_t dimension() const { return vocab_.size() * state_width(); }

    ToyState featurize(const SolutionPath& path, std::span<const RoundProposal> history) const;

private:
    ActionVocab vocab_;
    std::size_t max_steps_;
    std::size_t path_slots_;
};

/// Acts with a toy softmax policy: argmax, or a sample when `sample` is set.
class ToyAgentPolicy : public Policy {
public:
    ToyAgentPolicy(const ToySoftmaxPolicy& model, Featurizer featurizer, bool sample = false);

    TagList extract_tags(const Instruction& instruction) override;
    SolutionPath plan_path(const Instruction& instruction, const TagList& tags) override;
    RoundProposal propose_round(const RoundState& state, Rng& rng) override;

private:
    const ToySoftmaxPolicy& model_;
    Featurizer featurizer_;
    bool sample_;
};

// ---------------------------------------------------------------------------
// Remote chat-model adapter

struct PlannerPrompts {
    std::string tag_extraction;
    std::string path_planning;
    std::string tree_generation;

    static PlannerPrompts load(const std::filesystem::path& dir);
};

/// "Cate_Tag: a, b.\nTool_Tag: ...\nAPI_Tag: ..." block.
std::string tag_block(const TagList& tags);
/// Parses the three tag lines. Throws ParseFailure when a line is missing
/// or the lists differ in length.
TagList parse_tag_completion(std::string_view text);
/// Parses "Thought: a, b, Finish." A missing Finish is appended and the
/// path marked repaired; a Finish before the end is a ParseFailure.
SolutionPath parse_path_completion(std::string_view text);

class RemotePolicy : public Policy {
public:
    RemotePolicy(ChatClient& client, PlannerPrompts prompts, const Registry& registry);

    TagList extract_tags(const Instruction& instruction) override;
    SolutionPath plan_path(const Instruction& instruction, const TagList& tags) override;
    RoundProposal propose_round(const RoundState& state, Rng& rng) override;

    /// Tree-generation prompt for a state, including the history transcript.
    std::string round_prompt(const RoundState& state) const;

private:
    std::string ask(const std::string& prompt);

    ChatClient& client_;
    PlannerPrompts prompts_;
    const Registry& registry_;
};

} // namespace toolplanner

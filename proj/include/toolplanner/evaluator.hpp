// SPDX-License-Identifier: Apache-2.0
//
// Match, pass and win rates over final solutions, and precision / recall /
// F1 of extracted tags against a retriever baseline.
#pragma once

#include "toolplanner/common.hpp"
#include "toolplanner/corpus.hpp"
#include "toolplanner/llm_client.hpp"
#include "toolplanner/policy.hpp"
#include "toolplanner/registry.hpp"
#include "toolplanner/reward.hpp"
#include "toolplanner/tree_engine.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace toolplanner {

enum class Preference { Candidate, Reference, Tie };
std::string_view to_string(Preference preference);
Preference parse_preference(std::string_view text);

/// Labels of one task's final solution. A task without a final solution is
/// neither pass nor match.
struct TaskLabel {
    std::string instruction_id;
    Level level = Level::Hybrid;
    bool has_final = false;
    RewardLabel label;
    std::string final_answer;
    /// Judge verdict against the reference answer, when one was asked for.
    std::optional<Preference> verdict;

    bool operator==(const TaskLabel&) const = default;
};

TaskLabel label_episode(const Episode& episode, const Instruction& instruction, const Registry& registry,
                        const RewardConfig& config = {});

/// Pairs episodes with instructions by id (InvalidRequest when one is
/// missing) and labels them, `jobs` at a time. Output follows episode order.
std::vector<TaskLabel> label_episodes(std::span<const Episode> episodes, std::span<const Instruction> instructions,
                                      const Registry& registry, const RewardConfig& config = {},
                                      std::size_t jobs = 1);

struct RateCell {
    std::size_t favorable = 0;
    std::size_t total = 0;

    /// 0 for an empty cell.
    double rate() const;
    bool operator==(const RateCell&) const = default;
};

struct MatchResult {
    TagLevel level = TagLevel::Api;
    RateCell overall;
    /// Rates at `level` and every coarser tag level, same denominator.
    std::map<TagLevel, RateCell> parents;
};

/// Fraction of non-statement tasks whose final solution matches at `level`.
/// Throws EmptyEvalSet when there are no such tasks.
MatchResult match_rate(std::span<const TaskLabel> tasks, TagLevel level);
MatchResult match_rate(std::span<const Episode> episodes, std::span<const Instruction> instructions, TagLevel level,
                       const Registry& registry);

/// Fraction of tasks whose final solution passes. Throws EmptyEvalSet.
RateCell pass_rate(std::span<const TaskLabel> tasks);

class Judge {
public:
    virtual ~Judge() = default;
    virtual Preference compare(const Instruction& instruction, const std::string& candidate,
                               const std::string& reference) = 0;
};

/// Prefers the longer answer (trimmed); equal lengths tie.
class MockJudge : public Judge {
public:
    Preference compare(const Instruction& instruction, const std::string& candidate,
                       const std::string& reference) override;
};

/// Asks a chat model which answer serves the instruction better. Client
/// errors and unreadable verdicts raise JudgeFailure.
class LlmJudge : public Judge {
public:
    explicit LlmJudge(ChatClient& client);
    Preference compare(const Instruction& instruction, const std::string& candidate,
                       const std::string& reference) override;

    static std::string prompt(const Instruction& instruction, const std::string& candidate,
                              const std::string& reference);
    static Preference parse_verdict(std::string_view completion);

private:
    ChatClient& client_;
};

struct WinTally {
    std::size_t candidate = 0;
    std::size_t reference = 0;
    std::size_t tie = 0;

    std::size_t total() const { return candidate + reference + tie; }
    /// Ties count half. 0 for an empty tally.
    double rate() const;
    WinTally& operator+=(const WinTally& other);
    bool operator==(const WinTally&) const = default;
};

/// Throws EmptyEvalSet on empty input, InvalidRequest on misaligned lists.
WinTally win_rate(std::span<const std::string> answers, std::span<const std::string> references,
                  std::span<const Instruction> instructions, Judge& judge);

struct PRF {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Harmonic mean; 0 when both are 0.
double f1_score(double precision, double recall);
/// Empty prediction gives P = 0 unless gold is empty too, which gives 1
/// everywhere. Empty gold likewise gives R = 0 unless pred is empty.
PRF prf1_counts(std::size_t overlap, std::size_t predicted, std::size_t gold);
PRF prf1(const std::set<std::string>& predicted, const std::set<std::string>& gold);

struct ExtractionRow {
    std::string method;
    Level level = Level::Hybrid;
    std::size_t tasks = 0;
    PRF scores;
};

/// Tag extraction by the policy versus top-k lexical retrieval, per
/// instruction level, compared at the level's own tag granularity. Counts
/// are pooled over tasks before P and R are taken. Statement tasks are
/// skipped.
std::vector<ExtractionRow> compare_extraction(std::span<const Instruction> instructions, Policy& policy,
                                              const Registry& registry,
                                              std::span<const std::size_t> ks = std::span<const std::size_t>());

struct LevelMetrics {
    std::map<TagLevel, RateCell> match;
    RateCell pass;
    std::optional<WinTally> win;
};

struct EvalReport {
    std::vector<TaskLabel> tasks;
    std::map<Level, LevelMetrics> per_level;
    std::map<TagLevel, RateCell> match_overall;
    RateCell pass_overall;
    std::optional<WinTally> win_overall;

    /// Means of the non-empty cells in the level-by-tag layout.
    double match_average() const;
    double pass_average() const;
    std::optional<double> win_average() const;
};

struct EvalOptions {
    RewardConfig reward;
    /// Reference answers by instruction id; win rate is computed over tasks
    /// that have one, and only when a judge is given.
    std::map<std::string, std::string> references;
    Judge* judge = nullptr;
    std::size_t jobs = 1;
};

/// Rates from per-task labels. Throws EmptyEvalSet when there are none.
EvalReport aggregate_report(std::vector<TaskLabel> tasks);

/// Throws EmptyEvalSet when there are no episodes.
EvalReport evaluate(std::span<const Episode> episodes, std::span<const Instruction> instructions,
                    const Registry& registry, const EvalOptions& options = {});

/// Columnar text: match rate per instruction level and parent tag level,
/// then pass and win rate per instruction level, in percent.
std::string format_report(const EvalReport& report, bool level_breakdown = true);
/// "task" and "rate" line records.
std::vector<std::string> report_records(const EvalReport& report);
/// Task labels back from report records; rate records are ignored since
/// they are recomputed by aggregate_report.
std::vector<TaskLabel> parse_task_records(std::span<const std::string> lines);
std::string format_extraction(std::span<const ExtractionRow> rows);

} // namespace toolplanner

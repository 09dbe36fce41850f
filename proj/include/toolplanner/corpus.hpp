// SPDX-License-Identifier: Apache-2.0
//
// Record types shared by every pipeline stage and their line-delimited
// serialization. Field names for seed tasks follow the ToolBench schema
// ("query", "query_id", "relevant APIs", "api_list") so upstream files load
// unmodified.
#pragma once

#include "toolplanner/common.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace toolplanner {

struct ApiRef {
    std::string category;
    std::string tool;
    std::string api;
    std::string description;

    bool operator==(const ApiRef&) const = default;
};

enum class Role { System, User, Assistant, Function };
std::string_view to_string(Role role);

struct FunctionCall {
    std::string name;
    std::string arguments;

    bool operator==(const FunctionCall&) const = default;
};

struct Message {
    Role role = Role::User;
    std::string content;
    std::optional<FunctionCall> function_call;

    bool operator==(const Message&) const = default;
};

struct SeedTask {
    std::int64_t query_id = 0;
    std::string query;
    /// (tool name, api name) in document order, duplicates kept.
    std::vector<std::pair<std::string, std::string>> relevant_apis;
    std::vector<ApiRef> api_pool;
    /// Optional seed solution (chat messages). Not part of the ToolBench
    /// query schema; carried under "solution" when present.
    std::vector<Message> solution;

    bool operator==(const SeedTask&) const = default;
};


enum class FinishKind { GiveAnswer, GiveUpAndRestart };
std::string_view to_string(FinishKind kind);
FinishKind parse_finish_kind(std::string_view text);

struct FinishInfo {
    FinishKind kind = FinishKind::GiveAnswer;
    std::optional<std::string> final_answer;

    bool operator==(const FinishInfo&) const = default;
};

/// Tool responses are in-band: a non-empty error describes a failure.
struct Observation {
    std::string error;
    std::string response;

    bool ok() const { return error.empty(); }
    bool operator==(const Observation&) const = default;
};

/// What a policy decides in one round. action is an API name or "Finish";
/// finish is present exactly when action is Finish.
struct RoundProposal {
    std::string thought;
    std::string action;
    std::string action_input;
    std::optional<FinishInfo> finish;

    bool is_finish() const { return finish.has_value(); }
    /// Identity used when comparing rounds that share a history: action,
    /// input and finish kind. Thought text is not part of it.
    std::string key() const;

    bool operator==(const RoundProposal&) const = default;
};

RoundProposal finish_round(FinishKind kind, std::optional<std::string> answer = std::nullopt,
                           std::string thought = {});
RoundProposal call_round(std::string api, std::string input = "{}", std::string thought = {});

struct Round : RoundProposal {
    Observation observation;

    bool operator==(const Round&) const = default;
};

struct SolutionTrace {
    std::vector<Message> messages;
    /// Derived from messages; includes the trailing Finish round if any.
    std::vector<Round> rounds;
    std::optional<FinishInfo> final;

    /// Non-Finish actions in order.
    std::vector<std::string> actions() const;
    bool operator==(const SolutionTrace&) const = default;
};

struct Instruction {
    std::string id;
    std::string text;
    Level level = Level::Hybrid;
    TagList gold_tags;
    std::int64_t source_seed = 0;

    bool operator==(const Instruction&) const = default;
};

std::string instruction_id(std::int64_t query_id, Level level);

struct MGRecord {
    Instruction instruction;
    TagList tag_list;
    SolutionPath solution_path;
    SolutionTrace solution;

    bool operator==(const MGRecord& other) const {
        return instruction == other.instruction && tag_list == other.tag_list &&
               solution_path == other.solution_path && solution == other.solution;
    }
};

enum class NegativeOrigin { Sibling, GiveUp, OtherTool, PrematureAnswer };
std::string_view to_string(NegativeOrigin origin);
NegativeOrigin parse_negative_origin(std::string_view text);

struct PairwiseResponse {
    std::string instruction_id;
    SolutionPath path;
    std::vector<RoundProposal> history;
    RoundProposal positive;
    RoundProposal negative;
    int positive_reward = 1;
    int negative_reward = -1;
    NegativeOrigin origin = NegativeOrigin::Sibling;

    bool operator==(const PairwiseResponse& other) const {
        return instruction_id == other.instruction_id && path == other.path &&
               history == other.history && positive == other.positive &&
               negative == other.negative && positive_reward == other.positive_reward &&
               negative_reward == other.negative_reward && origin == other.origin;
    }
};

/// A reward-1 round used for the cross-entropy term.
struct PositiveRound {
    std::string instruction_id;
    SolutionPath path;
    std::vector<RoundProposal> history;
    RoundProposal round;

    bool operator==(const PositiveRound& other) const {
        return instruction_id == other.instruction_id && path == other.path &&
               history == other.history && round == other.round;
    }
};

// Parsing. All parsers reject malformed input with MalformedRecord rather
// than repairing it.
SeedTask parse_seed_task(std::string_view raw);
std::string serialize_seed_task(const SeedTask& task);

SolutionTrace parse_solution_trace(std::span<const Message> messages);
SolutionTrace parse_solution_trace_text(std::string_view raw);
std::string serialize_solution_trace(const SolutionTrace& trace);

MGRecord parse_mg_record(std::string_view raw);
std::string serialize_mg_record(const MGRecord& record);

PairwiseResponse parse_pair_record(std::string_view raw);
std::string serialize_pair_record(const PairwiseResponse& pair);

PositiveRound parse_positive_record(std::string_view raw);
std::string serialize_positive_record(const PositiveRound& positive);

/// Parses the argument blob of a Finish call ({"return_type", "final_answer"}).
FinishInfo parse_finish_arguments(std::string_view arguments);
std::string finish_arguments(const FinishInfo& finish);

std::string observation_text(const Observation& observation);
/// Inverse of observation_text; content that is not an {error, response}
/// object is kept verbatim as the response.
Observation parse_observation_text(std::string_view content);

/// "Thought: ...\nAction: name\nAction Input: {...}" completions.
struct ReactParse {
    std::string thought;
    std::optional<FunctionCall> call;
};
ReactParse parse_react_text(std::string_view text);

// Line-delimited files.
std::vector<std::string> read_lines(const std::filesystem::path& path);
std::size_t write_lines(std::span<const std::string> lines, const std::filesystem::path& path);

std::size_t write_records(std::span<const MGRecord> records, const std::filesystem::path& path);
std::size_t write_records(std::span<const PairwiseResponse> records,
                          const std::filesystem::path& path);
std::size_t write_records(std::span<const PositiveRound> records,
                          const std::filesystem::path& path);

std::vector<SeedTask> read_seed_tasks(const std::filesystem::path& path);
std::vector<MGRecord> read_mg_records(const std::filesystem::path& path);
std::vector<PairwiseResponse> read_pair_records(const std::filesystem::path& path);
std::vector<PositiveRound> read_positive_records(const std::filesystem::path& path);

} // namespace toolplanner

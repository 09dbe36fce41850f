// SPDX-License-Identifier: Apache-2.0
#include "toolplanner/corpus.hpp"

#include "json_util.hpp"

#include <fstream>
#include <sstream>

namespace toolplanner {

namespace detail {

json parse_json(std::string_view raw, std::string_view what) {
    try {
        return json::parse(raw.begin(), raw.end());
    } catch (const json::parse_error& e) {
        fail(ErrorCode::MalformedRecord, std::string(what) + ": " + e.what());
    }
}

const json& require(const json& obj, const char* key, std::string_view what) {
    if (!obj.is_object() || !obj.contains(key)) {
        fail(ErrorCode::MalformedRecord, std::string(what) + ": missing field '" + key + "'");
    }
    return obj.at(key);
}

std::string require_string(const json& obj, const char* key, std::string_view what) {
    const auto& value = require(obj, key, what);
    if (!value.is_string()) {
        fail(ErrorCode::MalformedRecord, std::string(what) + ": field '" + key + "' is not text");
    }
    return value.get<std::string>();
}

std::string optional_string(const json& obj, const char* key) {
    if (obj.is_object() && obj.contains(key) && obj.at(key).is_string()) {
        return obj.at(key).get<std::string>();
    }
    return {};
}

std::string dump_line(const ordered_json& value) {
    return value.dump(-1, ' ', false, json::error_handler_t::strict);
}

std::vector<std::string> string_list(const json& value, std::string_view what) {
    if (!value.is_array()) fail(ErrorCode::MalformedRecord, std::string(what) + ": expected a list");
    std::vector<std::string> out;
    for (const auto& item : value) {
        if (!item.is_string()) {
            fail(ErrorCode::MalformedRecord, std::string(what) + ": expected a list of text");
        }
        out.push_back(item.get<std::string>());
    }
    return out;
}

ordered_json tags_to_json(const TagList& tags) {
    ordered_json out;
    out["category"] = tags.categories;
    out["tool"] = tags.tools;
    out["api"] = tags.apis;
    return out;
}

TagList tags_from_json(const json& value, std::string_view what) {
    TagList tags;
    tags.categories = string_list(require(value, "category", what), what);
    tags.tools = string_list(require(value, "tool", what), what);
    tags.apis = string_list(require(value, "api", what), what);
    if (!tags.aligned()) fail(ErrorCode::MalformedRecord, std::string(what) + ": tag lists not aligned");
    return tags;
}

ordered_json proposal_to_json(const RoundProposal& round) {
    ordered_json out;
    out["thought"] = round.thought;
    out["action"] = round.action;
    out["action_input"] = round.action_input;
    if (round.finish) {
        ordered_json finish;
        finish["return_type"] = std::string(to_string(round.finish->kind));
        if (round.finish->final_answer) finish["final_answer"] = *round.finish->final_answer;
        out["finish"] = std::move(finish);
    }
    return out;
}

RoundProposal proposal_from_json(const json& value, std::string_view what) {
    RoundProposal round;
    round.thought = optional_string(value, "thought");
    round.action = require_string(value, "action", what);
    round.action_input = optional_string(value, "action_input");
    if (value.contains("finish")) {
        const auto& finish = value.at("finish");
        FinishInfo info;
        info.kind = parse_finish_kind(require_string(finish, "return_type", what));
        if (finish.contains("final_answer")) info.final_answer = require_string(finish, "final_answer", what);
        round.finish = info;
    }
    if ((round.action == kFinish) != round.finish.has_value()) {
        fail(ErrorCode::MalformedRecord, std::string(what) + ": Finish action without finish payload");
    }
    return round;
}

ordered_json round_to_json(const Round& round) {
    auto out = proposal_to_json(round);
    if (!round.is_finish()) {
        ordered_json obs;
        obs["error"] = round.observation.error;
        obs["response"] = round.observation.response;
        out["observation"] = std::move(obs);
    }
    return out;
}

Round round_from_json(const json& value, std::string_view what) {
    Round round;
    static_cast<RoundProposal&>(round) = proposal_from_json(value, what);
    if (value.contains("observation")) {
        const auto& obs = value.at("observation");
        round.observation.error = require_string(obs, "error", what);
        round.observation.response = require_string(obs, "response", what);
    }
    return round;
}

ordered_json path_to_json(const SolutionPath& path) { return path.steps; }

SolutionPath path_from_json(const json& value, std::string_view what) {
    SolutionPath path;
    path.steps = string_list(value, what);
    if (!path.well_formed()) {
        fail(ErrorCode::MalformedRecord, std::string(what) + ": solution path must end with one Finish");
    }
    return path;
}

} // namespace detail

using detail::json;
using detail::ordered_json;

std::string_view to_string(Role role) {
    switch (role) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
    case Role::Function: return "function";
    }
    return "?";
}

namespace {

Role parse_role(std::string_view text) {
    if (text == "system") return Role::System;
    if (text == "user") return Role::User;
    if (text == "assistant") return Role::Assistant;
    if (text == "function" || text == "tool") return Role::Function;
    fail(ErrorCode::MalformedRecord, "unknown message role '" + std::string(text) + "'");
}

std::string arguments_as_text(const json& value) {
    if (value.is_string()) return value.get<std::string>();
    return value.dump();
}

/// Pulls the function call out of an assistant message, whichever of the
/// three encodings it uses: an explicit function_call, a JSON content blob
/// {"name", "arguments"}, or ReAct text.
std::optional<FunctionCall> assistant_call(const Message& message, std::string& thought) {
    if (message.function_call) {
        thought = message.content;
        return message.function_call;
    }
    const auto content = trim(message.content);
    if (!content.empty() && content.front() == '{') {
        json parsed = json::parse(content, nullptr, false);
        if (parsed.is_object() && parsed.contains("name") && parsed.at("name").is_string()) {
            FunctionCall call;
            call.name = parsed.at("name").get<std::string>();
            if (parsed.contains("arguments")) call.arguments = arguments_as_text(parsed.at("arguments"));
            return call;
        }
    }
    auto react = parse_react_text(message.content);
    if (react.call) thought = react.thought;
    return react.call;
}

} // namespace

std::string_view to_string(FinishKind kind) {
    return kind == FinishKind::GiveAnswer ? "give_answer" : "give_up_and_restart";
}

FinishKind parse_finish_kind(std::string_view text) {
    if (text == "give_answer") return FinishKind::GiveAnswer;
    if (text == "give_up_and_restart") return FinishKind::GiveUpAndRestart;
    fail(ErrorCode::MalformedRecord, "unknown return_type '" + std::string(text) + "'");
}

std::string RoundProposal::key() const {
    std::string out = action;
    out += '\x1f';
    out += trim(action_input);
    if (finish) {
        out += '\x1f';
        out += to_string(finish->kind);
    }
    return out;
}

RoundProposal finish_round(FinishKind kind, std::optional<std::string> answer, std::string thought) {
    RoundProposal round;
    round.thought = std::move(thought);
    round.action = std::string(kFinish);
    FinishInfo info{kind, kind == FinishKind::GiveAnswer ? std::move(answer) : std::nullopt};
    round.action_input = finish_arguments(info);
    round.finish = std::move(info);
    return round;
}

RoundProposal call_round(std::string api, std::string input, std::string thought) {
    RoundProposal round;
    round.thought = std::move(thought);
    round.action = std::move(api);
    round.action_input = std::move(input);
    return round;
}

std::vector<std::string> SolutionTrace::actions() const {
    std::vector<std::string> out;
    for (const auto& round : rounds) {
        if (!round.is_finish()) out.push_back(round.action);
    }
    return out;
}

std::string instruction_id(std::int64_t query_id, Level level) {
    return std::to_string(query_id) + "-" + std::string(to_string(level));
}

std::string_view to_string(NegativeOrigin origin) {
    switch (origin) {
    case NegativeOrigin::Sibling: return "sibling";
    case NegativeOrigin::GiveUp: return "give_up";
    case NegativeOrigin::OtherTool: return "other_tool";
    case NegativeOrigin::PrematureAnswer: return "premature_answer";
    }
    return "?";
}

NegativeOrigin parse_negative_origin(std::string_view text) {
    if (text == "sibling") return NegativeOrigin::Sibling;
    if (text == "give_up") return NegativeOrigin::GiveUp;
    if (text == "other_tool") return NegativeOrigin::OtherTool;
    if (text == "premature_answer") return NegativeOrigin::PrematureAnswer;
    fail(ErrorCode::MalformedRecord, "unknown negative origin '" + std::string(text) + "'");
}

namespace {
std::vector<Message> messages_from_json(const json& value);
ordered_json messages_to_json(const std::vector<Message>& messages);
} // namespace

// ---------------------------------------------------------------------------
// Seed tasks

SeedTask parse_seed_task(std::string_view raw) {
    constexpr std::string_view what = "seed task";
    const json doc = detail::parse_json(raw, what);
    if (!doc.is_object()) fail(ErrorCode::MalformedRecord, "seed task: expected an object");

    SeedTask task;
    task.query = detail::require_string(doc, "query", what);
    if (trim(task.query).empty()) fail(ErrorCode::MalformedRecord, "seed task: empty query");
    const auto& id = detail::require(doc, "query_id", what);
    if (!id.is_number_integer()) fail(ErrorCode::MalformedRecord, "seed task: query_id is not an integer");
    task.query_id = id.get<std::int64_t>();

    const auto& pool = detail::require(doc, "api_list", what);
    if (!pool.is_array()) fail(ErrorCode::MalformedRecord, "seed task: api_list is not a list");
    for (const auto& entry : pool) {
        ApiRef ref;
        ref.category = detail::require_string(entry, "category_name", what);
        ref.tool = detail::require_string(entry, "tool_name", what);
        ref.api = detail::require_string(entry, "api_name", what);
        ref.description = detail::optional_string(entry, "api_description");
        task.api_pool.push_back(std::move(ref));
    }

    const auto& relevant = detail::require(doc, "relevant APIs", what);
    if (!relevant.is_array() || relevant.empty()) {
        fail(ErrorCode::MalformedRecord, "seed task: relevant APIs must be a non-empty list");
    }
    for (const auto& pair : relevant) {
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_string()) {
            fail(ErrorCode::MalformedRecord, "seed task: relevant API entries are [tool, api] pairs");
        }
        task.relevant_apis.emplace_back(pair[0].get<std::string>(), pair[1].get<std::string>());
    }
    for (const auto& [tool, api] : task.relevant_apis) {
        bool found = false;
        for (const auto& ref : task.api_pool) {
            if (ref.tool == tool && ref.api == api) {
                found = true;
                break;
            }
        }
        if (!found) fail(ErrorCode::UnknownApi, "relevant API (" + tool + ", " + api + ") not in api_list");
    }
    if (doc.contains("solution")) {
        task.solution = messages_from_json(doc.at("solution"));
        parse_solution_trace(task.solution);
    }
    return task;
}

std::string serialize_seed_task(const SeedTask& task) {
    ordered_json doc;
    doc["query"] = task.query;
    doc["query_id"] = task.query_id;
    ordered_json relevant = ordered_json::array();
    for (const auto& [tool, api] : task.relevant_apis) relevant.push_back({tool, api});
    doc["relevant APIs"] = std::move(relevant);
    ordered_json pool = ordered_json::array();
    for (const auto& ref : task.api_pool) {
        ordered_json entry;
        entry["category_name"] = ref.category;
        entry["tool_name"] = ref.tool;
        entry["api_name"] = ref.api;
        if (!ref.description.empty()) entry["api_description"] = ref.description;
        pool.push_back(std::move(entry));
    }
    doc["api_list"] = std::move(pool);
    if (!task.solution.empty()) doc["solution"] = messages_to_json(task.solution);
    return detail::dump_line(doc);
}

// ---------------------------------------------------------------------------
// Solution traces

FinishInfo parse_finish_arguments(std::string_view arguments) {
    const json doc = detail::parse_json(arguments, "Finish arguments");
    FinishInfo info;
    info.kind = parse_finish_kind(detail::require_string(doc, "return_type", "Finish arguments"));
    const auto answer = detail::optional_string(doc, "final_answer");
    if (info.kind == FinishKind::GiveAnswer) {
        if (!doc.contains("final_answer") || !doc.at("final_answer").is_string()) {
            fail(ErrorCode::MalformedRecord, "give_answer without final_answer");
        }
        info.final_answer = answer;
    } else if (!answer.empty()) {
        fail(ErrorCode::MalformedRecord, "give_up_and_restart must not carry a final_answer");
    }
    return info;
}

std::string finish_arguments(const FinishInfo& finish) {
    ordered_json doc;
    doc["return_type"] = std::string(to_string(finish.kind));
    if (finish.final_answer) doc["final_answer"] = *finish.final_answer;
    return detail::dump_line(doc);
}

std::string observation_text(const Observation& observation) {
    ordered_json doc;
    doc["error"] = observation.error;
    doc["response"] = observation.response;
    return detail::dump_line(doc);
}

Observation parse_observation_text(std::string_view content) {
    const json doc = json::parse(content.begin(), content.end(), nullptr, false);
    if (doc.is_object() && doc.contains("error") && doc.contains("response") &&
        doc.at("error").is_string()) {
        const auto& response = doc.at("response");
        return {doc.at("error").get<std::string>(),
                response.is_string() ? response.get<std::string>() : response.dump()};
    }
    return {"", std::string(content)};
}

ReactParse parse_react_text(std::string_view text) {
    ReactParse out;
    const auto action_pos = text.find("Action:");
    if (action_pos == std::string_view::npos) {
        out.thought = trim(text);
        return out;
    }
    auto thought = text.substr(0, action_pos);
    if (const auto t = thought.find("Thought:"); t != std::string_view::npos) {
        thought = thought.substr(t + 8);
    }
    out.thought = trim(thought);

    auto rest = text.substr(action_pos + 7);
    const auto input_pos = rest.find("Action Input:");
    FunctionCall call;
    if (input_pos == std::string_view::npos) {
        call.name = trim(rest.substr(0, rest.find('\n')));
    } else {
        call.name = trim(rest.substr(0, input_pos));
        call.arguments = trim(rest.substr(input_pos + 13));
    }
    if (call.name.empty()) return out;
    out.call = std::move(call);
    return out;
}

SolutionTrace parse_solution_trace(std::span<const Message> messages) {
    SolutionTrace trace;
    trace.messages.assign(messages.begin(), messages.end());

    std::optional<Round> pending;
    std::string pending_thought;
    bool finished = false;
    bool finish_acknowledged = false;

    for (std::size_t i = 0; i < messages.size(); ++i) {
        const auto& message = messages[i];
        const auto where = " (message " + std::to_string(i) + ")";
        if (finished) {
            // A single function acknowledgement after Finish is tolerated;
            // ToolBench traces carry one.
            if (message.role == Role::Function && !finish_acknowledged) {
                finish_acknowledged = true;
                continue;
            }
            fail(ErrorCode::MalformedRecord, "message after Finish" + where);
        }
        switch (message.role) {
        case Role::System:
        case Role::User:
            if (pending) fail(ErrorCode::DanglingCall, "call '" + pending->action + "' has no observation" + where);
            break;
        case Role::Assistant: {
            if (pending) fail(ErrorCode::DanglingCall, "call '" + pending->action + "' has no observation" + where);
            std::string thought;
            auto call = assistant_call(message, thought);
            if (!call) {
                if (!pending_thought.empty()) pending_thought += '\n';
                pending_thought += message.content;
                break;
            }
            if (thought.empty()) thought = pending_thought;
            pending_thought.clear();
            Round round;
            round.thought = std::move(thought);
            round.action = call->name;
            round.action_input = call->arguments;
            if (round.action == kFinish) {
                round.finish = parse_finish_arguments(call->arguments);
                trace.final = round.finish;
                trace.rounds.push_back(std::move(round));
                finished = true;
            } else {
                pending = std::move(round);
            }
            break;
        }
        case Role::Function:
            if (!pending) fail(ErrorCode::MalformedRecord, "function message without a call" + where);
            pending->observation = parse_observation_text(message.content);
            trace.rounds.push_back(std::move(*pending));
            pending.reset();
            break;
        }
    }
    if (pending) fail(ErrorCode::DanglingCall, "call '" + pending->action + "' has no observation");
    return trace;
}

namespace {

Message message_from_json(const json& value) {
    constexpr std::string_view what = "message";
    if (!value.is_object()) fail(ErrorCode::MalformedRecord, "message: expected an object");
    Message message;
    // ToolBench conversation dumps use from/value; chat APIs use role/content.
    if (value.contains("role")) {
        message.role = parse_role(detail::require_string(value, "role", what));
        const auto& content = value.contains("content") ? value.at("content") : json();
        message.content = content.is_string() ? content.get<std::string>() : std::string();
    } else {
        message.role = parse_role(detail::require_string(value, "from", what));
        message.content = detail::require_string(value, "value", what);
    }
    if (value.contains("function_call") && !value.at("function_call").is_null()) {
        const auto& call = value.at("function_call");
        FunctionCall fc;
        fc.name = detail::require_string(call, "name", what);
        if (call.contains("arguments")) fc.arguments = arguments_as_text(call.at("arguments"));
        message.function_call = std::move(fc);
    }
    return message;
}

ordered_json message_to_json(const Message& message) {
    ordered_json out;
    out["role"] = std::string(to_string(message.role));
    out["content"] = message.content;
    if (message.function_call) {
        ordered_json call;
        call["name"] = message.function_call->name;
        call["arguments"] = message.function_call->arguments;
        out["function_call"] = std::move(call);
    }
    return out;
}

std::vector<Message> messages_from_json(const json& value) {
    if (!value.is_array()) fail(ErrorCode::MalformedRecord, "solution trace: expected a message list");
    std::vector<Message> messages;
    for (const auto& item : value) messages.push_back(message_from_json(item));
    return messages;
}

ordered_json messages_to_json(const std::vector<Message>& messages) {
    ordered_json out = ordered_json::array();
    for (const auto& message : messages) out.push_back(message_to_json(message));
    return out;
}

} // namespace

SolutionTrace parse_solution_trace_text(std::string_view raw) {
    const json doc = detail::parse_json(raw, "solution trace");
    const json& list = doc.is_object() ? detail::require(doc, "messages", "solution trace") : doc;
    const auto messages = messages_from_json(list);
    return parse_solution_trace(messages);
}

std::string serialize_solution_trace(const SolutionTrace& trace) {
    return detail::dump_line(messages_to_json(trace.messages));
}

// ---------------------------------------------------------------------------
// Multi-granularity instruction records

MGRecord parse_mg_record(std::string_view raw) {
    constexpr std::string_view what = "MG record";
    const json doc = detail::parse_json(raw, what);
    MGRecord record;
    const auto& inst = detail::require(doc, "instruction", what);
    record.instruction.id = detail::require_string(inst, "id", what);
    record.instruction.text = detail::require_string(inst, "text", what);
    record.instruction.level = parse_level(detail::require_string(inst, "level", what));
    const auto& seed = detail::require(inst, "source_seed", what);
    if (!seed.is_number_integer()) fail(ErrorCode::MalformedRecord, "MG record: source_seed not an integer");
    record.instruction.source_seed = seed.get<std::int64_t>();

    record.tag_list = detail::tags_from_json(detail::require(doc, "tag_list", what), what);
    record.instruction.gold_tags = record.tag_list;
    record.solution_path = detail::path_from_json(detail::require(doc, "solution_path", what), what);
    record.solution = parse_solution_trace(messages_from_json(detail::require(doc, "solution", what)));

    if (!record.solution.messages.empty() && record.solution.actions() != record.solution_path.apis()) {
        fail(ErrorCode::MalformedRecord, "MG record " + record.instruction.id +
                                             ": solution path disagrees with solution actions");
    }
    return record;
}

std::string serialize_mg_record(const MGRecord& record) {
    ordered_json doc;
    ordered_json inst;
    inst["id"] = record.instruction.id;
    inst["text"] = record.instruction.text;
    inst["level"] = std::string(to_string(record.instruction.level));
    inst["source_seed"] = record.instruction.source_seed;
    doc["instruction"] = std::move(inst);
    doc["tag_list"] = detail::tags_to_json(record.tag_list);
    doc["solution_path"] = detail::path_to_json(record.solution_path);
    doc["solution"] = messages_to_json(record.solution.messages);
    return detail::dump_line(doc);
}

// ---------------------------------------------------------------------------
// Pairwise and positive-round records

namespace {

ordered_json history_to_json(const std::vector<RoundProposal>& history) {
    ordered_json out = ordered_json::array();
    for (const auto& round : history) out.push_back(detail::proposal_to_json(round));
    return out;
}

std::vector<RoundProposal> history_from_json(const json& value, std::string_view what) {
    if (!value.is_array()) fail(ErrorCode::MalformedRecord, std::string(what) + ": history is not a list");
    std::vector<RoundProposal> out;
    for (const auto& item : value) out.push_back(detail::proposal_from_json(item, what));
    return out;
}

int require_int(const json& doc, const char* key, std::string_view what) {
    const auto& value = detail::require(doc, key, what);
    if (!value.is_number_integer()) {
        fail(ErrorCode::MalformedRecord, std::string(what) + ": '" + key + "' is not an integer");
    }
    return value.get<int>();
}

} // namespace

PairwiseResponse parse_pair_record(std::string_view raw) {
    constexpr std::string_view what = "pair record";
    const json doc = detail::parse_json(raw, what);
    PairwiseResponse pair;
    pair.instruction_id = detail::require_string(doc, "instruction_id", what);
    pair.path = detail::path_from_json(detail::require(doc, "path", what), what);
    pair.history = history_from_json(detail::require(doc, "history", what), what);
    pair.positive = detail::proposal_from_json(detail::require(doc, "positive", what), what);
    pair.negative = detail::proposal_from_json(detail::require(doc, "negative", what), what);
    pair.positive_reward = require_int(doc, "positive_reward", what);
    pair.negative_reward = require_int(doc, "negative_reward", what);
    pair.origin = parse_negative_origin(detail::require_string(doc, "origin", what));
    return pair;
}

std::string serialize_pair_record(const PairwiseResponse& pair) {
    ordered_json doc;
    doc["instruction_id"] = pair.instruction_id;
    doc["path"] = detail::path_to_json(pair.path);
    doc["history"] = history_to_json(pair.history);
    doc["positive"] = detail::proposal_to_json(pair.positive);
    doc["negative"] = detail::proposal_to_json(pair.negative);
    doc["positive_reward"] = pair.positive_reward;
    doc["negative_reward"] = pair.negative_reward;
    doc["origin"] = std::string(to_string(pair.origin));
    return detail::dump_line(doc);
}

PositiveRound parse_positive_record(std::string_view raw) {
    constexpr std::string_view what = "positive record";
    const json doc = detail::parse_json(raw, what);
    PositiveRound positive;
    positive.instruction_id = detail::require_string(doc, "instruction_id", what);
    positive.path = detail::path_from_json(detail::require(doc, "path", what), what);
    positive.history = history_from_json(detail::require(doc, "history", what), what);
    positive.round = detail::proposal_from_json(detail::require(doc, "round", what), what);
    return positive;
}

std::string serialize_positive_record(const PositiveRound& positive) {
    ordered_json doc;
    doc["instruction_id"] = positive.instruction_id;
    doc["path"] = detail::path_to_json(positive.path);
    doc["history"] = history_to_json(positive.history);
    doc["round"] = detail::proposal_to_json(positive.round);
    return detail::dump_line(doc);
}

// ---------------------------------------------------------------------------
// Files

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoFailure, "cannot open " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        lines.push_back(std::move(line));
    }
    return lines;
}

std::size_t write_lines(std::span<const std::string> lines, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoFailure, "cannot write " + path.string());
    for (const auto& line : lines) out << line << '\n';
    out.flush();
    if (!out) fail(ErrorCode::IoFailure, "write failed for " + path.string());
    return lines.size();
}

namespace {

template <typename Record, typename Serialize>
std::size_t write_with(std::span<const Record> records, const std::filesystem::path& path,
                       Serialize serialize) {
    std::vector<std::string> lines;
    lines.reserve(records.size());
    for (const auto& record : records) lines.push_back(serialize(record));
    return write_lines(lines, path);
}

template <typename Parse>
auto read_with(const std::filesystem::path& path, Parse parse) {
    std::vector<decltype(parse(std::string_view{}))> out;
    const auto lines = read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        try {
            out.push_back(parse(lines[i]));
        } catch (const Error& e) {
            fail(e.code(), path.string() + ":" + std::to_string(i + 1) + ": " + e.what());
        }
    }
    return out;
}

} // namespace

std::size_t write_records(std::span<const MGRecord> records, const std::filesystem::path& path) {
    return write_with(records, path, serialize_mg_record);
}

std::size_t write_records(std::span<const PairwiseResponse> records, const std::filesystem::path& path) {
    return write_with(records, path, serialize_pair_record);
}

std::size_t write_records(std::span<const PositiveRound> records, const std::filesystem::path& path) {
    return write_with(records, path, serialize_positive_record);
}

std::vector<SeedTask> read_seed_tasks(const std::filesystem::path& path) {
    return read_with(path, parse_seed_task);
}

std::vector<MGRecord> read_mg_records(const std::filesystem::path& path) {
    return read_with(path, parse_mg_record);
}

std::vector<PairwiseResponse> read_pair_records(const std::filesystem::path& path) {
    return read_with(path, parse_pair_record);
}

std::vector<PositiveRound> read_positive_records(const std::filesystem::path& path) {
    return read_with(path, parse_positive_record);
}

} // namespace toolplanner

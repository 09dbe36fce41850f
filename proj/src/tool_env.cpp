// SPDX-License-Identifier: Apache-2.0
#include "toolplanner/tool_env.hpp"

#include "json_util.hpp"

namespace toolplanner {

using detail::json;
using detail::ordered_json;

CanonicalArgs canonicalize(std::string_view arguments_text) {
    const auto text = trim(arguments_text);
    CanonicalArgs out;
    if (text.empty()) return out;
    const json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        fail(ErrorCode::MalformedArguments, "arguments are not a JSON object: " + text);
    }
    for (const auto& [key, value] : doc.items()) {
        out[key] = value.is_string() ? value.get<std::string>() : value.dump();
    }
    return out;
}

std::string canonical_text(const CanonicalArgs& args) {
    ordered_json doc = ordered_json::object();
    for (const auto& [key, value] : args) doc[key] = value;
    return detail::dump_line(doc);
}

ApiRequest make_request(const RoundProposal& round) {
    if (round.is_finish() || round.action == kFinish) {
        fail(ErrorCode::InvalidRequest, "Finish is not an executable api request");
    }
    return {round.action, canonicalize(round.action_input)};
}

void EnvFixture::add_response(const std::string& api, std::string_view arguments_text,
                              Observation observation) {
    responses.emplace(std::pair{api, canonical_text(canonicalize(arguments_text))}, std::move(observation));
}

void EnvFixture::set_default(const std::string& api, Observation observation) {
    default_per_api[api] = std::move(observation);
}

void EnvFixture::inject_fault(const std::string& api, std::size_t call_index, std::string error) {
    if (call_index == 0) fail(ErrorCode::InvalidRequest, "fault call index is 1-based");
    if (error.empty()) fail(ErrorCode::InvalidRequest, "injected fault needs an error text");
    fault_plan[{api, call_index}] = std::move(error);
}

void EnvFixture::validate(const Registry& registry) const {
    const auto check = [&](const std::string& api) {
        if (!registry.has_api(api)) fail(ErrorCode::UnknownApi, "env fixture names unknown api '" + api + "'");
    };
    for (const auto& [key, obs] : responses) check(key.first);
    for (const auto& [api, obs] : default_per_api) check(api);
    for (const auto& [key, err] : fault_plan) check(key.first);
}

EnvFixture EnvFixture::from_trace(const SolutionTrace& trace) {
    EnvFixture fixture;
    for (const auto& round : trace.rounds) {
        if (round.is_finish()) continue;
        fixture.add_response(round.action, round.action_input, round.observation);
    }
    return fixture;
}

std::size_t CallCounter::count(const std::string& api) const {
    auto it = counts_.find(api);
    return it == counts_.end() ? 0 : it->second;
}

Observation execute(const ApiRequest& request, const EnvFixture& fixture, CallCounter& counter) {
    const auto index = counter.next(request.api_name);
    if (auto it = fixture.fault_plan.find({request.api_name, index}); it != fixture.fault_plan.end()) {
        return {it->second, ""};
    }
    if (auto it = fixture.responses.find({request.api_name, canonical_text(request.arguments)});
        it != fixture.responses.end()) {
        return it->second;
    }
    if (auto it = fixture.default_per_api.find(request.api_name); it != fixture.default_per_api.end()) {
        return it->second;
    }
    return {"NotFound: no response recorded for " + request.api_name + " with arguments " +
                canonical_text(request.arguments),
            ""};
}

EnvFixture load_env_fixture(const std::filesystem::path& path) {
    EnvFixture fixture;
    std::size_t line_no = 0;
    for (const auto& line : read_lines(path)) {
        ++line_no;
        const auto what = path.string() + ":" + std::to_string(line_no);
        const auto doc = detail::parse_json(line, what);
        const auto api = detail::require_string(doc, "api", what);
        if (doc.contains("fault_call")) {
            const auto& index = doc.at("fault_call");
            if (!index.is_number_unsigned() || index.get<std::size_t>() == 0) {
                fail(ErrorCode::MalformedRecord, what + ": fault_call must be a positive integer");
            }
            fixture.inject_fault(api, index.get<std::size_t>(), detail::require_string(doc, "error", what));
            continue;
        }
        Observation obs{detail::optional_string(doc, "error"), detail::optional_string(doc, "response")};
        if (doc.contains("default") && doc.at("default").is_boolean() && doc.at("default").get<bool>()) {
            fixture.set_default(api, std::move(obs));
            continue;
        }
        std::string args = "{}";
        if (doc.contains("args")) {
            const auto& value = doc.at("args");
            args = value.is_string() ? value.get<std::string>() : value.dump();
        }
        fixture.add_response(api, args, std::move(obs));
    }
    return fixture;
}

std::size_t write_env_fixture(const EnvFixture& fixture, const std::filesystem::path& path) {
    std::vector<std::string> lines;
    for (const auto& [key, obs] : fixture.responses) {
        ordered_json doc;
        doc["api"] = key.first;
        doc["args"] = ordered_json::parse(key.second);
        doc["error"] = obs.error;
        doc["response"] = obs.response;
        lines.push_back(detail::dump_line(doc));
    }
    for (const auto& [api, obs] : fixture.default_per_api) {
        ordered_json doc;
        doc["api"] = api;
        doc["default"] = true;
        doc["error"] = obs.error;
        doc["response"] = obs.response;
        lines.push_back(detail::dump_line(doc));
    }
    for (const auto& [key, error] : fixture.fault_plan) {
        ordered_json doc;
        doc["api"] = key.first;
        doc["fault_call"] = key.second;
        doc["error"] = error;
        lines.push_back(detail::dump_line(doc));
    }
    return write_lines(lines, path);
}

} // namespace toolplanner

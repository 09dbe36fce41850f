// SPDX-License-Identifier: Apache-2.0
#include "toolplanner/llm_client.hpp"

#include "json_util.hpp"

#include <httplib.h>

#include <cstdlib>
#include <fstream>
#include <thread>

namespace toolplanner {

void validate_request(const ChatRequest& request) {
    if (request.messages.empty()) fail(ErrorCode::InvalidRequest, "chat request has no messages");
    const auto& first = request.messages.front().role;
    if (first != "system" && first != "user") {
        fail(ErrorCode::InvalidRequest, "chat request must start with a system or user message");
    }
}

std::string request_body(const ChatRequest& request) {
    detail::ordered_json doc;
    doc["model"] = request.model;
    detail::ordered_json messages = detail::ordered_json::array();
    for (const auto& message : request.messages) {
        detail::ordered_json m;
        m["role"] = message.role;
        m["content"] = message.content;
        messages.push_back(std::move(m));
    }
    doc["messages"] = std::move(messages);
    doc["temperature"] = request.temperature;
    doc["max_tokens"] = request.max_tokens;
    return detail::dump_line(doc);
}

std::string request_digest(const ChatRequest& request) { return hex64(fnv1a64(request_body(request))); }

ChatRequest single_turn(std::string prompt, std::string system) {
    ChatRequest request;
    if (!system.empty()) request.messages.push_back({"system", std::move(system)});
    request.messages.push_back({"user", std::move(prompt)});
    return request;
}

ClientConfig config_from_environment() {
    ClientConfig config;
    if (const char* endpoint = std::getenv("TOOLPLANNER_ENDPOINT")) config.endpoint = endpoint;
    if (const char* token_env = std::getenv("TOOLPLANNER_TOKEN_ENV")) config.token_env = token_env;
    return config;
}

// ---------------------------------------------------------------------------

void MockClient::add_canned(const ChatRequest& request, std::string completion) {
    canned_[request_digest(request)] = std::move(completion);
}

void MockClient::add_rule(std::string needle, std::string completion) {
    rules_.emplace_back(std::move(needle), std::move(completion));
}

std::string MockClient::complete(const ChatRequest& request) {
    validate_request(request);
    ++calls_;
    const auto digest = request_digest(request);
    if (auto it = canned_.find(digest); it != canned_.end()) return it->second;
    const auto& last = request.messages.back().content;
    for (const auto& [needle, completion] : rules_) {
        if (last.find(needle) != std::string::npos) return completion;
    }
    return "mock completion " + digest;
}

// ---------------------------------------------------------------------------

Transport http_transport() {
    return [](const std::string& url, const std::string& body, const std::string& bearer,
              std::chrono::milliseconds timeout) -> TransportResponse {
        // Split scheme://host[:port] from the request path.
        const auto scheme_end = url.find("://");
        const auto path_start = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
        const auto base = path_start == std::string::npos ? url : url.substr(0, path_start);
        const auto path = path_start == std::string::npos ? std::string("/") : url.substr(path_start);

        httplib::Client client(base);
        const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(timeout);
        const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(timeout - seconds);
        client.set_connection_timeout(seconds.count(), micros.count());
        client.set_read_timeout(seconds.count(), micros.count());
        client.set_write_timeout(seconds.count(), micros.count());

        httplib::Headers headers;
        if (!bearer.empty()) headers.emplace("Authorization", "Bearer " + bearer);
        auto result = client.Post(path, headers, body, "application/json");
        if (!result) {
            const auto err = result.error();
            TransportResponse response;
            response.timed_out = err == httplib::Error::Read || err == httplib::Error::Write ||
                                 err == httplib::Error::ConnectionTimeout;
            response.body = httplib::to_string(err);
            return response;
        }
        return {result->status, result->body, false};
    };
}

HttpChatClient::HttpChatClient(ClientConfig config, Transport transport)
    : config_(std::move(config)), transport_(std::move(transport)) {
    if (config_.retry_budget < 0) fail(ErrorCode::InvalidRequest, "retry budget must be >= 0");
    if (config_.max_in_flight == 0) config_.max_in_flight = 1;
}

std::string HttpChatClient::complete(const ChatRequest& request) {
    validate_request(request);
    if (config_.endpoint.empty()) fail(ErrorCode::InvalidRequest, "no endpoint configured");

    {
        std::unique_lock lock(mutex_);
        slot_free_.wait(lock, [&] { return in_flight_ < config_.max_in_flight; });
        ++in_flight_;
    }
    struct SlotRelease {
        HttpChatClient& self;
        ~SlotRelease() {
            {
                std::lock_guard lock(self.mutex_);
                --self.in_flight_;
            }
            self.slot_free_.notify_one();
        }
    } release{*this};

    const char* token = config_.token_env.empty() ? nullptr : std::getenv(config_.token_env.c_str());
    const std::string bearer = token ? token : "";
    const auto body = request_body(request);

    bool all_timeouts = true;
    std::string last_cause;
    const int attempts = config_.retry_budget + 1;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (attempt > 0 && config_.backoff_base.count() > 0) {
            std::this_thread::sleep_for(config_.backoff_base * (1LL << (attempt - 1)));
        }
        {
            std::lock_guard lock(mutex_);
            ++attempts_;
        }
        const auto response = transport_(config_.endpoint, body, bearer, config_.timeout);
        if (response.timed_out) {
            last_cause = "timeout";
            continue;
        }
        all_timeouts = false;
        if (response.status == 401 || response.status == 403) {
            fail(ErrorCode::AuthFailure, "endpoint rejected credentials (HTTP " +
                                             std::to_string(response.status) + ")");
        }
        if (response.status == 200) {
            const auto doc = detail::json::parse(response.body, nullptr, false);
            if (doc.is_object() && doc.contains("choices") && doc["choices"].is_array() &&
                !doc["choices"].empty()) {
                const auto& choice = doc["choices"][0];
                if (choice.contains("message") && choice["message"].contains("content") &&
                    choice["message"]["content"].is_string()) {
                    return choice["message"]["content"].get<std::string>();
                }
                if (choice.contains("text") && choice["text"].is_string()) return choice["text"].get<std::string>();
            }
            last_cause = "unparseable completion body";
            continue;
        }
        if (response.status >= 400 && response.status < 500 && response.status != 408 &&
            response.status != 429) {
            fail(ErrorCode::InvalidRequest, "endpoint returned HTTP " + std::to_string(response.status));
        }
        last_cause = response.status == 0 ? "connection failure: " + response.body
                                           : "HTTP " + std::to_string(response.status);
    }
    if (all_timeouts) fail(ErrorCode::Timeout, "all " + std::to_string(attempts) + " attempts timed out");
    fail(ErrorCode::BudgetExhausted,
         "gave up after " + std::to_string(attempts) + " attempt(s); last failure: " + last_cause);
}

// ---------------------------------------------------------------------------

RecordingClient::RecordingClient(ChatClient& inner, std::filesystem::path session)
    : inner_(inner), session_(std::move(session)) {}

std::string RecordingClient::complete(const ChatRequest& request) {
    auto completion = inner_.complete(request);
    detail::ordered_json doc;
    doc["digest"] = request_digest(request);
    doc["completion"] = completion;
    std::lock_guard lock(mutex_);
    std::ofstream out(session_, std::ios::binary | std::ios::app);
    if (!out) fail(ErrorCode::IoFailure, "cannot append to session " + session_.string());
    out << detail::dump_line(doc) << '\n';
    return completion;
}

ReplayClient::ReplayClient(std::map<std::string, std::string> session) : session_(std::move(session)) {}

std::string ReplayClient::complete(const ChatRequest& request) {
    validate_request(request);
    const auto digest = request_digest(request);
    auto it = session_.find(digest);
    if (it == session_.end()) fail(ErrorCode::ReplayMiss, "no recorded completion for request " + digest);
    return it->second;
}

std::unique_ptr<ReplayClient> record_replay(const std::filesystem::path& session_file) {
    std::map<std::string, std::string> session;
    for (const auto& line : read_lines(session_file)) {
        const auto doc = detail::parse_json(line, "session record");
        session[detail::require_string(doc, "digest", "session record")] =
            detail::require_string(doc, "completion", "session record");
    }
    return std::make_unique<ReplayClient>(std::move(session));
}

} // namespace toolplanner

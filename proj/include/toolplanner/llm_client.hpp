// SPDX-License-Identifier: Apache-2.0
//
// Chat-completion client used by the optional model-backed instruction
// generator, the remote policy adapter and the win-rate judge.
#pragma once

#include "toolplanner/common.hpp"

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

namespace toolplanner {

struct ChatMessage {
    std::string role;
    std::string content;
};

struct ChatRequest {
    std::vector<ChatMessage> messages;
    double temperature = 0.0;
    int max_tokens = 512;
    std::string model;
};

/// Throws InvalidRequest: messages empty, or first role not system/user.
void validate_request(const ChatRequest& request);
/// Stable hex digest of the request, used to key mocks and recordings.
std::string request_digest(const ChatRequest& request);
/// Chat-completions JSON body.
std::string request_body(const ChatRequest& request);
ChatRequest single_turn(std::string prompt, std::string system = {});

struct ClientConfig {
    std::string endpoint;
    /// Name of the environment variable holding the bearer token; the value
    /// itself is read per call and never stored or logged.
    std::string token_env = "TOOLPLANNER_API_TOKEN";
    std::chrono::milliseconds timeout{30000};
    int retry_budget = 2;
    std::chrono::milliseconds backoff_base{250};
    std::size_t max_in_flight = 4;
};

/// Endpoint from TOOLPLANNER_ENDPOINT, token variable name from
/// TOOLPLANNER_TOKEN_ENV when set.
ClientConfig config_from_environment();

class ChatClient {
public:
    virtual ~ChatClient() = default;
    virtual std::string complete(const ChatRequest& request) = 0;
};

/// Deterministic stand-in. Lookup order: exact digest, then the first rule
/// whose needle occurs in the last message, then a digest-derived string.
class MockClient : public ChatClient {
public:
    MockClient() = default;
    void add_canned(const ChatRequest& request, std::string completion);
    void add_rule(std::string needle, std::string completion);
    std::string complete(const ChatRequest& request) override;
    std::size_t calls() const { return calls_; }

private:
    std::map<std::string, std::string> canned_;
    std::vector<std::pair<std::string, std::string>> rules_;
    std::size_t calls_ = 0;
};

struct TransportResponse {
    int status = 0;
    std::string body;
    bool timed_out = false;
};

using Transport = std::function<TransportResponse(const std::string& url, const std::string& body,
                                                  const std::string& bearer,
                                                  std::chrono::milliseconds timeout)>;

Transport http_transport();

/// OpenAI-style chat endpoint client with bounded retries and exponential
/// backoff. Transient failures (timeouts, 429, 5xx, connection errors) are
/// retried; 401/403 fail immediately with AuthFailure.
class HttpChatClient : public ChatClient {
public:
    explicit HttpChatClient(ClientConfig config, Transport transport = http_transport());
    std::string complete(const ChatRequest& request) override;
    std::size_t attempts() const { return attempts_; }

private:
    ClientConfig config_;
    Transport transport_;
    std::size_t attempts_ = 0;
    std::mutex mutex_;
    std::condition_variable slot_free_;
    std::size_t in_flight_ = 0;
};

/// Wraps a client and appends every (digest, completion) to a session file.
class RecordingClient : public ChatClient {
public:
    RecordingClient(ChatClient& inner, std::filesystem::path session);
    std::string complete(const ChatRequest& request) override;

private:
    ChatClient& inner_;
    std::filesystem::path session_;
    std::mutex mutex_;
};

/// Answers from a recorded session; unseen requests raise ReplayMiss.
class ReplayClient : public ChatClient {
public:
    explicit ReplayClient(std::map<std::string, std::string> session);
    std::string complete(const ChatRequest& request) override;
    std::size_t size() const { return session_.size(); }

private:
    std::map<std::string, std::string> session_;
};

std::unique_ptr<ReplayClient> record_replay(const std::filesystem::path& session_file);

} // namespace toolplanner

// SPDX-License-Identifier: Apache-2.0
#include "toolplanner/llm_client.hpp"

#include "../support/fixtures.hpp"

#include <doctest.h>

#include <cstdlib>
#include <fstream>

using namespace toolplanner;

namespace {

ClientConfig quick_config(int retries) {
    ClientConfig config;
    config.endpoint = "http://example.invalid/v1/chat/completions";
    config.retry_budget = retries;
    config.backoff_base = std::chrono::milliseconds(0);
    return config;
}

Transport counting(int& calls, TransportResponse response) {
    return [&calls, response](const std::string&, const std::string&, const std::string&, std::chrono::milliseconds) {
        ++calls;
        return response;
    };
}

const std::string kOk = R"({"choices":[{"message":{"role":"assistant","content":"hello"}}]})";

} // namespace

TEST_CASE("mock completions are deterministic") {
    MockClient a;
    MockClient b;
    const auto request = single_turn("List three beaches.");
    CHECK(a.complete(request) == b.complete(request));
    CHECK(a.complete(request) == a.complete(request));
    CHECK(a.complete(request) != a.complete(single_turn("List four beaches.")));
    CHECK(a.calls() == 5);

    a.add_rule("beaches", "Malibu");
    CHECK(a.complete(request) == "Malibu");
    a.add_canned(request, "exact");
    CHECK(a.complete(request) == "exact");
}

TEST_CASE("request validation happens before any transport call") {
    int calls = 0;
    HttpChatClient client(quick_config(2), counting(calls, {200, kOk, false}));
    try {
        client.complete(ChatRequest{});
        FAIL("accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidRequest);
    }
    ChatRequest assistant_first;
    assistant_first.messages = {{"assistant", "hi"}};
    CHECK_THROWS_AS(client.complete(assistant_first), Error);
    CHECK(calls == 0);
    MockClient mock;
    CHECK_THROWS_AS(mock.complete(ChatRequest{}), Error);
}

TEST_CASE("a zero retry budget makes exactly one attempt") {
    int calls = 0;
    HttpChatClient client(quick_config(0), counting(calls, {503, "busy", false}));
    try {
        client.complete(single_turn("x"));
        FAIL("no failure");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BudgetExhausted);
    }
    CHECK(calls == 1);
    CHECK(client.attempts() == 1);
}

TEST_CASE("transient failures are retried within the budget") {
    int calls = 0;
    Transport flaky = [&calls](const std::string&, const std::string&, const std::string&, std::chrono::milliseconds) {
        ++calls;
        return calls < 3 ? TransportResponse{429, "slow down", false} : TransportResponse{200, kOk, false};
    };
    HttpChatClient client(quick_config(2), flaky);
    CHECK(client.complete(single_turn("x")) == "hello");
    CHECK(calls == 3);

    int timeouts = 0;
    HttpChatClient slow(quick_config(1), counting(timeouts, {0, "", true}));
    try {
        slow.complete(single_turn("x"));
        FAIL("no failure");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Timeout);
    }
    CHECK(timeouts == 2);
}

TEST_CASE("rejected credentials fail without retrying") {
    int calls = 0;
    HttpChatClient client(quick_config(3), counting(calls, {401, "no", false}));
    try {
        client.complete(single_turn("x"));
        FAIL("no failure");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::AuthFailure);
    }
    CHECK(calls == 1);
}

TEST_CASE("the bearer token is read from the environment per call") {
    std::string seen;
    Transport capture = [&seen](const std::string&, const std::string&, const std::string& bearer,
                                std::chrono::milliseconds) {
        seen = bearer;
        return TransportResponse{200, kOk, false};
    };
    auto config = quick_config(0);
    config.token_env = "TOOLPLANNER_TEST_TOKEN";
    ::setenv("TOOLPLANNER_TEST_TOKEN", "s3cret-token", 1);
    HttpChatClient client(config, capture);
    client.complete(single_turn("x"));
    CHECK(seen == "s3cret-token");
    ::unsetenv("TOOLPLANNER_TEST_TOKEN");
    client.complete(single_turn("x"));
    CHECK(seen.empty());
}

TEST_CASE("recording then replaying") {
    const auto dir = fixtures::scratch_dir("llm_session");
    const auto session = dir / "session.jsonl";
    ::setenv("TOOLPLANNER_TEST_TOKEN", "s3cret-token", 1);
    Transport echo = [](const std::string&, const std::string& body, const std::string&, std::chrono::milliseconds) {
        const bool beach = body.find("beach") != std::string::npos;
        return TransportResponse{
            200, std::string(R"({"choices":[{"message":{"content":")") + (beach ? "sand" : "snow") + "\"}}]}", false};
    };
    auto config = quick_config(0);
    config.token_env = "TOOLPLANNER_TEST_TOKEN";
    HttpChatClient http(config, echo);
    RecordingClient recorder(http, session);
    const auto beach = single_turn("plan a beach day");
    const auto ski = single_turn("plan a ski day");
    CHECK(recorder.complete(beach) == "sand");
    CHECK(recorder.complete(ski) == "snow");
    ::unsetenv("TOOLPLANNER_TEST_TOKEN");

    const auto text = fixtures::slurp(session);
    CHECK(text.find("s3cret-token") == std::string::npos);

    const auto replay = record_replay(session);
    CHECK(replay->size() == 2);
    CHECK(replay->complete(beach) == "sand");
    CHECK(replay->complete(ski) == "snow");
    try {
        replay->complete(single_turn("plan a city day"));
        FAIL("replayed");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ReplayMiss);
    }
}

TEST_CASE("an empty session misses everything") {
    const auto dir = fixtures::scratch_dir("llm_empty");
    std::ofstream(dir / "empty.jsonl").close();
    const auto replay = record_replay(dir / "empty.jsonl");
    CHECK(replay->size() == 0);
    CHECK_THROWS_AS(replay->complete(single_turn("x")), Error);
}

TEST_CASE("request digests and bodies") {
    auto a = single_turn("hi", "be brief");
    auto b = a;
    CHECK(request_digest(a) == request_digest(b));
    b.temperature = 0.5;
    CHECK(request_digest(a) != request_digest(b));
    CHECK(request_body(a).find("\"be brief\"") != std::string::npos);
    CHECK(a.messages.front().role == "system");
}

TEST_CASE("configuration comes from the environment") {
    ::setenv("TOOLPLANNER_ENDPOINT", "http://127.0.0.1:9/v1/chat/completions", 1);
    const auto config = config_from_environment();
    CHECK(config.endpoint == "http://127.0.0.1:9/v1/chat/completions");
    ::unsetenv("TOOLPLANNER_ENDPOINT");
    CHECK(config_from_environment().endpoint.empty());
    CHECK_THROWS_AS(HttpChatClient(quick_config(-1)), Error);
}

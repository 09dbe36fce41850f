// SPDX-License-Identifier: Apache-2.0
//
// Simulated tool pool. Responses come from a fixture table; failures are
// returned in-band as observations with a non-empty error.
#pragma once

#include "toolplanner/common.hpp"
#include "toolplanner/corpus.hpp"
#include "toolplanner/registry.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <utility>

namespace toolplanner {

using CanonicalArgs = std::map<std::string, std::string>;

/// Parses a JSON object of arguments. Keys come out sorted; string values
/// are kept as-is, other values as compact JSON text. Empty input gives an
/// empty map. Throws MalformedArguments.
CanonicalArgs canonicalize(std::string_view arguments_text);
/// Compact JSON text of a canonical map, used as the fixture lookup key.
std::string canonical_text(const CanonicalArgs& args);

struct ApiRequest {
    std::string api_name;
    CanonicalArgs arguments;
};

ApiRequest make_request(const RoundProposal& round);

struct EnvFixture {
    std::map<std::pair<std::string, std::string>, Observation> responses;
    std::map<std::string, Observation> default_per_api;
    /// (api, 1-based call index) -> injected error text.
    std::map<std::pair<std::string, std::size_t>, std::string> fault_plan;

    void add_response(const std::string& api, std::string_view arguments_text, Observation observation);
    void set_default(const std::string& api, Observation observation);
    void inject_fault(const std::string& api, std::size_t call_index, std::string error);

    /// Throws UnknownApi for keyed apis missing from the registry.
    void validate(const Registry& registry) const;

    /// Exact-key responses taken from the tool rounds of a trace; the first
    /// observation wins when a call repeats.
    static EnvFixture from_trace(const SolutionTrace& trace);
};

/// Per-episode call counts, keyed by api name.
class CallCounter {
public:
    /// Records one more call and returns its 1-based index.
    std::size_t next(const std::string& api) { return ++counts_[api]; }
    std::size_t count(const std::string& api) const;

private:
    std::map<std::string, std::size_t> counts_;
};

/// Fault plan, then exact (api, arguments) response, then per-api default,
/// then a not-found observation. Never throws for unknown apis.
Observation execute(const ApiRequest& request, const EnvFixture& fixture, CallCounter& counter);

/// Line records, one of:
///   {"api", "args", "error", "response"}        exact response
///   {"api", "default": true, "error", "response"} per-api default
///   {"api", "fault_call", "error"}              injected fault
EnvFixture load_env_fixture(const std::filesystem::path& path);
std::size_t write_env_fixture(const EnvFixture& fixture, const std::filesystem::path& path);

} // namespace toolplanner

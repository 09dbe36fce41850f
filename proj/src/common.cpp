// SPDX-License-Identifier: Apache-2.0
#include "toolplanner/common.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <unordered_set>

namespace toolplanner {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::UnknownApi: return "UnknownApi";
    case ErrorCode::DanglingCall: return "DanglingCall";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::ConflictingParent: return "ConflictingParent";
    case ErrorCode::GeneratorFailure: return "GeneratorFailure";
    case ErrorCode::TagOmitted: return "TagOmitted";
    case ErrorCode::MalformedArguments: return "MalformedArguments";
    case ErrorCode::PolicyFailure: return "PolicyFailure";
    case ErrorCode::ParseFailure: return "ParseFailure";
    case ErrorCode::UnknownAction: return "UnknownAction";
    case ErrorCode::Divergence: return "Divergence";
    case ErrorCode::NoApplicableStrategy: return "NoApplicableStrategy";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::EmptyEvalSet: return "EmptyEvalSet";
    case ErrorCode::JudgeFailure: return "JudgeFailure";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::AuthFailure: return "AuthFailure";
    case ErrorCode::BudgetExhausted: return "BudgetExhausted";
    case ErrorCode::ReplayMiss: return "ReplayMiss";
    case ErrorCode::InvalidRequest: return "InvalidRequest";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

std::string_view to_string(Level level) {
    switch (level) {
    case Level::Statement: return "statement";
    case Level::Category: return "category";
    case Level::Tool: return "tool";
    case Level::Api: return "api";
    case Level::Hybrid: return "hybrid";
    }
    return "?";
}

std::string_view to_string(TagLevel level) {
    switch (level) {
    case TagLevel::Category: return "category";
    case TagLevel::Tool: return "tool";
    case TagLevel::Api: return "api";
    }
    return "?";
}

Level parse_level(std::string_view text) {
    const auto lower = to_lower(text);
    for (auto level : kAllLevels) {
        if (to_string(level) == lower) return level;
    }
    fail(ErrorCode::MalformedRecord, "unknown instruction level '" + std::string(text) + "'");
}

TagLevel parse_tag_level(std::string_view text) {
    const auto lower = to_lower(text);
    for (auto level : kAllTagLevels) {
        if (to_string(level) == lower) return level;
    }
    fail(ErrorCode::MalformedRecord, "unknown tag level '" + std::string(text) + "'");
}

std::optional<TagLevel> required_tag_level(Level level) {
    switch (level) {
    case Level::Statement: return std::nullopt;
    case Level::Category: return TagLevel::Category;
    case Level::Tool: return TagLevel::Tool;
    case Level::Api:
    case Level::Hybrid: return TagLevel::Api;
    }
    return std::nullopt;
}

const std::vector<std::string>& TagList::at(TagLevel level) const {
    switch (level) {
    case TagLevel::Category: return categories;
    case TagLevel::Tool: return tools;
    case TagLevel::Api: break;
    }
    return apis;
}

std::vector<std::string> SolutionPath::apis() const {
    std::vector<std::string> out;
    for (const auto& step : steps) {
        if (step != kFinish) out.push_back(step);
    }
    return out;
}

bool SolutionPath::well_formed() const {
    return !steps.empty() && steps.back() == kFinish &&
           std::count(steps.begin(), steps.end(), std::string(kFinish)) == 1;
}

SolutionPath make_path(std::vector<std::string> apis) {
    SolutionPath path;
    path.steps = std::move(apis);
    path.steps.emplace_back(kFinish);
    return path;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ (stream + 0x632be59bd9b4e019ULL));
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream) {
    return derive_seed(seed, fnv1a64(stream));
}

std::size_t uniform_index(Rng& rng, std::size_t n) {
    if (n <= 1) return 0;
    const std::uint64_t bound = n;
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
    std::uint64_t draw = rng();
    while (draw >= limit) draw = rng();
    return static_cast<std::size_t>(draw % bound);
}

double uniform_unit(Rng& rng) {
    // 53 random mantissa bits, in [0, 1).
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::string hex64(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

std::string to_lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string trim(std::string_view text) {
    const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
    auto begin = text.begin();
    auto end = text.end();
    while (begin != end && is_space(*begin)) ++begin;
    while (end != begin && is_space(*(end - 1))) --end;
    return std::string(begin, end);
}

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(text.substr(start));
            break;
        }
        out.emplace_back(text.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

bool contains_ci(std::string_view haystack, std::string_view needle) {
    return to_lower(haystack).find(to_lower(needle)) != std::string::npos;
}

std::vector<std::string> unique_in_order(const std::vector<std::string>& names) {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (const auto& name : names) {
        if (seen.insert(name).second) out.push_back(name);
    }
    return out;
}

std::string join_and(const std::vector<std::string>& names) {
    if (names.empty()) return {};
    if (names.size() == 1) return names.front();
    std::string out;
    for (std::size_t i = 0; i + 1 < names.size(); ++i) {
        if (i > 0) out += ", ";
        out += names[i];
    }
    return out + " and " + names.back();
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) out += sep;
        out += parts[i];
    }
    return out;
}

} // namespace toolplanner

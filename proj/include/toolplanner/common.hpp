// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace toolplanner {

enum class ErrorCode {
    MalformedRecord,
    UnknownApi,
    DanglingCall,
    IoFailure,
    ConflictingParent,
    GeneratorFailure,
    TagOmitted,
    MalformedArguments,
    PolicyFailure,
    ParseFailure,
    UnknownAction,
    Divergence,
    NoApplicableStrategy,
    InvariantViolation,
    EmptyEvalSet,
    JudgeFailure,
    Timeout,
    AuthFailure,
    BudgetExhausted,
    ReplayMiss,
    InvalidRequest,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI exit-code mapping) can branch on it.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

/// Instruction granularity, coarse to fine, with Hybrid being the original
/// seed instruction.
enum class Level { Statement, Category, Tool, Api, Hybrid };

/// The three name levels an API occurrence resolves to.
enum class TagLevel { Category, Tool, Api };

inline constexpr Level kAllLevels[] = {Level::Statement, Level::Category, Level::Tool, Level::Api,
                                       Level::Hybrid};
inline constexpr TagLevel kAllTagLevels[] = {TagLevel::Category, TagLevel::Tool, TagLevel::Api};

std::string_view to_string(Level level);
std::string_view to_string(TagLevel level);
Level parse_level(std::string_view text);
TagLevel parse_tag_level(std::string_view text);

/// Tag level an instruction must match at; nullopt for Statement, which has
/// no tag requirement.
std::optional<TagLevel> required_tag_level(Level level);

inline constexpr std::string_view kFinish = "Finish";

/// Aligned per-occurrence (category, tool, api) names. Duplicates and order
/// are preserved.
struct TagList {
    std::vector<std::string> categories;
    std::vector<std::string> tools;
    std::vector<std::string> apis;

    std::size_t size() const { return apis.size(); }
    bool empty() const { return apis.empty(); }
    bool aligned() const { return categories.size() == tools.size() && tools.size() == apis.size(); }
    const std::vector<std::string>& at(TagLevel level) const;

    bool operator==(const TagList&) const = default;
};

/// Ordered API names terminated by exactly one Finish.
struct SolutionPath {
    std::vector<std::string> steps;
    bool repaired = false;

    /// Steps without the Finish terminator.
    std::vector<std::string> apis() const;
    bool well_formed() const;

    bool operator==(const SolutionPath& other) const { return steps == other.steps; }
};

SolutionPath make_path(std::vector<std::string> apis);

// Deterministic randomness. std::mt19937_64 output is fixed by the standard;
// the distributions are not, so index draws go through uniform_index.
using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream);
std::size_t uniform_index(Rng& rng, std::size_t n);
double uniform_unit(Rng& rng);

std::uint64_t fnv1a64(std::string_view text);
std::string hex64(std::uint64_t value);

// String helpers shared across modules.
std::string to_lower(std::string_view text);
std::string trim(std::string_view text);
std::vector<std::string> split(std::string_view text, char sep);
bool contains_ci(std::string_view haystack, std::string_view needle);
std::vector<std::string> unique_in_order(const std::vector<std::string>& names);
/// "A", "A and B", "A, B and C".
std::string join_and(const std::vector<std::string>& names);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

} // namespace toolplanner

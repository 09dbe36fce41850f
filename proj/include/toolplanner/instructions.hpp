// SPDX-License-Identifier: Apache-2.0
//
// Multi-granularity instruction construction: statement trimming, level
// instruction generation, seed expansion and per-level data balancing.
#pragma once

#include "toolplanner/common.hpp"
#include "toolplanner/corpus.hpp"
#include "toolplanner/llm_client.hpp"
#include "toolplanner/registry.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace toolplanner {

std::vector<std::string> split_sentences(std::string_view text);

/// Leading situation sentences of a hybrid instruction: everything before
/// the first sentence carrying a request marker. Falls back to the first
/// sentence, so the result is never empty for non-empty input.
std::string trim_statement(std::string_view hybrid_text);

class InstructionGenerator {
public:
    virtual ~InstructionGenerator() = default;
    /// level_tags are the per-step names at `level`, repeats included.
    virtual std::string generate(Level level, const std::string& statement,
                                 const std::vector<std::string>& level_tags) = 0;
};

/// Deterministic templates modelled on the exemplar answers of the
/// generation prompts.
class TemplateGenerator : public InstructionGenerator {
public:
    std::string generate(Level level, const std::string& statement,
                         const std::vector<std::string>& level_tags) override;
};

/// Category / tool / API generation prompts. Each contains a {request}
/// placeholder.
struct GenerationPrompts {
    std::string category;
    std::string tool;
    std::string api;

    static GenerationPrompts load(const std::filesystem::path& dir);
    const std::string& for_level(Level level) const;
};

std::string fill_placeholder(std::string text, std::string_view name, std::string_view value);

class LlmGenerator : public InstructionGenerator {
public:
    LlmGenerator(ChatClient& client, GenerationPrompts prompts);
    std::string generate(Level level, const std::string& statement,
                         const std::vector<std::string>& level_tags) override;
    /// "<statement>\nCategory: Data, Food, Food." style request block.
    static std::string request_block(Level level, const std::string& statement,
                                     const std::vector<std::string>& tags);

private:
    ChatClient& client_;
    GenerationPrompts prompts_;
};

struct GenerationLog {
    int attempts = 0;
    int omissions = 0;
    bool fallback = false;
};

inline constexpr int kDefaultGenerationRetries = 3;

/// Generates a Category, Tool or API instruction. A result missing the
/// statement or any tag name counts as TagOmitted and is regenerated up to
/// `retry_cap` attempts, after which the template output is used.
/// Generator errors propagate as GeneratorFailure.
Instruction generate_instruction(Level level, const std::string& statement, const TagList& tags,
                                 InstructionGenerator& generator, std::int64_t source_seed = 0,
                                 int retry_cap = kDefaultGenerationRetries, GenerationLog* log = nullptr);

/// True when text contains the statement and every unique tag at `level`.
bool instruction_covers(const std::string& text, const std::string& statement, Level level,
                        const TagList& tags);

struct TaskGroup {
    SeedTask seed;
    TagList tags;
    std::map<Level, Instruction> instructions;
    SolutionTrace solution;
    SolutionPath solution_path;

    std::vector<MGRecord> records() const;
};

/// Maps a relevant (tool, api) pair onto a registry api key: the api name
/// itself, or the ToolBench function name. Throws UnknownApi.
std::string resolve_relevant_api(const std::string& tool, const std::string& api, const Registry& registry);

TaskGroup expand_seed(const SeedTask& seed, const Registry& registry, InstructionGenerator& generator,
                      int retry_cap = kDefaultGenerationRetries);

/// Number of instructions derived from seeds (excludes the hybrid originals).
std::size_t derived_instruction_count(std::span<const TaskGroup> groups);

using BalanceRatios = std::map<Level, double>;

/// "statement=0.5,category=0.5"; unspecified levels keep everything.
BalanceRatios parse_balance(std::string_view text);

/// Keeps round-half-up(fraction x count) tasks per level, picked by seeded
/// sampling without replacement; output follows group then level order.
std::vector<MGRecord> balance_dataset(std::span<const TaskGroup> groups, const BalanceRatios& ratios,
                                      std::uint64_t rng_seed);

std::size_t round_half_up(double fraction, std::size_t count);

} // namespace toolplanner

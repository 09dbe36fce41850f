// SPDX-License-Identifier: Apache-2.0
#include "toolplanner/instructions.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace toolplanner {

namespace {

constexpr std::string_view kRequestMarkers[] = {"can you", "please", "using", "fetch", "provide",
                                                "give me", "find", "also", "additionally"};

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

bool contains_marker(std::string_view sentence) {
    const auto lower = to_lower(sentence);
    for (auto marker : kRequestMarkers) {
        std::size_t pos = 0;
        while ((pos = lower.find(marker, pos)) != std::string::npos) {
            const bool starts = pos == 0 || !is_word_char(lower[pos - 1]);
            const auto end = pos + marker.size();
            const bool ends = end == lower.size() || !is_word_char(lower[end]);
            if (starts && ends) return true;
            ++pos;
        }
    }
    return false;
}

} // namespace

std::vector<std::string> split_sentences(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c != '.' && c != '!' && c != '?') continue;
        // Consume runs like "?!" or "...".
        while (i + 1 < text.size() && (text[i + 1] == '.' || text[i + 1] == '!' || text[i + 1] == '?')) ++i;
        const bool at_end = i + 1 == text.size();
        if (at_end || std::isspace(static_cast<unsigned char>(text[i + 1]))) {
            auto sentence = trim(text.substr(start, i + 1 - start));
            if (!sentence.empty()) out.push_back(std::move(sentence));
            start = i + 1;
        }
    }
    auto tail = trim(text.substr(std::min(start, text.size())));
    if (!tail.empty()) out.push_back(std::move(tail));
    return out;
}

std::string trim_statement(std::string_view hybrid_text) {
    const auto sentences = split_sentences(hybrid_text);
    if (sentences.empty()) return trim(hybrid_text);
    std::vector<std::string> kept;
    for (const auto& sentence : sentences) {
        if (contains_marker(sentence)) break;
        kept.push_back(sentence);
    }
    if (kept.empty()) return sentences.front();
    return join(kept, " ");
}

// ---------------------------------------------------------------------------

std::string TemplateGenerator::generate(Level level, const std::string& statement,
                                        const std::vector<std::string>& level_tags) {
    const auto unique = unique_in_order(level_tags);
    const auto names = join_and(unique);
    switch (level) {
    case Level::Category:
        return statement + " Please provide me with relevant information using tools from " + names +
               (unique.size() == 1 ? " category." : " categories.");
    case Level::Tool:
        return statement + " Using " + names + ", please give me some ideas.";
    case Level::Api:
        return statement + " Using " + names + (unique.size() == 1 ? " API" : " APIs") +
               ", please give me some ideas.";
    case Level::Statement:
    case Level::Hybrid: break;
    }
    fail(ErrorCode::GeneratorFailure, "template generator only handles category, tool and api levels");
}

GenerationPrompts GenerationPrompts::load(const std::filesystem::path& dir) {
    const auto read = [&](const char* name) {
        std::ifstream in(dir / name, std::ios::binary);
        if (!in) fail(ErrorCode::IoFailure, "cannot read prompt template " + (dir / name).string());
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };
    return {read("category_instruction.txt"), read("tool_instruction.txt"), read("api_instruction.txt")};
}

const std::string& GenerationPrompts::for_level(Level level) const {
    switch (level) {
    case Level::Category: return category;
    case Level::Tool: return tool;
    case Level::Api: return api;
    case Level::Statement:
    case Level::Hybrid: break;
    }
    fail(ErrorCode::GeneratorFailure, "no generation prompt for level " + std::string(to_string(level)));
}

std::string fill_placeholder(std::string text, std::string_view name, std::string_view value) {
    const std::string token = "{" + std::string(name) + "}";
    std::size_t pos = 0;
    while ((pos = text.find(token, pos)) != std::string::npos) {
        text.replace(pos, token.size(), value);
        pos += value.size();
    }
    return text;
}

LlmGenerator::LlmGenerator(ChatClient& client, GenerationPrompts prompts)
    : client_(client), prompts_(std::move(prompts)) {}

std::string LlmGenerator::request_block(Level level, const std::string& statement,
                                        const std::vector<std::string>& tags) {
    std::string label = level == Level::Category ? "Category" : level == Level::Tool ? "Tool" : "API";
    return statement + "\n" + label + ": " + join(tags, ", ") + ".";
}

std::string LlmGenerator::generate(Level level, const std::string& statement,
                                   const std::vector<std::string>& level_tags) {
    const auto prompt = fill_placeholder(prompts_.for_level(level), "request",
                                         request_block(level, statement, level_tags));
    std::string completion;
    try {
        completion = client_.complete(single_turn(prompt));
    } catch (const Error& e) {
        fail(ErrorCode::GeneratorFailure, e.what());
    }
    auto text = trim(completion);
    if (text.rfind("Answer:", 0) == 0) text = trim(text.substr(7));
    return text;
}

bool instruction_covers(const std::string& text, const std::string& statement, Level level,
                        const TagList& tags) {
    if (text.find(statement) == std::string::npos) return false;
    const auto tag_level = required_tag_level(level);
    if (!tag_level) return true;
    for (const auto& name : unique_in_order(tags.at(*tag_level))) {
        if (text.find(name) == std::string::npos) return false;
    }
    return true;
}

Instruction generate_instruction(Level level, const std::string& statement, const TagList& tags,
                                 InstructionGenerator& generator, std::int64_t source_seed, int retry_cap,
                                 GenerationLog* log) {
    if (level != Level::Category && level != Level::Tool && level != Level::Api) {
        fail(ErrorCode::InvalidRequest, "generate_instruction handles category, tool and api levels");
    }
    if (tags.empty()) fail(ErrorCode::InvalidRequest, "generate_instruction needs a non-empty tag list");

    // Aligned per-step names, repeats included; the model sees them as given.
    const auto& level_tags = tags.at(*required_tag_level(level));
    GenerationLog local;
    Instruction instruction;
    instruction.id = instruction_id(source_seed, level);
    instruction.level = level;
    instruction.gold_tags = tags;
    instruction.source_seed = source_seed;

    for (int attempt = 0; attempt < std::max(retry_cap, 1); ++attempt) {
        ++local.attempts;
        auto text = generator.generate(level, statement, level_tags);
        if (instruction_covers(text, statement, level, tags)) {
            instruction.text = std::move(text);
            if (log) *log = local;
            return instruction;
        }
        ++local.omissions;
    }
    local.fallback = true;
    TemplateGenerator fallback;
    instruction.text = fallback.generate(level, statement, level_tags);
    if (log) *log = local;
    return instruction;
}

// ---------------------------------------------------------------------------

std::vector<MGRecord> TaskGroup::records() const {
    std::vector<MGRecord> out;
    for (auto level : kAllLevels) {
        auto it = instructions.find(level);
        if (it == instructions.end()) continue;
        out.push_back({it->second, tags, solution_path, solution});
    }
    return out;
}

std::string resolve_relevant_api(const std::string& tool, const std::string& api, const Registry& registry) {
    if (registry.has_api(api)) return api;
    auto function_name = toolbench_function_name(tool, api);
    if (registry.has_api(function_name)) return function_name;
    fail(ErrorCode::UnknownApi, "relevant API (" + tool + ", " + api + ") not in registry");
}

TaskGroup expand_seed(const SeedTask& seed, const Registry& registry, InstructionGenerator& generator,
                      int retry_cap) {
    TaskGroup group;
    group.seed = seed;

    std::vector<std::string> relevant;
    for (const auto& [tool, api] : seed.relevant_apis) relevant.push_back(resolve_relevant_api(tool, api, registry));
    group.tags = derive_tag_list(std::span<const std::string>(relevant), registry);

    if (!seed.solution.empty()) {
        group.solution = parse_solution_trace(seed.solution);
        group.solution_path = make_path(group.solution.actions());
        for (const auto& api : group.solution_path.apis()) {
            if (!registry.has_api(api)) fail(ErrorCode::UnknownApi, "seed solution calls unknown api '" + api + "'");
        }
    } else {
        group.solution_path = make_path(relevant);
    }

    const auto make = [&](Level level, std::string text) {
        Instruction inst;
        inst.id = instruction_id(seed.query_id, level);
        inst.text = std::move(text);
        inst.level = level;
        inst.gold_tags = group.tags;
        inst.source_seed = seed.query_id;
        return inst;
    };
    group.instructions[Level::Hybrid] = make(Level::Hybrid, seed.query);
    const auto statement = trim_statement(seed.query);
    group.instructions[Level::Statement] = make(Level::Statement, statement);
    for (auto level : {Level::Category, Level::Tool, Level::Api}) {
        group.instructions[level] =
            generate_instruction(level, statement, group.tags, generator, seed.query_id, retry_cap);
    }
    return group;
}

std::size_t derived_instruction_count(std::span<const TaskGroup> groups) {
    std::size_t count = 0;
    for (const auto& group : groups) {
        for (const auto& [level, inst] : group.instructions) count += level == Level::Hybrid ? 0 : 1;
    }
    return count;
}

BalanceRatios parse_balance(std::string_view text) {
    BalanceRatios ratios;
    if (trim(text).empty()) return ratios;
    for (const auto& part : split(text, ',')) {
        const auto eq = part.find('=');
        if (eq == std::string::npos) fail(ErrorCode::InvalidRequest, "balance entry '" + part + "' lacks '='");
        const auto level = parse_level(trim(part.substr(0, eq)));
        double value = 0;
        try {
            std::size_t used = 0;
            const auto number = trim(part.substr(eq + 1));
            value = std::stod(number, &used);
            if (used != number.size()) throw std::invalid_argument(number);
        } catch (const std::exception&) {
            fail(ErrorCode::InvalidRequest, "balance entry '" + part + "' has a bad fraction");
        }
        if (!(value >= 0.0 && value <= 1.0)) {
            fail(ErrorCode::InvalidRequest, "balance entry '" + part + "' must lie in [0, 1]");
        }
        ratios[level] = value;
    }
    return ratios;
}

std::size_t round_half_up(double fraction, std::size_t count) {
    return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(count) + 0.5));
}

std::vector<MGRecord> balance_dataset(std::span<const TaskGroup> groups, const BalanceRatios& ratios,
                                      std::uint64_t rng_seed) {
    for (const auto& [level, fraction] : ratios) {
        if (!(fraction >= 0.0 && fraction <= 1.0)) {
            fail(ErrorCode::InvalidRequest, "balance fraction for " + std::string(to_string(level)) +
                                                " must lie in [0, 1]");
        }
    }
    // keep[level][group index]
    std::map<Level, std::vector<bool>> keep;
    for (auto level : kAllLevels) {
        std::vector<std::size_t> members;
        for (std::size_t g = 0; g < groups.size(); ++g) {
            if (groups[g].instructions.contains(level)) members.push_back(g);
        }
        auto& mask = keep[level];
        mask.assign(groups.size(), false);
        const auto it = ratios.find(level);
        const std::size_t target = it == ratios.end() ? members.size() : round_half_up(it->second, members.size());
        // Partial Fisher-Yates over the members of this level.
        Rng rng(derive_seed(rng_seed, static_cast<std::uint64_t>(level)));
        for (std::size_t i = 0; i < target; ++i) {
            const auto j = i + uniform_index(rng, members.size() - i);
            std::swap(members[i], members[j]);
            mask[members[i]] = true;
        }
    }
    std::vector<MGRecord> out;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        for (auto& record : groups[g].records()) {
            if (keep[record.instruction.level][g]) out.push_back(std::move(record));
        }
    }
    return out;
}

} // namespace toolplanner

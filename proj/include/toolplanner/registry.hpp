// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "toolplanner/common.hpp"
#include "toolplanner/corpus.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace toolplanner {

struct RegistryEntry {
    std::string category;
    std::string tool;
    std::string api;
    std::string description;
};

struct RegistryCounts {
    std::size_t categories = 0;
    std::size_t tools = 0;
    std::size_t apis = 0;

    bool operator==(const RegistryCounts&) const = default;
};

/// Category -> tool -> API hierarchy. Immutable after load.
class Registry {
public:
    /// Throws ConflictingParent when an api (or tool) is claimed by two
    /// parents; exact duplicate entries collapse.
    static Registry load(std::span<const RegistryEntry> entries);

    RegistryCounts counts() const;

    bool has_api(const std::string& api) const { return api_tool_.contains(api); }
    bool has_tool(const std::string& tool) const { return tool_category_.contains(tool); }

    const std::string& tool_of(const std::string& api) const;
    const std::string& category_of_tool(const std::string& tool) const;
    const std::string& category_of(const std::string& api) const;
    /// Name of an api at the given level. Throws UnknownApi.
    const std::string& resolve(const std::string& api, TagLevel level) const;

    /// APIs, tools and categories in first-load order.
    const std::vector<std::string>& apis() const { return apis_; }
    const std::vector<std::string>& tools() const { return tools_; }
    const std::vector<std::string>& categories() const { return categories_; }
    std::vector<std::string> apis_of_tool(const std::string& tool) const;

    const std::string& description(const std::string& api) const;

    std::vector<RegistryEntry> entries() const;

private:
    std::vector<std::string> categories_;
    std::vector<std::string> tools_;
    std::vector<std::string> apis_;
    std::unordered_map<std::string, std::string> tool_category_;
    std::unordered_map<std::string, std::string> api_tool_;
    std::unordered_map<std::string, std::string> descriptions_;
};

/// Aligned tag lists for every non-Finish step of a path. Throws UnknownApi.
TagList derive_tag_list(const SolutionPath& path, const Registry& registry);
TagList derive_tag_list(std::span<const std::string> apis, const Registry& registry);

/// Top-k APIs by lower-cased token overlap with the api name and its
/// description; ties keep registry load order.
std::vector<std::string> lexical_retrieve(std::string_view instruction_text, const Registry& registry,
                                          std::size_t k);

std::vector<std::string> tokenize(std::string_view text);

/// ToolBench's identifier normalization: lower case, runs of other characters
/// collapsed to a single underscore.
std::string standardize_name(std::string_view name);
/// "<api>_for_<tool>", the function name ToolBench traces use for an API.
std::string toolbench_function_name(std::string_view tool, std::string_view api);

/// Registry entries implied by the api_list pools of seed tasks. API keys
/// use the ToolBench function name so they are unique and match trace
/// actions.
std::vector<RegistryEntry> registry_entries_from_seeds(std::span<const SeedTask> seeds);

std::vector<RegistryEntry> read_registry_entries(const std::filesystem::path& path);
std::size_t write_registry_entries(std::span<const RegistryEntry> entries,
                                   const std::filesystem::path& path);
Registry load_registry_file(const std::filesystem::path& path);

} // namespace toolplanner

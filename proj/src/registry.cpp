// SPDX-License-Identifier: Apache-2.0
#include "toolplanner/registry.hpp"

#include "json_util.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <unordered_set>

namespace toolplanner {

Registry Registry::load(std::span<const RegistryEntry> entries) {
    if (entries.empty()) fail(ErrorCode::MalformedRecord, "registry: no entries");
    Registry reg;
    std::unordered_set<std::string> seen_categories;
    for (const auto& entry : entries) {
        if (entry.category.empty() || entry.tool.empty() || entry.api.empty()) {
            fail(ErrorCode::MalformedRecord, "registry: entry with an empty name");
        }
        if (seen_categories.insert(entry.category).second) reg.categories_.push_back(entry.category);

        if (auto it = reg.tool_category_.find(entry.tool); it != reg.tool_category_.end()) {
            if (it->second != entry.category) {
                fail(ErrorCode::ConflictingParent, "tool '" + entry.tool + "' claimed by categories '" +
                                                       it->second + "' and '" + entry.category + "'");
            }
        } else {
            reg.tool_category_.emplace(entry.tool, entry.category);
            reg.tools_.push_back(entry.tool);
        }

        if (auto it = reg.api_tool_.find(entry.api); it != reg.api_tool_.end()) {
            if (it->second != entry.tool) {
                fail(ErrorCode::ConflictingParent, "api '" + entry.api + "' claimed by tools '" +
                                                       it->second + "' and '" + entry.tool + "'");
            }
        } else {
            reg.api_tool_.emplace(entry.api, entry.tool);
            reg.apis_.push_back(entry.api);
            reg.descriptions_.emplace(entry.api, entry.description);
        }
    }
    return reg;
}

RegistryCounts Registry::counts() const { return {categories_.size(), tools_.size(), apis_.size()}; }

const std::string& Registry::tool_of(const std::string& api) const {
    auto it = api_tool_.find(api);
    if (it == api_tool_.end()) fail(ErrorCode::UnknownApi, "api '" + api + "' not in registry");
    return it->second;
}

const std::string& Registry::category_of_tool(const std::string& tool) const {
    auto it = tool_category_.find(tool);
    if (it == tool_category_.end()) fail(ErrorCode::UnknownApi, "tool '" + tool + "' not in registry");
    return it->second;
}

const std::string& Registry::category_of(const std::string& api) const {
    return category_of_tool(tool_of(api));
}

const std::string& Registry::resolve(const std::string& api, TagLevel level) const {
    switch (level) {
    case TagLevel::Category: return category_of(api);
    case TagLevel::Tool: return tool_of(api);
    case TagLevel::Api: break;
    }
    if (!has_api(api)) fail(ErrorCode::UnknownApi, "api '" + api + "' not in registry");
    return api_tool_.find(api)->first;
}

std::vector<std::string> Registry::apis_of_tool(const std::string& tool) const {
    std::vector<std::string> out;
    for (const auto& api : apis_) {
        if (api_tool_.at(api) == tool) out.push_back(api);
    }
    return out;
}

const std::string& Registry::description(const std::string& api) const {
    auto it = descriptions_.find(api);
    if (it == descriptions_.end()) fail(ErrorCode::UnknownApi, "api '" + api + "' not in registry");
    return it->second;
}

std::vector<RegistryEntry> Registry::entries() const {
    std::vector<RegistryEntry> out;
    out.reserve(apis_.size());
    for (const auto& api : apis_) {
        const auto& tool = api_tool_.at(api);
        out.push_back({tool_category_.at(tool), tool, api, descriptions_.at(api)});
    }
    return out;
}

TagList derive_tag_list(std::span<const std::string> apis, const Registry& registry) {
    TagList tags;
    for (const auto& api : apis) {
        if (api == kFinish) continue;
        tags.tools.push_back(registry.tool_of(api));
        tags.categories.push_back(registry.category_of_tool(tags.tools.back()));
        tags.apis.push_back(api);
    }
    return tags;
}

TagList derive_tag_list(const SolutionPath& path, const Registry& registry) {
    return derive_tag_list(std::span<const std::string>(path.steps), registry);
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

std::vector<std::string> lexical_retrieve(std::string_view instruction_text, const Registry& registry,
                                          std::size_t k) {
    if (k == 0) fail(ErrorCode::InvalidRequest, "lexical_retrieve: k must be positive");
    const auto query_tokens = tokenize(instruction_text);
    const std::unordered_set<std::string> query(query_tokens.begin(), query_tokens.end());

    const auto& apis = registry.apis();
    std::vector<std::size_t> scores(apis.size(), 0);
    for (std::size_t i = 0; i < apis.size(); ++i) {
        auto doc_tokens = tokenize(apis[i]);
        const auto desc_tokens = tokenize(registry.description(apis[i]));
        doc_tokens.insert(doc_tokens.end(), desc_tokens.begin(), desc_tokens.end());
        const std::unordered_set<std::string> doc(doc_tokens.begin(), doc_tokens.end());
        for (const auto& token : doc) scores[i] += query.contains(token) ? 1 : 0;
    }
    std::vector<std::size_t> order(apis.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    order.resize(std::min(k, order.size()));
    std::vector<std::string> out;
    for (auto i : order) out.push_back(apis[i]);
    return out;
}

std::string standardize_name(std::string_view name) {
    std::string out;
    bool pending_sep = false;
    for (unsigned char c : name) {
        if (std::isalnum(c)) {
            if (pending_sep && !out.empty()) out.push_back('_');
            pending_sep = false;
            out.push_back(static_cast<char>(std::tolower(c)));
        } else {
            pending_sep = true;
        }
    }
    return out;
}

std::string toolbench_function_name(std::string_view tool, std::string_view api) {
    return standardize_name(api) + "_for_" + standardize_name(tool);
}

std::vector<RegistryEntry> registry_entries_from_seeds(std::span<const SeedTask> seeds) {
    std::vector<RegistryEntry> out;
    std::unordered_set<std::string> seen;
    for (const auto& seed : seeds) {
        for (const auto& ref : seed.api_pool) {
            auto name = toolbench_function_name(ref.tool, ref.api);
            if (!seen.insert(name).second) continue;
            out.push_back({ref.category, standardize_name(ref.tool), std::move(name), ref.description});
        }
    }
    return out;
}

std::vector<RegistryEntry> read_registry_entries(const std::filesystem::path& path) {
    std::vector<RegistryEntry> out;
    const auto lines = read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto what = path.string() + ":" + std::to_string(i + 1);
        const auto doc = detail::parse_json(lines[i], what);
        out.push_back({detail::require_string(doc, "category", what), detail::require_string(doc, "tool", what),
                       detail::require_string(doc, "api", what), detail::optional_string(doc, "description")});
    }
    return out;
}

std::size_t write_registry_entries(std::span<const RegistryEntry> entries, const std::filesystem::path& path) {
    std::vector<std::string> lines;
    for (const auto& entry : entries) {
        detail::ordered_json doc;
        doc["category"] = entry.category;
        doc["tool"] = entry.tool;
        doc["api"] = entry.api;
        doc["description"] = entry.description;
        lines.push_back(detail::dump_line(doc));
    }
    return write_lines(lines, path);
}

Registry load_registry_file(const std::filesystem::path& path) {
    const auto entries = read_registry_entries(path);
    return Registry::load(entries);
}

} // namespace toolplanner

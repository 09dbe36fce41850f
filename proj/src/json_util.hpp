// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "toolplanner/common.hpp"
#include "toolplanner/corpus.hpp"

#include <json.hpp>

#include <string>
#include <string_view>

namespace toolplanner::detail {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

json parse_json(std::string_view raw, std::string_view what);

const json& require(const json& obj, const char* key, std::string_view what);
std::string require_string(const json& obj, const char* key, std::string_view what);
std::string optional_string(const json& obj, const char* key);

/// Single-line, key-order-preserving dump used for every record file.
std::string dump_line(const ordered_json& value);

ordered_json tags_to_json(const TagList& tags);
TagList tags_from_json(const json& value, std::string_view what);

ordered_json proposal_to_json(const RoundProposal& round);
RoundProposal proposal_from_json(const json& value, std::string_view what);

ordered_json round_to_json(const Round& round);
Round round_from_json(const json& value, std::string_view what);

ordered_json path_to_json(const SolutionPath& path);
SolutionPath path_from_json(const json& value, std::string_view what);

std::vector<std::string> string_list(const json& value, std::string_view what);

} // namespace toolplanner::detail

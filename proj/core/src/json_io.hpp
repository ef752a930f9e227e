#pragma once

// Conversions between library types and nlohmann::json, shared by io.cpp and
// case_studies.cpp. Not installed.

#include <json.hpp>

#include "vfree/folog.hpp"
#include "vfree/gogwords.hpp"

namespace vfree::detail {

using nlohmann::json;

json parse_json(std::string_view text);

GroupPtr group_from_json(const json& j);
json group_to_json(const FiniteGroup& g);

GraphOfGroups graph_from_json(const json& j);
json graph_to_json(const GraphOfGroups& g);

folog::Presentation presentation_from_json(const json& j);

// Required member access with a readable error.
const json& member(const json& j, const char* key);

}  // namespace vfree::detail

#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "vfree/folds.hpp"
#include "vfree/folog.hpp"
#include "vfree/genericity.hpp"

// JSON readers and writers for the formats described in FORMATS.md. All
// parsers throw vfree::Error with a message naming the offending field.
namespace vfree::io {

std::string read_file(const std::string& path);

GroupPtr parse_group(std::string_view json);
// Table form, which every group can be written in and which parses back to
// an identical table.
std::string group_to_json(const FiniteGroup& g);

// Accepts a graph object or a document with a "graph" member.
GraphOfGroups parse_graph(std::string_view json);
std::string graph_to_json(const GraphOfGroups& g);
std::string graphs_to_json(const std::vector<GraphOfGroups>& graphs);

RandomWalkSpec parse_measure(const GraphOfGroups& g, std::string_view json);

// `ambient` is used when the document has no "ambient" member.
MarkedTree parse_marked_tree(std::string_view json, std::shared_ptr<const GraphOfGroups> ambient = nullptr);
std::string marked_tree_to_json(const MarkedTree& t);
// One JSON line describing step `index` (1-based) of a fold sequence;
// `before` is the tree the directive was applied to.
std::string fold_step_to_json(const MarkedTree& before, const FoldStep& step, std::size_t index);

// Builds theta, delta or mu from a parameter document.
folog::Formula formula_from_params(std::string_view kind, std::string_view json);

}  // namespace vfree::io

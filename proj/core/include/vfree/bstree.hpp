#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "vfree/gogwords.hpp"

namespace vfree {

// A vertex p * G_v of the Bass-Serre tree. `rep` is the canonical groupoid
// path from the base vertex to `orbit`, normalised with trivial tail.
struct TreeVertex {
  std::size_t orbit = 0;
  NormalForm rep;

  auto operator<=>(const TreeVertex&) const = default;
};

// [p] for a groupoid path p starting at the base vertex.
TreeVertex tree_vertex(const GraphOfGroups& g, const NormalForm& path);
// The vertex of the fundamental domain lying over v, i.e. [tau_v].
TreeVertex base_tree_vertex(const GraphOfGroups& g, std::size_t v);
// g . x for a loop g at the base vertex.
TreeVertex act(const GraphOfGroups& g, const NormalForm& element, const TreeVertex& x);

// Every vertex adjacent to x: for each traversal y leaving the orbit vertex and
// each coset representative r of its edge image, the vertex [p r y].
std::vector<TreeVertex> neighbors(const GraphOfGroups& g, const TreeVertex& x);

// Tree distance: the path length of the normal form of p^-1 q.
std::size_t distance(const GraphOfGroups& g, const TreeVertex& x, const TreeVertex& y);

// The vertices of the geodesic from x to y, both ends included.
std::vector<TreeVertex> geodesic(const GraphOfGroups& g, const TreeVertex& x, const TreeVertex& y);

struct Classification {
  bool hyperbolic = false;
  std::size_t translation_length = 0;
  std::optional<TreeVertex> fixed_vertex;  // set for elliptic elements
  CyclicReduction reduction;
};

Classification classify(const GraphOfGroups& g, const NormalForm& element);

// A window of the axis of a hyperbolic element. vertices[0] is the anchor and
// element . vertices[i] = vertices[i + period].
struct AxisSegment {
  NormalForm element;
  std::vector<TreeVertex> vertices;
  std::size_t period = 0;
};

// `periods` fundamental domains of the axis starting at the anchor [p], p the
// cyclic-reduction conjugator. Throws "no axis" for elliptic elements.
AxisSegment axis_window(const GraphOfGroups& g, const NormalForm& element, std::size_t periods);

// Same, but starting `before` fundamental domains earlier along the axis.
AxisSegment axis_window(const GraphOfGroups& g, const NormalForm& element, std::size_t before,
                        std::size_t periods);

// "B{b} y A{1}" style rendering of the representative path.
std::string format_vertex(const GraphOfGroups& g, const TreeVertex& x);

}  // namespace vfree

#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vfree/bstree.hpp"
#include "vfree/defspace.hpp"

namespace vfree {

using ElementSet = std::vector<NormalForm>;  // sorted, duplicate-free

inline constexpr std::size_t kDefaultClosureCap = 4096;

// The subgroup of G generated by `generators`. Throws CapExceeded with an
// "infinite-or-large stabilizer" message when the closure grows past `cap`
// (a hyperbolic generator fails immediately).
ElementSet generated_subgroup(const GraphOfGroups& g, const std::vector<NormalForm>& generators,
                              std::size_t cap = kDefaultClosureCap);

// Stabilizer of an ambient tree vertex [p] at orbit v: p G_v p^-1.
ElementSet vertex_stabilizer(const GraphOfGroups& g, const TreeVertex& x);

// A G-tree given by a quotient graph with chosen lifts, together with an
// equivariant map to the Bass-Serre tree of `ambient`.
//
// Vertex v has a lift x_v with image `image` and finite stabilizer G_v. Edge e
// from a to b lifts to [x_a, offset . x_b]; its stabilizer G_e lies in
// G_a and in offset G_b offset^-1. The map is simplicial when every edge
// image [image_a, offset . image_b] is an ambient edge; an edge whose image
// is a single vertex is degenerate and has to be collapsed.
struct MarkedVertex {
  std::string id;
  TreeVertex image;
  ElementSet stabilizer;
};

struct MarkedEdge {
  std::string id;
  std::size_t from = 0;
  std::size_t to = 0;
  NormalForm offset;
  ElementSet stabilizer;
};

struct MarkedTree {
  std::shared_ptr<const GraphOfGroups> ambient;
  std::vector<MarkedVertex> vertices;
  std::vector<MarkedEdge> edges;

  std::size_t edge_orbits() const { return edges.size(); }
};

// Completes stabilizers from generating sets and checks every invariant
// listed above; throws Error naming the first violation.
MarkedTree make_marked_tree(std::shared_ptr<const GraphOfGroups> ambient, std::vector<MarkedVertex> vertices,
                            std::vector<MarkedEdge> edges);

// The quotient graph of groups of the marked tree (vertex and edge groups
// realised as subgroups of G) and the homomorphism pi_1 -> G it induces.
struct MarkedQuotient {
  GraphOfGroups graph;
  LoopMap marking;
};
MarkedQuotient marked_quotient(const MarkedTree& t);

enum class DirectiveKind { pair, stabilizer, collapse };
enum class FoldType { type1, type2, type3 };

// pair: identify the edge at `first` with witness . (edge at `second`); both
// ends sit at one vertex v, witness lies in G_v and the two images agree.
// stabilizer: identify the edge at `first` with h . itself for h in the
// subgroup generated by `subgroup` (a subgroup of G_v).
// collapse: collapse the degenerate edge `first.edge`. Collapses are not
// folds; they remove edges whose image is a point.
struct FoldDirective {
  DirectiveKind kind = DirectiveKind::pair;
  EdgeEnd first;
  EdgeEnd second;
  NormalForm witness;
  std::vector<NormalForm> subgroup;
};

// type1 needs two infinite edge stabilizers and never occurs here; pair folds
// across distinct orbits are type2, folds within one orbit are type3.
// Throws for collapse directives.
FoldType classify_fold(const MarkedTree& t, const FoldDirective& d);

// Applies a directive. Pair folds with the same edge end are turned into the
// corresponding stabilizer fold; pair folds of the two ends of one loop would
// create an inversion and are rejected.
MarkedTree fold(const MarkedTree& t, const FoldDirective& d);

// All directives that identify two edges with equal image (or collapse a
// degenerate edge) in the current tree, in a fixed order.
std::vector<FoldDirective> available_folds(const MarkedTree& t);

struct FoldStep {
  FoldDirective directive;
  std::optional<FoldType> type;  // unset for collapses
  // Types for which a legal directive existed before this step.
  std::vector<FoldType> available_types;
  bool collapse_available = false;
  MarkedTree result;
  // Per edge of `result`: the stabilizer already equals the stabilizer of
  // its image edge.
  std::vector<bool> maximal;
};

// Greedy folding: collapses first, then type2, then type3. Stops when no
// directive remains and the quotient is isomorphic to `target`; throws when
// the map cannot be folded further or after `max_steps` steps.
std::vector<FoldStep> fold_sequence(const MarkedTree& source, const GraphOfGroups& target,
                                    std::size_t max_steps = 50);

std::string to_string(FoldType type);
std::string to_string(DirectiveKind kind);

}  // namespace vfree

#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vfree/gogwords.hpp"

namespace vfree {

// One end of an edge: the `from` end, or the `to` end when at_to is set.
struct EdgeEnd {
  std::size_t edge = 0;
  bool at_to = false;
  auto operator<=>(const EdgeEnd&) const = default;
};

enum class MoveKind { collapse, expansion, slide };

// Expansion at `vertex` w: a new vertex v with G_v = H (a subgroup of G_w) and
// a new edge [v, w] with group H, using G_w = G_w *_H H. The listed edge ends
// at w, whose images must lie in H, are moved to v.
struct ExpansionSpec {
  std::size_t vertex = 0;
  Subgroup subgroup;
  std::vector<EdgeEnd> moved;
  std::string new_vertex_id;  // generated when empty
  std::string new_edge_id;    // generated when empty
};

struct DeformationMove {
  MoveKind kind = MoveKind::collapse;
  // collapse: the edge to collapse, and optionally which endpoint disappears
  std::size_t edge = 0;
  std::optional<std::size_t> removed_vertex;
  // expansion
  ExpansionSpec expansion;
  // slide: the end `slide_end` (sitting at source(over)) slides across `over`
  EdgeEnd slide_end;
  Traversal over;
};

DeformationMove collapse_move(std::size_t edge, std::optional<std::size_t> removed_vertex = std::nullopt);
DeformationMove expansion_move(ExpansionSpec spec);
DeformationMove slide_move(EdgeEnd end, Traversal over);

struct MoveResult {
  GraphOfGroups graph;
  // pi_1(old, base) -> pi_1(new, base), an isomorphism.
  LoopMap map;
  // Generator ("V:g" or a non-tree edge letter) -> image word in the new graph.
  std::vector<std::pair<std::string, std::string>> dictionary;
};

// Applies a move; throws Error naming the violated condition when illegal.
MoveResult apply_move(const GraphOfGroups& g, const DeformationMove& move);

// Quotient degree of v (loops count twice) and tree degree sum_ends [G_v : G_e].
std::size_t quotient_degree(const GraphOfGroups& g, std::size_t v);
std::size_t tree_degree(const GraphOfGroups& g, std::size_t v);

// Ends of edges attached at v, in edge order.
std::vector<EdgeEnd> ends_at(const GraphOfGroups& g, std::size_t v);

struct DegreeSum {
  // sum (deg(v) - 2) over quotient vertices with quotient degrees; this is
  // the quantity preserved by expansions and collapses.
  long long value = 0;
  // The same sum with Bass-Serre tree degrees of the orbit representatives.
  long long tree_value = 0;
};

DegreeSum degree_sum(const GraphOfGroups& g);

// Edges [v, w], v != w, with G_e mapping onto an endpoint group.
std::vector<std::size_t> collapsible_edges(const GraphOfGroups& g);
bool is_reduced(const GraphOfGroups& g);
// Vertices of tree degree 2 whose (one or two) ends all have index 1, i.e.
// subdivision points of an edge. An end of index 2 (a tree vertex with two
// edges of one orbit, swapped by G_v) is not a subdivision and does not count.
std::vector<std::size_t> redundant_vertices(const GraphOfGroups& g);
bool is_non_redundant(const GraphOfGroups& g);

// Every legal expansion (up to nothing; duplicates up to isomorphism are
// possible) and every legal collapse.
std::vector<DeformationMove> legal_expansions(const GraphOfGroups& g);
std::vector<DeformationMove> legal_collapses(const GraphOfGroups& g);

// --- isomorphism --------------------------------------------------------------

// A graph-of-groups isomorphism: bijections on vertices and edges (with
// orientation flips), group isomorphisms, and for each edge end an element
// gamma with phi_v o iota = ad(gamma) o iota' o phi_e.
struct GogIsomorphism {
  std::vector<std::size_t> vertex_map;
  std::vector<std::size_t> edge_map;
  std::vector<bool> edge_flipped;
  std::vector<GroupHom> vertex_isos;
  std::vector<GroupHom> edge_isos;
};

std::optional<GogIsomorphism> find_isomorphism(const GraphOfGroups& first, const GraphOfGroups& second);
bool are_isomorphic(const GraphOfGroups& first, const GraphOfGroups& second);

// --- enumeration ----------------------------------------------------------------

// One representative of each isomorphism class of groups of order <= max_order
// (max_order <= 12).
std::vector<GroupPtr> small_group_catalog(std::size_t max_order);

struct EnumerationLimits {
  std::size_t max_vertices = 3;
  std::size_t max_edges = 3;
  std::size_t max_order = 12;
  std::size_t max_candidates = 200000;
};

struct EnumerationConstraints {
  std::optional<std::vector<GroupPtr>> vertex_groups;  // multiset, one per vertex
  std::optional<std::vector<GroupPtr>> edge_groups;    // multiset, one per edge
};

// Reduced graphs of groups with p vertices, q edges and vertex groups of
// order <= r, one per isomorphism class, in a deterministic order.
std::vector<GraphOfGroups> enumerate_reduced(std::size_t p, std::size_t q, std::size_t r,
                                             const EnumerationConstraints& constraints = {},
                                             const EnumerationLimits& limits = {});

struct ExpansionSearch {
  bool seed_non_redundant = false;
  // Non-redundant graphs reached by 1..depth expansions, not isomorphic to
  // the seed, one per class.
  std::vector<GraphOfGroups> expansions;
  // Per level: distinct classes reached, and how many were redundant.
  std::vector<std::size_t> reached_per_level;
  std::vector<std::size_t> redundant_per_level;
};

inline constexpr std::size_t kMaxExpansionDepth = 3;

ExpansionSearch nonredundant_expansions(const GraphOfGroups& g, std::size_t depth);

}  // namespace vfree

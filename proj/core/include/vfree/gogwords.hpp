#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "vfree/fingroup.hpp"

namespace vfree {

struct GogVertex {
  std::string id;
  GroupPtr group;
};

// An edge e = [from, to] with injections G_e -> G_from and G_e -> G_to.
struct GogEdge {
  std::string id;
  GroupPtr group;
  std::size_t from = 0;
  std::size_t to = 0;
  GroupHom into_from;
  GroupHom into_to;
};

// A directed crossing of an edge. The forward direction runs from -> to.
struct Traversal {
  std::size_t edge = 0;
  bool reversed = false;

  Traversal inverse() const { return {edge, !reversed}; }
  auto operator<=>(const Traversal&) const = default;
};

// A finite, connected graph of finite groups with a base vertex and a
// spanning tree.
//
// Elements of the fundamental group are handled in the path groupoid: a word
// g0 y1 g1 ... yn gn alternates vertex-group elements and traversals, subject
// to alpha_y(c) y = y omega_y(c) for c in G_e, where alpha_y and omega_y are
// the injections into the groups at the start and end of y. Tree edges are
// ordinary traversals here; the word parser inserts them automatically, so
// loops at the base vertex realise pi_1(Gamma, base).
class GraphOfGroups {
 public:
  // Validates connectivity, that injections are monomorphisms between the
  // right groups, and the spanning tree. Without an explicit tree, a BFS tree
  // from the base vertex (edges in index order) is used.
  static GraphOfGroups create(std::vector<GogVertex> vertices, std::vector<GogEdge> edges,
                              std::size_t base,
                              std::optional<std::vector<std::size_t>> spanning_tree = std::nullopt);

  const std::vector<GogVertex>& vertices() const { return vertices_; }
  const std::vector<GogEdge>& edges() const { return edges_; }
  std::size_t base() const { return base_; }
  const std::vector<std::size_t>& spanning_tree() const { return tree_; }
  bool in_tree(std::size_t edge) const { return in_tree_[edge]; }
  std::uint64_t fingerprint() const { return fingerprint_; }

  std::optional<std::size_t> vertex_index(std::string_view id) const;
  std::optional<std::size_t> edge_index(std::string_view id) const;
  const FiniteGroup& vertex_group(std::size_t v) const { return *vertices_[v].group; }

  std::size_t source(Traversal y) const;
  std::size_t target(Traversal y) const;
  const GroupHom& from_map(Traversal y) const;  // alpha_y
  const GroupHom& to_map(Traversal y) const;    // omega_y
  // alpha_y(G_e) inside the group at source(y).
  const Subgroup& source_image(Traversal y) const { return slot(y).image; }
  // The c with alpha_y(c) = a; a must lie in source_image(y).
  Element source_preimage(Traversal y, Element a) const;
  // Minimal-index element of the coset a * alpha_y(G_e).
  Element coset_rep(Traversal y, Element a) const { return slot(y).rep[a]; }
  // Sorted representatives of the cosets of alpha_y(G_e).
  const std::vector<Element>& transversal(Traversal y) const { return slot(y).transversal; }
  // [G_source(y) : alpha_y(G_e)]
  std::size_t index(Traversal y) const { return slot(y).transversal.size(); }

  // All traversals starting at v, sorted.
  std::vector<Traversal> outgoing(std::size_t v) const;
  // The tree path from the base vertex to v.
  const std::vector<Traversal>& tree_path(std::size_t v) const { return tree_paths_[v]; }

 private:
  struct Slot {
    Subgroup image;
    std::vector<Element> preimage;
    std::vector<Element> rep;
    std::vector<Element> transversal;
  };

  GraphOfGroups() = default;
  const Slot& slot(Traversal y) const { return slots_[2 * y.edge + (y.reversed ? 1 : 0)]; }

  std::vector<GogVertex> vertices_;
  std::vector<GogEdge> edges_;
  std::size_t base_ = 0;
  std::vector<std::size_t> tree_;
  std::vector<bool> in_tree_;
  std::vector<Slot> slots_;
  std::vector<std::vector<Traversal>> tree_paths_;
  std::uint64_t fingerprint_ = 0;
};

// The one-edge graph of groups A *_C B; vertices "A" (base) and "B", edge "y".
GraphOfGroups build_amalgam(const GroupPtr& a, const GroupPtr& b, const GroupHom& into_a,
                            const GroupHom& into_b);

using Syllable = std::variant<Element, Traversal>;

// A groupoid word starting at `start`. Each element syllable belongs to the
// group of the vertex reached at that point.
struct GroupWord {
  std::size_t start = 0;
  std::vector<Syllable> syllables;
};

// Reduced form r0 y1 r1 ... yn t. Each r_i is the canonical representative
// of its coset modulo the image of G_{y_{i+1}}, no y_i r_i y_{i+1} is a pinch,
// and t is free. Equality of normal forms is equality of groupoid elements.
struct NormalForm {
  std::size_t start = 0;
  std::size_t end = 0;
  std::vector<Element> reps;
  std::vector<Traversal> path;
  Element tail = 0;
  std::uint64_t graph = 0;

  std::size_t length() const { return path.size(); }
  bool is_loop() const { return start == end; }
  auto operator<=>(const NormalForm&) const = default;
};

NormalForm identity(const GraphOfGroups& g);
NormalForm identity_at(const GraphOfGroups& g, std::size_t v);
bool is_identity(const GraphOfGroups& g, const NormalForm& w);

// The groupoid element a in G_v (start = end = v).
NormalForm local_element(const GraphOfGroups& g, std::size_t v, Element a);
// The loop tau_v a tau_v^-1 at the base vertex, tau_v the tree path to v.
NormalForm vertex_loop(const GraphOfGroups& g, std::size_t v, Element a);
// The loop tau_u e tau_w^-1 for the edge e = [u, w].
NormalForm edge_loop(const GraphOfGroups& g, std::size_t edge);
// The groupoid element consisting of a single traversal.
NormalForm traversal_element(const GraphOfGroups& g, Traversal y);

NormalForm normal_form(const GraphOfGroups& g, const GroupWord& w);
GroupWord to_word(const NormalForm& w);

NormalForm multiply(const GraphOfGroups& g, const NormalForm& a, const NormalForm& b);
NormalForm invert(const GraphOfGroups& g, const NormalForm& w);
NormalForm power(const GraphOfGroups& g, const NormalForm& w, long long n);
// x w x^-1
NormalForm conjugate(const GraphOfGroups& g, const NormalForm& x, const NormalForm& w);

// w = conjugator * core * conjugator^-1, where the conjugator is a groupoid
// path from w's vertex to the vertex of the core and the core admits no pinch
// across the wrap-around.
struct CyclicReduction {
  NormalForm conjugator;
  NormalForm core;
};

CyclicReduction cyclic_reduction(const GraphOfGroups& g, const NormalForm& w);

// Finite order, or nullopt for elements of infinite order.
std::optional<std::size_t> element_order(const GraphOfGroups& g, const NormalForm& w);

// Parses whitespace-separated letters with optional ^k exponents into a loop
// at the base vertex. A letter is a vertex-group generator ("a", or "A:a" to
// name the vertex) or the id of an edge outside the spanning tree. Spanning
// tree paths between letters are inserted automatically.
GroupWord parse_group_word(const GraphOfGroups& g, std::string_view text);
NormalForm parse_word(const GraphOfGroups& g, std::string_view text);

// Renders a loop at the base vertex in the syntax accepted by parse_word.
std::string format_word(const GraphOfGroups& g, const NormalForm& w);
// Syllable-by-syllable rendering of any groupoid element, e.g.
// "A{a} y B{b^2} y^-1 A{1}".
std::string describe(const GraphOfGroups& g, const NormalForm& w);

// A homomorphism pi_1(source, base) -> pi_1(target, base) given by the image
// of every vertex-group loop and of every edge loop outside the spanning tree.
struct LoopMap {
  std::vector<std::vector<NormalForm>> vertex_images;   // [vertex][element]
  std::vector<std::optional<NormalForm>> edge_images;   // [edge], unset on tree edges
};

// Builds a LoopMap from images of vertex-group generators (in generator
// order) and of non-tree edge loops; throws if a vertex map does not extend.
LoopMap extend_loop_map(const GraphOfGroups& source, const GraphOfGroups& target,
                        const std::vector<std::vector<NormalForm>>& generator_images,
                        const std::vector<std::optional<NormalForm>>& edge_images);

// The relations of the source presentation that fail under the map; empty
// when it is a well-defined homomorphism.
std::vector<std::string> check_loop_map(const GraphOfGroups& source, const GraphOfGroups& target,
                                        const LoopMap& map);

// Image of tau_start w tau_end^-1.
NormalForm apply(const GraphOfGroups& source, const GraphOfGroups& target, const LoopMap& map,
                 const NormalForm& w);

}  // namespace vfree

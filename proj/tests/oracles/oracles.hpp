#pragma once

// Independent ground truth for the test suite. Nothing here calls the
// normal-form reduction, the Whitehead or p-match code, or the fold engine;
// it only uses group multiplication, tree adjacency and axis windows, each of
// which is tested on its own.

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "vfree/bstree.hpp"
#include "vfree/folds.hpp"
#include "vfree/gogwords.hpp"

namespace oracle {

// Words over a, a^-1, b, b^-1 coded 0..3.
using Letters = std::vector<int>;

std::string to_text(const Letters& w);
// Every word of length <= max_length, including non-reduced ones.
std::vector<Letters> all_words(std::size_t max_length);

// The groupoid word spelled by the letters in a two-vertex graph whose
// vertex groups have generators "a" (vertex 0) and "b" (vertex 1) and whose
// edge 0 joins them. The edge is crossed whenever the next letter lives at the
// other vertex; nothing is reduced.
vfree::GroupWord spell(const vfree::GraphOfGroups& g, const Letters& w);

// --- faithful linear representations ------------------------------------------

// a -> [[0,-1],[1,0]], b -> [[1,-1],[1,0]] is an isomorphism from
// <a, b | a^4, b^6, a^2 = b^3> onto SL2(Z); modulo -I it is the isomorphism
// Z/2 * Z/3 -> PSL2(Z).
struct Mat {
  long long a = 1, b = 0, c = 0, d = 1;
  auto operator<=>(const Mat&) const = default;
};
Mat operator*(const Mat& x, const Mat& y);
Mat sl2_image(const Letters& w);
// Sign-normalised, so equal keys mean equal elements of PSL2(Z).
Mat psl2_key(const Letters& w);

// --- rewriting ----------------------------------------------------------------

// The complete rewriting system aa -> 1, bb -> B, BB -> b, bB -> 1, Bb -> 1
// for Z/2 * Z/3 over {a, b, B} (a^-1 is read as a, b^-1 as B). Returns the
// irreducible word.
std::string z2z3_rewrite(const Letters& w);

// --- Bass-Serre tree by breadth-first search -------------------------------------

// Graph distance found by BFS over neighbors(); nullopt beyond `cap`.
std::optional<std::size_t> bfs_distance(const vfree::GraphOfGroups& g, const vfree::TreeVertex& x,
                                        const vfree::TreeVertex& y, std::size_t cap);
// The vertices within `radius` of x.
std::vector<vfree::TreeVertex> vertex_ball(const vfree::GraphOfGroups& g, const vfree::TreeVertex& x,
                                           std::size_t radius);
// min over the radius ball around the base vertex of d(v, w v).
std::size_t min_displacement(const vfree::GraphOfGroups& g, const vfree::NormalForm& w, std::size_t radius);

// --- group elements by breadth-first search -----------------------------------

// Vertex-group generator loops, non-tree edge loops and their inverses.
std::vector<vfree::NormalForm> generator_loops(const vfree::GraphOfGroups& g);
// Products of at most `steps` generator loops, deduplicated.
std::vector<vfree::NormalForm> word_ball(const vfree::GraphOfGroups& g, std::size_t steps);
// A product of `steps` uniformly chosen generator loops.
vfree::NormalForm random_element(const vfree::GraphOfGroups& g, std::size_t steps, std::mt19937_64& rng);

// Closure under multiplication of a finite generating set (inverses come for
// free in a finite group). Returns nullopt past `cap`.
std::optional<std::set<vfree::NormalForm>> closure(const vfree::GraphOfGroups& g,
                                                   const std::vector<vfree::NormalForm>& gens,
                                                   std::size_t cap = 4096);

// --- turns and overlaps -----------------------------------------------------------

// Turns at base_tree_vertex(orbit) crossed by k . axis(w) for k in
// word_ball(steps), as index pairs into neighbors().
std::set<std::pair<std::size_t, std::size_t>> brute_turns(const vfree::GraphOfGroups& g,
                                                          const vfree::NormalForm& w, std::size_t orbit,
                                                          std::size_t steps);

// Number of vertices shared by long windows of axis(first) and
// k . axis(second), maximised over the given translates k. In a tree two
// geodesics meet in a segment, so this is the overlap length plus one.
std::size_t brute_overlap(const vfree::GraphOfGroups& g, const vfree::NormalForm& first,
                          const vfree::NormalForm& second, const std::vector<vfree::NormalForm>& translates);

}  // namespace oracle

#include "oracles.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace oracle {

using namespace vfree;

std::string to_text(const Letters& w) {
  static const char* names[] = {"a", "a^-1", "b", "b^-1"};
  if (w.empty()) return "1";
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) out += (i ? " " : "") + std::string(names[w[i]]);
  return out;
}

std::vector<Letters> all_words(std::size_t max_length) {
  std::vector<Letters> out{{}};
  std::size_t begin = 0;
  for (std::size_t len = 1; len <= max_length; ++len) {
    std::size_t end = out.size();
    for (std::size_t i = begin; i < end; ++i)
      for (int x = 0; x < 4; ++x) {
        Letters w = out[i];
        w.push_back(x);
        out.push_back(std::move(w));
      }
    begin = end;
  }
  return out;
}

GroupWord spell(const GraphOfGroups& g, const Letters& w) {
  const Element gens[] = {*g.vertex_group(0).generator("a"), *g.vertex_group(1).generator("b")};
  GroupWord word{0, {}};
  std::size_t at = 0;
  for (int x : w) {
    std::size_t want = x < 2 ? 0 : 1;
    if (want != at) {
      word.syllables.emplace_back(Traversal{0, at == 1});
      at = want;
    }
    Element e = gens[want];
    word.syllables.emplace_back(x % 2 ? g.vertex_group(at).inverse(e) : e);
  }
  if (at != 0) word.syllables.emplace_back(Traversal{0, true});
  return word;
}

Mat operator*(const Mat& x, const Mat& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}

Mat sl2_image(const Letters& w) {
  // Inverses of determinant-one matrices are the adjugates.
  static const Mat gens[] = {{0, -1, 1, 0}, {0, 1, -1, 0}, {1, -1, 1, 0}, {0, 1, -1, 1}};
  Mat m;
  for (int x : w) m = m * gens[x];
  return m;
}

Mat psl2_key(const Letters& w) {
  Mat m = sl2_image(w);
  long long first = m.a != 0 ? m.a : m.b;
  if (first < 0) m = {-m.a, -m.b, -m.c, -m.d};
  return m;
}

std::string z2z3_rewrite(const Letters& w) {
  std::string stack;
  auto push = [&](char x) {
    while (true) {
      if (stack.empty()) {
        stack.push_back(x);
        return;
      }
      char t = stack.back();
      if ((t == 'a' && x == 'a') || (t == 'b' && x == 'B') || (t == 'B' && x == 'b')) {
        stack.pop_back();
        return;
      }
      if (t == x) {  // bb -> B, BB -> b
        stack.pop_back();
        x = x == 'b' ? 'B' : 'b';
        continue;
      }
      stack.push_back(x);
      return;
    }
  };
  for (int x : w) push(x < 2 ? 'a' : (x == 2 ? 'b' : 'B'));
  return stack;
}

std::optional<std::size_t> bfs_distance(const GraphOfGroups& g, const TreeVertex& x, const TreeVertex& y,
                                        std::size_t cap) {
  // Bidirectional: grow the smaller side by one layer until the sides meet.
  std::map<TreeVertex, std::size_t> side[2] = {{{x, 0}}, {{y, 0}}};
  std::vector<TreeVertex> frontier[2] = {{x}, {y}};
  std::size_t depth[2] = {0, 0};
  if (x == y) return 0;
  while (depth[0] + depth[1] < cap) {
    int s = frontier[0].size() <= frontier[1].size() ? 0 : 1;
    std::vector<TreeVertex> next;
    ++depth[s];
    for (const auto& v : frontier[s])
      for (const auto& n : neighbors(g, v)) {
        if (side[s].count(n)) continue;
        auto hit = side[1 - s].find(n);
        if (hit != side[1 - s].end()) return depth[s] + hit->second;
        side[s].emplace(n, depth[s]);
        next.push_back(n);
      }
    frontier[s] = std::move(next);
  }
  return std::nullopt;
}

std::vector<TreeVertex> vertex_ball(const GraphOfGroups& g, const TreeVertex& x, std::size_t radius) {
  std::set<TreeVertex> seen{x};
  std::vector<TreeVertex> frontier{x}, all{x};
  for (std::size_t d = 1; d <= radius; ++d) {
    std::vector<TreeVertex> next;
    for (const auto& v : frontier)
      for (const auto& n : neighbors(g, v))
        if (seen.insert(n).second) {
          next.push_back(n);
          all.push_back(n);
        }
    frontier = std::move(next);
  }
  return all;
}

std::size_t min_displacement(const GraphOfGroups& g, const NormalForm& w, std::size_t radius) {
  std::size_t best = SIZE_MAX;
  for (std::size_t v = 0; v < g.vertices().size(); ++v)
    for (const auto& x : vertex_ball(g, base_tree_vertex(g, v), radius)) {
      auto d = bfs_distance(g, x, act(g, w, x), 2 * radius + 16);
      if (d) best = std::min(best, *d);
    }
  return best;
}

std::vector<NormalForm> generator_loops(const GraphOfGroups& g) {
  std::vector<NormalForm> out;
  auto add = [&](const NormalForm& w) {
    for (const NormalForm& x : {w, invert(g, w)})
      if (!is_identity(g, x) && std::find(out.begin(), out.end(), x) == out.end()) out.push_back(x);
  };
  for (std::size_t v = 0; v < g.vertices().size(); ++v)
    for (const auto& gen : g.vertex_group(v).generators()) add(vertex_loop(g, v, gen.element));
  for (std::size_t e = 0; e < g.edges().size(); ++e)
    if (!g.in_tree(e)) add(edge_loop(g, e));
  return out;
}

std::vector<NormalForm> word_ball(const GraphOfGroups& g, std::size_t steps) {
  const auto gens = generator_loops(g);
  std::set<NormalForm> seen{identity(g)};
  std::vector<NormalForm> frontier{identity(g)}, all{identity(g)};
  for (std::size_t s = 0; s < steps; ++s) {
    std::vector<NormalForm> next;
    for (const auto& w : frontier)
      for (const auto& x : gens) {
        NormalForm y = multiply(g, w, x);
        if (seen.insert(y).second) {
          next.push_back(y);
          all.push_back(y);
        }
      }
    frontier = std::move(next);
  }
  return all;
}

NormalForm random_element(const GraphOfGroups& g, std::size_t steps, std::mt19937_64& rng) {
  const auto gens = generator_loops(g);
  std::uniform_int_distribution<std::size_t> pick(0, gens.size() - 1);
  NormalForm w = identity(g);
  for (std::size_t i = 0; i < steps; ++i) w = multiply(g, w, gens[pick(rng)]);
  return w;
}

std::optional<std::set<NormalForm>> closure(const GraphOfGroups& g, const std::vector<NormalForm>& gens,
                                            std::size_t cap) {
  std::set<NormalForm> seen{identity(g)};
  std::deque<NormalForm> queue{identity(g)};
  while (!queue.empty()) {
    NormalForm w = queue.front();
    queue.pop_front();
    for (const auto& x : gens) {
      NormalForm y = multiply(g, w, x);
      if (seen.insert(y).second) {
        if (seen.size() > cap) return std::nullopt;
        queue.push_back(y);
      }
    }
  }
  return seen;
}

std::set<std::pair<std::size_t, std::size_t>> brute_turns(const GraphOfGroups& g, const NormalForm& w,
                                                          std::size_t orbit, std::size_t steps) {
  const TreeVertex x = base_tree_vertex(g, orbit);
  const auto around = neighbors(g, x);
  auto index_of = [&](const TreeVertex& v) {
    return static_cast<std::size_t>(std::find(around.begin(), around.end(), v) - around.begin());
  };
  std::set<std::pair<std::size_t, std::size_t>> turns;
  for (const auto& k : word_ball(g, steps)) {
    NormalForm conj = conjugate(g, k, w);
    AxisSegment s = axis_window(g, conj, 3, 6);
    for (std::size_t i = 1; i + 1 < s.vertices.size(); ++i) {
      if (s.vertices[i] != x) continue;
      std::size_t p = index_of(s.vertices[i - 1]), q = index_of(s.vertices[i + 1]);
      turns.insert({std::min(p, q), std::max(p, q)});
    }
  }
  return turns;
}

std::size_t brute_overlap(const GraphOfGroups& g, const NormalForm& first, const NormalForm& second,
                          const std::vector<NormalForm>& translates) {
  AxisSegment a = axis_window(g, first, 10, 20);
  std::set<TreeVertex> on_first(a.vertices.begin(), a.vertices.end());
  std::size_t best = 0;
  for (const auto& k : translates) {
    AxisSegment b = axis_window(g, conjugate(g, k, second), 10, 20);
    std::size_t shared = 0;
    for (const auto& v : b.vertices) shared += on_first.count(v);
    best = std::max(best, shared);
  }
  return best;
}

}  // namespace oracle

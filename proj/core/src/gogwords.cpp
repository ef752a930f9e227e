#include "vfree/gogwords.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <set>

#include "text.hpp"

namespace vfree {

namespace {

constexpr Element kUnset = static_cast<Element>(-1);

struct Fnv {
  std::uint64_t h = 1469598103934665603ULL;
  void add(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 1099511628211ULL;
    }
  }
};

void check_graph(const GraphOfGroups& g, const NormalForm& w) {
  if (w.graph != g.fingerprint()) throw Error("element belongs to a different graph of groups");
}

// Incremental Britton reduction. The state is always a normal form whose
// tail is the running product at the current vertex.
class Reducer {
 public:
  Reducer(const GraphOfGroups& g, std::size_t start) : g_(g) {
    out_.start = out_.end = start;
    out_.tail = g.vertex_group(start).identity();
    out_.graph = g.fingerprint();
  }
  Reducer(const GraphOfGroups& g, NormalForm w) : g_(g), out_(std::move(w)) {}

  void element(Element a) {
    const FiniteGroup& group = g_.vertex_group(out_.end);
    if (a >= group.order())
      throw Error("element index " + std::to_string(a) + " outside the group at vertex " +
                  g_.vertices()[out_.end].id);
    out_.tail = group.multiply(out_.tail, a);
  }

  void traverse(Traversal y) {
    if (y.edge >= g_.edges().size()) throw Error("traversal of unknown edge");
    if (g_.source(y) != out_.end)
      throw Error("word path is not connected: edge " + g_.edges()[y.edge].id + " does not start at " +
                  g_.vertices()[out_.end].id);
    const FiniteGroup& here = g_.vertex_group(out_.end);
    if (!out_.path.empty() && out_.path.back() == y.inverse() &&
        g_.source_image(y).contains(out_.tail)) {
      // y_last omega(c) y_last^-1 = alpha(c)
      Traversal last = out_.path.back();
      Element c = g_.source_preimage(y, out_.tail);
      Element back = g_.from_map(last)(c);
      out_.path.pop_back();
      out_.end = g_.source(last);
      out_.tail = g_.vertex_group(out_.end).multiply(out_.reps.back(), back);
      out_.reps.pop_back();
      return;
    }
    Element r = g_.coset_rep(y, out_.tail);
    Element h = here.multiply(here.inverse(r), out_.tail);
    Element c = g_.source_preimage(y, h);
    out_.reps.push_back(r);
    out_.path.push_back(y);
    out_.end = g_.target(y);
    out_.tail = g_.to_map(y)(c);
  }

  void feed(const NormalForm& w) {
    for (std::size_t i = 0; i < w.path.size(); ++i) {
      element(w.reps[i]);
      traverse(w.path[i]);
    }
    element(w.tail);
  }

  void feed(const GroupWord& w) {
    for (const auto& s : w.syllables) {
      if (const auto* a = std::get_if<Element>(&s))
        element(*a);
      else
        traverse(std::get<Traversal>(s));
    }
  }

  std::size_t end() const { return out_.end; }
  const NormalForm& state() const { return out_; }
  NormalForm take() { return std::move(out_); }

 private:
  const GraphOfGroups& g_;
  NormalForm out_;
};

}  // namespace

// --- GraphOfGroups ------------------------------------------------------------

GraphOfGroups GraphOfGroups::create(std::vector<GogVertex> vertices, std::vector<GogEdge> edges,
                                    std::size_t base,
                                    std::optional<std::vector<std::size_t>> spanning_tree) {
  const std::size_t n = vertices.size();
  if (n == 0) throw Error("graph of groups needs at least one vertex");
  if (base >= n) throw Error("base vertex out of range");
  std::set<std::string> names;
  for (const auto& v : vertices) {
    if (!v.group) throw Error("vertex " + v.id + " has no group");
    if (!names.insert(v.id).second) throw Error("duplicate vertex id '" + v.id + "'");
  }
  names.clear();
  for (const auto& e : edges) {
    if (!names.insert(e.id).second) throw Error("duplicate edge id '" + e.id + "'");
    if (e.from >= n || e.to >= n) throw Error("edge " + e.id + " has an endpoint out of range");
    if (!e.group) throw Error("edge " + e.id + " has no group");
    auto check_injection = [&](const GroupHom& h, std::size_t v, const char* side) {
      if (!h.source || !h.target || !(*h.source == *e.group) || !(*h.target == *vertices[v].group))
        throw Error("edge " + e.id + ": " + side + " injection does not map G_e into G_" + vertices[v].id);
      auto check = check_hom(h);
      if (check.status == HomStatus::invalid)
        throw Error("edge " + e.id + ": " + side + " injection is not a homomorphism: " + check.detail);
      if (!is_injective(h)) throw Error("edge " + e.id + ": " + side + " injection is not injective");
    };
    check_injection(e.into_from, e.from, "from");
    check_injection(e.into_to, e.to, "to");
  }

  GraphOfGroups g;
  g.vertices_ = std::move(vertices);
  g.edges_ = std::move(edges);
  g.base_ = base;
  g.in_tree_.assign(g.edges_.size(), false);

  if (spanning_tree) {
    std::vector<std::size_t> tree = *spanning_tree;
    std::sort(tree.begin(), tree.end());
    if (std::adjacent_find(tree.begin(), tree.end()) != tree.end())
      throw Error("spanning tree lists an edge twice");
    if (tree.size() + 1 != n) throw Error("spanning tree must have |V| - 1 edges");
    for (std::size_t e : tree) {
      if (e >= g.edges_.size()) throw Error("spanning tree edge out of range");
      g.in_tree_[e] = true;
    }
    g.tree_ = std::move(tree);
  } else {
    std::vector<bool> seen(n, false);
    seen[base] = true;
    std::deque<std::size_t> queue{base};
    while (!queue.empty()) {
      std::size_t v = queue.front();
      queue.pop_front();
      for (std::size_t e = 0; e < g.edges_.size(); ++e) {
        const auto& edge = g.edges_[e];
        std::size_t other;
        if (edge.from == v)
          other = edge.to;
        else if (edge.to == v)
          other = edge.from;
        else
          continue;
        if (seen[other]) continue;
        seen[other] = true;
        g.in_tree_[e] = true;
        g.tree_.push_back(e);
        queue.push_back(other);
      }
    }
    std::sort(g.tree_.begin(), g.tree_.end());
  }

  // Tree paths from the base; also checks that the tree spans.
  g.tree_paths_.assign(n, {});
  std::vector<bool> reached(n, false);
  reached[base] = true;
  std::deque<std::size_t> queue{base};
  while (!queue.empty()) {
    std::size_t v = queue.front();
    queue.pop_front();
    for (std::size_t e : g.tree_) {
      const auto& edge = g.edges_[e];
      for (bool rev : {false, true}) {
        std::size_t s = rev ? edge.to : edge.from, t = rev ? edge.from : edge.to;
        if (s != v || reached[t]) continue;
        reached[t] = true;
        g.tree_paths_[t] = g.tree_paths_[v];
        g.tree_paths_[t].push_back({e, rev});
        queue.push_back(t);
      }
    }
  }
  if (std::find(reached.begin(), reached.end(), false) != reached.end())
    throw Error(spanning_tree ? "spanning tree does not span the graph" : "graph is not connected");

  g.slots_.resize(2 * g.edges_.size());
  for (std::size_t e = 0; e < g.edges_.size(); ++e) {
    for (bool rev : {false, true}) {
      Traversal y{e, rev};
      const GroupHom& alpha = g.from_map(y);
      const FiniteGroup& group = g.vertex_group(g.source(y));
      Slot& s = g.slots_[2 * e + (rev ? 1 : 0)];
      s.image.elements = alpha.map;
      std::sort(s.image.elements.begin(), s.image.elements.end());
      s.preimage.assign(group.order(), kUnset);
      for (Element c = 0; c < alpha.map.size(); ++c) s.preimage[alpha.map[c]] = c;
      s.rep.assign(group.order(), kUnset);
      for (Element a = 0; a < group.order(); ++a) {
        if (s.rep[a] != kUnset) continue;
        Element best = a;
        for (Element h : s.image.elements) best = std::min(best, group.multiply(a, h));
        for (Element h : s.image.elements) s.rep[group.multiply(a, h)] = best;
        s.transversal.push_back(best);
      }
      std::sort(s.transversal.begin(), s.transversal.end());
    }
  }

  Fnv f;
  f.add(n);
  f.add(base);
  for (const auto& v : g.vertices_) {
    f.add(v.group->order());
    for (Element x : v.group->table()) f.add(x);
  }
  for (const auto& e : g.edges_) {
    f.add(e.from);
    f.add(e.to);
    for (Element x : e.into_from.map) f.add(x);
    f.add(0xabcdef);
    for (Element x : e.into_to.map) f.add(x);
  }
  for (std::size_t e : g.tree_) f.add(e);
  g.fingerprint_ = f.h;
  return g;
}

std::optional<std::size_t> GraphOfGroups::vertex_index(std::string_view id) const {
  for (std::size_t v = 0; v < vertices_.size(); ++v)
    if (vertices_[v].id == id) return v;
  return std::nullopt;
}

std::optional<std::size_t> GraphOfGroups::edge_index(std::string_view id) const {
  for (std::size_t e = 0; e < edges_.size(); ++e)
    if (edges_[e].id == id) return e;
  return std::nullopt;
}

std::size_t GraphOfGroups::source(Traversal y) const {
  return y.reversed ? edges_[y.edge].to : edges_[y.edge].from;
}

std::size_t GraphOfGroups::target(Traversal y) const {
  return y.reversed ? edges_[y.edge].from : edges_[y.edge].to;
}

const GroupHom& GraphOfGroups::from_map(Traversal y) const {
  return y.reversed ? edges_[y.edge].into_to : edges_[y.edge].into_from;
}

const GroupHom& GraphOfGroups::to_map(Traversal y) const {
  return y.reversed ? edges_[y.edge].into_from : edges_[y.edge].into_to;
}

Element GraphOfGroups::source_preimage(Traversal y, Element a) const {
  Element c = slot(y).preimage[a];
  if (c == kUnset) throw Error("element is not in the image of the edge group");
  return c;
}

std::vector<Traversal> GraphOfGroups::outgoing(std::size_t v) const {
  std::vector<Traversal> out;
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    if (edges_[e].from == v) out.push_back({e, false});
    if (edges_[e].to == v) out.push_back({e, true});
  }
  return out;
}

GraphOfGroups build_amalgam(const GroupPtr& a, const GroupPtr& b, const GroupHom& into_a,
                            const GroupHom& into_b) {
  if (!into_a.source || !into_b.source || !(*into_a.source == *into_b.source))
    throw Error("amalgam injections must share their source group");
  std::vector<GogVertex> vertices{{"A", a}, {"B", b}};
  std::vector<GogEdge> edges{{"y", into_a.source, 0, 1, into_a, into_b}};
  return GraphOfGroups::create(std::move(vertices), std::move(edges), 0);
}

// --- elements -----------------------------------------------------------------

NormalForm identity(const GraphOfGroups& g) { return identity_at(g, g.base()); }

NormalForm identity_at(const GraphOfGroups& g, std::size_t v) { return Reducer(g, v).take(); }

bool is_identity(const GraphOfGroups& g, const NormalForm& w) {
  return w.path.empty() && w.start == w.end && w.tail == g.vertex_group(w.end).identity();
}

NormalForm local_element(const GraphOfGroups& g, std::size_t v, Element a) {
  Reducer r(g, v);
  r.element(a);
  return r.take();
}

NormalForm vertex_loop(const GraphOfGroups& g, std::size_t v, Element a) {
  Reducer r(g, g.base());
  for (Traversal y : g.tree_path(v)) r.traverse(y);
  r.element(a);
  const auto& path = g.tree_path(v);
  for (auto it = path.rbegin(); it != path.rend(); ++it) r.traverse(it->inverse());
  return r.take();
}

NormalForm edge_loop(const GraphOfGroups& g, std::size_t edge) {
  Reducer r(g, g.base());
  for (Traversal y : g.tree_path(g.edges()[edge].from)) r.traverse(y);
  r.traverse({edge, false});
  const auto& back = g.tree_path(g.edges()[edge].to);
  for (auto it = back.rbegin(); it != back.rend(); ++it) r.traverse(it->inverse());
  return r.take();
}

NormalForm traversal_element(const GraphOfGroups& g, Traversal y) {
  Reducer r(g, g.source(y));
  r.traverse(y);
  return r.take();
}

NormalForm normal_form(const GraphOfGroups& g, const GroupWord& w) {
  if (w.start >= g.vertices().size()) throw Error("word starts at an unknown vertex");
  Reducer r(g, w.start);
  r.feed(w);
  return r.take();
}

GroupWord to_word(const NormalForm& w) {
  GroupWord out;
  out.start = w.start;
  for (std::size_t i = 0; i < w.path.size(); ++i) {
    out.syllables.emplace_back(w.reps[i]);
    out.syllables.emplace_back(w.path[i]);
  }
  out.syllables.emplace_back(w.tail);
  return out;
}

NormalForm multiply(const GraphOfGroups& g, const NormalForm& a, const NormalForm& b) {
  check_graph(g, a);
  check_graph(g, b);
  if (a.end != b.start) throw Error("cannot multiply: groupoid elements do not compose");
  Reducer r(g, a);
  r.feed(b);
  return r.take();
}

NormalForm invert(const GraphOfGroups& g, const NormalForm& w) {
  check_graph(g, w);
  Reducer r(g, w.end);
  const FiniteGroup& last = g.vertex_group(w.end);
  r.element(last.inverse(w.tail));
  for (std::size_t i = w.path.size(); i-- > 0;) {
    r.traverse(w.path[i].inverse());
    r.element(g.vertex_group(g.source(w.path[i])).inverse(w.reps[i]));
  }
  return r.take();
}

NormalForm power(const GraphOfGroups& g, const NormalForm& w, long long n) {
  check_graph(g, w);
  if (!w.is_loop()) throw Error("only loops can be raised to powers");
  NormalForm base = n < 0 ? invert(g, w) : w;
  unsigned long long k = n < 0 ? static_cast<unsigned long long>(-n) : static_cast<unsigned long long>(n);
  Reducer r(g, w.start);
  for (unsigned long long i = 0; i < k; ++i) r.feed(base);
  return r.take();
}

NormalForm conjugate(const GraphOfGroups& g, const NormalForm& x, const NormalForm& w) {
  return multiply(g, multiply(g, x, w), invert(g, x));
}

CyclicReduction cyclic_reduction(const GraphOfGroups& g, const NormalForm& w) {
  check_graph(g, w);
  if (!w.is_loop()) throw Error("cyclic reduction needs a loop");
  CyclicReduction out{identity_at(g, w.start), w};
  for (;;) {
    NormalForm& c = out.core;
    const std::size_t n = c.length();
    if (n < 2) break;
    const FiniteGroup& here = g.vertex_group(c.start);
    Element wrap = here.multiply(c.tail, c.reps.front());
    Traversal first = c.path.front();
    if (c.path.back() != first.inverse() || !g.source_image(first).contains(wrap)) break;
    // Peel: conjugate by p = r0 y1.
    Reducer p(g, c.start);
    p.element(c.reps.front());
    p.traverse(first);
    NormalForm step = p.take();
    out.conjugator = multiply(g, out.conjugator, step);
    Reducer next(g, g.target(first));
    for (std::size_t i = 1; i < n; ++i) {
      next.element(c.reps[i]);
      next.traverse(c.path[i]);
    }
    next.element(wrap);
    next.traverse(first);
    c = next.take();
  }
  return out;
}

std::optional<std::size_t> element_order(const GraphOfGroups& g, const NormalForm& w) {
  auto reduction = cyclic_reduction(g, w);
  if (reduction.core.length() > 0) return std::nullopt;
  return g.vertex_group(reduction.core.end).element_order(reduction.core.tail);
}

// --- text -----------------------------------------------------------------------

GroupWord parse_group_word(const GraphOfGroups& g, std::string_view text) {
  GroupWord out;
  out.start = g.base();
  std::size_t current = g.base();
  auto go_to = [&](std::size_t v) {
    const auto& up = g.tree_path(current);
    for (auto it = up.rbegin(); it != up.rend(); ++it) out.syllables.emplace_back(it->inverse());
    for (Traversal y : g.tree_path(v)) out.syllables.emplace_back(y);
    current = v;
  };

  for (const auto& letter : detail::tokenize_word(text)) {
    std::optional<std::size_t> vertex;
    std::string name = letter.symbol;
    if (auto colon = name.find(':'); colon != std::string::npos) {
      vertex = g.vertex_index(name.substr(0, colon));
      if (!vertex) throw Error("unknown vertex '" + name.substr(0, colon) + "'");
      name = name.substr(colon + 1);
      if (!g.vertex_group(*vertex).generator(name))
        throw Error("vertex " + g.vertices()[*vertex].id + " has no generator '" + name + "'");
    } else if (auto e = g.edge_index(name)) {
      if (g.in_tree(*e))
        throw Error("edge '" + name + "' lies in the spanning tree and has no letter");
      const auto& edge = g.edges()[*e];
      long long k = letter.exponent;
      for (long long i = 0; i < (k < 0 ? -k : k); ++i) {
        if (k > 0) {
          go_to(edge.from);
          out.syllables.emplace_back(Traversal{*e, false});
          current = edge.to;
        } else {
          go_to(edge.to);
          out.syllables.emplace_back(Traversal{*e, true});
          current = edge.from;
        }
      }
      continue;
    } else if (g.vertex_group(current).generator(name)) {
      vertex = current;
    } else {
      for (std::size_t v = 0; v < g.vertices().size(); ++v) {
        if (!g.vertex_group(v).generator(name)) continue;
        if (vertex)
          throw Error("letter '" + name + "' is ambiguous; qualify it as " + g.vertices()[*vertex].id +
                      ":" + name + " or " + g.vertices()[v].id + ":" + name);
        vertex = v;
      }
      if (!vertex) throw Error("unknown letter '" + name + "'");
    }
    go_to(*vertex);
    const FiniteGroup& group = g.vertex_group(*vertex);
    out.syllables.emplace_back(group.power(*group.generator(name), letter.exponent));
  }
  go_to(g.base());
  return out;
}

NormalForm parse_word(const GraphOfGroups& g, std::string_view text) {
  return normal_form(g, parse_group_word(g, text));
}

namespace {

bool name_is_ambiguous(const GraphOfGroups& g, std::size_t v, const std::string& name) {
  if (auto e = g.edge_index(name); e && !g.in_tree(*e)) return true;
  for (std::size_t u = 0; u < g.vertices().size(); ++u)
    if (u != v && g.vertex_group(u).generator(name)) return true;
  return false;
}

void append_element(const GraphOfGroups& g, std::size_t v, Element a, bool qualify_always,
                    std::vector<std::string>& out) {
  const FiniteGroup& group = g.vertex_group(v);
  if (a == group.identity()) return;
  for (const auto& letter : detail::tokenize_word(group.word_for(a))) {
    std::string symbol = letter.symbol;
    if (qualify_always || name_is_ambiguous(g, v, symbol)) symbol = g.vertices()[v].id + ":" + symbol;
    out.push_back(detail::render_letter(symbol, letter.exponent));
  }
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += ' ';
    out += p;
  }
  return out.empty() ? "1" : out;
}

}  // namespace

std::string format_word(const GraphOfGroups& g, const NormalForm& w) {
  check_graph(g, w);
  if (w.start != g.base() || w.end != g.base())
    throw Error("only loops at the base vertex have a word rendering; use describe()");
  std::vector<std::string> parts;
  std::size_t v = w.start;
  for (std::size_t i = 0; i < w.path.size(); ++i) {
    append_element(g, v, w.reps[i], false, parts);
    Traversal y = w.path[i];
    if (!g.in_tree(y.edge)) parts.push_back(g.edges()[y.edge].id + (y.reversed ? "^-1" : ""));
    v = g.target(y);
  }
  append_element(g, v, w.tail, false, parts);
  return join(parts);
}

std::string describe(const GraphOfGroups& g, const NormalForm& w) {
  check_graph(g, w);
  auto element_text = [&](std::size_t v, Element a) {
    std::vector<std::string> parts;
    append_element(g, v, a, false, parts);
    return g.vertices()[v].id + "{" + join(parts) + "}";
  };
  std::string out;
  std::size_t v = w.start;
  for (std::size_t i = 0; i < w.path.size(); ++i) {
    out += element_text(v, w.reps[i]) + " ";
    Traversal y = w.path[i];
    out += g.edges()[y.edge].id + (y.reversed ? "^-1 " : " ");
    v = g.target(y);
  }
  return out + element_text(v, w.tail);
}

// --- homomorphisms ------------------------------------------------------------

LoopMap extend_loop_map(const GraphOfGroups& source, const GraphOfGroups& target,
                        const std::vector<std::vector<NormalForm>>& generator_images,
                        const std::vector<std::optional<NormalForm>>& edge_images) {
  const std::size_t nv = source.vertices().size();
  if (generator_images.size() != nv) throw Error("one generator-image list per vertex expected");
  if (edge_images.size() != source.edges().size()) throw Error("one edge-image slot per edge expected");
  LoopMap map;
  map.vertex_images.resize(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    const FiniteGroup& group = source.vertex_group(v);
    const auto& gens = group.generators();
    if (generator_images[v].size() != gens.size())
      throw Error("vertex " + source.vertices()[v].id + ": expected " + std::to_string(gens.size()) +
                  " generator images");
    for (const auto& img : generator_images[v]) {
      check_graph(target, img);
      if (img.start != target.base() || img.end != target.base())
        throw Error("generator images must be loops at the base vertex");
    }
    std::vector<std::optional<NormalForm>> images(group.order());
    images[group.identity()] = identity(target);
    std::deque<Element> queue{group.identity()};
    while (!queue.empty()) {
      Element x = queue.front();
      queue.pop_front();
      for (std::size_t i = 0; i < gens.size(); ++i) {
        Element next = group.multiply(x, gens[i].element);
        NormalForm img = multiply(target, *images[x], generator_images[v][i]);
        if (!images[next]) {
          images[next] = std::move(img);
          queue.push_back(next);
        } else if (*images[next] != img) {
          throw Error("vertex " + source.vertices()[v].id +
                      ": generator images do not extend to a homomorphism (relation fails at " +
                      group.label(x) + " * " + gens[i].name + ")");
        }
      }
    }
    for (auto& img : images) map.vertex_images[v].push_back(std::move(*img));
  }
  map.edge_images.resize(source.edges().size());
  for (std::size_t e = 0; e < source.edges().size(); ++e) {
    if (source.in_tree(e)) continue;
    if (!edge_images[e])
      throw Error("edge " + source.edges()[e].id + " is outside the spanning tree and needs an image");
    check_graph(target, *edge_images[e]);
    map.edge_images[e] = edge_images[e];
  }
  return map;
}

std::vector<std::string> check_loop_map(const GraphOfGroups& source, const GraphOfGroups& target,
                                        const LoopMap& map) {
  std::vector<std::string> failures;
  for (std::size_t v = 0; v < source.vertices().size(); ++v) {
    const FiniteGroup& group = source.vertex_group(v);
    for (Element a = 0; a < group.order() && failures.size() < 8; ++a)
      for (Element b = 0; b < group.order(); ++b) {
        NormalForm lhs = map.vertex_images[v][group.multiply(a, b)];
        NormalForm rhs = multiply(target, map.vertex_images[v][a], map.vertex_images[v][b]);
        if (lhs != rhs) {
          failures.push_back("vertex " + source.vertices()[v].id + ": image of " + group.label(a) +
                             " * " + group.label(b) + " is not the product of the images");
          break;
        }
      }
  }
  for (std::size_t e = 0; e < source.edges().size(); ++e) {
    const auto& edge = source.edges()[e];
    NormalForm stable = source.in_tree(e) ? identity(target) : *map.edge_images[e];
    for (Element c = 0; c < edge.group->order(); ++c) {
      NormalForm lhs = multiply(target, map.vertex_images[edge.from][edge.into_from(c)], stable);
      NormalForm rhs = multiply(target, stable, map.vertex_images[edge.to][edge.into_to(c)]);
      if (lhs != rhs) {
        failures.push_back("edge " + edge.id + ": relation alpha(c) t = t omega(c) fails for c = " +
                           edge.group->label(c));
        break;
      }
    }
  }
  return failures;
}

NormalForm apply(const GraphOfGroups& source, const GraphOfGroups& target, const LoopMap& map,
                 const NormalForm& w) {
  check_graph(source, w);
  Reducer r(target, target.base());
  std::size_t v = w.start;
  for (std::size_t i = 0; i < w.path.size(); ++i) {
    r.feed(map.vertex_images[v][w.reps[i]]);
    Traversal y = w.path[i];
    if (!source.in_tree(y.edge)) {
      const NormalForm& t = *map.edge_images[y.edge];
      r.feed(y.reversed ? invert(target, t) : t);
    }
    v = source.target(y);
  }
  r.feed(map.vertex_images[v][w.tail]);
  return r.take();
}

}  // namespace vfree

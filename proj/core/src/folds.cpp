#include "vfree/folds.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <set>

namespace vfree {

namespace {

bool contains(const ElementSet& set, const NormalForm& x) {
  return std::binary_search(set.begin(), set.end(), x);
}

bool subset(const ElementSet& small, const ElementSet& big) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

ElementSet normalized(std::vector<NormalForm> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// x S x^-1
ElementSet conjugate_set(const GraphOfGroups& g, const NormalForm& x, const ElementSet& s) {
  std::vector<NormalForm> out;
  out.reserve(s.size());
  for (const auto& e : s) out.push_back(conjugate(g, x, e));
  return normalized(std::move(out));
}

ElementSet join(const GraphOfGroups& g, const ElementSet& a, const ElementSet& b) {
  std::vector<NormalForm> gens(a);
  gens.insert(gens.end(), b.begin(), b.end());
  return generated_subgroup(g, gens);
}

// The edge at a vertex as seen from that vertex's lift: the far endpoint is
// k . x_far and the stabilizer is `stab`.
struct Direction {
  std::size_t vertex = 0;
  std::size_t far = 0;
  NormalForm k;
  ElementSet stab;
};

Direction direction(const MarkedTree& t, EdgeEnd end) {
  const GraphOfGroups& g = *t.ambient;
  const MarkedEdge& e = t.edges.at(end.edge);
  if (!end.at_to) return {e.from, e.to, e.offset, e.stabilizer};
  NormalForm back = invert(g, e.offset);
  return {e.to, e.from, back, conjugate_set(g, back, e.stabilizer)};
}

// Stores a stabilizer given in the frame of the vertex at `end`.
void set_edge_stabilizer(const GraphOfGroups& g, MarkedEdge& e, EdgeEnd end, const ElementSet& s) {
  e.stabilizer = end.at_to ? conjugate_set(g, e.offset, s) : s;
}

TreeVertex far_image(const MarkedTree& t, const Direction& d, const NormalForm& h) {
  const GraphOfGroups& g = *t.ambient;
  return act(g, multiply(g, h, d.k), t.vertices[d.far].image);
}

// Re-expresses every edge at `drop` through x_drop = m^-1 x_keep, then removes
// `drop` and the edges listed in `removed`.
MarkedTree merge_vertices(const MarkedTree& t, std::size_t keep, std::size_t drop, const NormalForm& m,
                          const std::vector<std::size_t>& removed) {
  const GraphOfGroups& g = *t.ambient;
  MarkedTree out{t.ambient, {}, {}};
  NormalForm m_inv = invert(g, m);
  for (std::size_t i = 0; i < t.edges.size(); ++i) {
    if (std::find(removed.begin(), removed.end(), i) != removed.end()) continue;
    MarkedEdge e = t.edges[i];
    if (drop != keep) {
      if (e.to == drop) {
        e.offset = multiply(g, e.offset, m_inv);
        e.to = keep;
      }
      if (e.from == drop) {
        e.offset = multiply(g, m, e.offset);
        e.stabilizer = conjugate_set(g, m, e.stabilizer);
        e.from = keep;
      }
    }
    out.edges.push_back(std::move(e));
  }
  for (std::size_t v = 0; v < t.vertices.size(); ++v)
    if (v != drop || drop == keep) out.vertices.push_back(t.vertices[v]);
  if (drop != keep)
    for (auto& e : out.edges) {
      if (e.from > drop) --e.from;
      if (e.to > drop) --e.to;
    }
  return out;
}

void check_tree(const MarkedTree& t) {
  const GraphOfGroups& g = *t.ambient;
  std::set<std::string> ids;
  for (const auto& v : t.vertices) {
    if (!ids.insert(v.id).second) throw Error("duplicate marked vertex id '" + v.id + "'");
    if (v.image.rep.graph != g.fingerprint()) throw Error("vertex " + v.id + ": image lies in a different tree");
    for (const auto& s : v.stabilizer)
      if (act(g, s, v.image) != v.image)
        throw Error("vertex " + v.id + ": stabilizer element " + format_word(g, s) + " moves the image vertex");
  }
  ids.clear();
  if (t.vertices.empty()) throw Error("a marked tree needs at least one vertex");
  std::vector<std::size_t> parent(t.vertices.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : t.edges) {
    if (!ids.insert(e.id).second) throw Error("duplicate marked edge id '" + e.id + "'");
    if (e.from >= t.vertices.size() || e.to >= t.vertices.size())
      throw Error("edge " + e.id + ": endpoint out of range");
    if (e.offset.graph != g.fingerprint() || e.offset.start != g.base() || e.offset.end != g.base())
      throw Error("edge " + e.id + ": offset must be a loop at the ambient base vertex");
    const auto& a = t.vertices[e.from];
    const auto& b = t.vertices[e.to];
    if (!subset(e.stabilizer, a.stabilizer))
      throw Error("edge " + e.id + ": stabilizer is not contained in the stabilizer of " + a.id);
    if (!subset(conjugate_set(g, invert(g, e.offset), e.stabilizer), b.stabilizer))
      throw Error("edge " + e.id + ": stabilizer does not fix the far endpoint " + b.id);
    if (distance(g, a.image, act(g, e.offset, b.image)) > 1)
      throw Error("edge " + e.id + ": image is not an edge of the ambient tree");
    parent[find(e.from)] = find(e.to);
  }
  for (std::size_t v = 0; v < t.vertices.size(); ++v)
    if (find(v) != find(0)) throw Error("marked tree quotient is not connected");
}

std::vector<EdgeEnd> marked_ends(const MarkedTree& t, std::size_t v) {
  std::vector<EdgeEnd> out;
  for (std::size_t i = 0; i < t.edges.size(); ++i) {
    if (t.edges[i].from == v) out.push_back({i, false});
    if (t.edges[i].to == v) out.push_back({i, true});
  }
  return out;
}

// Left coset representatives h S of S in G_v, in sorted order.
std::vector<NormalForm> coset_reps(const GraphOfGroups& g, const ElementSet& group, const ElementSet& s) {
  std::set<NormalForm> seen;
  std::vector<NormalForm> out;
  for (const auto& h : group) {
    if (seen.count(h)) continue;
    out.push_back(h);
    for (const auto& x : s) seen.insert(multiply(g, h, x));
  }
  return out;
}

bool is_degenerate(const MarkedTree& t, const MarkedEdge& e) {
  const GraphOfGroups& g = *t.ambient;
  return act(g, e.offset, t.vertices[e.to].image) == t.vertices[e.from].image;
}

FoldDirective stabilizer_directive(EdgeEnd end, std::vector<NormalForm> subgroup) {
  FoldDirective d;
  d.kind = DirectiveKind::stabilizer;
  d.first = end;
  d.subgroup = std::move(subgroup);
  return d;
}

MarkedTree stabilizer_fold(const MarkedTree& t, EdgeEnd end, const std::vector<NormalForm>& gens) {
  const GraphOfGroups& g = *t.ambient;
  Direction d = direction(t, end);
  const ElementSet& gv = t.vertices[d.vertex].stabilizer;
  for (const auto& h : gens)
    if (!contains(gv, h))
      throw Error("fold subgroup element " + format_word(g, h) + " is not in the stabilizer of " +
                  t.vertices[d.vertex].id);
  ElementSet h_set = generated_subgroup(g, gens);
  if (subset(h_set, d.stab)) throw Error("fold identifies nothing: the subgroup already fixes the edge");
  TreeVertex image = far_image(t, d, identity(g));
  for (const auto& h : gens)
    if (act(g, h, image) != image)
      throw Error("fold is not legal: " + format_word(g, h) + " moves the image of edge " + t.edges[end.edge].id);
  MarkedTree out = t;
  ElementSet new_edge = join(g, d.stab, h_set);
  set_edge_stabilizer(g, out.edges[end.edge], end, new_edge);
  MarkedVertex& far = out.vertices[d.far];
  far.stabilizer = join(g, far.stabilizer, conjugate_set(g, invert(g, d.k), h_set));
  check_tree(out);
  return out;
}

MarkedTree pair_fold(const MarkedTree& t, EdgeEnd first, EdgeEnd second, const NormalForm& witness) {
  const GraphOfGroups& g = *t.ambient;
  Direction d1 = direction(t, first);
  Direction d2 = direction(t, second);
  if (d1.vertex != d2.vertex) throw Error("pair fold needs two edge ends at a common vertex");
  const std::size_t v = d1.vertex;
  if (!contains(t.vertices[v].stabilizer, witness))
    throw Error("fold witness " + format_word(g, witness) + " is not in the stabilizer of " + t.vertices[v].id);
  if (is_degenerate(t, t.edges[first.edge]) || is_degenerate(t, t.edges[second.edge]))
    throw Error("fold involves a degenerate edge; collapse it first");
  if (far_image(t, d1, identity(g)) != far_image(t, d2, witness))
    throw Error("fold is not legal: the two edges have different images");
  if (first.edge == second.edge) {
    if (first.at_to != second.at_to)
      throw Error("fold rejected: identifying the two ends of a loop creates an inversion");
    return stabilizer_fold(t, first, {witness});
  }
  // Eliminate the far vertex of the second edge; it must not be v itself.
  NormalForm h = witness;
  if (d2.far == v && d1.far != v) {
    std::swap(d1, d2);
    std::swap(first, second);
    h = invert(g, h);
  }
  ElementSet new_edge = join(g, d1.stab, conjugate_set(g, h, d2.stab));
  // x_far2 is identified with m^-1 x_far1.
  NormalForm m = multiply(g, multiply(g, invert(g, d1.k), h), d2.k);
  MarkedTree out;
  if (d1.far != d2.far) {
    MarkedTree grown = t;
    MarkedVertex& keep = grown.vertices[d1.far];
    keep.stabilizer = join(g, keep.stabilizer, conjugate_set(g, m, t.vertices[d2.far].stabilizer));
    if (act(g, invert(g, m), keep.image) != t.vertices[d2.far].image)
      throw Error("internal: merged vertices have different images");
    set_edge_stabilizer(g, grown.edges[first.edge], first, new_edge);
    out = merge_vertices(grown, d1.far, d2.far, m, {second.edge});
  } else {
    MarkedTree grown = t;
    MarkedVertex& keep = grown.vertices[d1.far];
    keep.stabilizer = join(g, keep.stabilizer, {m});
    set_edge_stabilizer(g, grown.edges[first.edge], first, new_edge);
    out = merge_vertices(grown, d1.far, d1.far, m, {second.edge});
  }
  check_tree(out);
  return out;
}

MarkedTree collapse_edge(const MarkedTree& t, std::size_t edge) {
  const GraphOfGroups& g = *t.ambient;
  const MarkedEdge& e = t.edges.at(edge);
  if (!is_degenerate(t, e)) throw Error("edge " + e.id + " is not degenerate and cannot be collapsed");
  MarkedTree grown = t;
  MarkedVertex& keep = grown.vertices[e.from];
  if (e.from != e.to) {
    keep.stabilizer = join(g, keep.stabilizer, conjugate_set(g, e.offset, t.vertices[e.to].stabilizer));
    MarkedTree out = merge_vertices(grown, e.from, e.to, e.offset, {edge});
    check_tree(out);
    return out;
  }
  keep.stabilizer = join(g, keep.stabilizer, {e.offset});
  MarkedTree out = merge_vertices(grown, e.from, e.from, e.offset, {edge});
  check_tree(out);
  return out;
}

std::vector<bool> maximal_edges(const MarkedTree& t) {
  const GraphOfGroups& g = *t.ambient;
  std::vector<bool> out;
  for (const auto& e : t.edges) {
    const TreeVertex& a = t.vertices[e.from].image;
    TreeVertex b = act(g, e.offset, t.vertices[e.to].image);
    ElementSet sa = vertex_stabilizer(g, a);
    ElementSet sb = vertex_stabilizer(g, b);
    ElementSet both;
    std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(both));
    out.push_back(a != b && both == e.stabilizer);
  }
  return out;
}

GroupPtr group_of(const GraphOfGroups& g, const ElementSet& elements) {
  const std::size_t n = elements.size();
  auto index = [&](const NormalForm& x) {
    auto it = std::lower_bound(elements.begin(), elements.end(), x);
    if (it == elements.end() || *it != x) throw Error("internal: stabilizer is not closed");
    return static_cast<Element>(it - elements.begin());
  };
  std::vector<Element> table(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) table[i * n + j] = index(multiply(g, elements[i], elements[j]));
  std::vector<std::string> labels;
  for (const auto& x : elements) labels.push_back(format_word(g, x));
  // Generators are found on a provisional group (generated by everything)
  // first, then named s1, s2, ...
  std::vector<NamedElement> all;
  for (std::size_t i = 0; i < n; ++i) all.push_back({"g" + std::to_string(i), static_cast<Element>(i)});
  FiniteGroup provisional = FiniteGroup::from_table(n, table, std::move(all), labels);
  std::vector<NamedElement> gens;
  for (Element x : small_generating_set(provisional))
    gens.push_back({"s" + std::to_string(gens.size() + 1), x});
  return share(FiniteGroup::from_table(n, std::move(table), std::move(gens), std::move(labels)));
}

}  // namespace

ElementSet generated_subgroup(const GraphOfGroups& g, const std::vector<NormalForm>& generators,
                              std::size_t cap) {
  for (const auto& x : generators)
    if (!element_order(g, x))
      throw CapExceeded("infinite-or-large stabilizer: " + format_word(g, x) + " has infinite order");
  std::set<NormalForm> seen{identity(g)};
  std::deque<NormalForm> queue{identity(g)};
  while (!queue.empty()) {
    NormalForm x = queue.front();
    queue.pop_front();
    for (const auto& s : generators) {
      NormalForm y = multiply(g, x, s);
      if (seen.insert(y).second) {
        if (seen.size() > cap)
          throw CapExceeded("infinite-or-large stabilizer: closure exceeds " + std::to_string(cap) + " elements");
        queue.push_back(std::move(y));
      }
    }
  }
  return {seen.begin(), seen.end()};
}

ElementSet vertex_stabilizer(const GraphOfGroups& g, const TreeVertex& x) {
  std::vector<NormalForm> out;
  const FiniteGroup& group = g.vertex_group(x.orbit);
  NormalForm back = invert(g, x.rep);
  for (Element a = 0; a < group.order(); ++a)
    out.push_back(multiply(g, multiply(g, x.rep, local_element(g, x.orbit, a)), back));
  return normalized(std::move(out));
}

MarkedTree make_marked_tree(std::shared_ptr<const GraphOfGroups> ambient, std::vector<MarkedVertex> vertices,
                            std::vector<MarkedEdge> edges) {
  if (!ambient) throw Error("marked tree needs an ambient graph of groups");
  const GraphOfGroups& g = *ambient;
  for (auto& v : vertices) v.stabilizer = generated_subgroup(g, v.stabilizer);
  for (auto& e : edges) e.stabilizer = generated_subgroup(g, e.stabilizer);
  MarkedTree t{std::move(ambient), std::move(vertices), std::move(edges)};
  check_tree(t);
  return t;
}

MarkedQuotient marked_quotient(const MarkedTree& t) {
  const GraphOfGroups& g = *t.ambient;
  std::vector<GogVertex> vertices;
  for (const auto& v : t.vertices) vertices.push_back({v.id, group_of(g, v.stabilizer)});
  std::vector<GogEdge> edges;
  for (const auto& e : t.edges) {
    GroupPtr eg = group_of(g, e.stabilizer);
    const ElementSet& from = t.vertices[e.from].stabilizer;
    const ElementSet& to = t.vertices[e.to].stabilizer;
    NormalForm back = invert(g, e.offset);
    std::vector<Element> into_from, into_to;
    for (const auto& s : e.stabilizer) {
      into_from.push_back(static_cast<Element>(std::lower_bound(from.begin(), from.end(), s) - from.begin()));
      NormalForm c = conjugate(g, back, s);
      into_to.push_back(static_cast<Element>(std::lower_bound(to.begin(), to.end(), c) - to.begin()));
    }
    GogEdge edge{e.id, eg, e.from, e.to, {eg, vertices[e.from].group, std::move(into_from)},
                 {eg, vertices[e.to].group, std::move(into_to)}};
    edges.push_back(std::move(edge));
  }
  GraphOfGroups q = GraphOfGroups::create(std::move(vertices), std::move(edges), 0);

  // The groupoid morphism sends a in G_v to a and a traversal of e to its
  // offset; loops at vertex 0 then map to loops at the ambient base.
  std::vector<NormalForm> transport(t.vertices.size(), identity(g));
  std::vector<bool> done(t.vertices.size(), false);
  done[0] = true;
  std::deque<std::size_t> queue{0};
  while (!queue.empty()) {
    std::size_t v = queue.front();
    queue.pop_front();
    for (std::size_t i : q.spanning_tree()) {
      const auto& e = t.edges[i];
      if (e.from == v && !done[e.to]) {
        transport[e.to] = multiply(g, transport[v], e.offset);
        done[e.to] = true;
        queue.push_back(e.to);
      } else if (e.to == v && !done[e.from]) {
        transport[e.from] = multiply(g, transport[v], invert(g, e.offset));
        done[e.from] = true;
        queue.push_back(e.from);
      }
    }
  }
  std::vector<std::vector<NormalForm>> gen_images(t.vertices.size());
  for (std::size_t v = 0; v < t.vertices.size(); ++v) {
    const ElementSet& stab = t.vertices[v].stabilizer;
    for (const auto& gen : q.vertex_group(v).generators())
      gen_images[v].push_back(conjugate(g, transport[v], stab[gen.element]));
  }
  std::vector<std::optional<NormalForm>> edge_images(t.edges.size());
  for (std::size_t i = 0; i < t.edges.size(); ++i) {
    if (q.in_tree(i)) continue;
    const auto& e = t.edges[i];
    edge_images[i] = multiply(g, multiply(g, transport[e.from], e.offset), invert(g, transport[e.to]));
  }
  LoopMap marking = extend_loop_map(q, g, gen_images, edge_images);
  return {std::move(q), std::move(marking)};
}

FoldType classify_fold(const MarkedTree& t, const FoldDirective& d) {
  switch (d.kind) {
    case DirectiveKind::collapse:
      throw Error("collapse directives are not folds");
    case DirectiveKind::stabilizer:
      return FoldType::type3;
    case DirectiveKind::pair:
      break;
  }
  if (d.first.edge >= t.edges.size() || d.second.edge >= t.edges.size()) throw Error("fold edge out of range");
  if (d.first.edge != d.second.edge) return FoldType::type2;
  if (d.first.at_to != d.second.at_to)
    throw Error("fold rejected: identifying the two ends of a loop creates an inversion");
  return FoldType::type3;
}

MarkedTree fold(const MarkedTree& t, const FoldDirective& d) {
  if (d.first.edge >= t.edges.size()) throw Error("fold edge out of range");
  switch (d.kind) {
    case DirectiveKind::collapse:
      return collapse_edge(t, d.first.edge);
    case DirectiveKind::stabilizer:
      if (d.subgroup.empty()) throw Error("stabilizer fold needs a subgroup");
      return stabilizer_fold(t, d.first, d.subgroup);
    case DirectiveKind::pair:
      if (d.second.edge >= t.edges.size()) throw Error("fold edge out of range");
      return pair_fold(t, d.first, d.second, d.witness);
  }
  throw Error("unknown fold directive");
}

std::vector<FoldDirective> available_folds(const MarkedTree& t) {
  const GraphOfGroups& g = *t.ambient;
  std::vector<FoldDirective> out;
  for (std::size_t i = 0; i < t.edges.size(); ++i)
    if (is_degenerate(t, t.edges[i])) {
      FoldDirective d;
      d.kind = DirectiveKind::collapse;
      d.first = {i, false};
      out.push_back(d);
    }
  struct Item {
    EdgeEnd end;
    NormalForm h;
    TreeVertex image;
  };
  for (std::size_t v = 0; v < t.vertices.size(); ++v) {
    std::vector<Item> items;
    for (EdgeEnd end : marked_ends(t, v)) {
      if (is_degenerate(t, t.edges[end.edge])) continue;
      Direction d = direction(t, end);
      for (const auto& h : coset_reps(g, t.vertices[v].stabilizer, d.stab))
        items.push_back({end, h, far_image(t, d, h)});
    }
    std::set<std::pair<EdgeEnd, ElementSet>> seen_stabilizer;
    for (std::size_t i = 0; i < items.size(); ++i)
      for (std::size_t j = i + 1; j < items.size(); ++j) {
        if (items[i].image != items[j].image) continue;
        const Item& a = items[i];
        const Item& b = items[j];
        NormalForm w = multiply(g, invert(g, a.h), b.h);
        if (a.end.edge == b.end.edge) {
          if (a.end.at_to != b.end.at_to) continue;  // would be an inversion
          if (seen_stabilizer.insert({a.end, generated_subgroup(g, {w})}).second)
            out.push_back(stabilizer_directive(a.end, {w}));
          continue;
        }
        FoldDirective d;
        d.kind = DirectiveKind::pair;
        d.first = a.end;
        d.second = b.end;
        d.witness = w;
        out.push_back(std::move(d));
      }
  }
  return out;
}

std::vector<FoldStep> fold_sequence(const MarkedTree& source, const GraphOfGroups& target, std::size_t max_steps) {
  const GraphOfGroups& g = *source.ambient;
  std::vector<FoldStep> steps;
  MarkedTree current = source;
  while (true) {
    std::vector<FoldDirective> options = available_folds(current);
    if (options.empty()) break;
    if (steps.size() >= max_steps)
      throw CapExceeded("fold sequence did not terminate within " + std::to_string(max_steps) + " steps");
    FoldStep step;
    const FoldDirective* chosen = nullptr;
    std::set<FoldType> types;
    for (const auto& d : options) {
      if (d.kind == DirectiveKind::collapse) {
        step.collapse_available = true;
        if (!chosen || chosen->kind != DirectiveKind::collapse) chosen = &d;
        continue;
      }
      FoldType type = classify_fold(current, d);
      types.insert(type);
      if (chosen && chosen->kind == DirectiveKind::collapse) continue;
      if (!chosen || type < classify_fold(current, *chosen)) chosen = &d;
    }
    step.available_types.assign(types.begin(), types.end());
    step.directive = *chosen;
    if (chosen->kind != DirectiveKind::collapse) step.type = classify_fold(current, *chosen);
    step.result = fold(current, *chosen);
    step.maximal = maximal_edges(step.result);
    current = step.result;
    steps.push_back(std::move(step));
  }
  for (std::size_t v = 0; v < current.vertices.size(); ++v) {
    std::size_t degree = 0;
    for (EdgeEnd end : marked_ends(current, v)) {
      Direction d = direction(current, end);
      degree += current.vertices[v].stabilizer.size() / d.stab.size();
    }
    std::size_t ambient_degree = neighbors(g, current.vertices[v].image).size();
    if (degree != ambient_degree)
      throw Error("map is not foldable to an isomorphism: vertex " + current.vertices[v].id + " has " +
                  std::to_string(degree) + " edges but its image has " + std::to_string(ambient_degree));
  }
  if (!are_isomorphic(marked_quotient(current).graph, target))
    throw Error("folding terminated at a graph of groups not isomorphic to the target");
  return steps;
}

std::string to_string(FoldType type) {
  switch (type) {
    case FoldType::type1: return "type1";
    case FoldType::type2: return "type2";
    case FoldType::type3: return "type3";
  }
  return "?";
}

std::string to_string(DirectiveKind kind) {
  switch (kind) {
    case DirectiveKind::pair: return "pair";
    case DirectiveKind::stabilizer: return "stabilizer";
    case DirectiveKind::collapse: return "collapse";
  }
  return "?";
}

}  // namespace vfree

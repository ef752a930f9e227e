#include "vfree/defspace.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "vfree/permutation.hpp"

namespace vfree {

namespace {

// A morphism of path groupoids old -> new that sends every vertex-group
// element to an element and every traversal to a path. Enough to express
// collapses and expansions.
struct GroupoidImage {
  std::vector<std::size_t> vertex;
  std::vector<std::vector<Element>> element;
  std::vector<NormalForm> forward;  // image of each edge traversed forwards
};

LoopMap to_loop_map(const GraphOfGroups& old_g, const GraphOfGroups& new_g, const GroupoidImage& f) {
  auto image_path = [&](const std::vector<Traversal>& path) {
    NormalForm out = identity_at(new_g, f.vertex[old_g.base()]);
    for (Traversal y : path) {
      const NormalForm& step = f.forward[y.edge];
      out = multiply(new_g, out, y.reversed ? invert(new_g, step) : step);
    }
    return out;
  };
  LoopMap map;
  map.vertex_images.resize(old_g.vertices().size());
  for (std::size_t u = 0; u < old_g.vertices().size(); ++u) {
    NormalForm tau = image_path(old_g.tree_path(u));
    NormalForm tau_inv = invert(new_g, tau);
    for (Element a = 0; a < old_g.vertex_group(u).order(); ++a) {
      NormalForm local = local_element(new_g, f.vertex[u], f.element[u][a]);
      map.vertex_images[u].push_back(multiply(new_g, multiply(new_g, tau, local), tau_inv));
    }
  }
  map.edge_images.resize(old_g.edges().size());
  for (std::size_t e = 0; e < old_g.edges().size(); ++e) {
    if (old_g.in_tree(e)) continue;
    const auto& edge = old_g.edges()[e];
    NormalForm loop = multiply(new_g, image_path(old_g.tree_path(edge.from)), f.forward[e]);
    loop = multiply(new_g, loop, invert(new_g, image_path(old_g.tree_path(edge.to))));
    map.edge_images[e] = std::move(loop);
  }
  return map;
}

std::vector<std::pair<std::string, std::string>> make_dictionary(const GraphOfGroups& old_g,
                                                                 const GraphOfGroups& new_g,
                                                                 const LoopMap& map) {
  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t u = 0; u < old_g.vertices().size(); ++u)
    for (const auto& gen : old_g.vertex_group(u).generators())
      out.emplace_back(old_g.vertices()[u].id + ":" + gen.name,
                       format_word(new_g, map.vertex_images[u][gen.element]));
  for (std::size_t e = 0; e < old_g.edges().size(); ++e)
    if (map.edge_images[e]) out.emplace_back(old_g.edges()[e].id, format_word(new_g, *map.edge_images[e]));
  return out;
}

GroupoidImage identity_image(const GraphOfGroups& old_g) {
  GroupoidImage f;
  for (std::size_t u = 0; u < old_g.vertices().size(); ++u) {
    f.vertex.push_back(u);
    std::vector<Element> id(old_g.vertex_group(u).order());
    for (Element a = 0; a < id.size(); ++a) id[a] = a;
    f.element.push_back(std::move(id));
  }
  return f;
}

bool is_onto(const GroupHom& h) { return h.source->order() == h.target->order(); }

std::string fresh_id(const std::set<std::string>& used, const std::string& stem) {
  for (std::size_t i = 1;; ++i) {
    std::string id = stem + std::to_string(i);
    if (!used.count(id)) return id;
  }
}

MoveResult do_collapse(const GraphOfGroups& g, std::size_t e, std::optional<std::size_t> removed) {
  if (e >= g.edges().size()) throw Error("collapse: edge out of range");
  const GogEdge& edge = g.edges()[e];
  if (edge.from == edge.to)
    throw Error("collapse: edge " + edge.id + " is a loop; its endpoints lie in one orbit");
  bool from_ok = is_onto(edge.into_from), to_ok = is_onto(edge.into_to);
  std::size_t v;
  if (removed) {
    if (*removed == edge.from && from_ok)
      v = edge.from;
    else if (*removed == edge.to && to_ok)
      v = edge.to;
    else
      throw Error("collapse: G_e is not all of the vertex group at the named endpoint of " + edge.id);
  } else if (!from_ok && !to_ok) {
    throw Error("collapse: G_e is a proper subgroup at both endpoints of " + edge.id);
  } else if (from_ok && (edge.from != g.base() || !to_ok)) {
    v = edge.from;
  } else {
    v = edge.to;
  }
  const std::size_t w = v == edge.from ? edge.to : edge.from;
  const Traversal y{e, v != edge.from};  // from v to w

  const FiniteGroup& gv = g.vertex_group(v);
  std::vector<Element> transfer(gv.order());
  for (Element a = 0; a < gv.order(); ++a) transfer[a] = g.to_map(y)(g.source_preimage(y, a));

  auto idx = [&](std::size_t u) {
    if (u == v) u = w;
    return u > v ? u - 1 : u;
  };
  std::vector<GogVertex> vertices;
  for (std::size_t u = 0; u < g.vertices().size(); ++u)
    if (u != v) vertices.push_back(g.vertices()[u]);
  const GroupPtr& gw = g.vertices()[w].group;

  std::vector<GogEdge> edges;
  std::vector<std::size_t> new_index(g.edges().size(), 0);
  for (std::size_t f = 0; f < g.edges().size(); ++f) {
    if (f == e) continue;
    GogEdge copy = g.edges()[f];
    auto retarget = [&](GroupHom& h) {
      std::vector<Element> map(h.map.size());
      for (std::size_t c = 0; c < map.size(); ++c) map[c] = transfer[h.map[c]];
      h = GroupHom{copy.group, gw, std::move(map)};
    };
    if (copy.from == v) retarget(copy.into_from);
    if (copy.to == v) retarget(copy.into_to);
    copy.from = idx(copy.from);
    copy.to = idx(copy.to);
    new_index[f] = edges.size();
    edges.push_back(std::move(copy));
  }
  GraphOfGroups result = GraphOfGroups::create(std::move(vertices), std::move(edges), idx(g.base()));

  GroupoidImage f = identity_image(g);
  for (std::size_t u = 0; u < g.vertices().size(); ++u) f.vertex[u] = idx(u);
  f.element[v] = transfer;
  for (std::size_t k = 0; k < g.edges().size(); ++k)
    f.forward.push_back(k == e ? identity_at(result, idx(w))
                               : traversal_element(result, Traversal{new_index[k], false}));
  LoopMap map = to_loop_map(g, result, f);
  auto dictionary = make_dictionary(g, result, map);
  return MoveResult{std::move(result), std::move(map), std::move(dictionary)};
}

MoveResult do_expansion(const GraphOfGroups& g, const ExpansionSpec& spec, bool require_minimal) {
  const std::size_t w = spec.vertex;
  if (w >= g.vertices().size()) throw Error("expansion: vertex out of range");
  const FiniteGroup& gw = g.vertex_group(w);
  const Subgroup& h = spec.subgroup;
  for (Element a : h.elements)
    if (a >= gw.order()) throw Error("expansion: subgroup element outside G_w");
  if (!std::is_sorted(h.elements.begin(), h.elements.end()) || h.elements.empty() ||
      subgroup_closure(gw, h.elements) != h)
    throw Error("expansion: the given element set is not a subgroup of G_" + g.vertices()[w].id);
  if (spec.moved.empty()) throw Error("expansion: no edge end is moved (the new vertex would be a leaf with G_v = G_e)");

  std::set<EdgeEnd> moved(spec.moved.begin(), spec.moved.end());
  if (moved.size() != spec.moved.size()) throw Error("expansion: an edge end is listed twice");
  for (const EdgeEnd& end : moved) {
    if (end.edge >= g.edges().size()) throw Error("expansion: edge out of range");
    const GogEdge& edge = g.edges()[end.edge];
    if ((end.at_to ? edge.to : edge.from) != w)
      throw Error("expansion: an end of edge " + edge.id + " listed as moved is not at " + g.vertices()[w].id);
    const GroupHom& iota = end.at_to ? edge.into_to : edge.into_from;
    for (Element c = 0; c < iota.map.size(); ++c)
      if (!h.contains(iota(c)))
        throw Error("expansion: the image of G_" + edge.id + " is not contained in the chosen subgroup");
  }
  if (require_minimal && h.order() == gw.order() && moved.size() == ends_at(g, w).size())
    throw Error("expansion: moving every end with H = G_w leaves a leaf with G_w = G_e");

  std::set<std::string> vertex_ids, edge_ids;
  for (const auto& v : g.vertices()) vertex_ids.insert(v.id);
  for (const auto& e : g.edges()) edge_ids.insert(e.id);
  std::string vid = spec.new_vertex_id.empty() ? fresh_id(vertex_ids, "v") : spec.new_vertex_id;
  std::string eid = spec.new_edge_id.empty() ? fresh_id(edge_ids, "x") : spec.new_edge_id;
  if (vertex_ids.count(vid)) throw Error("expansion: vertex id '" + vid + "' already used");
  if (edge_ids.count(eid)) throw Error("expansion: edge id '" + eid + "' already used");

  GroupPtr hg = share(subgroup_as_group(gw, h));
  auto pos = [&](Element a) {
    return static_cast<Element>(std::lower_bound(h.elements.begin(), h.elements.end(), a) - h.elements.begin());
  };
  const std::size_t v = g.vertices().size();
  std::vector<GogVertex> vertices = g.vertices();
  vertices.push_back({vid, hg});
  std::vector<GogEdge> edges = g.edges();
  for (const EdgeEnd& end : moved) {
    GogEdge& edge = edges[end.edge];
    GroupHom& iota = end.at_to ? edge.into_to : edge.into_from;
    std::vector<Element> map(iota.map.size());
    for (std::size_t c = 0; c < map.size(); ++c) map[c] = pos(iota.map[c]);
    iota = GroupHom{edge.group, hg, std::move(map)};
    (end.at_to ? edge.to : edge.from) = v;
  }
  const std::size_t new_edge = edges.size();
  edges.push_back({eid, hg, v, w, identity_hom(hg), GroupHom{hg, g.vertices()[w].group, h.elements}});
  GraphOfGroups result = GraphOfGroups::create(std::move(vertices), std::move(edges), g.base());

  GroupoidImage f = identity_image(g);
  NormalForm down = traversal_element(result, Traversal{new_edge, true});  // w -> v
  NormalForm up = traversal_element(result, Traversal{new_edge, false});   // v -> w
  for (std::size_t k = 0; k < g.edges().size(); ++k) {
    NormalForm step = traversal_element(result, Traversal{k, false});
    if (moved.count(EdgeEnd{k, false})) step = multiply(result, down, step);
    if (moved.count(EdgeEnd{k, true})) step = multiply(result, step, up);
    f.forward.push_back(std::move(step));
  }
  LoopMap map = to_loop_map(g, result, f);
  auto dictionary = make_dictionary(g, result, map);
  return MoveResult{std::move(result), std::move(map), std::move(dictionary)};
}

LoopMap compose_maps(const GraphOfGroups& mid, const GraphOfGroups& last, const LoopMap& second,
                     const LoopMap& first) {
  LoopMap out;
  for (const auto& images : first.vertex_images) {
    out.vertex_images.emplace_back();
    for (const auto& img : images) out.vertex_images.back().push_back(apply(mid, last, second, img));
  }
  for (const auto& img : first.edge_images)
    out.edge_images.push_back(img ? std::optional(apply(mid, last, second, *img)) : std::nullopt);
  return out;
}

MoveResult do_slide(const GraphOfGroups& g, EdgeEnd end, Traversal over) {
  if (end.edge >= g.edges().size() || over.edge >= g.edges().size()) throw Error("slide: edge out of range");
  if (end.edge == over.edge) throw Error("slide: an edge cannot slide over itself");
  const GogEdge& f = g.edges()[end.edge];
  const std::size_t v = g.source(over);
  if ((end.at_to ? f.to : f.from) != v)
    throw Error("slide: the sliding end of " + f.id + " is not at the start of " + g.edges()[over.edge].id);
  const GroupHom& iota = end.at_to ? f.into_to : f.into_from;
  const Subgroup& image = g.source_image(over);
  for (Element c = 0; c < iota.map.size(); ++c)
    if (!image.contains(iota(c)))
      throw Error("slide: G_" + f.id + " does not lie in the image of G_" + g.edges()[over.edge].id);

  ExpansionSpec spec;
  spec.vertex = v;
  spec.subgroup = image;
  spec.moved = {end, EdgeEnd{over.edge, over.reversed}};
  MoveResult expanded = do_expansion(g, spec, false);
  const GraphOfGroups& mid = expanded.graph;
  const std::size_t u = mid.vertices().size() - 1;
  MoveResult collapsed = do_collapse(mid, over.edge, u);

  // The new edge takes over the id of the edge slid across.
  std::vector<GogVertex> vertices = collapsed.graph.vertices();
  std::vector<GogEdge> edges = collapsed.graph.edges();
  edges.back().id = g.edges()[over.edge].id;
  GraphOfGroups result = GraphOfGroups::create(std::move(vertices), std::move(edges), collapsed.graph.base());
  // Same groupoid, so every element carries over verbatim.
  auto rebase = [&](NormalForm w) {
    w.graph = result.fingerprint();
    return w;
  };
  LoopMap map = compose_maps(mid, collapsed.graph, collapsed.map, expanded.map);
  for (auto& images : map.vertex_images)
    for (auto& img : images) img = rebase(img);
  for (auto& img : map.edge_images)
    if (img) img = rebase(*img);
  // Tree choice may differ after renaming: recompute through normal forms.
  for (auto& images : map.vertex_images)
    for (auto& img : images) img = normal_form(result, to_word(img));
  for (auto& img : map.edge_images)
    if (img) img = normal_form(result, to_word(*img));
  auto dictionary = make_dictionary(g, result, map);
  return MoveResult{std::move(result), std::move(map), std::move(dictionary)};
}

}  // namespace

DeformationMove collapse_move(std::size_t edge, std::optional<std::size_t> removed_vertex) {
  DeformationMove m;
  m.kind = MoveKind::collapse;
  m.edge = edge;
  m.removed_vertex = removed_vertex;
  return m;
}

DeformationMove expansion_move(ExpansionSpec spec) {
  DeformationMove m;
  m.kind = MoveKind::expansion;
  m.expansion = std::move(spec);
  return m;
}

DeformationMove slide_move(EdgeEnd end, Traversal over) {
  DeformationMove m;
  m.kind = MoveKind::slide;
  m.slide_end = end;
  m.over = over;
  return m;
}

MoveResult apply_move(const GraphOfGroups& g, const DeformationMove& move) {
  switch (move.kind) {
    case MoveKind::collapse:
      return do_collapse(g, move.edge, move.removed_vertex);
    case MoveKind::expansion:
      return do_expansion(g, move.expansion, true);
    case MoveKind::slide:
      return do_slide(g, move.slide_end, move.over);
  }
  throw Error("unknown move kind");
}

std::vector<EdgeEnd> ends_at(const GraphOfGroups& g, std::size_t v) {
  std::vector<EdgeEnd> out;
  for (std::size_t e = 0; e < g.edges().size(); ++e) {
    if (g.edges()[e].from == v) out.push_back({e, false});
    if (g.edges()[e].to == v) out.push_back({e, true});
  }
  return out;
}

std::size_t quotient_degree(const GraphOfGroups& g, std::size_t v) { return ends_at(g, v).size(); }

std::size_t tree_degree(const GraphOfGroups& g, std::size_t v) {
  std::size_t d = 0;
  for (const EdgeEnd& end : ends_at(g, v)) d += g.index(Traversal{end.edge, end.at_to});
  return d;
}

DegreeSum degree_sum(const GraphOfGroups& g) {
  DegreeSum s;
  for (std::size_t v = 0; v < g.vertices().size(); ++v) {
    s.value += static_cast<long long>(quotient_degree(g, v)) - 2;
    s.tree_value += static_cast<long long>(tree_degree(g, v)) - 2;
  }
  return s;
}

std::vector<std::size_t> collapsible_edges(const GraphOfGroups& g) {
  std::vector<std::size_t> out;
  for (std::size_t e = 0; e < g.edges().size(); ++e) {
    const auto& edge = g.edges()[e];
    if (edge.from != edge.to && (is_onto(edge.into_from) || is_onto(edge.into_to))) out.push_back(e);
  }
  return out;
}

bool is_reduced(const GraphOfGroups& g) { return collapsible_edges(g).empty(); }

std::vector<std::size_t> redundant_vertices(const GraphOfGroups& g) {
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < g.vertices().size(); ++v) {
    if (tree_degree(g, v) != 2) continue;
    bool subdivision = true;
    for (const EdgeEnd& end : ends_at(g, v))
      if (g.index(Traversal{end.edge, end.at_to}) != 1) subdivision = false;
    if (subdivision) out.push_back(v);
  }
  return out;
}

bool is_non_redundant(const GraphOfGroups& g) { return redundant_vertices(g).empty(); }

std::vector<DeformationMove> legal_expansions(const GraphOfGroups& g) {
  std::vector<DeformationMove> out;
  for (std::size_t w = 0; w < g.vertices().size(); ++w) {
    const FiniteGroup& gw = g.vertex_group(w);
    const auto ends = ends_at(g, w);
    if (ends.size() > 16) throw CapExceeded("expansion: too many edge ends at one vertex");
    for (const Subgroup& h : all_subgroups(gw)) {
      std::vector<EdgeEnd> fit;
      for (const EdgeEnd& end : ends) {
        const GroupHom& iota = end.at_to ? g.edges()[end.edge].into_to : g.edges()[end.edge].into_from;
        if (std::all_of(iota.map.begin(), iota.map.end(), [&](Element a) { return h.contains(a); }))
          fit.push_back(end);
      }
      for (std::size_t mask = 1; mask < (std::size_t{1} << fit.size()); ++mask) {
        ExpansionSpec spec;
        spec.vertex = w;
        spec.subgroup = h;
        for (std::size_t i = 0; i < fit.size(); ++i)
          if (mask >> i & 1) spec.moved.push_back(fit[i]);
        if (h.order() == gw.order() && spec.moved.size() == ends.size()) continue;
        out.push_back(expansion_move(std::move(spec)));
      }
    }
  }
  return out;
}

std::vector<DeformationMove> legal_collapses(const GraphOfGroups& g) {
  std::vector<DeformationMove> out;
  for (std::size_t e : collapsible_edges(g)) {
    const auto& edge = g.edges()[e];
    if (is_onto(edge.into_from)) out.push_back(collapse_move(e, edge.from));
    if (is_onto(edge.into_to)) out.push_back(collapse_move(e, edge.to));
  }
  return out;
}

// --- isomorphism --------------------------------------------------------------

namespace {

using VertexKey = std::tuple<std::size_t, std::size_t, std::vector<std::pair<std::size_t, std::size_t>>>;

VertexKey vertex_key(const GraphOfGroups& g, std::size_t v) {
  std::vector<std::pair<std::size_t, std::size_t>> ends;
  for (const EdgeEnd& end : ends_at(g, v))
    ends.emplace_back(g.edges()[end.edge].group->order(), g.index(Traversal{end.edge, end.at_to}));
  std::sort(ends.begin(), ends.end());
  return {g.vertex_group(v).order(), ends.size(), std::move(ends)};
}

// Is there gamma in the target with phi_v(iota(c)) = gamma iota'(phi_e(c)) gamma^-1 for all c?
bool end_matches(const GroupHom& phi_v, const GroupHom& iota, const GroupHom& iota2, const GroupHom& phi_e) {
  const FiniteGroup& t = *phi_v.target;
  for (Element gamma = 0; gamma < t.order(); ++gamma) {
    bool ok = true;
    for (Element c = 0; c < iota.map.size() && ok; ++c)
      ok = phi_v(iota(c)) == t.conjugate(gamma, iota2(phi_e(c)));
    if (ok) return true;
  }
  return false;
}

class IsoSearch {
 public:
  IsoSearch(const GraphOfGroups& a, const GraphOfGroups& b) : a_(a), b_(b) {}

  std::optional<GogIsomorphism> run() {
    const std::size_t nv = a_.vertices().size(), ne = a_.edges().size();
    if (nv != b_.vertices().size() || ne != b_.edges().size()) return std::nullopt;
    for (std::size_t v = 0; v < nv; ++v) {
      keys_a_.push_back(vertex_key(a_, v));
      keys_b_.push_back(vertex_key(b_, v));
    }
    auto sa = keys_a_, sb = keys_b_;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    if (sa != sb) return std::nullopt;
    iso_.vertex_map.assign(nv, 0);
    iso_.edge_map.assign(ne, 0);
    iso_.edge_flipped.assign(ne, false);
    used_v_.assign(nv, false);
    used_e_.assign(ne, false);
    if (assign_vertex(0)) return iso_;
    return std::nullopt;
  }

 private:
  bool assign_vertex(std::size_t v) {
    if (v == a_.vertices().size()) return assign_edge(0);
    for (std::size_t w = 0; w < b_.vertices().size(); ++w) {
      if (used_v_[w] || keys_a_[v] != keys_b_[w]) continue;
      if (!(order_profile(a_.vertex_group(v)) == order_profile(b_.vertex_group(w)))) continue;
      used_v_[w] = true;
      iso_.vertex_map[v] = w;
      if (assign_vertex(v + 1)) return true;
      used_v_[w] = false;
    }
    return false;
  }

  bool assign_edge(std::size_t e) {
    if (e == a_.edges().size()) return assign_groups();
    const GogEdge& ea = a_.edges()[e];
    for (std::size_t f = 0; f < b_.edges().size(); ++f) {
      if (used_e_[f]) continue;
      const GogEdge& eb = b_.edges()[f];
      if (ea.group->order() != eb.group->order()) continue;
      std::size_t s = iso_.vertex_map[ea.from], t = iso_.vertex_map[ea.to];
      for (bool flip : {false, true}) {
        if (flip ? (eb.from != t || eb.to != s) : (eb.from != s || eb.to != t)) continue;
        used_e_[f] = true;
        iso_.edge_map[e] = f;
        iso_.edge_flipped[e] = flip;
        if (assign_edge(e + 1)) return true;
        used_e_[f] = false;
      }
    }
    return false;
  }

  bool assign_groups() {
    const std::size_t nv = a_.vertices().size(), ne = a_.edges().size();
    vertex_isos_.assign(nv, {});
    for (std::size_t v = 0; v < nv; ++v) {
      vertex_isos_[v] = all_isomorphisms(a_.vertices()[v].group, b_.vertices()[iso_.vertex_map[v]].group);
      if (vertex_isos_[v].empty()) return false;
    }
    edge_isos_.assign(ne, {});
    for (std::size_t e = 0; e < ne; ++e) {
      edge_isos_[e] = all_isomorphisms(a_.edges()[e].group, b_.edges()[iso_.edge_map[e]].group);
      if (edge_isos_[e].empty()) return false;
    }
    chosen_v_.assign(nv, 0);
    chosen_e_.assign(ne, 0);
    return choose_vertex_iso(0);
  }

  // Finds an edge isomorphism compatible with the chosen vertex isos at both ends.
  bool edge_ok(std::size_t e) {
    const GogEdge& ea = a_.edges()[e];
    const GogEdge& eb = b_.edges()[iso_.edge_map[e]];
    bool flip = iso_.edge_flipped[e];
    const GroupHom& from_b = flip ? eb.into_to : eb.into_from;
    const GroupHom& to_b = flip ? eb.into_from : eb.into_to;
    for (std::size_t k = 0; k < edge_isos_[e].size(); ++k) {
      const GroupHom& phi_e = edge_isos_[e][k];
      if (end_matches(vertex_isos_[ea.from][chosen_v_[ea.from]], ea.into_from, from_b, phi_e) &&
          end_matches(vertex_isos_[ea.to][chosen_v_[ea.to]], ea.into_to, to_b, phi_e)) {
        chosen_e_[e] = k;
        return true;
      }
    }
    return false;
  }

  bool choose_vertex_iso(std::size_t v) {
    const std::size_t nv = a_.vertices().size();
    if (v == nv) {
      for (std::size_t i = 0; i < nv; ++i) iso_.vertex_isos.push_back(vertex_isos_[i][chosen_v_[i]]);
      for (std::size_t e = 0; e < a_.edges().size(); ++e) iso_.edge_isos.push_back(edge_isos_[e][chosen_e_[e]]);
      return true;
    }
    for (std::size_t k = 0; k < vertex_isos_[v].size(); ++k) {
      chosen_v_[v] = k;
      bool ok = true;
      for (std::size_t e = 0; e < a_.edges().size() && ok; ++e) {
        const GogEdge& ea = a_.edges()[e];
        if (std::max(ea.from, ea.to) == v) ok = edge_ok(e);
      }
      if (ok && choose_vertex_iso(v + 1)) return true;
    }
    return false;
  }

  const GraphOfGroups& a_;
  const GraphOfGroups& b_;
  std::vector<VertexKey> keys_a_, keys_b_;
  GogIsomorphism iso_;
  std::vector<bool> used_v_, used_e_;
  std::vector<std::vector<GroupHom>> vertex_isos_, edge_isos_;
  std::vector<std::size_t> chosen_v_, chosen_e_;
};

}  // namespace

std::optional<GogIsomorphism> find_isomorphism(const GraphOfGroups& first, const GraphOfGroups& second) {
  return IsoSearch(first, second).run();
}

bool are_isomorphic(const GraphOfGroups& first, const GraphOfGroups& second) {
  return find_isomorphism(first, second).has_value();
}

// --- enumeration ----------------------------------------------------------------

namespace {

FiniteGroup named_product(std::size_t m, std::size_t n) {
  return build_direct_product(build_cyclic(m, "a"), build_cyclic(n, "b"));
}

FiniteGroup dihedral(std::size_t n) {
  Permutation r(n), s(n);
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = static_cast<Element>((i + 1) % n);
    s[i] = static_cast<Element>((n - i) % n);
  }
  std::vector<Permutation> gens{r, s};
  std::vector<std::string> names{"r", "s"};
  return group_from_permutations(gens, names);
}

FiniteGroup quaternion() {
  // Elements (sign, unit) with units 1, i, j, k; index = 4 * sign + unit.
  static const int unit_sign[4][4] = {{0, 0, 0, 0}, {0, 1, 0, 1}, {0, 1, 1, 0}, {0, 0, 1, 1}};
  static const int unit_prod[4][4] = {{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
  auto mul = [](Element x, Element y) {
    Element sign = (x / 4 + y / 4 + unit_sign[x % 4][y % 4]) % 2;
    return static_cast<Element>(sign * 4 + unit_prod[x % 4][y % 4]);
  };
  std::vector<Element> table(64);
  for (Element x = 0; x < 8; ++x)
    for (Element y = 0; y < 8; ++y) table[x * 8 + y] = mul(x, y);
  std::vector<std::string> labels{"1", "i", "j", "k", "-1", "-i", "-j", "-k"};
  return FiniteGroup::from_table(8, std::move(table), {{"i", 1}, {"j", 2}}, std::move(labels));
}

FiniteGroup alternating4() {
  std::vector<Permutation> gens{{1, 2, 0, 3}, {1, 0, 3, 2}};
  std::vector<std::string> names{"c", "d"};
  return group_from_permutations(gens, names);
}

FiniteGroup dicyclic3() {
  auto c3 = share(build_cyclic(3, "a"));
  auto c4 = share(build_cyclic(4, "b"));
  std::map<std::string, GroupHom> action;
  action.emplace("b", GroupHom{c3, c3, {0, 2, 1}});
  return build_semidirect(c3, c4, action);
}

std::vector<std::vector<std::size_t>> permutations_of(std::vector<std::size_t> items) {
  std::vector<std::vector<std::size_t>> out;
  std::sort(items.begin(), items.end());
  do out.push_back(items);
  while (std::next_permutation(items.begin(), items.end()));
  return out;
}

// All injections E -> V. The first list keeps one injection per image
// subgroup; the second lists them all.
struct Injections {
  std::vector<GroupHom> per_image;
  std::vector<GroupHom> all;
};

Injections injections(const GroupPtr& e, const GroupPtr& v) {
  Injections out;
  if (v->order() % e->order() != 0) return out;
  for (const Subgroup& s : all_subgroups(*v)) {
    if (s.order() != e->order()) continue;
    auto sg = share(subgroup_as_group(*v, s));
    auto isos = all_isomorphisms(e, sg, 4096);
    for (std::size_t i = 0; i < isos.size(); ++i) {
      std::vector<Element> map(e->order());
      for (Element c = 0; c < map.size(); ++c) map[c] = s.elements[isos[i](c)];
      GroupHom h{e, v, std::move(map)};
      if (i == 0) out.per_image.push_back(h);
      out.all.push_back(std::move(h));
    }
  }
  return out;
}

bool connected(std::size_t p, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  std::vector<std::size_t> parent(p);
  for (std::size_t i = 0; i < p; ++i) parent[i] = i;
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  for (auto [a, b] : edges) parent[find(a)] = find(b);
  for (std::size_t i = 0; i < p; ++i)
    if (find(i) != find(0)) return false;
  return true;
}

// Sort key making constraint lists independent of input order.
std::pair<std::size_t, std::vector<Element>> group_key(const GroupPtr& g) { return {g->order(), g->table()}; }

std::vector<GroupPtr> canonical_list(std::vector<GroupPtr> groups) {
  std::stable_sort(groups.begin(), groups.end(),
                   [](const GroupPtr& a, const GroupPtr& b) { return group_key(a) < group_key(b); });
  return groups;
}

}  // namespace

std::vector<GroupPtr> small_group_catalog(std::size_t max_order) {
  if (max_order > 12) throw CapExceeded("group catalog only covers orders up to 12");
  std::vector<GroupPtr> out;
  for (std::size_t n = 1; n <= max_order; ++n) {
    out.push_back(share(build_cyclic(n)));
    switch (n) {
      case 4:
        out.push_back(share(build_elementary_abelian(2)));
        break;
      case 6:
        out.push_back(share(dihedral(3)));
        break;
      case 8:
        out.push_back(share(named_product(4, 2)));
        out.push_back(share(build_elementary_abelian(3)));
        out.push_back(share(dihedral(4)));
        out.push_back(share(quaternion()));
        break;
      case 9:
        out.push_back(share(named_product(3, 3)));
        break;
      case 10:
        out.push_back(share(dihedral(5)));
        break;
      case 12:
        out.push_back(share(named_product(6, 2)));
        out.push_back(share(alternating4()));
        out.push_back(share(dihedral(6)));
        out.push_back(share(dicyclic3()));
        break;
      default:
        break;
    }
  }
  return out;
}

std::vector<GraphOfGroups> enumerate_reduced(std::size_t p, std::size_t q, std::size_t r,
                                             const EnumerationConstraints& constraints,
                                             const EnumerationLimits& limits) {
  if (p == 0) throw Error("enumeration needs at least one vertex");
  if (p > limits.max_vertices || q > limits.max_edges || r > limits.max_order)
    throw CapExceeded("enumeration caps exceeded (vertices <= " + std::to_string(limits.max_vertices) +
                      ", edges <= " + std::to_string(limits.max_edges) + ", order <= " +
                      std::to_string(limits.max_order) + ")");
  if (q + 1 < p) return {};

  std::vector<std::vector<GroupPtr>> vertex_choices;
  if (constraints.vertex_groups) {
    auto groups = canonical_list(*constraints.vertex_groups);
    if (groups.size() != p) throw Error("expected exactly one constrained vertex group per vertex");
    for (const auto& g : groups)
      if (g->order() > r) throw Error("constrained vertex group exceeds the maximal order");
    std::vector<std::size_t> idx(p);
    for (std::size_t i = 0; i < p; ++i) {
      idx[i] = i;
      for (std::size_t j = 0; j < i; ++j)
        if (groups[j]->order() == groups[i]->order() && *groups[j] == *groups[i]) idx[i] = idx[j];
    }
    for (const auto& perm : permutations_of(idx)) {
      std::vector<GroupPtr> choice;
      for (std::size_t i : perm) choice.push_back(groups[i]);
      vertex_choices.push_back(std::move(choice));
    }
  } else {
    auto catalog = small_group_catalog(r);
    std::vector<std::size_t> counter(p, 0);
    for (;;) {
      std::vector<GroupPtr> choice;
      for (std::size_t i : counter) choice.push_back(catalog[i]);
      vertex_choices.push_back(std::move(choice));
      std::size_t k = 0;
      while (k < p && ++counter[k] == catalog.size()) counter[k++] = 0;
      if (k == p) break;
    }
  }

  std::vector<GroupPtr> edge_pool;
  if (constraints.edge_groups) {
    edge_pool = canonical_list(*constraints.edge_groups);
    if (edge_pool.size() != q) throw Error("expected exactly one constrained edge group per edge");
  } else {
    edge_pool = small_group_catalog(r);
  }

  std::vector<std::pair<std::size_t, std::size_t>> all_pairs;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i; j < p; ++j) all_pairs.emplace_back(i, j);
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> shapes;
  {
    std::vector<std::size_t> pick(q, 0);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t k, std::size_t from) {
      if (k == q) {
        std::vector<std::pair<std::size_t, std::size_t>> shape;
        for (std::size_t i : pick) shape.push_back(all_pairs[i]);
        if (connected(p, shape)) shapes.push_back(std::move(shape));
        return;
      }
      for (std::size_t i = from; i < all_pairs.size(); ++i) {
        pick[k] = i;
        rec(k + 1, i);
      }
    };
    rec(0, 0);
  }

  std::map<std::pair<const FiniteGroup*, const FiniteGroup*>, Injections> cache;
  auto inj = [&](const GroupPtr& e, const GroupPtr& v) -> const Injections& {
    auto key = std::pair(e.get(), v.get());
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, injections(e, v)).first;
    return it->second;
  };

  std::vector<GraphOfGroups> accepted;
  std::size_t candidates = 0;

  for (const auto& shape : shapes) {
    for (const auto& vgroups : vertex_choices) {
      // Edge group assignment: a permutation of the constrained multiset, or
      // any catalog group per edge.
      std::vector<std::vector<std::size_t>> edge_assignments;
      if (constraints.edge_groups) {
        std::vector<std::size_t> idx(q);
        for (std::size_t i = 0; i < q; ++i) {
          idx[i] = i;
          for (std::size_t j = 0; j < i; ++j)
            if (*edge_pool[j] == *edge_pool[i]) idx[i] = idx[j];
        }
        edge_assignments = q ? permutations_of(idx) : std::vector<std::vector<std::size_t>>{{}};
      } else {
        std::vector<std::size_t> counter(q, 0);
        for (;;) {
          edge_assignments.push_back(counter);
          std::size_t k = 0;
          while (k < q && ++counter[k] == edge_pool.size()) counter[k++] = 0;
          if (k == q) break;
        }
      }
      for (const auto& assignment : edge_assignments) {
        std::vector<GogEdge> edges(q);
        std::vector<GogVertex> vertices;
        for (std::size_t i = 0; i < p; ++i) vertices.push_back({"v" + std::to_string(i + 1), vgroups[i]});
        bool feasible = true;
        for (std::size_t k = 0; k < q && feasible; ++k) {
          const GroupPtr& eg = edge_pool[assignment[k]];
          auto [a, b] = shape[k];
          feasible = !inj(eg, vgroups[a]).all.empty() && !inj(eg, vgroups[b]).all.empty();
        }
        if (!feasible) continue;
        std::function<void(std::size_t)> rec = [&](std::size_t k) {
          if (k == q) {
            if (++candidates > limits.max_candidates)
              throw CapExceeded("enumeration exceeds " + std::to_string(limits.max_candidates) + " candidates");
            GraphOfGroups g = GraphOfGroups::create(vertices, edges, 0);
            if (!is_reduced(g)) return;
            for (const auto& other : accepted)
              if (are_isomorphic(g, other)) return;
            accepted.push_back(std::move(g));
            return;
          }
          const GroupPtr& eg = edge_pool[assignment[k]];
          auto [a, b] = shape[k];
          edges[k].id = "e" + std::to_string(k + 1);
          edges[k].group = eg;
          edges[k].from = a;
          edges[k].to = b;
          for (const GroupHom& hf : inj(eg, vgroups[a]).per_image) {
            for (const GroupHom& ht : inj(eg, vgroups[b]).all) {
              edges[k].into_from = hf;
              edges[k].into_to = ht;
              rec(k + 1);
            }
          }
        };
        rec(0);
      }
    }
  }
  return accepted;
}

ExpansionSearch nonredundant_expansions(const GraphOfGroups& g, std::size_t depth) {
  if (depth > kMaxExpansionDepth)
    throw CapExceeded("expansion depth above " + std::to_string(kMaxExpansionDepth));
  ExpansionSearch out;
  out.seed_non_redundant = is_non_redundant(g);
  std::vector<GraphOfGroups> seen{g};
  std::vector<GraphOfGroups> level{g};
  for (std::size_t k = 1; k <= depth; ++k) {
    std::vector<GraphOfGroups> next;
    for (const auto& h : level) {
      for (const auto& move : legal_expansions(h)) {
        GraphOfGroups candidate = apply_move(h, move).graph;
        bool known = false;
        for (const auto& s : seen)
          if (are_isomorphic(candidate, s)) {
            known = true;
            break;
          }
        if (known) continue;
        if (seen.size() > 5000) throw CapExceeded("expansion search exceeds 5000 classes");
        seen.push_back(candidate);
        next.push_back(std::move(candidate));
      }
    }
    std::size_t redundant = 0;
    for (const auto& h : next) {
      if (is_non_redundant(h))
        out.expansions.push_back(h);
      else
        ++redundant;
    }
    out.reached_per_level.push_back(next.size());
    out.redundant_per_level.push_back(redundant);
    level = std::move(next);
  }
  return out;
}

}  // namespace vfree

#include "vfree/io.hpp"

#include <fstream>
#include <sstream>

#include "json_io.hpp"
#include "vfree/permutation.hpp"

namespace vfree {

namespace detail {

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(std::string("malformed JSON: ") + e.what());
  }
}

const json& member(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(std::string("missing field '") + key + "'");
  return j.at(key);
}

namespace {

std::string as_string(const json& j, const char* what) {
  if (!j.is_string()) throw Error(std::string(what) + " must be a string");
  return j.get<std::string>();
}

std::size_t as_size(const json& j, const char* what) {
  if (!j.is_number_integer() || j.get<long long>() < 0)
    throw Error(std::string(what) + " must be a non-negative integer");
  return j.get<std::size_t>();
}

// An element given as a word over the generators or as a table index.
Element element_of(const FiniteGroup& g, const json& j) {
  if (j.is_number_integer()) {
    std::size_t i = as_size(j, "element index");
    if (i >= g.order()) throw Error("element index " + std::to_string(i) + " out of range");
    return static_cast<Element>(i);
  }
  return g.evaluate(as_string(j, "element"));
}

GroupHom action_of(const GroupPtr& c, const json& c_spec, const json& spec, const std::string& name) {
  const bool elementary = c_spec.is_object() && c_spec.value("kind", "") == "elementary_abelian";
  auto from_matrix = [&](const BinaryMatrix& m) {
    if (!elementary) throw Error("action of '" + name + "': cycle and matrix forms need an elementary_abelian normal subgroup");
    if (m.dim() != as_size(member(c_spec, "rank"), "rank"))
      throw Error("action of '" + name + "': matrix dimension does not match the rank");
    if (!m.is_invertible()) throw Error("action of '" + name + "' is not invertible");
    GroupHom h{c, c, {}};
    for (Element a = 0; a < c->order(); ++a) h.map.push_back(m.apply(a));
    return h;
  };
  if (spec.is_string()) {
    std::size_t dim = elementary ? as_size(member(c_spec, "rank"), "rank") : 0;
    return from_matrix(BinaryMatrix::from_cycles(spec.get<std::string>(), dim));
  }
  const json& images = spec.is_object() ? member(spec, "images") : spec;
  if (!images.is_array()) throw Error("action of '" + name + "' must be cycles, rows or generator images");
  if (!images.empty() && images.front().is_array()) {
    std::vector<std::vector<int>> rows = images.get<std::vector<std::vector<int>>>();
    return from_matrix(BinaryMatrix::from_rows(rows));
  }
  std::vector<Element> imgs;
  for (const auto& x : images) imgs.push_back(element_of(*c, x));
  return extend_generator_images(c, c, imgs);
}

}  // namespace

GroupPtr group_from_json(const json& j) {
  const std::string kind = as_string(member(j, "kind"), "group kind");
  if (kind == "cyclic")
    return share(build_cyclic(as_size(member(j, "n"), "n"), j.value("generator", std::string("g"))));
  if (kind == "elementary_abelian") return share(build_elementary_abelian(as_size(member(j, "rank"), "rank")));
  if (kind == "product") {
    const json& factors = member(j, "factors");
    if (!factors.is_array() || factors.empty()) throw Error("product needs a nonempty 'factors' array");
    GroupPtr g = group_from_json(factors.front());
    for (std::size_t i = 1; i < factors.size(); ++i) g = share(build_direct_product(*g, *group_from_json(factors[i])));
    return g;
  }
  if (kind == "semidirect") {
    GroupPtr c = group_from_json(member(j, "c"));
    GroupPtr q = group_from_json(member(j, "q"));
    const json& action = member(j, "action");
    std::map<std::string, GroupHom> actions;
    for (const auto& gen : q->generators()) {
      if (!action.contains(gen.name)) throw Error("semidirect action missing for generator '" + gen.name + "'");
      actions.emplace(gen.name, action_of(c, j.at("c"), action.at(gen.name), gen.name));
    }
    return share(build_semidirect(c, q, actions));
  }
  if (kind == "permutations") {
    std::vector<Permutation> perms;
    std::vector<std::string> names;
    for (const auto& gen : member(j, "generators")) {
      names.push_back(as_string(member(gen, "name"), "generator name"));
      perms.push_back(member(gen, "images").get<Permutation>());
    }
    return share(group_from_permutations(perms, names));
  }
  if (kind == "table") {
    const json& rows = member(j, "table");
    const std::size_t n = rows.size();
    std::vector<Element> table;
    for (const auto& row : rows) {
      if (!row.is_array() || row.size() != n) throw Error("table must be square");
      for (const auto& x : row) table.push_back(static_cast<Element>(as_size(x, "table entry")));
    }
    std::vector<NamedElement> gens;
    const json& gj = member(j, "generators");
    if (gj.is_array()) {
      for (const auto& x : gj)
        gens.push_back({as_string(member(x, "name"), "generator name"),
                        static_cast<Element>(as_size(member(x, "element"), "generator element"))});
    } else {
      for (auto it = gj.begin(); it != gj.end(); ++it)
        gens.push_back({it.key(), static_cast<Element>(as_size(it.value(), "generator element"))});
    }
    std::vector<std::string> labels = j.value("labels", std::vector<std::string>{});
    if (!labels.empty() && labels.size() != n) throw Error("one label per element expected");
    return share(FiniteGroup::from_table(n, std::move(table), std::move(gens), std::move(labels)));
  }
  throw Error("unknown group kind '" + kind + "'");
}

json group_to_json(const FiniteGroup& g) {
  json rows = json::array();
  for (Element a = 0; a < g.order(); ++a) {
    json row = json::array();
    for (Element b = 0; b < g.order(); ++b) row.push_back(g.multiply(a, b));
    rows.push_back(std::move(row));
  }
  json gens = json::array();
  for (const auto& gen : g.generators()) gens.push_back({{"name", gen.name}, {"element", gen.element}});
  return {{"kind", "table"}, {"table", rows}, {"generators", gens}, {"labels", g.labels()}};
}

GraphOfGroups graph_from_json(const json& doc) {
  const json& j = doc.contains("graph") ? doc.at("graph") : doc;
  std::vector<GogVertex> vertices;
  std::map<std::string, std::size_t> vindex;
  for (const auto& v : member(j, "vertices")) {
    std::string id = as_string(member(v, "id"), "vertex id");
    vindex[id] = vertices.size();
    vertices.push_back({id, group_from_json(member(v, "group"))});
  }
  auto vertex = [&](const json& x) {
    std::string id = as_string(x, "edge endpoint");
    auto it = vindex.find(id);
    if (it == vindex.end()) throw Error("unknown vertex '" + id + "'");
    return it->second;
  };
  std::vector<GogEdge> edges;
  std::map<std::string, std::size_t> eindex;
  for (const auto& e : member(j, "edges")) {
    GogEdge edge;
    edge.id = as_string(member(e, "id"), "edge id");
    edge.group = group_from_json(member(e, "group"));
    edge.from = vertex(member(e, "from"));
    edge.to = vertex(member(e, "to"));
    auto injection = [&](const char* key, std::size_t target) {
      const json& images = member(e, key);
      const GroupPtr& tg = vertices[target].group;
      if (!images.is_array() || images.size() != edge.group->generators().size())
        throw Error("edge " + edge.id + ": '" + key + "' needs one image per edge-group generator");
      std::vector<Element> imgs;
      for (const auto& x : images) imgs.push_back(element_of(*tg, x));
      return extend_generator_images(edge.group, tg, imgs);
    };
    edge.into_from = injection("into_from", edge.from);
    edge.into_to = injection("into_to", edge.to);
    eindex[edge.id] = edges.size();
    edges.push_back(std::move(edge));
  }
  std::size_t base = j.contains("base") ? vertex(j.at("base")) : 0;
  std::optional<std::vector<std::size_t>> tree;
  if (j.contains("spanning_tree")) {
    tree.emplace();
    for (const auto& x : j.at("spanning_tree")) {
      std::string id = as_string(x, "spanning tree edge");
      auto it = eindex.find(id);
      if (it == eindex.end()) throw Error("unknown spanning tree edge '" + id + "'");
      tree->push_back(it->second);
    }
  }
  return GraphOfGroups::create(std::move(vertices), std::move(edges), base, tree);
}

json graph_to_json(const GraphOfGroups& g) {
  json vertices = json::array();
  for (const auto& v : g.vertices()) vertices.push_back({{"id", v.id}, {"group", group_to_json(*v.group)}});
  json edges = json::array();
  for (const auto& e : g.edges()) {
    json from = json::array(), to = json::array();
    for (const auto& gen : e.group->generators()) {
      from.push_back(g.vertex_group(e.from).word_for(e.into_from(gen.element)));
      to.push_back(g.vertex_group(e.to).word_for(e.into_to(gen.element)));
    }
    edges.push_back({{"id", e.id},
                     {"from", g.vertices()[e.from].id},
                     {"to", g.vertices()[e.to].id},
                     {"group", group_to_json(*e.group)},
                     {"into_from", from},
                     {"into_to", to}});
  }
  json tree = json::array();
  for (std::size_t e : g.spanning_tree()) tree.push_back(g.edges()[e].id);
  return {{"vertices", vertices}, {"edges", edges}, {"base", g.vertices()[g.base()].id}, {"spanning_tree", tree}};
}

folog::Presentation presentation_from_json(const json& j) {
  folog::Presentation p;
  p.generators = member(j, "generators").get<std::vector<std::string>>();
  for (const auto& r : member(j, "relations")) p.relations.push_back(folog::parse_relation(as_string(r, "relation")));
  return p;
}

}  // namespace detail

namespace io {

using detail::json;
using detail::member;

namespace {

// A generating set picked greedily in element order.
std::vector<NormalForm> generators_of(const GraphOfGroups& g, const ElementSet& set) {
  std::vector<NormalForm> gens;
  ElementSet reached = generated_subgroup(g, {});
  for (const auto& x : set) {
    if (std::binary_search(reached.begin(), reached.end(), x)) continue;
    gens.push_back(x);
    reached = generated_subgroup(g, gens);
  }
  return gens;
}

json words(const GraphOfGroups& g, const std::vector<NormalForm>& xs) {
  json out = json::array();
  for (const auto& x : xs) out.push_back(format_word(g, x));
  return out;
}

json end_json(const MarkedTree& t, EdgeEnd end) {
  return {{"edge", t.edges.at(end.edge).id}, {"end", end.at_to ? "to" : "from"}};
}

json marked_tree_json(const MarkedTree& t) {
  const GraphOfGroups& g = *t.ambient;
  json vertices = json::array();
  for (const auto& v : t.vertices) {
    NormalForm at = multiply(g, v.image.rep, invert(g, base_tree_vertex(g, v.image.orbit).rep));
    vertices.push_back({{"id", v.id},
                        {"orbit", g.vertices()[v.image.orbit].id},
                        {"at", format_word(g, at)},
                        {"stabilizer", words(g, generators_of(g, v.stabilizer))}});
  }
  json edges = json::array();
  for (const auto& e : t.edges)
    edges.push_back({{"id", e.id},
                     {"from", t.vertices[e.from].id},
                     {"to", t.vertices[e.to].id},
                     {"offset", format_word(g, e.offset)},
                     {"stabilizer", words(g, generators_of(g, e.stabilizer))}});
  return {{"vertices", vertices}, {"edges", edges}};
}

Weight parse_weight(const json& j) {
  if (j.is_number_unsigned()) return {j.get<std::uint64_t>(), 1};
  if (!j.is_string()) throw Error("weights must be fractions like \"1/4\" or integers");
  std::string s = j.get<std::string>();
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return {std::stoull(s), 1};
    return {std::stoull(s.substr(0, slash)), std::stoull(s.substr(slash + 1))};
  } catch (const std::exception&) {
    throw Error("malformed weight '" + s + "'");
  }
}

std::vector<folog::Word> word_list(const json& j) {
  std::vector<folog::Word> out;
  for (const auto& x : j) {
    if (!x.is_string()) throw Error("formula words must be strings");
    out.push_back(folog::free_reduce(folog::parse_formal_word(x.get<std::string>())));
  }
  return out;
}

folog::Presentation sl2z_sigma() {
  folog::Presentation p;
  p.generators = {"a", "b"};
  for (const char* r : {"a^4", "b^6", "a^2 = b^3"}) p.relations.push_back(folog::parse_relation(r));
  return p;
}

folog::Formula delta_from(const json& j) {
  std::vector<std::vector<folog::Word>> blocks;
  for (const auto& b : member(j, "blocks")) blocks.push_back(word_list(b));
  return folog::emit_delta_related(member(j, "n").get<unsigned>(), blocks);
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

GroupPtr parse_group(std::string_view text) { return detail::group_from_json(detail::parse_json(text)); }

std::string group_to_json(const FiniteGroup& g) { return detail::group_to_json(g).dump(2); }

GraphOfGroups parse_graph(std::string_view text) { return detail::graph_from_json(detail::parse_json(text)); }

std::string graph_to_json(const GraphOfGroups& g) { return detail::graph_to_json(g).dump(2); }

std::string graphs_to_json(const std::vector<GraphOfGroups>& graphs) {
  json out = json::array();
  for (const auto& g : graphs) out.push_back(detail::graph_to_json(g));
  return out.dump(2);
}

RandomWalkSpec parse_measure(const GraphOfGroups& g, std::string_view text) {
  json j = detail::parse_json(text);
  RandomWalkSpec spec;
  for (const auto& w : member(j, "support")) {
    if (!w.is_string()) throw Error("support elements must be words");
    spec.support.push_back(parse_word(g, w.get<std::string>()));
  }
  if (j.contains("weights")) {
    for (const auto& w : j.at("weights")) spec.weights.push_back(parse_weight(w));
  } else {
    spec.weights.assign(spec.support.size(), Weight{1, spec.support.size()});
  }
  spec.trials = j.value("trials", spec.trials);
  spec.seed = j.value("seed", spec.seed);
  spec.threads = j.value("threads", spec.threads);
  if (j.contains("probe")) {
    const json& p = j.at("probe");
    spec.probe = PMatchProbe{parse_word(g, member(p, "reference").get<std::string>()), p.value("p", std::size_t{1}),
                             p.value("radius", std::size_t{2})};
  }
  validate(g, spec);
  return spec;
}

MarkedTree parse_marked_tree(std::string_view text, std::shared_ptr<const GraphOfGroups> ambient) {
  json j = detail::parse_json(text);
  if (j.contains("ambient")) ambient = std::make_shared<const GraphOfGroups>(detail::graph_from_json(j.at("ambient")));
  if (!ambient) throw Error("marked tree needs an ambient graph of groups");
  const GraphOfGroups& g = *ambient;
  auto word_set = [&](const json& arr) {
    std::vector<NormalForm> out;
    for (const auto& w : arr) out.push_back(parse_word(g, w.get<std::string>()));
    return out;
  };
  std::vector<MarkedVertex> vertices;
  std::map<std::string, std::size_t> index;
  for (const auto& v : member(j, "vertices")) {
    MarkedVertex mv;
    mv.id = member(v, "id").get<std::string>();
    std::string orbit = member(v, "orbit").get<std::string>();
    auto o = g.vertex_index(orbit);
    if (!o) throw Error("unknown orbit vertex '" + orbit + "'");
    NormalForm at = parse_word(g, v.value("at", std::string("1")));
    mv.image = act(g, at, base_tree_vertex(g, *o));
    mv.stabilizer = word_set(v.value("stabilizer", json::array()));
    index[mv.id] = vertices.size();
    vertices.push_back(std::move(mv));
  }
  auto vertex = [&](const json& x) {
    auto it = index.find(x.get<std::string>());
    if (it == index.end()) throw Error("unknown marked vertex '" + x.get<std::string>() + "'");
    return it->second;
  };
  std::vector<MarkedEdge> edges;
  for (const auto& e : member(j, "edges")) {
    MarkedEdge me;
    me.id = member(e, "id").get<std::string>();
    me.from = vertex(member(e, "from"));
    me.to = vertex(member(e, "to"));
    me.offset = parse_word(g, e.value("offset", std::string("1")));
    me.stabilizer = word_set(e.value("stabilizer", json::array()));
    edges.push_back(std::move(me));
  }
  return make_marked_tree(std::move(ambient), std::move(vertices), std::move(edges));
}

std::string marked_tree_to_json(const MarkedTree& t) { return marked_tree_json(t).dump(2); }

std::string fold_step_to_json(const MarkedTree& before, const FoldStep& step, std::size_t index) {
  const GraphOfGroups& g = *before.ambient;
  const FoldDirective& d = step.directive;
  json directive = {{"kind", to_string(d.kind)}, {"first", end_json(before, d.first)}};
  if (d.kind == DirectiveKind::pair) {
    directive["second"] = end_json(before, d.second);
    directive["witness"] = format_word(g, d.witness);
  }
  if (d.kind == DirectiveKind::stabilizer) directive["subgroup"] = words(g, d.subgroup);
  json types = json::array();
  for (FoldType t : step.available_types) types.push_back(to_string(t));
  json out = {{"step", index},
              {"directive", directive},
              {"type", step.type ? json(to_string(*step.type)) : json(nullptr)},
              {"available_types", types},
              {"collapse_available", step.collapse_available},
              {"edge_orbits_before", before.edge_orbits()},
              {"edge_orbits", step.result.edge_orbits()},
              {"maximal", step.maximal},
              {"tree", marked_tree_json(step.result)}};
  return out.dump();
}

folog::Formula formula_from_params(std::string_view kind, std::string_view text) {
  json j = text.empty() ? json::object() : detail::parse_json(text);
  if (kind == "theta") {
    folog::Presentation sigma = j.contains("presentation") ? detail::presentation_from_json(j.at("presentation"))
                                                           : sl2z_sigma();
    std::vector<folog::Word> ws = j.contains("words") ? word_list(j.at("words")) : word_list(json::array({"a"}));
    std::pair<unsigned, unsigned> orders{4, 6};
    if (j.contains("orders")) {
      auto o = j.at("orders").get<std::vector<unsigned>>();
      if (o.size() != 2) throw Error("'orders' needs two entries");
      orders = {o[0], o[1]};
    }
    return folog::emit_theta(sigma, ws, orders);
  }
  if (kind == "delta") return delta_from(j);
  if (kind == "mu") {
    folog::MuInput in;
    in.g = detail::presentation_from_json(member(j, "g"));
    in.u = detail::presentation_from_json(member(j, "u"));
    in.embedding = word_list(member(j, "embedding"));
    in.tests = word_list(member(j, "tests"));
    in.kill_list = word_list(member(j, "kill_list"));
    const json& theta = member(j, "theta");
    if (theta.is_string()) in.theta = folog::parse(theta.get<std::string>());
    else in.theta = delta_from(member(theta, "delta"));
    return folog::emit_mu(in);
  }
  throw Error("unknown formula kind '" + std::string(kind) + "' (expected theta, mu or delta)");
}

}  // namespace io

}  // namespace vfree

#include "vfree/case_studies.hpp"

#include <sstream>

#include "json_io.hpp"
#include "vfree/defspace.hpp"
#include "vfree/folog.hpp"
#include "vfree/permutation.hpp"

namespace vfree {

using detail::json;
using detail::member;

namespace {

Check make_check(std::string id, std::string description) {
  Check c;
  c.id = std::move(id);
  c.description = std::move(description);
  return c;
}

// Runs `body`, turning a domain error into a failed check whose witness is
// the error message.
template <class F>
Check run_check(std::string id, std::string description, F body) {
  Check c = make_check(std::move(id), std::move(description));
  try {
    body(c);
  } catch (const Error& e) {
    c.pass = false;
    c.witness = std::string("error: ") + e.what();
  }
  if (!c.pass && c.witness.empty()) c.witness = "no witness recorded";
  return c;
}

const json& graph_member(const json& doc) { return doc.contains("graph") ? doc.at("graph") : doc; }

NormalForm evaluate_formal(const GraphOfGroups& g, const folog::Word& w) {
  NormalForm out = identity(g);
  for (const auto& letter : w) out = multiply(g, out, power(g, parse_word(g, letter.var), letter.exp));
  return out;
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

// The action of a in G_v on the edge group of `y` (which starts at v), as a
// permutation of edge-group elements.
Permutation action_on_edge_group(const GraphOfGroups& g, Traversal y, Element a) {
  const FiniteGroup& gv = g.vertex_group(g.source(y));
  const GroupHom& into = g.from_map(y);
  Permutation p(into.source->order());
  for (Element c = 0; c < p.size(); ++c) p[c] = g.source_preimage(y, gv.conjugate(a, into(c)));
  return p;
}

std::string matrix_string(const Permutation& p, std::size_t dim) {
  auto m = as_binary_matrix(p, dim);
  return m ? m->to_string() : "non-linear permutation";
}

std::size_t log2_exact(std::size_t n) {
  std::size_t d = 0;
  while ((std::size_t{1} << d) < n) ++d;
  return d;
}

}  // namespace

GraphOfGroups builtin_graph(const std::string& name) {
  auto it = builtin_fixtures().find(name);
  if (it == builtin_fixtures().end()) throw Error("unknown builtin fixture '" + name + "'");
  return detail::graph_from_json(graph_member(detail::parse_json(it->second)));
}

bool VerificationReport::overall() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

std::string report_to_json(const VerificationReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"id", c.id},
                      {"description", c.description},
                      {"status", c.pass ? "pass" : "fail"},
                      {"witness", c.witness}});
  json out = {{"case", r.case_name}, {"overall", r.overall() ? "pass" : "fail"}, {"checks", checks}};
  return out.dump(2);
}

VerificationReport report_from_json(const std::string& text) {
  json j = detail::parse_json(text);
  VerificationReport r;
  r.case_name = member(j, "case").get<std::string>();
  for (const auto& c : member(j, "checks")) {
    Check check;
    check.id = member(c, "id").get<std::string>();
    check.description = member(c, "description").get<std::string>();
    std::string status = member(c, "status").get<std::string>();
    if (status != "pass" && status != "fail") throw Error("check status must be pass or fail");
    check.pass = status == "pass";
    check.witness = member(c, "witness").get<std::string>();
    r.checks.push_back(std::move(check));
  }
  if (j.contains("overall") && (j.at("overall") == "pass") != r.overall())
    throw Error("report 'overall' disagrees with its checks");
  return r;
}

std::string report_to_text(const VerificationReport& r) {
  std::ostringstream out;
  out << "case " << r.case_name << '\n';
  std::size_t passed = 0;
  for (const auto& c : r.checks) {
    passed += c.pass;
    out << (c.pass ? "PASS " : "FAIL ") << c.id << "  " << c.description << '\n';
    if (!c.witness.empty()) out << "     " << c.witness << '\n';
  }
  out << "overall " << (r.overall() ? "PASS" : "FAIL") << " (" << passed << '/' << r.checks.size()
      << " checks)\n";
  return out.str();
}

// ---------------------------------------------------------------------------

VerificationReport verify_sl2z() { return verify_sl2z(builtin_fixtures().at("sl2z")); }

VerificationReport verify_sl2z(const std::string& fixture_json) {
  VerificationReport report;
  report.case_name = "sl2z";
  json doc = detail::parse_json(fixture_json);
  std::optional<GraphOfGroups> graph;

  report.checks.push_back(run_check("a", "amalgam Z/4 *_{Z/2} Z/6 builds from the presentation data", [&](Check& c) {
    graph = detail::graph_from_json(graph_member(doc));
    const GraphOfGroups& g = *graph;
    std::vector<std::string> orders;
    for (const auto& v : g.vertices()) orders.push_back("|" + v.id + "| = " + std::to_string(v.group->order()));
    for (const auto& e : g.edges()) orders.push_back("|" + e.id + "| = " + std::to_string(e.group->order()));
    c.witness = join(orders, ", ");
    c.pass = g.vertices().size() == 2 && g.edges().size() == 1 && g.vertices()[0].group->order() == 4 &&
             g.vertices()[1].group->order() == 6 && g.edges()[0].group->order() == 2;
  }));

  report.checks.push_back(run_check("b", "a has order 4, b has order 6, a^2 = b^3 commutes with a and b", [&](Check& c) {
    if (!graph) throw Error("graph unavailable");
    const GraphOfGroups& g = *graph;
    folog::Presentation p = detail::presentation_from_json(member(doc, "presentation"));
    for (const auto& [lhs, rhs] : p.relations) {
      NormalForm l = evaluate_formal(g, lhs), r = evaluate_formal(g, rhs);
      if (l != r) {
        c.witness = "relation " + folog::format_word(lhs) + " = " + folog::format_word(rhs) + " fails: lhs is " +
                    format_word(g, l) + ", rhs is " + format_word(g, r);
        return;
      }
    }
    NormalForm a = parse_word(g, "a"), b = parse_word(g, "b");
    auto oa = element_order(g, a), ob = element_order(g, b);
    if (oa != std::optional<std::size_t>{4} || ob != std::optional<std::size_t>{6}) {
      c.witness = "order(a) = " + (oa ? std::to_string(*oa) : "inf") + ", order(b) = " + (ob ? std::to_string(*ob) : "inf");
      return;
    }
    NormalForm z = power(g, a, 2);
    if (z != power(g, b, 3)) {
      c.witness = "a^2 = " + format_word(g, z) + " differs from b^3 = " + format_word(g, power(g, b, 3));
      return;
    }
    for (const NormalForm* x : {&a, &b}) {
      if (multiply(g, z, *x) != multiply(g, *x, z)) {
        c.witness = "a^2 does not commute with " + format_word(g, *x);
        return;
      }
    }
    c.witness = std::to_string(p.relations.size()) + " relations hold; order(a) = 4, order(b) = 6, a^2 = b^3 = " +
                format_word(g, z) + " is central";
    c.pass = true;
  }));

  report.checks.push_back(run_check("c", "the splitting is reduced and is the unique reduced tree of its shape", [&](Check& c) {
    if (!graph) throw Error("graph unavailable");
    const GraphOfGroups& g = *graph;
    EnumerationConstraints constraints;
    constraints.vertex_groups = std::vector<GroupPtr>{g.vertices()[0].group, g.vertices()[1].group};
    constraints.edge_groups = std::vector<GroupPtr>{g.edges()[0].group};
    auto classes = enumerate_reduced(2, 1, 6, constraints);
    bool reduced = is_reduced(g);
    bool same = classes.size() == 1 && are_isomorphic(classes.front(), g);
    c.witness = std::string("is_reduced = ") + (reduced ? "true" : "false") + ", enumerate_reduced found " +
                std::to_string(classes.size()) + " class(es)" + (same ? ", isomorphic to the input" : "");
    c.pass = reduced && same;
  }));

  report.checks.push_back(run_check("d", "every expansion up to depth 2 is redundant", [&](Check& c) {
    if (!graph) throw Error("graph unavailable");
    ExpansionSearch s = nonredundant_expansions(*graph, 2);
    std::vector<std::string> levels;
    for (std::size_t i = 0; i < s.reached_per_level.size(); ++i)
      levels.push_back("depth " + std::to_string(i + 1) + ": " + std::to_string(s.redundant_per_level[i]) + "/" +
                       std::to_string(s.reached_per_level[i]) + " redundant");
    c.witness = std::to_string(s.expansions.size()) + " non-redundant expansion(s); " + join(levels, ", ");
    c.pass = s.expansions.empty();
  }));

  report.checks.push_back(run_check("e", "theta(u) for u = a is an existential formula with 1 free variable", [&](Check& c) {
    folog::Presentation p = doc.contains("presentation") ? detail::presentation_from_json(doc.at("presentation"))
                                                         : folog::Presentation{};
    folog::Formula f = folog::emit_theta(p, {folog::parse_formal_word("a")});
    folog::validate(f);
    folog::FormulaClass cls = folog::classify(f);
    c.witness = "class " + folog::to_string(cls) + ", free variables " + std::to_string(f.free_variables.size());
    c.pass = cls == folog::FormulaClass::existential && f.free_variables.size() == 1;
  }));

  return report;
}

// ---------------------------------------------------------------------------

VerificationReport verify_counterexample() { return verify_counterexample(builtin_fixtures().at("counterexample")); }

VerificationReport verify_counterexample(const std::string& fixture_json, const CounterexampleOptions& options) {
  VerificationReport report;
  report.case_name = "counterexample";
  json doc = detail::parse_json(fixture_json);
  std::optional<GraphOfGroups> graph;
  std::optional<GroupHom> psi;
  std::optional<NormalForm> u;
  std::optional<LoopMap> phi;
  const Traversal out_of_a{0, false};
  const Traversal out_of_b{0, true};

  report.checks.push_back(run_check("a", "A (order 64) and B (order 48) build and amalgamate over C", [&](Check& c) {
    graph = detail::graph_from_json(graph_member(doc));
    const GraphOfGroups& g = *graph;
    if (g.vertices().size() != 2 || g.edges().size() != 1) {
      c.witness = "expected a single-edge amalgam";
      return;
    }
    c.witness = "|A| = " + std::to_string(g.vertex_group(0).order()) + ", |B| = " +
                std::to_string(g.vertex_group(1).order()) + ", |C| = " + std::to_string(g.edges()[0].group->order());
    c.pass = g.vertex_group(0).order() == 64 && g.vertex_group(1).order() == 48;
  }));

  report.checks.push_back(run_check("b", "psi is an automorphism of A", [&](Check& c) {
    if (!graph) throw Error("graph unavailable");
    const GroupPtr& a = graph->vertices()[0].group;
    const json& images = member(doc, "psi");
    std::vector<Element> imgs;
    std::vector<std::string> shown;
    for (const auto& gen : a->generators()) {
      std::string w = member(images, gen.name.c_str()).get<std::string>();
      imgs.push_back(a->evaluate(w));
      shown.push_back(gen.name + " -> " + w);
    }
    psi = extend_generator_images(a, a, imgs);
    HomCheck hc = check_hom(*psi, HomClaim::isomorphism);
    c.pass = hc.status == HomStatus::valid_iso;
    c.witness = join(shown, ", ") + (c.pass ? "" : "; " + hc.detail);
  }));

  report.checks.push_back(run_check("c", "ad(u) and psi coincide on C for u = z^-1 x y z", [&](Check& c) {
    if (!graph || !psi) throw Error("graph or psi unavailable");
    const GraphOfGroups& g = *graph;
    u = parse_word(g, member(doc, "u").get<std::string>());
    const GroupHom& into = g.from_map(out_of_a);
    const std::size_t n = into.source->order();
    Permutation composite(n);
    for (Element x = 0; x < n; ++x) {
      NormalForm lhs = conjugate(g, *u, vertex_loop(g, 0, into(x)));
      NormalForm rhs = vertex_loop(g, 0, (*psi)(into(x)));
      if (lhs != rhs) {
        c.witness = "at " + into.source->label(x) + ": u c u^-1 = " + format_word(g, lhs) + ", psi(c) = " +
                    format_word(g, rhs);
        return;
      }
      if (!g.source_image(out_of_a).contains((*psi)(into(x)))) {
        c.witness = "psi does not preserve C at " + into.source->label(x);
        return;
      }
      composite[x] = g.source_preimage(out_of_a, (*psi)(into(x)));
    }
    c.witness = "ad(u)|C = psi|C = " + matrix_string(composite, log2_exact(n)) + " on all " + std::to_string(n) +
                " elements";
    c.pass = true;
  }));

  report.checks.push_back(run_check("d", "phi (psi on A, ad(u) on B) is an endomorphism swapping x and y", [&](Check& c) {
    if (!graph || !psi || !u) throw Error("earlier data unavailable");
    const GraphOfGroups& g = *graph;
    std::vector<std::vector<NormalForm>> images(2);
    for (const auto& gen : g.vertex_group(0).generators()) images[0].push_back(vertex_loop(g, 0, (*psi)(gen.element)));
    for (const auto& gen : g.vertex_group(1).generators())
      images[1].push_back(conjugate(g, *u, vertex_loop(g, 1, gen.element)));
    std::vector<std::optional<NormalForm>> edges(g.edges().size());
    phi = extend_loop_map(g, g, images, edges);
    auto failures = check_loop_map(g, g, *phi);
    if (!failures.empty()) {
      c.witness = "failing relation: " + failures.front();
      phi.reset();
      return;
    }
    NormalForm x = parse_word(g, "x"), y = parse_word(g, "y");
    NormalForm px = apply(g, g, *phi, x), py = apply(g, g, *phi, y);
    c.witness = "phi(x) = " + format_word(g, px) + ", phi(y) = " + format_word(g, py);
    c.pass = px == y && py == x;
  }));

  report.checks.push_back(run_check("e", "phi sends reduced normal forms to reduced normal forms and is nontrivial on them", [&](Check& c) {
    if (!graph || !phi) throw Error("phi unavailable");
    const GraphOfGroups& g = *graph;
    const FiniteGroup& ga = g.vertex_group(0);
    const FiniteGroup& gb = g.vertex_group(1);
    std::vector<NormalForm> loop_a, loop_b, image_a, image_b;
    for (Element a = 0; a < ga.order(); ++a) {
      loop_a.push_back(vertex_loop(g, 0, a));
      image_a.push_back(apply(g, g, *phi, loop_a.back()));
    }
    for (Element b = 0; b < gb.order(); ++b) {
      loop_b.push_back(vertex_loop(g, 1, b));
      image_b.push_back(apply(g, g, *phi, loop_b.back()));
    }
    auto nontrivial = [&](Traversal y) {
      std::vector<Element> out;
      Element trivial = g.coset_rep(y, g.vertex_group(g.source(y)).identity());
      for (Element r : g.transversal(y))
        if (r != trivial) out.push_back(r);
      return out;
    };
    const std::vector<Element> reps_a = nontrivial(out_of_a), reps_b = nontrivial(out_of_b);

    std::size_t tested = 0;
    std::string failure;
    // w = r0 (b1) a1 (b2) ... (bm) t, each B-syllable read as the loop y b y^-1.
    struct Frame {
      NormalForm w;
      NormalForm image;
      std::size_t literal;
    };
    auto finish = [&](const Frame& f, std::size_t length) {
      for (Element t = 0; t < ga.order() && failure.empty(); ++t) {
        NormalForm w = multiply(g, f.w, loop_a[t]);
        NormalForm img = multiply(g, f.image, image_a[t]);
        std::size_t literal = f.literal + image_a[t].length();
        ++tested;
        if (w.length() != length) failure = "enumeration produced " + format_word(g, w) + " of unexpected length";
        else if (img.length() != literal)
          failure = "phi(" + format_word(g, w) + ") = " + format_word(g, img) + " has length " +
                    std::to_string(img.length()) + ", expected " + std::to_string(literal);
        else if (!is_identity(g, w) && is_identity(g, img))
          failure = "phi(" + format_word(g, w) + ") = 1";
      }
    };
    auto step = [&](const Frame& f, const NormalForm& loop, const NormalForm& image) {
      return Frame{multiply(g, f.w, loop), multiply(g, f.image, image), f.literal + image.length()};
    };
    // `f` ends with a B-syllable; append tails, then a nontrivial A-syllable
    // followed by another B-syllable.
    auto extend = [&](auto& self, const Frame& f, std::size_t length) -> void {
      finish(f, length);
      if (length + 2 > options.max_length || !failure.empty()) return;
      for (Element a : reps_a)
        for (Element b : reps_b) self(self, step(step(f, loop_a[a], image_a[a]), loop_b[b], image_b[b]), length + 2);
    };
    const Frame start{identity(g), identity(g), 0};
    finish(start, 0);
    if (options.max_length >= 2)
      for (Element r0 : g.transversal(out_of_a))
        for (Element b : reps_b) extend(extend, step(step(start, loop_a[r0], image_a[r0]), loop_b[b], image_b[b]), 2);
    if (!failure.empty()) {
      c.witness = failure;
      return;
    }
    c.witness = "verified at syllable length ≤ " + std::to_string(options.max_length) + " on " +
                std::to_string(tested) + " normal forms";
    c.pass = true;
  }));

  report.checks.push_back(run_check("f", "the actions of x and y on C with z generate non-isomorphic groups", [&](Check& c) {
    if (!graph) throw Error("graph unavailable");
    const GraphOfGroups& g = *graph;
    const std::size_t dim = log2_exact(g.edges()[0].group->order());
    auto gen_of = [&](std::size_t v, const char* name) {
      auto e = g.vertex_group(v).generator(name);
      if (!e) throw Error(std::string("missing generator ") + name);
      return *e;
    };
    Permutation fx = action_on_edge_group(g, out_of_a, gen_of(0, "x"));
    Permutation fy = action_on_edge_group(g, out_of_a, gen_of(0, "y"));
    Permutation hz = options.z_action_override ? BinaryMatrix::from_cycles(*options.z_action_override, dim).to_permutation()
                                               : action_on_edge_group(g, out_of_b, gen_of(1, "z"));
    const std::vector<std::string> names{"f", "h"};
    std::vector<Permutation> gx{fx, hz}, gy{fy, hz};
    GroupPtr sx = share(group_from_permutations(gx, names));
    GroupPtr sy = share(group_from_permutations(gy, names));
    bool iso = sx->order() == sy->order() && are_isomorphic(sx, sy).has_value();
    c.witness = "f(x) = " + matrix_string(fx, dim) + ", f(y) = " + matrix_string(fy, dim) + ", h(z) = " +
                matrix_string(hz, dim) + "; |<f(x), h(z)>| = " + std::to_string(sx->order()) +
                ", |<f(y), h(z)>| = " + std::to_string(sy->order()) + (iso ? ", isomorphic" : ", non-isomorphic");
    c.pass = sx->order() == 6 && sy->order() == 24 && !iso;
  }));

  return report;
}

}  // namespace vfree

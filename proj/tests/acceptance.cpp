// Acceptance run: one PASS/FAIL line per criterion, with the measured time
// against its budget. Exits 1 if any criterion fails.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include "json.hpp"
#include "oracles.hpp"
#include "vfree/case_studies.hpp"
#include "vfree/defspace.hpp"
#include "vfree/folog.hpp"
#include "vfree/genericity.hpp"
#include "vfree/io.hpp"
#include "vfree/permutation.hpp"

using namespace vfree;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

NormalForm random_hyperbolic(const GraphOfGroups& g, std::mt19937_64& rng) {
  while (true) {
    NormalForm w = oracle::random_element(g, 6, rng);
    if (!element_order(g, w)) return w;
  }
}

Outcome counterexample() {
  Outcome o;
  VerificationReport r = verify_counterexample();
  for (const auto& c : r.checks) o.require(c.pass, "check " + c.id + ": " + c.witness);
  o.require(r.checks.size() == 6, "expected 6 checks");

  auto p = [](const char* cycles) { return BinaryMatrix::from_cycles(cycles, 4).to_permutation(); };
  std::vector<Permutation> s3{p("(e1 e2)"), p("(e1 e2 e3)")}, s4{p("(e3 e4)"), p("(e1 e2 e3)")};
  o.require(permutation_closure(s3).size() == 6, "|<(e1 e2),(e1 e2 e3)>| != 6");
  o.require(permutation_closure(s4).size() == 24, "|<(e3 e4),(e1 e2 e3)>| != 24");

  // ad(u) on C for u = z^-1 x y z, applied element by element through the
  // vertex groups: v -> z^-1 (x (y (z v z^-1) y^-1) x^-1) z.
  GraphOfGroups g = builtin_graph("counterexample");
  const FiniteGroup &a = g.vertex_group(0), &b = g.vertex_group(1);
  Element x = *a.generator("x"), y = *a.generator("y"), z = *b.generator("z");
  BinaryMatrix expected = BinaryMatrix::from_cycles("(e1 e3)(e2 e4)", 4);
  for (Element v = 0; v < 16; ++v) {
    Element w = b.conjugate(z, v);
    w = a.conjugate(x, a.conjugate(y, w));
    w = b.conjugate(b.inverse(z), w);
    o.require(w == expected.apply(v), "ad(u) differs from (e1 e3)(e2 e4) at vector " + std::to_string(v));
  }
  o.detail = o.pass ? "6/6 checks, orders 6 and 24, ad(u)|C = (e1 e3)(e2 e4) on 16 vectors" : o.detail;
  return o;
}

Outcome sl2z() {
  Outcome o;
  VerificationReport r = verify_sl2z();
  for (const auto& c : r.checks) o.require(c.pass, "check " + c.id + ": " + c.witness);
  o.require(r.checks.size() == 5, "expected 5 checks");
  GroupPtr z4 = share(build_cyclic(4)), z6 = share(build_cyclic(6)), z2 = share(build_cyclic(2));
  auto classes = enumerate_reduced(2, 1, 6, {std::vector<GroupPtr>{z4, z6}, std::vector<GroupPtr>{z2}});
  o.require(classes.size() == 1, "enumerate_reduced found " + std::to_string(classes.size()) + " classes");
  o.require(nonredundant_expansions(builtin_graph("sl2z"), 2).expansions.empty(),
            "depth-2 non-redundant expansions are not empty");
  if (o.pass) o.detail = "5/5 checks, 1 reduced class, no non-redundant expansion at depth 2";
  return o;
}

Outcome word_problem() {
  Outcome o;
  const auto words = oracle::all_words(8);
  GraphOfGroups sl = builtin_graph("sl2z"), fp = builtin_graph("z2_z3");
  std::map<oracle::Mat, NormalForm> by_matrix;
  std::map<NormalForm, oracle::Mat> by_form;
  std::map<std::string, NormalForm> by_reduced;
  std::map<NormalForm, std::string> by_form2;
  std::size_t agree = 0;
  for (const auto& w : words) {
    NormalForm f = normal_form(sl, oracle::spell(sl, w));
    oracle::Mat m = oracle::sl2_image(w);
    bool ok = by_matrix.emplace(m, f).first->second == f && by_form.emplace(f, m).first->second == m;
    NormalForm h = normal_form(fp, oracle::spell(fp, w));
    std::string red = oracle::z2z3_rewrite(w);
    ok = ok && by_reduced.emplace(red, h).first->second == h && by_form2.emplace(h, red).first->second == red &&
         is_identity(fp, h) == red.empty() && is_identity(sl, f) == (m == oracle::Mat{});
    agree += ok;
    o.require(ok, "disagreement on " + oracle::to_text(w));
  }
  o.detail = std::to_string(agree) + "/" + std::to_string(words.size()) + " words of length <= 8 agree in both groups";
  if (!o.pass) o.detail += "; first failure recorded";
  return o;
}

GraphOfGroups hub(int leaves) {
  std::string vertices = R"({"id": "v", "group": {"kind": "cyclic", "n": 2, "generator": "s"}})";
  std::string edges;
  for (int i = 1; i <= leaves; ++i) {
    std::string id = std::to_string(i);
    vertices += R"(, {"id": "l)" + id + R"(", "group": {"kind": "cyclic", "n": 2, "generator": "t"}})";
    edges += (i > 1 ? ", " : "") + std::string(R"({"id": "f)") + id + R"(", "from": "v", "to": "l)" + id +
             R"(", "group": {"kind": "cyclic", "n": 1, "generator": "c"}, "into_from": ["1"], "into_to": ["1"]})";
  }
  return io::parse_graph("{\"vertices\": [" + vertices + "], \"edges\": [" + edges + "], \"base\": \"v\"}");
}

Outcome degree_sum_invariance() {
  Outcome o;
  const std::vector<GraphOfGroups> seeds{builtin_graph("sl2z"), builtin_graph("z2_z3"), hub(2)};
  std::mt19937_64 rng(2024);
  std::size_t moves_applied = 0;
  for (int trial = 0; trial < 100 && o.pass; ++trial) {
    GraphOfGroups g = seeds[trial % 3];
    const long long value = degree_sum(g).value;
    std::size_t steps = 1 + rng() % 6;
    for (std::size_t s = 0; s < steps; ++s) {
      auto moves = legal_expansions(g);
      auto collapses = legal_collapses(g);
      moves.insert(moves.end(), collapses.begin(), collapses.end());
      g = apply_move(g, moves[rng() % moves.size()]).graph;
      ++moves_applied;
      o.require(degree_sum(g).value == value, "degree sum changed in trial " + std::to_string(trial));
    }
  }
  // The degree-6 hub, expanded over the trivial group with one or two edges
  // moved to the new vertex.
  GraphOfGroups g = hub(6);
  auto ends = ends_at(g, 0);
  std::vector<long long> sums;
  for (std::size_t moved : {1, 2}) {
    ExpansionSpec spec{0, Subgroup{{g.vertex_group(0).identity()}}, {}, "w", "h"};
    spec.moved.assign(ends.begin(), ends.begin() + moved);
    GraphOfGroups r = apply_move(g, expansion_move(spec)).graph;
    long long dv = static_cast<long long>(quotient_degree(r, 0));
    long long dw = static_cast<long long>(quotient_degree(r, *r.vertex_index("w")));
    sums.push_back((dv - 2) + (dw - 2));
    o.require(dv == 7 - static_cast<long long>(moved) && dw == static_cast<long long>(moved) + 1,
              "unexpected degrees after expansion");
  }
  o.require(sums == std::vector<long long>{4, 4}, "local sums are not 4");
  if (o.pass)
    o.detail = "100 sequences, " + std::to_string(moves_applied) + " moves, constant; 4 = (6-2)+(2-2) = (5-2)+(3-2)";
  return o;
}

Outcome geometry() {
  Outcome o;
  GraphOfGroups g = builtin_graph("sl2z");
  std::mt19937_64 rng(5150);
  for (int i = 0; i < 200; ++i) {
    NormalForm w = random_hyperbolic(g, rng);
    std::size_t l = classify(g, w).translation_length;
    NormalForm k = oracle::random_element(g, 5, rng);
    o.require(classify(g, conjugate(g, k, w)).translation_length == l, "conjugation changed translation length");
    for (long long n = 2; n <= 4; ++n)
      o.require(classify(g, power(g, w, n)).translation_length == static_cast<std::size_t>(n) * l,
                "l(g^n) != n l(g) for " + format_word(g, w));
  }
  for (int i = 0; i < 50; ++i) {
    NormalForm w = oracle::random_element(g, 1 + i % 5, rng);
    Classification c = classify(g, w);
    std::size_t disp = oracle::min_displacement(g, w, 6);
    o.require(disp == (c.hyperbolic ? c.translation_length : 0), "classify disagrees with BFS on " + format_word(g, w));
  }
  if (o.pass) o.detail = "200 hyperbolic elements, 50 elements against radius-6 BFS";
  return o;
}

bool closed(const GraphOfGroups& g, const ElementSet& s) {
  return oracle::closure(g, s) == std::set<NormalForm>(s.begin(), s.end());
}

Outcome folds() {
  Outcome o;
  const std::string dir = VFREE_DATA_DIR "/samples/";
  MarkedTree f2 = io::parse_marked_tree(slurp(dir + "f2_marking.json"));
  GraphOfGroups rose = io::parse_graph(slurp(dir + "f2.json"));
  auto ambient = std::make_shared<const GraphOfGroups>(builtin_graph("sl2z"));
  MarkedTree sl = io::parse_marked_tree(R"({
    "vertices": [{"id": "u", "orbit": "A", "at": "1", "stabilizer": ["a"]},
                 {"id": "w", "orbit": "B", "at": "1", "stabilizer": ["b"]}],
    "edges": [{"id": "e", "from": "u", "to": "w", "offset": "1", "stabilizer": []}]})",
                                        ambient);
  auto f2_steps = fold_sequence(f2, rose);
  o.require(f2_steps.size() == 1, "F2 marking took " + std::to_string(f2_steps.size()) + " folds");
  std::size_t checked = 0;
  for (const auto& [source, target] : std::vector<std::pair<MarkedTree, GraphOfGroups>>{{f2, rose}, {sl, *ambient}}) {
    std::size_t orbits = source.edge_orbits();
    for (const auto& step : fold_sequence(source, target)) {
      const GraphOfGroups& g = *step.result.ambient;
      o.require(step.result.edge_orbits() <= orbits, "edge orbits increased");
      orbits = step.result.edge_orbits();
      for (const auto& v : step.result.vertices) o.require(closed(g, v.stabilizer), "vertex stabilizer not closed");
      for (const auto& e : step.result.edges) o.require(closed(g, e.stabilizer), "edge stabilizer not closed");
      ++checked;
    }
  }
  if (o.pass) o.detail = "F2 in 1 fold; " + std::to_string(checked) + " steps with recomputed stabilizers";
  return o;
}

// Cyclically reduced SL2(Z) words a^e1 b^f1 ... a^ek b^fk with 2k syllables.
std::vector<std::string> cyclically_reduced(std::size_t max_syllables) {
  std::vector<std::string> out, level{""};
  const char* as[] = {"a", "a^-1"};
  const char* bs[] = {"b", "b^2", "b^-1", "b^-2"};
  for (std::size_t k = 1; 2 * k <= max_syllables; ++k) {
    std::vector<std::string> next;
    for (const auto& w : level)
      for (const char* x : as)
        for (const char* y : bs) next.push_back(w + (w.empty() ? "" : " ") + x + " " + y);
    out.insert(out.end(), next.begin(), next.end());
    level = std::move(next);
  }
  return out;
}

Outcome whitehead() {
  Outcome o;
  std::mt19937_64 rng(77);
  const std::vector<GraphOfGroups> graphs{builtin_graph("sl2z"), builtin_graph("z4_z6")};
  for (int i = 0; i < 100; ++i) {
    const GraphOfGroups& g = graphs[i % 2];
    NormalForm w = random_hyperbolic(g, rng);
    NormalForm c = conjugate(g, oracle::random_element(g, 5, rng), w);
    NormalForm sq = power(g, w, 2);
    for (std::size_t v = 0; v < 2; ++v) {
      auto base = whitehead_graph(g, w, v).edges;
      o.require(whitehead_graph(g, c, v).edges == base, "conjugate changed a Whitehead graph");
      o.require(whitehead_graph(g, sq, v).edges == base, "square changed a Whitehead graph");
    }
  }
  GraphOfGroups g = builtin_graph("sl2z");
  std::string found;
  std::size_t searched = 0;
  for (const auto& text : cyclically_reduced(8)) {
    ++searched;
    NormalForm w = parse_word(g, text);
    if (!element_order(g, w) && fills(g, w).fills) {
      found = text;
      break;
    }
  }
  o.require(!found.empty(), "no filling element up to syllable length 8");
  auto fixture = nlohmann::json::parse(slurp(VFREE_TEST_FIXTURES "/filling_element.json"));
  o.require(fixture.at("word").get<std::string>() == found, "search result differs from the recorded fixture");
  if (o.pass)
    o.detail = "100 pairs invariant; filling element \"" + found + "\" after " + std::to_string(searched) + (searched == 1 ? " candidate" : " candidates");
  return o;
}

Outcome genericity() {
  Outcome o;
  GraphOfGroups g = builtin_graph("sl2z");
  RandomWalkSpec spec;
  for (const char* w : {"a", "a^-1", "b", "b^-1"}) {
    spec.support.push_back(parse_word(g, w));
    spec.weights.push_back({1, 4});
  }
  spec.trials = 200;
  spec.seed = 1;
  spec.threads = 0;
  auto rows = run_genericity_experiment(g, spec, {8, 32, 128});
  std::string csv = experiment_csv(rows);
  o.require(experiment_csv(run_genericity_experiment(g, spec, {8, 32, 128})) == csv, "second run differs");
  o.require(rows[2].filling_rate() >= rows[0].filling_rate() - 0.05, "filling rate at 128 below rate at 8 - 0.05");
  // Pilot fixture: header line, then rows for 8, 32, 128.
  std::istringstream pilot(slurp(VFREE_TEST_FIXTURES "/genericity_pilot.csv"));
  std::string line, last;
  while (std::getline(pilot, line))
    if (!line.empty()) last = line;
  double pilot_rate = -1;
  if (auto pos = last.rfind(','); pos != std::string::npos) pilot_rate = std::stod(last.substr(pos + 1));
  o.require(pilot_rate >= 0, "pilot fixture unreadable");
  o.require(rows[2].filling_rate() >= pilot_rate - 0.05, "filling rate at 128 below pilot - 0.05");
  char buf[160];
  std::snprintf(buf, sizeof buf, "filling rates %.3f / %.3f / %.3f at n = 8 / 32 / 128, pilot %.3f, deterministic",
                rows[0].filling_rate(), rows[1].filling_rate(), rows[2].filling_rate(), pilot_rate);
  if (o.pass) o.detail = buf;
  return o;
}

Outcome formulas() {
  using namespace folog;
  Outcome o;
  auto over = [](const std::string& x, const std::string& y) {
    Presentation p;
    p.generators = {x, y};
    for (const std::string& r : {x + "^4", y + "^6", x + "^2 = " + y + "^3"})
      p.relations.push_back(parse_relation(r));
    return p;
  };
  const Presentation sigma = over("a", "b");
  for (std::size_t k = 1; k <= 3; ++k) {
    Formula theta = emit_theta(sigma, std::vector<Word>(k, parse_formal_word("a b")));
    o.require(classify(theta) == FormulaClass::existential && theta.free_variables.size() == k, "theta shape");
    o.require(parse(pretty_print(theta)) == theta, "theta round trip");
  }
  for (unsigned n = 1; n <= 4; ++n) {
    Formula delta = emit_delta_related(n, {{parse_formal_word("x1")}});
    o.require(delta.free_variables.size() == 2 * n, "delta free variables");
    o.require(parse(pretty_print(delta)) == delta, "delta round trip");
  }
  for (std::size_t k = 1; k <= 3; ++k) {
    MuInput in;
    in.g = over("s1", "s2");
    in.u = over("t1", "t2");
    in.embedding = {parse_formal_word("s1"), parse_formal_word("s2")};
    in.tests = std::vector<Word>(k, parse_formal_word("s1 s2"));
    in.kill_list = {parse_formal_word("t1 t2 t1^-1 t2^-1")};
    in.theta = emit_delta_related(2, {{parse_formal_word("x1"), parse_formal_word("x2")}});
    Formula mu = emit_mu(in);
    o.require(classify(mu) == FormulaClass::forall_exists && mu.free_variables.size() == k, "mu shape");
    o.require(parse(pretty_print(mu)) == mu, "mu round trip");
  }
  if (o.pass) o.detail = "theta existential (k free), mu forall-exists (k free), delta 2n free, round trips exact";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "counterexample verification", 5, counterexample},
      {2, "SL2(Z) verification", 10, sl2z},
      {3, "word-problem oracle equivalence", 60, word_problem},
      {4, "degree-sum invariance", 0, degree_sum_invariance},
      {5, "Bass-Serre geometry", 0, geometry},
      {6, "fold engine", 0, folds},
      {7, "Whitehead graphs and filling", 0, whitehead},
      {8, "genericity experiment", 120, genericity},
      {9, "formula emitters", 0, formulas},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0 && secs > c.budget_s) {
      o.pass = false;
      o.detail += " (over the " + std::to_string(static_cast<int>(c.budget_s)) + " s budget)";
    }
    failures += !o.pass;
    std::printf("%s criterion %d: %s [%.2f s] %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures ? 1 : 0;
}

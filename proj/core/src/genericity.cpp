#include "vfree/genericity.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <deque>
#include <map>
#include <numeric>
#include <random>
#include <thread>

namespace vfree {

namespace {

NormalForm require_hyperbolic(const GraphOfGroups& g, const NormalForm& element, const char* what) {
  if (!classify(g, element).hyperbolic)
    throw Error(std::string(what) + ": element " + format_word(g, element) + " is elliptic");
  return element;
}

// Per quotient vertex: turns at x = [tau_v] pulled back from one axis period.
std::vector<std::set<std::pair<TreeVertex, TreeVertex>>> raw_turns(const GraphOfGroups& g, const NormalForm& element) {
  AxisSegment seg = axis_window(g, element, 1, 1);
  const std::size_t period = seg.period;
  std::vector<std::set<std::pair<TreeVertex, TreeVertex>>> out(g.vertices().size());
  for (std::size_t i = period; i < 2 * period; ++i) {
    const TreeVertex& u = seg.vertices[i];
    NormalForm tau = base_tree_vertex(g, u.orbit).rep;
    NormalForm back = invert(g, multiply(g, u.rep, invert(g, tau)));
    out[u.orbit].insert({act(g, back, seg.vertices[i - 1]), act(g, back, seg.vertices[i + 1])});
  }
  return out;
}

WhiteheadGraph build_graph(const GraphOfGroups& g, std::size_t orbit,
                           const std::set<std::pair<TreeVertex, TreeVertex>>& turns) {
  WhiteheadGraph wh;
  wh.orbit = orbit;
  wh.at_vertex = base_tree_vertex(g, orbit);
  wh.nodes = neighbors(g, wh.at_vertex);
  NormalForm back = invert(g, wh.at_vertex.rep);
  std::map<TreeVertex, std::size_t> index;
  for (std::size_t i = 0; i < wh.nodes.size(); ++i) {
    index.emplace(wh.nodes[i], i);
    wh.labels.push_back(describe(g, multiply(g, back, wh.nodes[i].rep)));
  }
  NormalForm tau = wh.at_vertex.rep;
  NormalForm tau_inv = invert(g, tau);
  const FiniteGroup& gv = g.vertex_group(orbit);
  for (const auto& [a, b] : turns)
    for (Element s = 0; s < gv.order(); ++s) {
      NormalForm k = multiply(g, multiply(g, tau, local_element(g, orbit, s)), tau_inv);
      std::size_t i = index.at(act(g, k, a));
      std::size_t j = index.at(act(g, k, b));
      if (i == j) throw Error("internal: axis backtracks at " + format_vertex(g, wh.at_vertex));
      wh.edges.insert({std::min(i, j), std::max(i, j)});
    }
  return wh;
}

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

std::uint64_t gcd64(std::uint64_t a, std::uint64_t b) { return std::gcd(a, b); }

// Integer weights over the common denominator.
std::vector<std::uint64_t> scaled_weights(const RandomWalkSpec& spec, std::uint64_t& total) {
  std::uint64_t den = 1;
  for (const auto& w : spec.weights) {
    if (w.num == 0 || w.den == 0) throw Error("measure weights must be positive fractions");
    den = den / gcd64(den, w.den) * w.den;
    if (den > (1ULL << 40)) throw Error("measure weight denominators are too large");
  }
  std::vector<std::uint64_t> out;
  total = 0;
  for (const auto& w : spec.weights) {
    out.push_back(w.num * (den / w.den));
    total += out.back();
  }
  if (total != den) throw Error("measure weights must sum to 1");
  return out;
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % bound;
  while (true) {
    std::uint64_t x = rng();
    if (x < limit) return x % bound;
  }
}

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> WhiteheadGraph::missing() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t j = i + 1; j < nodes.size(); ++j)
      if (!edges.count({i, j})) out.emplace_back(i, j);
  return out;
}

WhiteheadGraph whitehead_graph(const GraphOfGroups& g, const NormalForm& element, std::size_t orbit) {
  if (orbit >= g.vertices().size()) throw Error("whitehead graph: vertex out of range");
  require_hyperbolic(g, element, "whitehead graph");
  return build_graph(g, orbit, raw_turns(g, element)[orbit]);
}

FillingReport fills(const GraphOfGroups& g, const NormalForm& element) {
  require_hyperbolic(g, element, "fills");
  auto turns = raw_turns(g, element);
  FillingReport report;
  report.fills = true;
  for (std::size_t v = 0; v < g.vertices().size(); ++v) {
    report.graphs.push_back(build_graph(g, v, turns[v]));
    report.fills = report.fills && report.graphs.back().complete();
  }
  return report;
}

CertificateResult one_ended_certificate(const GraphOfGroups& g, const NormalForm& element) {
  if (element_order(g, element))
    throw Error("one-endedness certificate needs an element of infinite order; " + format_word(g, element) +
                " has finite order, so <u> lies in a vertex group and G splits relative to it");
  CertificateResult out;
  out.report = fills(g, element);
  out.status = out.report.fills ? Certificate::certified_one_ended : Certificate::inconclusive;
  return out;
}

std::vector<NormalForm> ball(const GraphOfGroups& g, std::size_t radius, std::size_t cap) {
  std::set<NormalForm> seen{identity(g)};
  std::deque<NormalForm> queue{identity(g)};
  auto visit = [&](NormalForm y) {
    if (y.length() > radius) return;
    if (seen.insert(y).second) {
      if (seen.size() > cap) throw CapExceeded("ball exceeds " + std::to_string(cap) + " elements");
      queue.push_back(std::move(y));
    }
  };
  while (!queue.empty()) {
    NormalForm x = queue.front();
    queue.pop_front();
    const FiniteGroup& group = g.vertex_group(x.end);
    for (Element a = 0; a < group.order(); ++a) visit(multiply(g, x, local_element(g, x.end, a)));
    for (Traversal y : g.outgoing(x.end)) visit(multiply(g, x, traversal_element(g, y)));
  }
  std::vector<NormalForm> out;
  for (const auto& x : seen)
    if (x.end == g.base()) out.push_back(x);
  std::stable_sort(out.begin(), out.end(),
                   [](const NormalForm& a, const NormalForm& b) { return a.length() < b.length(); });
  return out;
}

PMatch p_match(const GraphOfGroups& g, const NormalForm& first, const NormalForm& second, std::size_t p,
               std::size_t search_radius) {
  if (p == 0) throw Error("p-match needs p >= 1");
  require_hyperbolic(g, first, "p-match");
  require_hyperbolic(g, second, "p-match");
  Classification cg = classify(g, first);
  Classification ch = classify(g, second);
  TreeVertex origin = base_tree_vertex(g, g.base());
  TreeVertex anchor_g = tree_vertex(g, cg.reduction.conjugator);
  TreeVertex anchor_h = tree_vertex(g, ch.reduction.conjugator);
  const std::size_t d1 = distance(g, origin, anchor_g);
  const std::size_t d2 = distance(g, origin, anchor_h) + search_radius;
  // Two lines passing within d1 and d2 of the origin can only overlap within
  // d1 + d2 of the origin's projection, itself within 2 d1 (resp. 2 d2) of
  // the anchor.
  const std::size_t reach_g = 3 * d1 + d2 + p + 2;
  const std::size_t reach_h = 3 * d2 + d1 + p + 2;
  const std::size_t bg = ceil_div(reach_g, cg.translation_length);
  const std::size_t bh = ceil_div(reach_h, ch.translation_length);
  AxisSegment wg = axis_window(g, first, bg, 2 * bg);
  AxisSegment wh = axis_window(g, second, bh, 2 * bh);
  std::set<TreeVertex> h_vertices(wh.vertices.begin(), wh.vertices.end());

  PMatch out;
  for (const NormalForm& k : ball(g, search_radius)) {
    NormalForm k_inv = invert(g, k);
    std::size_t best_start = 0, best_len = 0, run_start = 0, run_len = 0;
    for (std::size_t i = 0; i < wg.vertices.size(); ++i) {
      if (h_vertices.count(act(g, k_inv, wg.vertices[i]))) {
        if (run_len == 0) run_start = i;
        ++run_len;
        if (run_len > best_len) {
          best_len = run_len;
          best_start = run_start;
        }
      } else {
        run_len = 0;
      }
    }
    if (best_len >= p + 2) {
      out.status = MatchStatus::match;
      out.translate = k;
      out.overlap.assign(wg.vertices.begin() + static_cast<std::ptrdiff_t>(best_start),
                         wg.vertices.begin() + static_cast<std::ptrdiff_t>(best_start + best_len));
      return out;
    }
  }
  return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t n, std::size_t trial) {
  return splitmix64(splitmix64(master ^ splitmix64(n)) + trial);
}

void validate(const GraphOfGroups& g, const RandomWalkSpec& spec) {
  if (spec.support.empty()) throw Error("measure support is empty");
  if (spec.support.size() != spec.weights.size()) throw Error("one weight per support element expected");
  std::uint64_t total = 0;
  scaled_weights(spec, total);
  for (const auto& s : spec.support)
    if (s.graph != g.fingerprint() || s.start != g.base() || s.end != g.base())
      throw Error("measure support elements must be loops at the base vertex");
  if (spec.probe) {
    if (spec.probe->p == 0) throw Error("p-match probe needs p >= 1");
    require_hyperbolic(g, spec.probe->reference, "p-match probe");
  }

  std::vector<NormalForm> wanted;
  for (std::size_t v = 0; v < g.vertices().size(); ++v)
    for (const auto& gen : g.vertex_group(v).generators()) wanted.push_back(vertex_loop(g, v, gen.element));
  for (std::size_t e = 0; e < g.edges().size(); ++e)
    if (!g.in_tree(e)) {
      wanted.push_back(edge_loop(g, e));
      wanted.push_back(invert(g, edge_loop(g, e)));
    }
  constexpr std::size_t kDepth = 8;
  constexpr std::size_t kCap = 20000;
  std::set<NormalForm> seen(spec.support.begin(), spec.support.end());
  std::vector<NormalForm> frontier(seen.begin(), seen.end());
  for (std::size_t depth = 1; depth < kDepth && !frontier.empty() && seen.size() < kCap; ++depth) {
    std::vector<NormalForm> next;
    for (const auto& x : frontier)
      for (const auto& s : spec.support) {
        NormalForm y = multiply(g, x, s);
        if (seen.insert(y).second) next.push_back(std::move(y));
      }
    frontier = std::move(next);
  }
  for (const auto& w : wanted)
    if (!seen.count(w))
      throw Error("measure support does not generate G as a semigroup: " + format_word(g, w) +
                  " not reached by products of length < " + std::to_string(kDepth));
}

NormalForm random_walk(const GraphOfGroups& g, const RandomWalkSpec& spec, std::size_t n, std::uint64_t seed) {
  std::uint64_t total = 0;
  std::vector<std::uint64_t> weights = scaled_weights(spec, total);
  std::mt19937_64 rng(seed);
  NormalForm w = identity(g);
  for (std::size_t step = 0; step < n; ++step) {
    std::uint64_t x = uniform_below(rng, total);
    std::size_t i = 0;
    while (x >= weights[i]) x -= weights[i++];
    w = multiply(g, w, spec.support[i]);
  }
  return w;
}

std::vector<ExperimentRow> run_genericity_experiment(const GraphOfGroups& g, const RandomWalkSpec& spec,
                                                     const std::vector<std::size_t>& lengths) {
  validate(g, spec);
  std::size_t threads = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
  std::vector<ExperimentRow> rows;
  for (std::size_t n : lengths) {
    // Outcome bits per trial: 1 hyperbolic, 2 filling, 4 p-match.
    std::vector<unsigned char> outcome(spec.trials, 0);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < spec.trials; i = next++) {
        NormalForm w = random_walk(g, spec, n, trial_seed(spec.seed, n, i));
        if (!classify(g, w).hyperbolic) continue;
        unsigned char bits = 1;
        if (fills(g, w).fills) bits |= 2;
        if (spec.probe && p_match(g, spec.probe->reference, w, spec.probe->p, spec.probe->radius).status ==
                              MatchStatus::match)
          bits |= 4;
        outcome[i] = bits;
      }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < std::min(threads, spec.trials); ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    ExperimentRow row;
    row.n = n;
    row.trials = spec.trials;
    for (unsigned char bits : outcome) {
      row.hyperbolic += bits & 1;
      row.filling += (bits >> 1) & 1;
    }
    if (spec.probe) {
      row.p_matches = 0;
      for (unsigned char bits : outcome) *row.p_matches += (bits >> 2) & 1;
    }
    rows.push_back(row);
  }
  return rows;
}

std::string experiment_csv(const std::vector<ExperimentRow>& rows) {
  bool probe = std::any_of(rows.begin(), rows.end(), [](const ExperimentRow& r) { return r.p_matches.has_value(); });
  std::string out = "n,trials,hyperbolic_count,filling_count,filling_rate";
  if (probe) out += ",pmatch_count,pmatch_rate";
  out += '\n';
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.6f", r.filling_rate());
    out += std::to_string(r.n) + ',' + std::to_string(r.trials) + ',' + std::to_string(r.hyperbolic) + ',' +
           std::to_string(r.filling) + ',' + buf;
    if (probe) {
      std::size_t m = r.p_matches.value_or(0);
      std::snprintf(buf, sizeof buf, "%.6f", r.trials ? static_cast<double>(m) / r.trials : 0.0);
      out += ',' + std::to_string(m) + ',' + buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace vfree

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "vfree/bstree.hpp"

namespace vfree {

// Wh_T(g, v) at the fundamental-domain vertex x = [tau_v]. Nodes are the
// neighbours of x in the order returned by neighbors(); (i, j) with i < j is an
// edge when the axis of some conjugate of g runs through nodes[i], x, nodes[j].
struct WhiteheadGraph {
  std::size_t orbit = 0;
  TreeVertex at_vertex;
  std::vector<TreeVertex> nodes;
  std::vector<std::string> labels;
  std::set<std::pair<std::size_t, std::size_t>> edges;

  bool complete() const { return edges.size() == nodes.size() * (nodes.size() - 1) / 2; }
  std::vector<std::pair<std::size_t, std::size_t>> missing() const;
};

// Turns are read off one axis period; periodicity under <g> makes that
// complete, and the result is saturated under the stabilizer of x.
// Throws for elliptic g.
WhiteheadGraph whitehead_graph(const GraphOfGroups& g, const NormalForm& element, std::size_t orbit);

struct FillingReport {
  bool fills = false;
  std::vector<WhiteheadGraph> graphs;  // one per quotient vertex
};

FillingReport fills(const GraphOfGroups& g, const NormalForm& element);

enum class Certificate { certified_one_ended, inconclusive };

struct CertificateResult {
  Certificate status = Certificate::inconclusive;
  FillingReport report;
};

// Filling is sufficient for one-endedness, not necessary, so a non-filling
// element is reported as inconclusive. Throws for elements of finite order.
CertificateResult one_ended_certificate(const GraphOfGroups& g, const NormalForm& element);

// Every loop at the base vertex whose normal form crosses at most `radius`
// edges, sorted. Throws CapExceeded past `cap` elements.
std::vector<NormalForm> ball(const GraphOfGroups& g, std::size_t radius, std::size_t cap = 200000);

enum class MatchStatus { match, none_within_radius };

struct PMatch {
  MatchStatus status = MatchStatus::none_within_radius;
  // axis(g) and translate . axis(h) share `overlap` (consecutive vertices,
  // at least p + 2 of them, so more than p edges).
  std::optional<NormalForm> translate;
  std::vector<TreeVertex> overlap;
};

// Searches translates k . axis(h) for k in ball(radius). For each k the
// overlap with axis(g) is decided exactly: both windows extend far enough
// past the nearest points to the base vertex that any overlap longer than
// p is seen. Throws for elliptic g or h, or p = 0.
PMatch p_match(const GraphOfGroups& g, const NormalForm& first, const NormalForm& second, std::size_t p,
               std::size_t search_radius);

// Rational weight num/den.
struct Weight {
  std::uint64_t num = 0;
  std::uint64_t den = 1;
};

struct PMatchProbe {
  NormalForm reference;
  std::size_t p = 1;
  std::size_t radius = 2;
};

struct RandomWalkSpec {
  std::vector<NormalForm> support;
  std::vector<Weight> weights;
  std::size_t trials = 200;
  std::uint64_t seed = 0;
  std::size_t threads = 1;  // 0 picks the hardware concurrency
  std::optional<PMatchProbe> probe;
};

// Weights positive and summing to exactly 1; support elements are loops at
// the base; the semigroup generated by the support reaches every
// vertex-group generator loop and every non-tree edge loop within a bounded
// closure. Throws Error describing the first failure.
void validate(const GraphOfGroups& g, const RandomWalkSpec& spec);

// 64-bit SplitMix finalizer.
std::uint64_t splitmix64(std::uint64_t x);
// Seed of trial i of the walks of length n:
// splitmix64(splitmix64(master ^ splitmix64(n)) + i).
std::uint64_t trial_seed(std::uint64_t master, std::size_t n, std::size_t trial);

// The product s_1 s_2 ... s_n of n independent steps drawn from the measure
// with the RNG seeded by `seed`.
NormalForm random_walk(const GraphOfGroups& g, const RandomWalkSpec& spec, std::size_t n, std::uint64_t seed);

struct ExperimentRow {
  std::size_t n = 0;
  std::size_t trials = 0;
  std::size_t hyperbolic = 0;
  std::size_t filling = 0;
  std::optional<std::size_t> p_matches;

  double filling_rate() const { return trials ? static_cast<double>(filling) / trials : 0.0; }
  double hyperbolic_rate() const { return trials ? static_cast<double>(hyperbolic) / trials : 0.0; }
};

std::vector<ExperimentRow> run_genericity_experiment(const GraphOfGroups& g, const RandomWalkSpec& spec,
                                                     const std::vector<std::size_t>& lengths);

// Columns n,trials,hyperbolic_count,filling_count,filling_rate (plus
// pmatch_count,pmatch_rate with a probe); rates printed with 6 decimals.
std::string experiment_csv(const std::vector<ExperimentRow>& rows);

}  // namespace vfree

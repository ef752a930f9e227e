#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "vfree/case_studies.hpp"
#include "vfree/io.hpp"

using namespace vfree;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::shared_ptr<const GraphOfGroups> sl2z() {
  return std::make_shared<const GraphOfGroups>(builtin_graph("sl2z"));
}

// The standard marking of SL2(Z) with the edge stabilizer left trivial, so
// both ends still have to be folded.
MarkedTree unfolded_sl2z() {
  return io::parse_marked_tree(R"({
    "vertices": [{"id": "u", "orbit": "A", "at": "1", "stabilizer": ["a"]},
                 {"id": "w", "orbit": "B", "at": "1", "stabilizer": ["b"]}],
    "edges": [{"id": "e", "from": "u", "to": "w", "offset": "1", "stabilizer": []}]})",
                               sl2z());
}

MarkedTree standard_sl2z() {
  return io::parse_marked_tree(R"({
    "vertices": [{"id": "u", "orbit": "A", "at": "1", "stabilizer": ["a"]},
                 {"id": "w", "orbit": "B", "at": "1", "stabilizer": ["b"]}],
    "edges": [{"id": "e", "from": "u", "to": "w", "offset": "1", "stabilizer": ["a^2"]}]})",
                               sl2z());
}

std::set<NormalForm> as_set(const ElementSet& s) { return {s.begin(), s.end()}; }

// Stabilizers are subgroups, fix their images, and edge stabilizers sit in
// both endpoint stabilizers.
void expect_consistent(const MarkedTree& t) {
  const GraphOfGroups& g = *t.ambient;
  for (const auto& v : t.vertices) {
    EXPECT_EQ(oracle::closure(g, v.stabilizer), as_set(v.stabilizer)) << v.id;
    for (const auto& h : v.stabilizer) EXPECT_EQ(act(g, h, v.image), v.image) << v.id;
  }
  for (const auto& e : t.edges) {
    EXPECT_EQ(oracle::closure(g, e.stabilizer), as_set(e.stabilizer)) << e.id;
    const auto& from = t.vertices[e.from];
    const auto& to = t.vertices[e.to];
    TreeVertex far = act(g, e.offset, to.image);
    for (const auto& h : e.stabilizer) {
      EXPECT_EQ(act(g, h, from.image), from.image) << e.id;
      EXPECT_EQ(act(g, h, far), far) << e.id;
    }
  }
}

}  // namespace

TEST(Folds, F2MarkingFoldsInOneStep) {
  MarkedTree source = io::parse_marked_tree(slurp(VFREE_DATA_DIR "/samples/f2_marking.json"));
  GraphOfGroups rose = io::parse_graph(slurp(VFREE_DATA_DIR "/samples/f2.json"));
  auto steps = fold_sequence(source, rose);
  ASSERT_EQ(steps.size(), 1u);
  EXPECT_EQ(steps[0].directive.kind, DirectiveKind::pair);
  EXPECT_EQ(steps[0].type, FoldType::type2);
  EXPECT_EQ(steps[0].result.edge_orbits(), 2u);
  EXPECT_TRUE(are_isomorphic(marked_quotient(steps[0].result).graph, rose));
  expect_consistent(steps[0].result);
}

TEST(Folds, StabilizerFoldGrowsEdgeGroupToOrderTwo) {
  MarkedTree t = unfolded_sl2z();
  auto available = available_folds(t);
  ASSERT_FALSE(available.empty());
  for (const auto& d : available) {
    ASSERT_EQ(d.kind, DirectiveKind::stabilizer);
    EXPECT_EQ(classify_fold(t, d), FoldType::type3);
    MarkedTree r = fold(t, d);
    ASSERT_EQ(r.edges.size(), 1u);
    EXPECT_EQ(r.edges[0].stabilizer.size(), 2u);
    // The new edge stabilizer is exactly the closure of the old one and the
    // fold subgroup.
    std::vector<NormalForm> gens = t.edges[0].stabilizer;
    gens.insert(gens.end(), d.subgroup.begin(), d.subgroup.end());
    EXPECT_EQ(as_set(r.edges[0].stabilizer), *oracle::closure(*t.ambient, gens));
    expect_consistent(r);
  }
}

TEST(Folds, SequenceReachesSl2z) {
  auto steps = fold_sequence(unfolded_sl2z(), builtin_graph("sl2z"));
  ASSERT_EQ(steps.size(), 1u);
  EXPECT_EQ(steps[0].type, FoldType::type3);
  EXPECT_TRUE(are_isomorphic(marked_quotient(steps.back().result).graph, builtin_graph("sl2z")));
}

TEST(Folds, AlreadyFoldedGivesEmptySequence) {
  EXPECT_TRUE(available_folds(standard_sl2z()).empty());
  EXPECT_TRUE(fold_sequence(standard_sl2z(), builtin_graph("sl2z")).empty());
}

TEST(Folds, MismatchedTargetIsAnError) {
  EXPECT_THROW(fold_sequence(standard_sl2z(), builtin_graph("z2_z3")), Error);
}

TEST(Folds, StepsAreConsistentAndEdgeOrbitsNeverGrow) {
  std::vector<std::pair<MarkedTree, GraphOfGroups>> runs{
      {unfolded_sl2z(), builtin_graph("sl2z")},
      {io::parse_marked_tree(slurp(VFREE_DATA_DIR "/samples/f2_marking.json")),
       io::parse_graph(slurp(VFREE_DATA_DIR "/samples/f2.json"))}};
  for (const auto& [source, target] : runs) {
    std::size_t orbits = source.edge_orbits();
    for (const auto& step : fold_sequence(source, target)) {
      EXPECT_LE(step.result.edge_orbits(), orbits);
      orbits = step.result.edge_orbits();
      expect_consistent(step.result);
      if (step.type)
        EXPECT_TRUE(std::find(step.available_types.begin(), step.available_types.end(), *step.type) !=
                    step.available_types.end());
      ASSERT_EQ(step.maximal.size(), step.result.edges.size());
    }
  }
}

TEST(Folds, MarkedQuotientMarkingIsAHomomorphism) {
  MarkedQuotient q = marked_quotient(standard_sl2z());
  EXPECT_TRUE(check_loop_map(q.graph, builtin_graph("sl2z"), q.marking).empty());
}

TEST(Folds, InvalidStabilizerIsRejected) {
  // b does not fix the A vertex.
  EXPECT_THROW(io::parse_marked_tree(R"({
    "vertices": [{"id": "u", "orbit": "A", "at": "1", "stabilizer": ["b"]}],
    "edges": []})",
                                     sl2z()),
               Error);
}

TEST(Folds, GeneratedSubgroupCapIsExplicit) {
  GraphOfGroups g = builtin_graph("sl2z");
  EXPECT_THROW(generated_subgroup(g, {parse_word(g, "a b")}), CapExceeded);
  EXPECT_EQ(generated_subgroup(g, {parse_word(g, "b")}).size(), 6u);
}

TEST(Folds, VertexStabilizerIsConjugateOfVertexGroup) {
  GraphOfGroups g = builtin_graph("sl2z");
  NormalForm p = parse_word(g, "b a");
  TreeVertex x = act(g, p, base_tree_vertex(g, 0));
  ElementSet s = vertex_stabilizer(g, x);
  ASSERT_EQ(s.size(), 4u);
  for (const auto& h : s) EXPECT_EQ(act(g, h, x), x);
  EXPECT_EQ(as_set(s), *oracle::closure(g, {conjugate(g, p, parse_word(g, "a"))}));
}

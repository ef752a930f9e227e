#include <gtest/gtest.h>

#include "vfree/case_studies.hpp"
#include "vfree/io.hpp"

using namespace vfree;

namespace {

// Runs `f` and returns the Error message, or "" if nothing was thrown.
template <class F>
std::string error_of(F f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(GroupJson, TableFormRoundTrips) {
  GraphOfGroups g = builtin_graph("counterexample");
  for (const auto& v : g.vertices()) {
    GroupPtr back = io::parse_group(io::group_to_json(*v.group));
    EXPECT_EQ(*back, *v.group);
    EXPECT_EQ(back->generators(), v.group->generators());
  }
}

TEST(GroupJson, EveryKindParses) {
  EXPECT_EQ(io::parse_group(R"j({"kind": "cyclic", "n": 5, "generator": "g"})j")->order(), 5u);
  EXPECT_EQ(io::parse_group(R"j({"kind": "elementary_abelian", "rank": 3})j")->order(), 8u);
  EXPECT_EQ(io::parse_group(R"j({"kind": "product", "factors": [{"kind": "cyclic", "n": 2, "generator": "s"},
                                                               {"kind": "cyclic", "n": 3, "generator": "t"}]})j")
                ->order(),
            6u);
  GroupPtr s3 = io::parse_group(R"j({"kind": "permutations", "generators": [
      {"name": "r", "images": [1, 2, 0]}, {"name": "f", "images": [1, 0, 2]}]})j");
  EXPECT_EQ(s3->order(), 6u);
  EXPECT_FALSE(s3->is_abelian());
  GroupPtr d = io::parse_group(R"j({"kind": "semidirect",
      "c": {"kind": "elementary_abelian", "rank": 2},
      "q": {"kind": "cyclic", "n": 2, "generator": "t"},
      "action": {"t": "(e1 e2)"}})j");
  EXPECT_EQ(d->order(), 8u);
  EXPECT_FALSE(d->is_abelian());
}

TEST(GroupJson, ErrorsNameTheField) {
  EXPECT_NE(error_of([] { io::parse_group(R"j({"kind": "cyclic"})j"); }).find("n"), std::string::npos);
  EXPECT_NE(error_of([] { io::parse_group(R"j({"kind": "dihedral", "n": 3})j"); }).find("dihedral"),
            std::string::npos);
  EXPECT_FALSE(error_of([] { io::parse_group("not json"); }).empty());
  EXPECT_FALSE(error_of([] {
                 io::parse_group(R"j({"kind": "semidirect", "c": {"kind": "elementary_abelian", "rank": 2},
                     "q": {"kind": "cyclic", "n": 2, "generator": "t"}, "action": {"t": "(e1 e5)"}})j");
               }).empty());
}

TEST(GraphJson, RoundTripIsIsomorphicAndStable) {
  for (const auto& [name, text] : builtin_fixtures()) {
    GraphOfGroups g = io::parse_graph(text);
    std::string once = io::graph_to_json(g);
    GraphOfGroups back = io::parse_graph(once);
    EXPECT_TRUE(are_isomorphic(g, back)) << name;
    EXPECT_EQ(io::graph_to_json(back), once) << name;
    EXPECT_EQ(back.fingerprint(), g.fingerprint()) << name;
  }
}

TEST(GraphJson, ErrorsAreReported) {
  EXPECT_NE(error_of([] { io::parse_graph(R"j({"vertices": [], "edges": [], "base": "A"})j"); }), "");
  EXPECT_NE(error_of([] {
              io::parse_graph(R"j({"vertices": [{"id": "A", "group": {"kind": "cyclic", "n": 2, "generator": "a"}}],
                                  "edges": [{"id": "e", "from": "A", "to": "Z", "group": {"kind": "cyclic", "n": 1, "generator": "c"},
                                             "into_from": ["1"], "into_to": ["1"]}], "base": "A"})j");
            }).find("Z"),
            std::string::npos);
  // A non-injective edge map.
  EXPECT_NE(error_of([] {
              io::parse_graph(R"j({"vertices": [{"id": "A", "group": {"kind": "cyclic", "n": 2, "generator": "a"}},
                                               {"id": "B", "group": {"kind": "cyclic", "n": 2, "generator": "b"}}],
                                  "edges": [{"id": "e", "from": "A", "to": "B", "group": {"kind": "cyclic", "n": 2, "generator": "c"},
                                             "into_from": ["1"], "into_to": ["b"]}], "base": "A"})j");
            }),
            "");
}

TEST(MarkedTreeJson, RoundTrip) {
  auto ambient = std::make_shared<const GraphOfGroups>(builtin_graph("sl2z"));
  MarkedTree t = io::parse_marked_tree(R"j({
    "vertices": [{"id": "u", "orbit": "A", "at": "1", "stabilizer": ["a"]},
                 {"id": "w", "orbit": "B", "at": "1", "stabilizer": ["b"]}],
    "edges": [{"id": "e", "from": "u", "to": "w", "offset": "1", "stabilizer": ["a^2"]}]})j",
                                       ambient);
  std::string once = io::marked_tree_to_json(t);
  MarkedTree back = io::parse_marked_tree(once, ambient);
  EXPECT_EQ(io::marked_tree_to_json(back), once);
  ASSERT_EQ(back.vertices.size(), 2u);
  EXPECT_EQ(back.vertices[1].stabilizer, t.vertices[1].stabilizer);
  EXPECT_EQ(back.edges[0].stabilizer, t.edges[0].stabilizer);
}

TEST(MeasureJson, SampleParsesAndValidates) {
  GraphOfGroups g = builtin_graph("sl2z");
  RandomWalkSpec spec = io::parse_measure(g, io::read_file(VFREE_DATA_DIR "/samples/measure.json"));
  EXPECT_EQ(spec.support.size(), 4u);
  EXPECT_EQ(spec.trials, 50u);
  EXPECT_EQ(spec.seed, 7u);
  ASSERT_TRUE(spec.probe.has_value());
  EXPECT_EQ(spec.probe->p, 1u);
}

TEST(MeasureJson, BadWeightsAreRejected) {
  GraphOfGroups g = builtin_graph("sl2z");
  EXPECT_NE(error_of([&] {
              io::parse_measure(g, R"j({"support": ["a", "b"], "weights": ["1/2", "1/3"]})j");
            }),
            "");
  EXPECT_NE(error_of([&] { io::parse_measure(g, R"j({"support": ["a", "b"], "weights": ["1/2", "x"]})j"); }), "");
}

TEST(ReadFile, MissingFileIsAnError) {
  EXPECT_NE(error_of([] { io::read_file("/nonexistent/file.json"); }).find("/nonexistent/file.json"),
            std::string::npos);
}

TEST(FoldStepJson, IsOneLine) {
  MarkedTree source = io::parse_marked_tree(io::read_file(VFREE_DATA_DIR "/samples/f2_marking.json"));
  auto steps = fold_sequence(source, io::parse_graph(io::read_file(VFREE_DATA_DIR "/samples/f2.json")));
  ASSERT_EQ(steps.size(), 1u);
  std::string line = io::fold_step_to_json(source, steps[0], 1);
  EXPECT_EQ(line.find('\n'), std::string::npos);
  EXPECT_NE(line.find("\"type\":\"type2\""), std::string::npos) << line;
}

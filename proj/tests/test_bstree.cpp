#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "vfree/case_studies.hpp"

using namespace vfree;

namespace {

// A random hyperbolic element of SL2(Z): a product of random generator loops,
// retried until it is hyperbolic.
NormalForm random_hyperbolic(const GraphOfGroups& g, std::mt19937_64& rng) {
  while (true) {
    NormalForm w = oracle::random_element(g, 6, rng);
    if (!element_order(g, w)) return w;
  }
}

}  // namespace

class Tree : public ::testing::Test {
 protected:
  GraphOfGroups g = builtin_graph("sl2z");
  TreeVertex va = base_tree_vertex(g, 0);
  TreeVertex vb = base_tree_vertex(g, 1);
};

TEST_F(Tree, NeighbourCountsAreIndices) {
  // [Z/4 : Z/2] = 2 and [Z/6 : Z/2] = 3.
  EXPECT_EQ(neighbors(g, va).size(), 2u);
  EXPECT_EQ(neighbors(g, vb).size(), 3u);
  GraphOfGroups z46 = builtin_graph("z4_z6");
  EXPECT_EQ(neighbors(z46, base_tree_vertex(z46, 0)).size(), 4u);
}

TEST_F(Tree, Distances) {
  EXPECT_EQ(distance(g, va, va), 0u);
  EXPECT_EQ(distance(g, va, vb), 1u);
  TreeVertex far = act(g, parse_word(g, "b"), va);
  EXPECT_EQ(distance(g, va, far), 2u);
  EXPECT_EQ(geodesic(g, va, far).size(), 3u);
}

TEST_F(Tree, Classification) {
  Classification a = classify(g, parse_word(g, "a"));
  EXPECT_FALSE(a.hyperbolic);
  ASSERT_TRUE(a.fixed_vertex.has_value());
  EXPECT_EQ(act(g, parse_word(g, "a"), *a.fixed_vertex), *a.fixed_vertex);

  Classification ab = classify(g, parse_word(g, "a b"));
  EXPECT_TRUE(ab.hyperbolic);
  EXPECT_EQ(ab.translation_length, 2u);
  EXPECT_EQ(classify(g, parse_word(g, "a b a b a b")).translation_length, 6u);
}

TEST_F(Tree, NeighboursAreAtDistanceOne) {
  for (const auto& x : oracle::vertex_ball(g, va, 3))
    for (const auto& n : neighbors(g, x)) ASSERT_EQ(distance(g, x, n), 1u);
}

TEST_F(Tree, DistanceMatchesBfsOnBall) {
  auto ball = oracle::vertex_ball(g, vb, 3);
  for (std::size_t i = 0; i < ball.size(); i += 3)
    for (std::size_t j = 0; j < ball.size(); j += 5)
      ASSERT_EQ(distance(g, ball[i], ball[j]), oracle::bfs_distance(g, ball[i], ball[j], 12));
}

TEST_F(Tree, MetricProperties) {
  std::mt19937_64 rng(17);
  auto ball = oracle::vertex_ball(g, va, 4);
  std::uniform_int_distribution<std::size_t> pick(0, ball.size() - 1);
  for (int i = 0; i < 200; ++i) {
    const auto &x = ball[pick(rng)], &y = ball[pick(rng)], &z = ball[pick(rng)];
    EXPECT_EQ(distance(g, x, y), distance(g, y, x));
    EXPECT_LE(distance(g, x, z), distance(g, x, y) + distance(g, y, z));
    EXPECT_EQ(distance(g, x, y) == 0, x == y);
    NormalForm k = oracle::random_element(g, 5, rng);
    EXPECT_EQ(distance(g, act(g, k, x), act(g, k, y)), distance(g, x, y));
  }
}

TEST_F(Tree, ClassifyAgreesWithBfsOracle) {
  std::mt19937_64 rng(19);
  for (int i = 0; i < 50; ++i) {
    NormalForm w = oracle::random_element(g, 1 + i % 5, rng);
    Classification c = classify(g, w);
    std::size_t disp = oracle::min_displacement(g, w, 6);
    if (c.hyperbolic) {
      EXPECT_EQ(disp, c.translation_length);
    } else {
      EXPECT_EQ(disp, 0u);
      EXPECT_EQ(act(g, w, *c.fixed_vertex), *c.fixed_vertex);
    }
  }
}

TEST_F(Tree, TranslationLengthIsConjugationInvariant) {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 200; ++i) {
    NormalForm w = random_hyperbolic(g, rng);
    NormalForm k = oracle::random_element(g, 4, rng);
    EXPECT_EQ(classify(g, conjugate(g, k, w)).translation_length, classify(g, w).translation_length);
  }
}

TEST_F(Tree, TranslationLengthIsMultiplicative) {
  std::mt19937_64 rng(29);
  for (int i = 0; i < 200; ++i) {
    NormalForm w = random_hyperbolic(g, rng);
    std::size_t l = classify(g, w).translation_length;
    for (long long n = 2; n <= 4; ++n) EXPECT_EQ(classify(g, power(g, w, n)).translation_length, n * l);
  }
}

TEST_F(Tree, AxisIsTranslatedByTheElement) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 60; ++i) {
    NormalForm w = random_hyperbolic(g, rng);
    AxisSegment s = axis_window(g, w, 3);
    ASSERT_EQ(s.period, classify(g, w).translation_length);
    for (std::size_t j = 0; j + s.period < s.vertices.size(); ++j)
      ASSERT_EQ(act(g, w, s.vertices[j]), s.vertices[j + s.period]);
    for (std::size_t j = 0; j + 1 < s.vertices.size(); ++j) ASSERT_EQ(distance(g, s.vertices[j], s.vertices[j + 1]), 1u);
    ASSERT_EQ(distance(g, s.vertices.front(), s.vertices.back()), s.vertices.size() - 1);
  }
}

TEST_F(Tree, AxisOfConjugateIsTranslate) {
  std::mt19937_64 rng(37);
  for (int i = 0; i < 40; ++i) {
    NormalForm w = random_hyperbolic(g, rng);
    NormalForm k = oracle::random_element(g, 3, rng);
    AxisSegment wide = axis_window(g, conjugate(g, k, w), 6, 12);
    std::set<TreeVertex> on(wide.vertices.begin(), wide.vertices.end());
    for (const auto& v : axis_window(g, w, 2).vertices) EXPECT_TRUE(on.count(act(g, k, v)));
  }
}

TEST_F(Tree, SquareHasSameAxis) {
  NormalForm w = parse_word(g, "a b^-1 a b");
  AxisSegment one = axis_window(g, w, 4, 8);
  std::set<TreeVertex> on(one.vertices.begin(), one.vertices.end());
  for (const auto& v : axis_window(g, power(g, w, 2), 2).vertices) EXPECT_TRUE(on.count(v));
}

TEST_F(Tree, EllipticHasNoAxis) { EXPECT_THROW(axis_window(g, parse_word(g, "b"), 2), Error); }

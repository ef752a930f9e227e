#include <gtest/gtest.h>

#include <map>
#include <random>

#include "oracles.hpp"
#include "vfree/case_studies.hpp"
#include "vfree/gogwords.hpp"

using namespace vfree;

namespace {

NormalForm from_letters(const GraphOfGroups& g, const oracle::Letters& w) {
  return normal_form(g, oracle::spell(g, w));
}

// Edge crossings of the reduced word in Z/2 * Z/3 when read as a loop at A.
std::size_t crossings(const std::string& reduced) {
  std::size_t at = 0, count = 0;
  for (char c : reduced) {
    std::size_t want = c == 'a' ? 0 : 1;
    count += want != at;
    at = want;
  }
  return count + (at != 0);
}

std::optional<std::size_t> matrix_order(const oracle::Letters& w) {
  oracle::Mat m = oracle::sl2_image(w), p;
  for (std::size_t k = 1; k <= 12; ++k) {
    p = p * m;
    if (p == oracle::Mat{}) return k;
  }
  return std::nullopt;
}

oracle::Letters random_letters(std::mt19937_64& rng, std::size_t len) {
  std::uniform_int_distribution<int> pick(0, 3);
  oracle::Letters w;
  for (std::size_t i = 0; i < len; ++i) w.push_back(pick(rng));
  return w;
}

}  // namespace

class Sl2z : public ::testing::Test {
 protected:
  GraphOfGroups g = builtin_graph("sl2z");
  NormalForm nf(const char* text) { return parse_word(g, text); }
};

TEST_F(Sl2z, DefiningRelationHolds) {
  EXPECT_TRUE(is_identity(g, nf("a^2 b^-3")));
  EXPECT_TRUE(is_identity(g, nf("b b b b b b")));
  EXPECT_TRUE(is_identity(g, nf("a^2 b^3")));  // a^2 b^3 = a^4
  EXPECT_TRUE(is_identity(g, nf("a^4")));
  EXPECT_TRUE(is_identity(g, nf("b^6")));
}

TEST_F(Sl2z, NonRelationIsNontrivial) {
  // b^6 = 1, so this is a^2, the central element of order 2.
  NormalForm w = nf("a a b b b b b b");
  EXPECT_FALSE(is_identity(g, w));
  EXPECT_EQ(w, nf("a^2"));
  EXPECT_EQ(w, nf("b^3"));
  EXPECT_FALSE(is_identity(g, nf("a b^3")));
}

TEST_F(Sl2z, LengthAndOrders) {
  EXPECT_EQ(nf("a b").length(), 2u);
  EXPECT_EQ(element_order(g, nf("a")), 4u);
  EXPECT_EQ(element_order(g, nf("b")), 6u);
  EXPECT_EQ(element_order(g, nf("a^2")), 2u);
  EXPECT_EQ(element_order(g, nf("a b")), std::nullopt);
}

TEST_F(Sl2z, CyclicReductionOfConjugate) {
  NormalForm w = nf("b a b^-1");
  CyclicReduction r = cyclic_reduction(g, w);
  EXPECT_EQ(conjugate(g, r.conjugator, r.core), w);
  EXPECT_LE(r.core.length(), 2u);
  EXPECT_EQ(element_order(g, r.core), 4u);
}

TEST_F(Sl2z, FormatParseRoundTrip) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 300; ++i) {
    NormalForm w = from_letters(g, random_letters(rng, 9));
    EXPECT_EQ(parse_word(g, format_word(g, w)), w);
  }
}

TEST_F(Sl2z, MatchesMatrixOracleOnShortWords) {
  std::map<oracle::Mat, NormalForm> by_matrix;
  std::map<NormalForm, oracle::Mat> by_form;
  for (const auto& w : oracle::all_words(6)) {
    NormalForm f = from_letters(g, w);
    oracle::Mat m = oracle::sl2_image(w);
    auto [it, fresh] = by_matrix.emplace(m, f);
    ASSERT_EQ(it->second, f) << oracle::to_text(w);
    auto [jt, fresh2] = by_form.emplace(f, m);
    ASSERT_EQ(jt->second, m) << oracle::to_text(w);
    ASSERT_EQ(is_identity(g, f), m == oracle::Mat{}) << oracle::to_text(w);
  }
}

TEST_F(Sl2z, ElementOrderMatchesMatrixOracle) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 400; ++i) {
    oracle::Letters w = random_letters(rng, 1 + i % 7);
    EXPECT_EQ(element_order(g, from_letters(g, w)), matrix_order(w)) << oracle::to_text(w);
  }
}

TEST_F(Sl2z, NormalFormIsIdempotent) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 300; ++i) {
    NormalForm w = from_letters(g, random_letters(rng, 10));
    EXPECT_EQ(normal_form(g, to_word(w)), w);
  }
}

TEST_F(Sl2z, MultiplicationIsAssociativeWithInverses) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 300; ++i) {
    NormalForm x = from_letters(g, random_letters(rng, 6));
    NormalForm y = from_letters(g, random_letters(rng, 6));
    NormalForm z = from_letters(g, random_letters(rng, 6));
    EXPECT_EQ(multiply(g, multiply(g, x, y), z), multiply(g, x, multiply(g, y, z)));
    EXPECT_TRUE(is_identity(g, multiply(g, x, invert(g, x))));
    EXPECT_EQ(power(g, x, 3), multiply(g, x, multiply(g, x, x)));
    EXPECT_EQ(power(g, x, -2), invert(g, multiply(g, x, x)));
  }
}

TEST_F(Sl2z, ConjugationPreservesOrderAndCore) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 300; ++i) {
    NormalForm w = from_letters(g, random_letters(rng, 1 + i % 8));
    NormalForm k = from_letters(g, random_letters(rng, 5));
    NormalForm c = conjugate(g, k, w);
    EXPECT_EQ(element_order(g, c), element_order(g, w));
    CyclicReduction rw = cyclic_reduction(g, w), rc = cyclic_reduction(g, c);
    EXPECT_EQ(rw.core.length(), rc.core.length());
    EXPECT_EQ(conjugate(g, rw.conjugator, rw.core), w);
    EXPECT_EQ(conjugate(g, rc.conjugator, rc.core), c);
  }
}

TEST(Z2Z3, MatchesRewritingOracleOnShortWords) {
  GraphOfGroups g = builtin_graph("z2_z3");
  std::map<std::string, NormalForm> by_reduced;
  for (const auto& w : oracle::all_words(7)) {
    NormalForm f = from_letters(g, w);
    std::string r = oracle::z2z3_rewrite(w);
    auto [it, fresh] = by_reduced.emplace(r, f);
    ASSERT_EQ(it->second, f) << oracle::to_text(w);
    ASSERT_EQ(is_identity(g, f), r.empty()) << oracle::to_text(w);
    ASSERT_EQ(f.length(), crossings(r)) << oracle::to_text(w);
  }
  // Distinct reduced words must give distinct forms.
  std::set<NormalForm> forms;
  for (const auto& [r, f] : by_reduced) forms.insert(f);
  EXPECT_EQ(forms.size(), by_reduced.size());
}

TEST(Z2Z3, RewritingAgreesWithPsl2) {
  // Cross-check the two oracles against each other.
  std::map<std::string, oracle::Mat> seen;
  for (const auto& w : oracle::all_words(6)) {
    auto [it, fresh] = seen.emplace(oracle::z2z3_rewrite(w), oracle::psl2_key(w));
    ASSERT_EQ(it->second, oracle::psl2_key(w)) << oracle::to_text(w);
  }
}

TEST(Counterexample, ULiteralEqualsProductOfLoops) {
  GraphOfGroups g = builtin_graph("counterexample");
  const FiniteGroup& a = g.vertex_group(0);
  const FiniteGroup& b = g.vertex_group(1);
  NormalForm z = vertex_loop(g, 1, *b.generator("z"));
  NormalForm x = vertex_loop(g, 0, *a.generator("x"));
  NormalForm y = vertex_loop(g, 0, *a.generator("y"));
  NormalForm product = multiply(g, invert(g, z), multiply(g, multiply(g, x, y), z));
  EXPECT_EQ(parse_word(g, "z^-1 x y z"), product);
  EXPECT_EQ(element_order(g, product), 2u);  // xy has order 2 in Q = Z/2 x Z/2
}

TEST(Counterexample, EdgeGroupElementsPassThrough) {
  GraphOfGroups g = builtin_graph("counterexample");
  for (const char* e : {"e1", "e2", "e3", "e4"})
    EXPECT_EQ(parse_word(g, std::string("A:") + e), parse_word(g, std::string("B:") + e));
}

TEST(ParseWord, RejectsUnknownLettersAndTreeEdges) {
  GraphOfGroups g = builtin_graph("sl2z");
  EXPECT_THROW(parse_word(g, "q"), Error);
  EXPECT_THROW(parse_word(g, "y"), Error);
  EXPECT_THROW(parse_word(g, "a^"), Error);
  EXPECT_TRUE(is_identity(g, parse_word(g, "1")));
}

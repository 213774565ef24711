#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "common.hpp"
#include "formula_gen.hpp"

using namespace tpjoin;
using namespace tpjoin::testing;

namespace {

ProbMap fig_probs() { return {{"a1", 0.7}, {"a2", 0.8}, {"b1", 0.9}, {"b2", 0.6}, {"b3", 0.7}}; }

}  // namespace

TEST(Concatenation, Land) {
  EXPECT_EQ(render_lineage(land(L("a1"), L("b3"))), "a1&b3");
  EXPECT_EQ(render_lineage(land(L("a1"), L("a1"))), "a1&a1");
  EXPECT_NEAR(probability(land(L("a1"), L("b3")), fig_probs()), 0.49, 1e-12);
  EXPECT_EQ(render_lineage(land(L("a&b"), L("c"))), "a&b&c");
  EXPECT_THROW(land(Lineage{}, L("a")), ContractViolation);
}

TEST(Concatenation, LandNot) {
  EXPECT_EQ(render_lineage(land_not(L("a1"), L("b3"))), "a1&!b3");
  EXPECT_NEAR(probability(land_not(L("a1"), L("b3")), fig_probs()), 0.21, 1e-12);
  auto l = land_not(L("a1"), lor_all({L("b3"), L("b2")}));
  EXPECT_EQ(render_lineage(l), "a1&!(b3|b2)");
  EXPECT_NEAR(probability(l, fig_probs()), 0.084, 1e-12);
  EXPECT_NEAR(probability(land_not(L("x"), L("x")), {{"x", 0.4}}), 0.0, 1e-12);
  EXPECT_THROW(land_not(L("a"), Lineage{}), ContractViolation);
}

TEST(Concatenation, LorAll) {
  EXPECT_EQ(render_lineage(lor_all({L("b3"), L("b2")})), "b3|b2");
  EXPECT_EQ(lor_all({L("b2")}), L("b2"));
  EXPECT_NEAR(probability(lor_all({L("b3"), L("b2")}), fig_probs()), 0.88, 1e-12);
  EXPECT_THROW(lor_all(std::vector<Lineage>{}), ContractViolation);
}

TEST(Equivalence, Examples) {
  EXPECT_TRUE(equivalent(L("b3|b2"), L("b2|b3")));
  EXPECT_FALSE(equivalent(L("a1"), L("a1&!b3")));
  EXPECT_TRUE(equivalent(L("x&!x"), L("y&!y")));
  EXPECT_TRUE(equivalent(Lineage{}, Lineage{}));
  EXPECT_FALSE(equivalent(Lineage{}, L("x&!x")));
  EXPECT_TRUE(equivalent(L("!(a|b)"), L("!a&!b")));
}

TEST(Equivalence, CapEnforced) {
  std::vector<Lineage> vs;
  for (int i = 0; i < 21; ++i) vs.push_back(Lineage::var("v" + std::to_string(i)));
  auto big = Lineage::disj(vs);
  auto other = Lineage::conj(vs);
  EXPECT_THROW(equivalent(big, other), CapExceeded);
}

TEST(Probability, Examples) {
  EXPECT_NEAR(probability(L("a1"), {{"a1", 0.7}}), 0.7, 1e-12);
  EXPECT_NEAR(probability(L("x|!x"), {{"x", 0.3}}), 1.0, 1e-12);
  EXPECT_THROW(probability(L("zz"), fig_probs()), Error);
}

TEST(Probability, EnumerationCap) {
  std::vector<Lineage> vs;
  ProbMap pm;
  for (int i = 0; i < 25; ++i) {
    vs.push_back(Lineage::var("v" + std::to_string(i)));
    pm["v" + std::to_string(i)] = 0.5;
  }
  vs.push_back(Lineage::var("v0"));  // not read-once
  EXPECT_THROW(probability(Lineage::disj(vs), pm), CapExceeded);
  vs.pop_back();
  EXPECT_NEAR(probability(Lineage::conj(vs), pm), std::pow(0.5, 25), 1e-15);  // read-once fast path
}

TEST(Vars, Collection) {
  EXPECT_EQ(vars(L("a1&!(b3|b2)")), (std::set<std::string>{"a1", "b2", "b3"}));
  EXPECT_TRUE(vars(Lineage{}).empty());
  EXPECT_EQ(vars(L("b3|b3")), (std::set<std::string>{"b3"}));
}

TEST(Syntax, ParseRender) {
  auto l = L("a1&!(b3|b2)");
  EXPECT_EQ(l, Lineage::conj({L("a1"), Lineage::negate(Lineage::disj({L("b3"), L("b2")}))}));
  EXPECT_EQ(render_lineage(l), "a1&!(b3|b2)");
  EXPECT_TRUE(L("-").is_null());
  EXPECT_EQ(render_lineage(Lineage{}), "-");
  EXPECT_EQ(render_lineage(L(" a | b & c ")), "a|(b&c)");
  EXPECT_EQ(render_lineage(L("!!a")), "!!a");
  for (const char* bad : {"", "a&", "(a", "a)", "&a", "1a", "a b", "!"}) {
    EXPECT_THROW(parse_lineage(bad), ParseError) << bad;
  }
}

TEST(Syntax, RoundTripRandom) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 500; ++i) {
    std::vector<int> pool;
    auto l = random_formula(rng, 6, 4, false, pool);
    EXPECT_EQ(parse_lineage(render_lineage(l)), l) << render_lineage(l);
  }
}

TEST(ProbabilityProperties, ReadOnceMatchesEnumeration) {
  std::mt19937_64 rng(2);
  int checked = 0;
  for (int i = 0; i < 2000; ++i) {
    int n = std::uniform_int_distribution<int>(1, 12)(rng);
    std::vector<int> pool;
    for (int v = 0; v < n; ++v) pool.push_back(v);
    auto l = random_formula(rng, n, 5, true, pool);
    ASSERT_TRUE(is_read_once(l));
    auto pm = random_probs(rng, n);
    EXPECT_NEAR(probability_read_once(l, pm), probability_enumerate(l, pm), 1e-12);
    ++checked;
  }
  EXPECT_EQ(checked, 2000);
}

TEST(ProbabilityProperties, BoundsAndNegation) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 500; ++i) {
    std::vector<int> pool;
    auto l = random_formula(rng, 8, 4, false, pool);
    auto pm = random_probs(rng, 8);
    double p = probability(l, pm);
    EXPECT_GE(p, -1e-12);
    EXPECT_LE(p, 1 + 1e-12);
    EXPECT_NEAR(probability(Lineage::negate(l), pm), 1 - p, 1e-12);
  }
}

TEST(EquivalenceProperties, RelationLaws) {
  std::mt19937_64 rng(4);
  std::vector<Lineage> corpus;
  for (int i = 0; i < 60; ++i) {
    std::vector<int> pool;
    corpus.push_back(random_formula(rng, 3, 3, false, pool));
  }
  for (const auto& x : corpus) EXPECT_TRUE(equivalent(x, x));
  for (const auto& x : corpus) {
    for (const auto& y : corpus) {
      bool xy = equivalent(x, y);
      EXPECT_EQ(xy, equivalent(y, x));
      if (!xy) continue;
      for (const auto& z : corpus) {
        if (equivalent(y, z)) {
          EXPECT_TRUE(equivalent(x, z));
        }
      }
    }
  }
}

TEST(EquivalenceProperties, ImpliesEqualProbability) {
  std::mt19937_64 rng(5);
  int pairs = 0;
  for (int i = 0; i < 4000 && pairs < 200; ++i) {
    std::vector<int> pool;
    auto x = random_formula(rng, 3, 3, false, pool);
    auto y = random_formula(rng, 3, 3, false, pool);
    if (!equivalent(x, y)) continue;
    ++pairs;
    for (int k = 0; k < 3; ++k) {
      auto pm = random_probs(rng, 3);
      EXPECT_NEAR(probability(x, pm), probability(y, pm), 1e-12);
    }
  }
  EXPECT_GT(pairs, 50);
}

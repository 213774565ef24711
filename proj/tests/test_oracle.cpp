#include <gtest/gtest.h>

#include "common.hpp"

using namespace tpjoin;
using namespace tpjoin::testing;

namespace {
Schema kv() { return {{"K", ColumnType::Str}}; }
}  // namespace

TEST(SnapshotLineage, Examples) {
  auto a = fig_a();
  auto b = fig_b();
  auto pred = loc_theta(a, b).instantiate(Side::Left, F({"Ann", "ZAK"}));
  EXPECT_TRUE(equivalent(oracle::snapshot_lineage(b, pred, 5), L("b2|b3")));
  EXPECT_TRUE(oracle::snapshot_lineage(b, pred, 2).is_null());
  EXPECT_TRUE(oracle::snapshot_lineage(TPRelation(b.schema(), {}), pred, 5).is_null());
  EXPECT_EQ(oracle::snapshot_lineage(b, F({"hotel2", "ZAK"}), 6), L("b2"));
}

TEST(SnapshotJoin, RunningExample) {
  auto a = fig_a();
  auto b = fig_b();
  auto lo = oracle::snapshot_join(a, b, loc_theta(a, b), JoinOp::LeftOuter);
  auto cmp = oracle::equal_up_to_equivalence(lo, expected_left_outer());
  EXPECT_TRUE(cmp.equal) << cmp.diff;
  auto anti = oracle::snapshot_join(a, b, loc_theta(a, b), JoinOp::Anti);
  cmp = oracle::equal_up_to_equivalence(anti, expected_anti());
  EXPECT_TRUE(cmp.equal) << cmp.diff;
}

TEST(SnapshotJoin, EmptyNegativeSide) {
  auto a = fig_a();
  TPRelation none(a.schema(), {});
  auto out = oracle::snapshot_join(a, none, parse_theta("true", a.schema(), a.schema()), JoinOp::Anti);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].lam, L("a1"));
  EXPECT_EQ(out[0].t, (Interval{2, 8}));
  EXPECT_EQ(out[1].lam, L("a2"));
}

TEST(SnapshotJoin, Caps) {
  TPRelation wide(kv(), {{F({"x"}), "r1", {0, 5000}, 0.5}});
  auto th = parse_theta("true", kv(), kv());
  EXPECT_THROW(oracle::snapshot_join(wide, wide, th, JoinOp::Anti), CapExceeded);
  std::vector<TPTuple> many;
  for (int i = 0; i < 21; ++i) many.push_back({F({"x"}), "v" + std::to_string(i), {i, i + 1}, 0.5});
  TPRelation lots(kv(), many);
  EXPECT_THROW(oracle::snapshot_join(lots, TPRelation(kv(), {}), th, JoinOp::Anti), CapExceeded);
}

TEST(SnapshotJoin, CoalesceIsFixpoint) {
  auto a = fig_a();
  auto b = fig_b();
  auto out = oracle::snapshot_join(a, b, loc_theta(a, b), JoinOp::FullOuter);
  // No two rows with equal facts are adjacent with equivalent lineage.
  for (const auto& x : out) {
    for (const auto& y : out) {
      if (&x == &y || x.f_r != y.f_r || x.f_s != y.f_s) continue;
      if (x.t.te == y.t.ts) {
        EXPECT_FALSE(equivalent(x.lam, y.lam));
      }
    }
  }
}

TEST(OracleWindowSets, RunningExample) {
  auto a = fig_a();
  auto b = fig_b();
  auto sets = oracle::window_sets(a, b, loc_theta(a, b));
  EXPECT_EQ(sets.unmatched.size(), 2u);
  EXPECT_EQ(sets.overlapping.size(), 2u);
  ASSERT_EQ(sets.negating.size(), 3u);
  EXPECT_EQ(sets.negating[1].t, (Interval{5, 6}));
  EXPECT_TRUE(equivalent(sets.negating[1].lam_s, L("b3|b2")));
}

TEST(Comparator, Contract) {
  auto want = expected_left_outer();
  auto permuted = want;
  std::reverse(permuted.begin(), permuted.end());
  EXPECT_TRUE(oracle::equal_up_to_equivalence(want, permuted).equal);

  auto shifted = want;
  shifted[3].t.te += 1;
  auto cmp = oracle::equal_up_to_equivalence(shifted, want);
  EXPECT_FALSE(cmp.equal);
  EXPECT_NE(cmp.diff.find("a1&!b3"), std::string::npos);

  auto reordered = want;
  reordered[4].lam = L("a1&!(b2|b3)");
  EXPECT_TRUE(oracle::equal_up_to_equivalence(reordered, want).equal);

  auto off = want;
  off[0].p += 1e-6;
  EXPECT_FALSE(oracle::equal_up_to_equivalence(off, want).equal);

  auto missing = want;
  missing.pop_back();
  EXPECT_FALSE(oracle::equal_up_to_equivalence(missing, want).equal);
}

#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "common.hpp"

using namespace tpjoin;
using namespace tpjoin::testing;

namespace {

Schema one_str() { return {{"X", ColumnType::Str}}; }

std::vector<std::string> vars_of(const std::vector<TPTuple>& ts) {
  std::vector<std::string> out;
  for (const auto& t : ts) out.push_back(t.var);
  return out;
}

std::vector<TimePoint> lengths(const TPRelation& r) {
  std::vector<TimePoint> out;
  for (const auto& t : r.tuples()) out.push_back(t.interval.length());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(Interval, HalfOpenSemantics) {
  Interval iv{2, 8};
  EXPECT_TRUE(iv.contains(2));
  EXPECT_FALSE(iv.contains(8));
  EXPECT_TRUE(iv.overlaps({7, 10}));
  EXPECT_FALSE(iv.overlaps({8, 10}));
  EXPECT_EQ(intersect({2, 8}, {5, 12}), (Interval{5, 8}));
}

TEST(LoadRelation, ReadsRunningExample) {
  auto a = fig_a();
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a.column_names(), (std::vector<std::string>{"Name", "Loc"}));
  EXPECT_EQ(a[0].fact, F({"Ann", "ZAK"}));
  EXPECT_EQ(a[0].var, "a1");
  EXPECT_EQ(a[0].interval, (Interval{2, 8}));
  EXPECT_DOUBLE_EQ(a[0].p, 0.7);
  EXPECT_EQ(a[1].fact, F({"Jim", "WEN"}));
  EXPECT_EQ(a[1].interval, (Interval{7, 10}));
  EXPECT_DOUBLE_EQ(a[1].p, 0.8);
}

TEST(LoadRelation, EmptyDataSection) {
  std::istringstream in("X:str\tvar\tts\tte\tp\n");
  EXPECT_TRUE(parse_relation(in).empty());
}

TEST(LoadRelation, DuplicateFreeViolationNamesPair) {
  std::istringstream in("X:str\tvar\tts\tte\tp\nX\tv1\t1\t5\t0.5\nX\tv2\t3\t7\t0.5\n");
  try {
    parse_relation(in);
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find("duplicate-free"), std::string::npos);
    EXPECT_NE(msg.find("v1"), std::string::npos);
    EXPECT_NE(msg.find("v2"), std::string::npos);
  }
}

TEST(LoadRelation, AdjacentSameFactIsFine) {
  std::istringstream in("X:str\tvar\tts\tte\tp\nX\tv1\t1\t5\t0.5\nX\tv2\t5\t7\t0.5\n");
  EXPECT_EQ(parse_relation(in).size(), 2u);
}

TEST(LoadRelation, ParseErrors) {
  auto bad = [](const std::string& text) {
    std::istringstream in(text);
    EXPECT_THROW(parse_relation(in), ParseError) << text;
  };
  bad("");
  bad("X:str\tvar\tts\tte\n");
  bad("X:str\tvar\tts\tte\tp\nX\tv1\tone\t5\t0.5\n");
  bad("X:str\tvar\tts\tte\tp\nX\tv1\t1\t5\t0\n");
  bad("X:str\tvar\tts\tte\tp\nX\tv1\t1\t5\t1.5\n");
  bad("X:str\tvar\tts\tte\tp\nX\tv1\t5\t5\t0.5\n");
  bad("X:str\tvar\tts\tte\tp\nX\tv1\t1\t5\n");
  bad("X:int\tvar\tts\tte\tp\nabc\tv1\t1\t5\t0.5\n");
  bad("X:float\tvar\tts\tte\tp\n");
}

TEST(LoadRelation, DuplicateVariable) {
  std::istringstream in("X:str\tvar\tts\tte\tp\nA\tv1\t1\t5\t0.5\nB\tv1\t1\t5\t0.5\n");
  EXPECT_THROW(parse_relation(in), ValidationError);
}

TEST(LoadRelation, ExpectedColumnsChecked) {
  std::istringstream in("X:str\tvar\tts\tte\tp\n");
  EXPECT_THROW(parse_relation(in, std::vector<std::string>{"Y"}), ParseError);
}

TEST(LoadRelation, MissingFile) { EXPECT_THROW(load_relation("/nonexistent/file.tsv"), ParseError); }

TEST(LoadRelation, WriteReadRoundTrip) {
  auto b = fig_b();
  std::stringstream ss;
  write_relation(ss, b);
  auto back = parse_relation(ss);
  ASSERT_EQ(back.size(), b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    EXPECT_EQ(back[i].fact, b[i].fact);
    EXPECT_EQ(back[i].var, b[i].var);
    EXPECT_EQ(back[i].interval, b[i].interval);
    EXPECT_DOUBLE_EQ(back[i].p, b[i].p);
  }
}

TEST(Snapshot, RunningExample) {
  auto a = fig_a();
  auto b = fig_b();
  EXPECT_EQ(vars_of(snapshot(b, 5)), (std::vector<std::string>{"b2", "b3"}));
  EXPECT_TRUE(snapshot(b, 8).empty());
  EXPECT_EQ(vars_of(snapshot(a, 7)), (std::vector<std::string>{"a1", "a2"}));
}

TEST(Snapshot, SubsetOfValidTuples) {
  auto b = fig_b();
  for (TimePoint t = -1; t < 12; ++t) {
    for (const auto& tup : snapshot(b, t)) EXPECT_TRUE(tup.interval.contains(t));
  }
}

TEST(GenerateShifted, Deterministic) {
  auto a = fig_a();
  auto x = generate_shifted(a, 42, "g");
  auto y = generate_shifted(a, 42, "g");
  ASSERT_EQ(x.size(), y.size());
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(x[i].interval, y[i].interval);
}

TEST(GenerateShifted, PreservesLengthsAndFacts) {
  auto a = fig_a();
  auto g = generate_shifted(a, 42, "g");
  EXPECT_EQ(lengths(g), (std::vector<TimePoint>{3, 6}));
  EXPECT_EQ(g[0].var, "g1");
  EXPECT_EQ(g[0].fact, a[0].fact);

  auto big = generate_version_history(2000, 3, "v");
  auto shifted = generate_shifted(big, 9, "w");
  EXPECT_EQ(lengths(big), lengths(shifted));
}

TEST(GenerateShifted, StartsDrawnFromInput) {
  auto big = generate_version_history(500, 5, "v");
  auto shifted = generate_shifted(big, 1, "w");
  std::vector<TimePoint> starts;
  for (const auto& t : big.tuples()) starts.push_back(t.interval.ts);
  for (const auto& t : shifted.tuples()) {
    EXPECT_NE(std::find(starts.begin(), starts.end(), t.interval.ts), starts.end());
  }
}

TEST(GenerateShifted, Errors) {
  EXPECT_THROW(generate_shifted(TPRelation(one_str(), {}), 1, "g"), ContractViolation);
  // Starts {0,1}: placing v1 at 1 leaves no room for v2, so some seeds must give up.
  TPRelation tight(one_str(), {{F({"X"}), "v1", {0, 1}, 0.5}, {F({"X"}), "v2", {1, 10}, 0.5}});
  int failures = 0;
  for (std::uint64_t seed = 0; seed < 32; ++seed) {
    try {
      auto g = generate_shifted(tight, seed, "g", 1);
      EXPECT_EQ(g.size(), 2u);
    } catch (const Error&) {
      ++failures;
    }
  }
  EXPECT_GT(failures, 0);
  EXPECT_LT(failures, 32);
}

TEST(GenerateVersionHistory, DuplicateFree) {
  auto r = generate_version_history(3000, 11, "r");
  EXPECT_EQ(r.size(), 3000u);
  // Construction validates; an explicit O(n^2) scan on a slice as well.
  for (std::size_t i = 0; i < 300; ++i) {
    for (std::size_t j = i + 1; j < 300; ++j) {
      if (r[i].fact == r[j].fact) {
        EXPECT_FALSE(r[i].interval.overlaps(r[j].interval));
      }
    }
  }
}

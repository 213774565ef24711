#pragma once

#include <string>
#include <vector>

#include "tpjoin/tpjoin.hpp"

namespace tpjoin::testing {

inline std::string data_path(const std::string& name) { return std::string(TPJOIN_TEST_DATA) + "/" + name; }

// The running example: travellers and hotels, joined on location.
inline TPRelation fig_a() { return load_relation(data_path("a.tsv")); }
inline TPRelation fig_b() { return load_relation(data_path("b.tsv")); }
inline Theta loc_theta(const TPRelation& a, const TPRelation& b) {
  return parse_theta("l.Loc = r.Loc", a.schema(), b.schema());
}

inline Fact F(std::initializer_list<const char*> vals) {
  Fact f;
  for (const char* v : vals) f.emplace_back(std::string(v));
  return f;
}

inline Lineage L(const std::string& text) { return parse_lineage(text); }

inline OutputTuple row(std::optional<Fact> fr, std::optional<Fact> fs, const std::string& lam, TimePoint ts,
                       TimePoint te, double p) {
  return {std::move(fr), std::move(fs), L(lam), {ts, te}, p};
}

/// Expected left outer join of the running example.
inline std::vector<OutputTuple> expected_left_outer() {
  auto ann = F({"Ann", "ZAK"});
  return {
      row(ann, std::nullopt, "a1", 2, 4, 0.70),
      row(ann, F({"hotel1", "ZAK"}), "a1&b3", 4, 6, 0.49),
      row(ann, F({"hotel2", "ZAK"}), "a1&b2", 5, 8, 0.42),
      row(ann, std::nullopt, "a1&!b3", 4, 5, 0.21),
      row(ann, std::nullopt, "a1&!(b3|b2)", 5, 6, 0.084),
      row(ann, std::nullopt, "a1&!b2", 6, 8, 0.28),
      row(F({"Jim", "WEN"}), std::nullopt, "a2", 7, 10, 0.80),
  };
}

/// Expected anti join of the running example.
inline std::vector<OutputTuple> expected_anti() {
  auto ann = F({"Ann", "ZAK"});
  return {
      row(ann, std::nullopt, "a1", 2, 4, 0.7),
      row(ann, std::nullopt, "a1&!b3", 4, 5, 0.21),
      row(ann, std::nullopt, "a1&!(b3|b2)", 5, 6, 0.084),
      row(ann, std::nullopt, "a1&!b2", 6, 8, 0.28),
      row(F({"Jim", "WEN"}), std::nullopt, "a2", 7, 10, 0.8),
  };
}

/// Windows w1..w7 of the running example.
inline WindowSets expected_windows() {
  auto ann = F({"Ann", "ZAK"});
  auto a1 = L("a1");
  WindowSets ws;
  ws.unmatched = {Window::unmatched(ann, a1, {2, 4}), Window::unmatched(F({"Jim", "WEN"}), L("a2"), {7, 10})};
  ws.overlapping = {Window::overlapping(ann, F({"hotel1", "ZAK"}), a1, L("b3"), {4, 6}),
                    Window::overlapping(ann, F({"hotel2", "ZAK"}), a1, L("b2"), {5, 8})};
  ws.negating = {Window::negating(ann, a1, L("b3"), {4, 5}), Window::negating(ann, a1, L("b3|b2"), {5, 6}),
                 Window::negating(ann, a1, L("b2"), {6, 8})};
  return ws;
}

inline TPRelation relation(Schema schema, std::vector<TPTuple> tuples) {
  return TPRelation(std::move(schema), std::move(tuples));
}

}  // namespace tpjoin::testing

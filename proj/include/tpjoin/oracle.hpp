#pragma once

// Brute-force reference engine. Evaluates the probabilistic operator at every
// time point of the active domain and coalesces consecutive points whose
// facts are equal and whose lineages are equivalent. Shares no code with the
// window pipeline beyond the data model, theta and lineage evaluation.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <tuple>
#include <string>
#include <utility>
#include <vector>

#include "tpjoin/error.hpp"
#include "tpjoin/joins.hpp"
#include "tpjoin/lineage.hpp"
#include "tpjoin/model.hpp"
#include "tpjoin/theta.hpp"
#include "tpjoin/windows.hpp"

namespace tpjoin::oracle {

inline constexpr std::int64_t kDomainCap = 4096;
inline constexpr std::size_t kVariableCap = 20;

namespace detail {

inline Lineage disjunction(const std::vector<Lineage>& ls) {
  return ls.size() == 1 ? ls.front() : Lineage::disj(ls);
}

struct Point {
  TimePoint t;
  Lineage lam;
};

/// Coalesces per-point lineages of one output fact pair into maximal runs.
inline std::vector<std::pair<Interval, Lineage>> coalesce(const std::vector<Point>& points) {
  std::vector<std::pair<Interval, Lineage>> runs;
  for (const auto& pt : points) {
    if (!runs.empty() && runs.back().first.te == pt.t && equivalent(runs.back().second, pt.lam)) {
      runs.back().first.te = pt.t + 1;
    } else {
      runs.push_back({{pt.t, pt.t + 1}, pt.lam});
    }
  }
  return runs;
}

inline Interval active_domain(const TPRelation& r, const TPRelation& s) {
  TimePoint lo = std::numeric_limits<TimePoint>::max();
  TimePoint hi = std::numeric_limits<TimePoint>::min();
  for (const auto* rel : {&r, &s}) {
    for (const auto& t : rel->tuples()) {
      lo = std::min(lo, t.interval.ts);
      hi = std::max(hi, t.interval.te);
    }
  }
  if (lo > hi) return {0, 0};
  return {lo, hi};
}

}  // namespace detail

/// Disjunction of the lineages of tuples valid at t that satisfy pred, in
/// relation order; Null when there are none.
template <class Pred>
Lineage snapshot_lineage(const TPRelation& rel, const Pred& pred, TimePoint t) {
  std::vector<Lineage> hits;
  for (const auto& tup : rel.tuples()) {
    if (tup.interval.contains(t) && pred(tup.fact)) hits.push_back(Lineage::var(tup.var));
  }
  if (hits.empty()) return {};
  return detail::disjunction(hits);
}

/// Fact-equality form: disjunction over tuples carrying exactly fact f.
inline Lineage snapshot_lineage(const TPRelation& rel, const Fact& f, TimePoint t) {
  return snapshot_lineage(rel, [&](const Fact& g) { return g == f; }, t);
}

inline std::vector<OutputTuple> snapshot_join(const TPRelation& r, const TPRelation& s, const Theta& th, JoinOp op) {
  const Interval dom = detail::active_domain(r, s);
  if (dom.length() > kDomainCap) {
    throw CapExceeded("oracle: active time domain of " + std::to_string(dom.length()) + " points exceeds " +
                      std::to_string(kDomainCap));
  }
  std::set<std::string> all_vars;
  for (const auto* rel : {&r, &s}) {
    for (const auto& t : rel->tuples()) all_vars.insert(t.var);
  }
  if (all_vars.size() > kVariableCap) {
    throw CapExceeded("oracle: " + std::to_string(all_vars.size()) + " variables exceed " +
                      std::to_string(kVariableCap));
  }

  using Key = std::pair<std::optional<Fact>, std::optional<Fact>>;
  std::map<Key, std::vector<detail::Point>> series;
  auto emit = [&](std::optional<Fact> fr, std::optional<Fact> fs, TimePoint t, Lineage lam) {
    auto& pts = series[{std::move(fr), std::move(fs)}];
    if (!pts.empty() && pts.back().t == t) {
      throw ContractViolation("oracle: two outputs with the same facts at one time point (input not duplicate-free)");
    }
    pts.push_back({t, std::move(lam)});
  };

  const bool forward = op != JoinOp::RightOuter;
  const bool backward = op == JoinOp::RightOuter || op == JoinOp::FullOuter;
  const bool pairs_forward = op == JoinOp::LeftOuter || op == JoinOp::FullOuter;
  const bool pairs_backward = op == JoinOp::RightOuter;

  for (TimePoint t = dom.ts; t < dom.te; ++t) {
    auto rs = snapshot(r, t);
    auto ss = snapshot(s, t);
    if (forward) {
      for (const auto& rt : rs) {
        Lineage lr = Lineage::var(rt.var);
        std::vector<Lineage> matches;
        for (const auto& st : ss) {
          if (!th.eval(rt.fact, st.fact)) continue;
          matches.push_back(Lineage::var(st.var));
          if (pairs_forward) emit(rt.fact, st.fact, t, Lineage::conj({lr, matches.back()}));
        }
        if (matches.empty()) {
          emit(rt.fact, std::nullopt, t, lr);
        } else {
          emit(rt.fact, std::nullopt, t, Lineage::conj({lr, Lineage::negate(detail::disjunction(matches))}));
        }
      }
    }
    if (backward) {
      for (const auto& st : ss) {
        Lineage ls = Lineage::var(st.var);
        std::vector<Lineage> matches;
        for (const auto& rt : rs) {
          if (!th.eval(rt.fact, st.fact)) continue;
          matches.push_back(Lineage::var(rt.var));
          if (pairs_backward) emit(rt.fact, st.fact, t, Lineage::conj({matches.back(), ls}));
        }
        if (matches.empty()) {
          emit(std::nullopt, st.fact, t, ls);
        } else {
          emit(std::nullopt, st.fact, t, Lineage::conj({ls, Lineage::negate(detail::disjunction(matches))}));
        }
      }
    }
  }

  const ProbMap pm = prob_map(r, s);
  std::vector<OutputTuple> out;
  for (const auto& [key, pts] : series) {
    for (auto& [iv, lam] : detail::coalesce(pts)) {
      out.push_back({key.first, key.second, lam, iv, probability_enumerate(lam, pm)});
    }
  }
  sort_output(out);
  return out;
}

/// Window sets computed point by point from their declarative definitions.
inline WindowSets window_sets(const TPRelation& r, const TPRelation& s, const Theta& th) {
  WindowSets sets;
  for (const auto& rt : r.tuples()) {
    Lineage lr = Lineage::var(rt.var);
    for (const auto& st : s.tuples()) {
      if (rt.interval.overlaps(st.interval) && th.eval(rt.fact, st.fact)) {
        sets.overlapping.push_back(
            Window::overlapping(rt.fact, st.fact, lr, Lineage::var(st.var), intersect(rt.interval, st.interval)));
      }
    }
    auto pred = th.instantiate(Side::Left, rt.fact);
    std::vector<detail::Point> negated;
    std::vector<TimePoint> unmatched;
    for (TimePoint t = rt.interval.ts; t < rt.interval.te; ++t) {
      Lineage ls = snapshot_lineage(s, pred, t);
      if (ls.is_null()) {
        unmatched.push_back(t);
      } else {
        negated.push_back({t, ls});
      }
    }
    for (std::size_t i = 0; i < unmatched.size();) {
      std::size_t j = i + 1;
      while (j < unmatched.size() && unmatched[j] == unmatched[j - 1] + 1) ++j;
      sets.unmatched.push_back(Window::unmatched(rt.fact, lr, {unmatched[i], unmatched[j - 1] + 1}));
      i = j;
    }
    for (auto& [iv, ls] : detail::coalesce(negated)) sets.negating.push_back(Window::negating(rt.fact, lr, ls, iv));
  }
  return sets;
}

struct Diff {
  bool equal = true;
  std::string diff;
};

inline std::string describe(const OutputTuple& row) {
  std::ostringstream os;
  os << '(' << render_fact(row.f_r) << " | " << render_fact(row.f_s) << " | " << render_lineage(row.lam) << " | "
     << row.t << " | " << format_probability(row.p) << ')';
  return os.str();
}

/// Order-insensitive comparison: a bijection matching fact slots and
/// intervals exactly, lineages by equivalence and probabilities within tol.
inline Diff equal_up_to_equivalence(const std::vector<OutputTuple>& x, const std::vector<OutputTuple>& y,
                                          double tol = 1e-9) {
  using Key = std::tuple<std::optional<Fact>, std::optional<Fact>, Interval>;
  std::map<Key, std::vector<const OutputTuple*>> pending;
  for (const auto& row : y) pending[{row.f_r, row.f_s, row.t}].push_back(&row);

  Diff result;
  std::ostringstream diff;
  for (const auto& row : x) {
    auto it = pending.find({row.f_r, row.f_s, row.t});
    bool found = false;
    if (it != pending.end()) {
      auto& cands = it->second;
      for (auto c = cands.begin(); c != cands.end(); ++c) {
        if (equivalent((*c)->lam, row.lam) && std::abs((*c)->p - row.p) <= tol) {
          cands.erase(c);
          found = true;
          break;
        }
      }
    }
    if (!found) {
      result.equal = false;
      diff << "  only in left:  " << describe(row) << '\n';
    }
  }
  for (const auto& [_, cands] : pending) {
    for (const auto* c : cands) {
      result.equal = false;
      diff << "  only in right: " << describe(*c) << '\n';
    }
  }
  result.diff = diff.str();
  return result;
}

}  // namespace tpjoin::oracle

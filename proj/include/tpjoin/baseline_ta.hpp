#pragma once

// Temporal-alignment baseline. Align and Normalize replicate the tuples of one
// relation with adjusted intervals; the join result is then rebuilt by
// further conventional joins over the adjusted relations, one branch for
// overlapping+unmatched windows and one for negating+unmatched windows, with
// a duplicate-eliminating union on top.

#include <algorithm>
#include <chrono>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tpjoin/instrument.hpp"
#include "tpjoin/joins.hpp"
#include "tpjoin/lineage.hpp"
#include "tpjoin/model.hpp"
#include "tpjoin/overlap.hpp"
#include "tpjoin/theta.hpp"
#include "tpjoin/windows.hpp"

namespace tpjoin::ta {

struct AdjustedTuple {
  Fact fact;
  Lineage lam;
  Interval interval;  // adjusted
  Interval origin;    // interval of the source tuple
};

namespace detail {

/// Per r tuple, the intervals of its theta-matching overlapping s partners.
inline std::vector<std::vector<Interval>> partner_intervals(const TPRelation& r, const TPRelation& s,
                                                            const Theta& th, Counters* counters) {
  std::vector<std::vector<Interval>> out(r.size());
  for (auto [i, j] : overlap_pairs<TPTuple, TPTuple>(r.tuples(), s.tuples(), th, counters)) {
    out[i].push_back(s[j].interval);
  }
  return out;
}

/// Maximal sub-intervals of host not covered by any of the given intervals.
inline std::vector<Interval> uncovered(const Interval& host, std::vector<Interval> cover) {
  std::sort(cover.begin(), cover.end());
  std::vector<Interval> gaps;
  TimePoint pos = host.ts;
  for (const auto& c : cover) {
    if (c.ts > pos) gaps.push_back({pos, std::min(c.ts, host.te)});
    pos = std::max(pos, c.te);
  }
  if (pos < host.te) gaps.push_back({pos, host.te});
  return gaps;
}

}  // namespace detail

/// Splits each r tuple into the pairwise intersections with its matching s
/// tuples plus the residue where no matching s tuple is valid.
inline std::vector<AdjustedTuple> align(const TPRelation& r, const TPRelation& s, const Theta& th,
                                        Counters* counters = nullptr) {
  auto partners = detail::partner_intervals(r, s, th, counters);
  std::vector<AdjustedTuple> out;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const auto& rt = r[i];
    Lineage lam = Lineage::var(rt.var);
    auto& ps = partners[i];
    std::sort(ps.begin(), ps.end());
    for (const auto& iv : ps) out.push_back({rt.fact, lam, intersect(rt.interval, iv), rt.interval});
    for (const auto& gap : detail::uncovered(rt.interval, ps)) out.push_back({rt.fact, lam, gap, rt.interval});
  }
  return out;
}

/// Splits each r tuple at every start and end point of its matching s tuples.
inline std::vector<AdjustedTuple> normalize(const TPRelation& r, const TPRelation& s, const Theta& th,
                                            Counters* counters = nullptr) {
  auto partners = detail::partner_intervals(r, s, th, counters);
  std::vector<AdjustedTuple> out;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const auto& rt = r[i];
    Lineage lam = Lineage::var(rt.var);
    std::vector<TimePoint> cuts{rt.interval.ts, rt.interval.te};
    for (const auto& iv : partners[i]) {
      for (TimePoint p : {iv.ts, iv.te}) {
        if (rt.interval.ts < p && p < rt.interval.te) cuts.push_back(p);
      }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) out.push_back({rt.fact, lam, {cuts[k], cuts[k + 1]}, rt.interval});
  }
  return out;
}

namespace detail {

/// Align(r,s) left-joined with Align(s,r) on equal adjusted intervals: yields
/// the overlapping windows and the unmatched residue.
inline std::vector<Window> overlapping_branch(const TPRelation& r, const TPRelation& s, const Theta& th,
                                              Counters* counters) {
  auto a = align(r, s, th, counters);
  auto b = align(s, r, th.mirrored(), counters);

  auto started = std::chrono::steady_clock::now();
  std::map<Interval, std::vector<std::size_t>> by_interval;
  for (std::size_t j = 0; j < b.size(); ++j) by_interval[b[j].interval].push_back(j);
  std::vector<Window> out;
  for (const auto& at : a) {
    bool matched = false;
    if (auto it = by_interval.find(at.interval); it != by_interval.end()) {
      for (std::size_t j : it->second) {
        const auto& bt = b[j];
        if (!at.origin.overlaps(bt.origin) || intersect(at.origin, bt.origin) != at.interval) continue;
        if (!th.eval(at.fact, bt.fact)) continue;
        out.push_back(Window::overlapping(at.fact, bt.fact, at.lam, bt.lam, at.interval));
        matched = true;
      }
    }
    if (!matched) out.push_back(Window::unmatched(at.fact, at.lam, at.interval));
  }
  if (counters) {
    ++counters->join_execs;
    counters->join_time += std::chrono::steady_clock::now() - started;
  }
  return out;
}

/// Normalize(r,s) left-joined with Normalize(s,r); the s lineages valid over
/// each r segment are aggregated into one disjunction.
inline std::vector<Window> negating_branch(const TPRelation& r, const TPRelation& s, const Theta& th,
                                           Counters* counters) {
  auto nr = normalize(r, s, th, counters);
  auto ns = normalize(s, r, th.mirrored(), counters);
  auto pairs = overlap_pairs<AdjustedTuple, AdjustedTuple>(nr, ns, th, counters);
  std::sort(pairs.begin(), pairs.end(), [&](const auto& x, const auto& y) {
    if (x.first != y.first) return x.first < y.first;
    return std::tie(ns[x.second].origin.ts, ns[x.second].lam.name()) <
           std::tie(ns[y.second].origin.ts, ns[y.second].lam.name());
  });
  std::vector<Window> out;
  out.reserve(nr.size());
  std::size_t p = 0;
  for (std::size_t i = 0; i < nr.size(); ++i) {
    std::vector<Lineage> valid;
    std::set<std::string> seen;
    for (; p < pairs.size() && pairs[p].first == i; ++p) {
      const auto& lam = ns[pairs[p].second].lam;
      if (seen.insert(lam.name()).second) valid.push_back(lam);
    }
    if (valid.empty()) {
      out.push_back(Window::unmatched(nr[i].fact, nr[i].lam, nr[i].interval));
    } else {
      out.push_back(Window::negating(nr[i].fact, nr[i].lam, lor_all(valid), nr[i].interval));
    }
  }
  return out;
}

/// Union with duplicate elimination on (facts, interval, equivalent lineage).
inline void union_into(std::vector<OutputTuple>& acc, std::vector<OutputTuple> rows) {
  using Key = std::tuple<std::optional<Fact>, std::optional<Fact>, Interval>;
  std::map<Key, std::vector<std::size_t>> index;
  for (std::size_t i = 0; i < acc.size(); ++i) index[{acc[i].f_r, acc[i].f_s, acc[i].t}].push_back(i);
  for (auto& row : rows) {
    auto& slot = index[{row.f_r, row.f_s, row.t}];
    bool dup = std::any_of(slot.begin(), slot.end(), [&](std::size_t i) { return equivalent(acc[i].lam, row.lam); });
    if (dup) continue;
    slot.push_back(acc.size());
    acc.push_back(std::move(row));
  }
}

}  // namespace detail

inline std::vector<OutputTuple> ta_join(const TPRelation& r, const TPRelation& s, const Theta& th, JoinOp op,
                                        Counters* counters = nullptr) {
  StageClock clock(counters);
  std::vector<OutputTuple> out;
  {
    const ProbMap pm = prob_map(r, s);
    auto finalize_all = [&](const std::vector<Window>& ws, JoinOp fop, Orientation side) {
      std::vector<OutputTuple> rows;
      rows.reserve(ws.size());
      for (const auto& w : ws) {
        if (counters) ++counters->windows_emitted;
        if (auto o = finalize_window(w, fop, side, pm)) rows.push_back(std::move(*o));
      }
      return rows;
    };

    // One orientation; the overlapping branch only when overlaps are kept.
    auto run = [&](const TPRelation& a, const TPRelation& b, const Theta& t, JoinOp fop, Orientation side) {
      if (fop != JoinOp::Anti) {
        {
          auto uo = detail::overlapping_branch(a, b, t, counters);
          clock.lap("align");
          detail::union_into(out, finalize_all(uo, fop, side));
        }
        clock.lap("combine");
      }
      {
        auto nu = detail::negating_branch(a, b, t, counters);
        clock.lap("normalize");
        detail::union_into(out, finalize_all(nu, fop, side));
      }
      clock.lap("combine");
    };

    switch (op) {
      case JoinOp::Anti:
      case JoinOp::LeftOuter:
        run(r, s, th, op, Orientation::Forward);
        break;
      case JoinOp::RightOuter:
        run(s, r, th.mirrored(), op, Orientation::Reversed);
        break;
      case JoinOp::FullOuter:
        run(r, s, th, op, Orientation::Forward);
        run(s, r, th.mirrored(), JoinOp::Anti, Orientation::Reversed);
        break;
    }
  }
  sort_output(out);
  clock.lap("combine");
  return out;
}

}  // namespace tpjoin::ta

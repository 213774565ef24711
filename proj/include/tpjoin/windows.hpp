#pragma once

// Generalized lineage-aware temporal windows.
//
// overlap_join produces relation X (one record per overlapping theta-matching
// pair, plus an all-null record per r tuple without partners). LawaU sweeps X
// per r tuple and adds the unmatched windows; LawaN sweeps the result and adds
// the negating windows. Both are pull iterators over an ordered stream.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tpjoin/error.hpp"
#include "tpjoin/instrument.hpp"
#include "tpjoin/lineage.hpp"
#include "tpjoin/model.hpp"
#include "tpjoin/overlap.hpp"
#include "tpjoin/theta.hpp"

namespace tpjoin {

enum class WindowClass { Unmatched, Overlapping, Negating };

inline char class_letter(WindowClass c) {
  switch (c) {
    case WindowClass::Unmatched:
      return 'U';
    case WindowClass::Overlapping:
      return 'O';
    case WindowClass::Negating:
      return 'N';
  }
  return '?';
}

struct Window {
  Fact f_r;
  std::optional<Fact> f_s;
  Lineage lam_r;
  Lineage lam_s;
  Interval t;

  [[nodiscard]] WindowClass cls() const {
    if (f_s) return WindowClass::Overlapping;
    return lam_s.is_null() ? WindowClass::Unmatched : WindowClass::Negating;
  }

  static Window unmatched(Fact f_r, Lineage lam_r, Interval t) {
    return {std::move(f_r), std::nullopt, std::move(lam_r), {}, t};
  }
  static Window overlapping(Fact f_r, Fact f_s, Lineage lam_r, Lineage lam_s, Interval t) {
    return {std::move(f_r), std::move(f_s), std::move(lam_r), std::move(lam_s), t};
  }
  static Window negating(Fact f_r, Lineage lam_r, Lineage lam_s, Interval t) {
    return {std::move(f_r), std::nullopt, std::move(lam_r), std::move(lam_s), t};
  }
};

/// One row of the outer overlap join: (F_r, λ_r, F_s, λ_s, [O_s,O_e), [T_s,T_e)).
struct XRecord {
  Fact f_r;
  Lineage lam_r;
  std::optional<Fact> f_s;
  Lineage lam_s;
  std::optional<Interval> o;
  Interval host;
};

/// r left-outer-joined with s on theta and interval overlap, sorted by
/// (F_r, host, O_s) with null O first and the s variable as tie-breaker.
inline std::vector<XRecord> overlap_join(const TPRelation& r, const TPRelation& s, const Theta& th,
                                         Counters* counters = nullptr) {
  auto pairs = overlap_pairs<TPTuple, TPTuple>(r.tuples(), s.tuples(), th, counters);

  std::vector<std::size_t> r_order(r.size());
  for (std::size_t i = 0; i < r_order.size(); ++i) r_order[i] = i;
  std::sort(r_order.begin(), r_order.end(), [&](std::size_t a, std::size_t b) {
    if (r[a].fact != r[b].fact) return r[a].fact < r[b].fact;
    return r[a].interval < r[b].interval;
  });
  std::vector<std::size_t> rank(r.size());
  for (std::size_t k = 0; k < r_order.size(); ++k) rank[r_order[k]] = k;

  std::sort(pairs.begin(), pairs.end(), [&](const auto& a, const auto& b) {
    if (rank[a.first] != rank[b.first]) return rank[a.first] < rank[b.first];
    auto oa = std::max(r[a.first].interval.ts, s[a.second].interval.ts);
    auto ob = std::max(r[b.first].interval.ts, s[b.second].interval.ts);
    if (oa != ob) return oa < ob;
    return s[a.second].var < s[b.second].var;
  });

  std::vector<Lineage> r_vars, s_vars;
  r_vars.reserve(r.size());
  s_vars.reserve(s.size());
  for (const auto& t : r.tuples()) r_vars.push_back(Lineage::var(t.var));
  for (const auto& t : s.tuples()) s_vars.push_back(Lineage::var(t.var));

  std::vector<XRecord> x;
  x.reserve(pairs.size() + r.size());
  std::size_t p = 0;
  for (std::size_t ri : r_order) {
    const auto& rt = r[ri];
    if (p == pairs.size() || pairs[p].first != ri) {
      x.push_back({rt.fact, r_vars[ri], std::nullopt, {}, std::nullopt, rt.interval});
      continue;
    }
    for (; p < pairs.size() && pairs[p].first == ri; ++p) {
      const auto& st = s[pairs[p].second];
      x.push_back({rt.fact, r_vars[ri], st.fact, s_vars[pairs[p].second], intersect(rt.interval, st.interval),
                   rt.interval});
    }
  }
  return x;
}

/// Incremental sweep adding unmatched windows to X. Each call to next()
/// returns the following window of the current r tuple, left to right:
/// overlapping windows are copied from X and every maximal sub-interval of the
/// host not covered by an overlap becomes an unmatched window.
class LawaU {
 public:
  explicit LawaU(std::span<const XRecord> x) : x_(x) {}

  std::optional<Window> next() {
    while (true) {
      if (!in_group_) {
        if (cursor_ == x_.size()) return std::nullopt;
        const XRecord& g = x_[cursor_];
        check_group_order(g);
        group_ = &g;
        if (!g.o) {
          // Case 5: r tuple without partners.
          ++cursor_;
          if (cursor_ < x_.size() && same_group(x_[cursor_])) {
            throw ContractViolation("LAWA_U: null record shares its group with other records");
          }
          return Window::unmatched(g.f_r, g.lam_r, g.host);
        }
        in_group_ = true;
        prev_wind_te_ = g.host.ts;
        last_os_ = g.host.ts;
      }

      if (cursor_ < x_.size() && same_group(x_[cursor_])) {
        const XRecord& rec = x_[cursor_];
        if (!rec.o || rec.o->ts < last_os_ || rec.o->ts < rec.host.ts || rec.o->te > rec.host.te) {
          throw ContractViolation("LAWA_U: input is not sorted by overlap start within its group");
        }
        last_os_ = rec.o->ts;
        if (rec.o->ts > prev_wind_te_) {
          // Cases 2 and 3: gap before the next overlap.
          Interval gap{prev_wind_te_, rec.o->ts};
          prev_wind_te_ = rec.o->ts;
          return Window::unmatched(rec.f_r, rec.lam_r, gap);
        }
        // Case 1.
        ++cursor_;
        prev_wind_te_ = std::max(prev_wind_te_, rec.o->te);
        return Window::overlapping(rec.f_r, *rec.f_s, rec.lam_r, rec.lam_s, *rec.o);
      }

      // Case 4: group exhausted; emit the trailing gap if any.
      in_group_ = false;
      TimePoint end = group_->host.te;
#ifdef TPJOIN_FAULT_LAWA_U_OFF_BY_ONE
      end -= 1;
#endif
      if (prev_wind_te_ < end) return Window::unmatched(group_->f_r, group_->lam_r, {prev_wind_te_, end});
    }
  }

 private:
  bool same_group(const XRecord& rec) const {
    return rec.host == group_->host && rec.lam_r == group_->lam_r && rec.f_r == group_->f_r;
  }

  void check_group_order(const XRecord& g) {
    if (prev_group_) {
      const XRecord& p = *prev_group_;
      bool ascending = p.f_r < g.f_r || (p.f_r == g.f_r && p.host < g.host);
      if (!ascending) throw ContractViolation("LAWA_U: input is not grouped by (F_r, host interval)");
    }
    prev_group_ = &g;
  }

  std::span<const XRecord> x_;
  std::size_t cursor_ = 0;
  bool in_group_ = false;
  const XRecord* group_ = nullptr;
  const XRecord* prev_group_ = nullptr;
  TimePoint prev_wind_te_ = -1;
  TimePoint last_os_ = 0;
};

/// Incremental sweep copying Y through and adding negating windows. While a
/// group of overlapping windows is open, the priority queue holds the end
/// points and s-lineages of the overlaps currently valid; a negating window
/// closes whenever one of them expires or a new overlap starts.
class LawaN {
 public:
  explicit LawaN(std::span<const Window> y, Counters* counters = nullptr) : y_(y), counters_(counters) {}

  std::optional<Window> next() {
    auto out = advance();
    if (out && counters_) ++counters_->windows_emitted;
    return out;
  }

 private:
  struct Entry {
    TimePoint te;
    std::uint64_t seq;
    bool operator>(const Entry& o) const { return te != o.te ? te > o.te : seq > o.seq; }
  };

  std::optional<Window> advance() {
    if (neg_) {
      const Window* w = cursor_ < y_.size() ? &y_[cursor_] : nullptr;
      bool same = w && w->cls() == WindowClass::Overlapping && w->lam_r == lam_r_ && w->f_r == f_r_;
      if (same && w->t.ts <= prev_wind_te_) {
        if (w->t.ts < prev_wind_te_) throw ContractViolation("LAWA_N: overlapping windows out of order");
        return copy_through();
      }
      TimePoint wind_te = pq_.top().te;
      if (same) wind_te = std::min(wind_te, w->t.ts);
      std::vector<Lineage> valid;
      valid.reserve(active_.size());
      for (const auto& [_, lam] : active_) valid.push_back(lam);
      Window out = Window::negating(f_r_, lam_r_, lor_all(valid), {prev_wind_te_, wind_te});
      while (!pq_.empty() && pq_.top().te <= wind_te) {
        active_.erase(pq_.top().seq);
        pq_.pop();
      }
      prev_wind_te_ = wind_te;
      if (pq_.empty()) neg_ = false;
      return out;
    }
    if (cursor_ == y_.size()) return std::nullopt;
    return copy_through();
  }

  Window copy_through() {
    const Window& w = y_[cursor_++];
    check_order(w);
    if (w.cls() == WindowClass::Overlapping) {
      if (!neg_) {
        neg_ = true;
        f_r_ = w.f_r;
        lam_r_ = w.lam_r;
        prev_wind_te_ = w.t.ts;
      }
      pq_.push({w.t.te, seq_});
      active_.emplace(seq_, w.lam_s);
      ++seq_;
    }
    return w;
  }

  void check_order(const Window& w) {
    if (w.cls() == WindowClass::Negating) throw ContractViolation("LAWA_N: input already contains negating windows");
    if (prev_ && (w.f_r < prev_->f_r || (w.f_r == prev_->f_r && w.t.ts < prev_->t.ts))) {
      throw ContractViolation("LAWA_N: input is not ordered by (F_r, window start)");
    }
    prev_ = &w;
  }

  std::span<const Window> y_;
  Counters* counters_;
  std::size_t cursor_ = 0;
  const Window* prev_ = nullptr;

  // Sweep status.
  bool neg_ = false;
  TimePoint prev_wind_te_ = -1;
  Fact f_r_;
  Lineage lam_r_;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq_;
  std::map<std::uint64_t, Lineage> active_;
  std::uint64_t seq_ = 0;
};

inline std::vector<Window> lawa_u_stream(std::span<const XRecord> x) {
  std::vector<Window> y;
  LawaU sweep(x);
  while (auto w = sweep.next()) y.push_back(std::move(*w));
  return y;
}

inline std::vector<Window> lawa_n_stream(std::span<const Window> y, Counters* counters = nullptr) {
  std::vector<Window> out;
  LawaN sweep(y, counters);
  while (auto w = sweep.next()) out.push_back(std::move(*w));
  return out;
}

/// Full window pipeline: overlap join, LAWA_U, LAWA_N.
inline std::vector<Window> window_pipeline(const TPRelation& r, const TPRelation& s, const Theta& th,
                                           Counters* counters = nullptr) {
  auto x = overlap_join(r, s, th, counters);
  auto y = lawa_u_stream(x);
  return lawa_n_stream(y, counters);
}

struct WindowSets {
  std::vector<Window> unmatched;
  std::vector<Window> overlapping;
  std::vector<Window> negating;
};

inline WindowSets window_sets(const TPRelation& r, const TPRelation& s, const Theta& th,
                              Counters* counters = nullptr) {
  WindowSets sets;
  for (auto& w : window_pipeline(r, s, th, counters)) {
    switch (w.cls()) {
      case WindowClass::Unmatched:
        sets.unmatched.push_back(std::move(w));
        break;
      case WindowClass::Overlapping:
        sets.overlapping.push_back(std::move(w));
        break;
      case WindowClass::Negating:
        sets.negating.push_back(std::move(w));
        break;
    }
  }
  return sets;
}

/// TSV dump: class, f_r, f_s, lam_r, lam_s, ts, te.
inline void write_windows(std::ostream& os, std::span<const Window> ws) {
  os << "class\tf_r\tf_s\tlam_r\tlam_s\tts\tte\n";
  for (const auto& w : ws) {
    os << class_letter(w.cls()) << '\t' << render_fact(w.f_r) << '\t' << render_fact(w.f_s) << '\t'
       << render_lineage(w.lam_r) << '\t' << render_lineage(w.lam_s) << '\t' << w.t.ts << '\t' << w.t.te << '\n';
  }
}

}  // namespace tpjoin

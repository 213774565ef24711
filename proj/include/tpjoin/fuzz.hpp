#pragma once

// Differential fuzzing: random small instances checked against the oracle,
// the alignment baseline and the window-set laws.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tpjoin/baseline_ta.hpp"
#include "tpjoin/joins.hpp"
#include "tpjoin/lineage.hpp"
#include "tpjoin/model.hpp"
#include "tpjoin/oracle.hpp"
#include "tpjoin/theta.hpp"
#include "tpjoin/windows.hpp"

namespace tpjoin::fuzz {

inline constexpr TimePoint kDomain = 16;
inline constexpr int kMaxTuples = 6;
inline constexpr int kMaxFacts = 2;

struct Instance {
  std::uint64_t seed = 0;
  TPRelation r;
  TPRelation s;
  std::string theta;
};

namespace detail {

inline TPRelation random_relation(std::mt19937_64& rng, const std::string& name_col, const std::string& prefix) {
  static constexpr double kProbs[] = {0.3, 0.5, 0.7, 0.9};
  std::uniform_int_distribution<int> n_facts(1, kMaxFacts);
  std::uniform_int_distribution<int> n_tuples(0, kMaxTuples);
  std::uniform_int_distribution<std::int64_t> key(0, 2);
  std::uniform_int_distribution<TimePoint> start(0, kDomain - 1);
  std::uniform_int_distribution<TimePoint> len(1, 8);
  std::uniform_int_distribution<int> prob(0, 3);

  std::vector<Fact> facts;
  int nf = n_facts(rng);
  for (int i = 0; i < nf; ++i) facts.push_back({prefix + "f" + std::to_string(i), key(rng)});
  std::uniform_int_distribution<std::size_t> pick(0, facts.size() - 1);

  std::vector<TPTuple> tuples;
  int n = n_tuples(rng);
  for (int i = 0; i < n; ++i) {
    const Fact& f = facts[pick(rng)];
    // A few tries to find a spot that keeps the relation duplicate-free.
    for (int attempt = 0; attempt < 8; ++attempt) {
      TimePoint ts = start(rng);
      Interval iv{ts, std::min(kDomain, ts + len(rng))};
      bool clash = std::any_of(tuples.begin(), tuples.end(),
                               [&](const TPTuple& t) { return t.fact == f && t.interval.overlaps(iv); });
      if (clash) continue;
      tuples.push_back({f, prefix + std::to_string(tuples.size() + 1), iv, kProbs[prob(rng)]});
      break;
    }
  }
  return TPRelation({{name_col, ColumnType::Str}, {"k", ColumnType::Int}}, std::move(tuples));
}

}  // namespace detail

inline Instance generate(std::uint64_t seed) {
  static const char* kThetas[] = {"true", "l.k = r.k", "l.k != r.k", "l.k < r.k"};
  std::mt19937_64 rng(seed);
  Instance inst;
  inst.seed = seed;
  inst.r = detail::random_relation(rng, "A", "r");
  inst.s = detail::random_relation(rng, "B", "s");
  inst.theta = kThetas[std::uniform_int_distribution<int>(0, 3)(rng)];
  return inst;
}

inline std::string dump(const Instance& inst) {
  std::ostringstream os;
  os << "seed " << inst.seed << "\ntheta " << inst.theta << "\n-- left\n";
  write_relation(os, inst.r);
  os << "-- right\n";
  write_relation(os, inst.s);
  return os.str();
}

namespace detail {

inline bool same_window(const Window& a, const Window& b) {
  return a.f_r == b.f_r && a.f_s == b.f_s && a.t == b.t && a.lam_r == b.lam_r && equivalent(a.lam_s, b.lam_s);
}

inline std::string describe(const Window& w) {
  std::ostringstream os;
  os << class_letter(w.cls()) << ' ' << render_fact(w.f_r) << " | " << render_fact(w.f_s) << " | "
     << render_lineage(w.lam_r) << " | " << render_lineage(w.lam_s) << " | " << w.t;
  return os.str();
}

/// Multiset comparison; appends a report to err on mismatch.
inline bool same_windows(std::vector<Window> a, std::vector<Window> b, const std::string& what, std::string& err) {
  std::ostringstream os;
  for (const auto& w : a) {
    auto it = std::find_if(b.begin(), b.end(), [&](const Window& v) { return same_window(w, v); });
    if (it == b.end()) {
      os << "  only in engine: " << describe(w) << '\n';
    } else {
      b.erase(it);
    }
  }
  for (const auto& w : b) os << "  only in oracle: " << describe(w) << '\n';
  if (os.str().empty()) return true;
  err += what + " windows differ:\n" + os.str();
  return false;
}

/// Point-wise window laws for every r tuple: unmatched and negating windows
/// partition the host, overlapping windows cover exactly the negating part,
/// and consecutive windows of one class are never mergeable.
inline bool window_laws(const TPRelation& r, const WindowSets& ws, std::string& err) {
  std::ostringstream os;
  for (const auto& rt : r.tuples()) {
    auto mine = [&](const Window& w) { return w.lam_r.is_leaf() && w.lam_r.name() == rt.var; };
    std::vector<const Window*> u, o, n;
    for (const auto& w : ws.unmatched) if (mine(w)) u.push_back(&w);
    for (const auto& w : ws.overlapping) if (mine(w)) o.push_back(&w);
    for (const auto& w : ws.negating) if (mine(w)) n.push_back(&w);

    for (const auto* group : {&u, &o, &n}) {
      for (const auto* w : *group) {
        if (w->t.ts < rt.interval.ts || w->t.te > rt.interval.te || w->t.ts >= w->t.te) {
          os << "  window outside host " << rt.var << ": " << describe(*w) << '\n';
        }
      }
    }
    for (TimePoint t = rt.interval.ts; t < rt.interval.te; ++t) {
      auto count = [&](const std::vector<const Window*>& g) {
        return std::count_if(g.begin(), g.end(), [&](const Window* w) { return w->t.contains(t); });
      };
      auto cu = count(u), co = count(o), cn = count(n);
      if (cu + cn != 1) os << "  " << rt.var << " t=" << t << ": " << cu << " unmatched + " << cn << " negating\n";
      if ((co > 0) != (cn > 0)) os << "  " << rt.var << " t=" << t << ": overlap union != negating union\n";
    }
    auto by_start = [](const Window* a, const Window* b) { return a->t < b->t; };
    std::sort(u.begin(), u.end(), by_start);
    std::sort(n.begin(), n.end(), by_start);
    for (std::size_t i = 1; i < u.size(); ++i) {
      if (u[i - 1]->t.te == u[i]->t.ts) os << "  adjacent unmatched windows for " << rt.var << '\n';
    }
    for (std::size_t i = 1; i < n.size(); ++i) {
      if (n[i - 1]->t.te == n[i]->t.ts && equivalent(n[i - 1]->lam_s, n[i]->lam_s)) {
        os << "  mergeable negating windows for " << rt.var << " at " << n[i]->t.ts << '\n';
      }
    }
  }
  if (os.str().empty()) return true;
  err += "window law violations:\n" + os.str();
  return false;
}

}  // namespace detail

/// NJ and TA against the oracle for all four operators.
inline std::optional<std::string> check_joins(const Instance& inst) {
  std::string err;
  Theta th = parse_theta(inst.theta, inst.r.schema(), inst.s.schema());
  for (JoinOp op : {JoinOp::Anti, JoinOp::LeftOuter, JoinOp::RightOuter, JoinOp::FullOuter}) {
    auto expect = oracle::snapshot_join(inst.r, inst.s, th, op);
    auto nj = oracle::equal_up_to_equivalence(negation_join(inst.r, inst.s, th, op), expect);
    if (!nj.equal) err += std::string("nj vs oracle (") + to_string(op) + "):\n" + nj.diff;
    auto ta = oracle::equal_up_to_equivalence(ta::ta_join(inst.r, inst.s, th, op), expect);
    if (!ta.equal) err += std::string("ta vs oracle (") + to_string(op) + "):\n" + ta.diff;
  }
  if (err.empty()) return std::nullopt;
  return err;
}

/// Window sets against their point-wise definitions, plus the window laws.
inline std::optional<std::string> check_windows(const Instance& inst) {
  std::string err;
  Theta th = parse_theta(inst.theta, inst.r.schema(), inst.s.schema());
  auto got = window_sets(inst.r, inst.s, th);
  auto want = oracle::window_sets(inst.r, inst.s, th);
  detail::same_windows(got.unmatched, want.unmatched, "unmatched", err);
  detail::same_windows(got.overlapping, want.overlapping, "overlapping", err);
  detail::same_windows(got.negating, want.negating, "negating", err);
  detail::window_laws(inst.r, got, err);

  // W_O symmetry: swapping the inputs swaps the slots of overlapping windows.
  auto back = window_sets(inst.s, inst.r, th.mirrored());
  std::vector<Window> swapped;
  for (const auto& w : back.overlapping) swapped.push_back(Window::overlapping(*w.f_s, w.f_r, w.lam_s, w.lam_r, w.t));
  detail::same_windows(got.overlapping, swapped, "mirrored overlapping", err);

  if (err.empty()) return std::nullopt;
  return err;
}

inline std::optional<std::string> check(const Instance& inst) {
  auto a = check_joins(inst);
  auto b = check_windows(inst);
  if (!a && !b) return std::nullopt;
  return a.value_or("") + b.value_or("");
}

struct Report {
  std::size_t instances = 0;
  std::size_t failures = 0;
  std::string first_failure;  // check report plus reproducer
};

/// Instance i uses seed `seed + i`, so a failure is reproducible on its own.
inline Report run(std::size_t instances, std::uint64_t seed) {
  Report rep;
  for (std::size_t i = 0; i < instances; ++i) {
    Instance inst = generate(seed + i);
    auto fail = check(inst);
    ++rep.instances;
    if (!fail) continue;
    if (rep.failures++ == 0) rep.first_failure = *fail + "reproducer:\n" + dump(inst);
  }
  return rep;
}

}  // namespace tpjoin::fuzz

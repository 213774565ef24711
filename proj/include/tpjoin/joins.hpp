#pragma once

// TP anti, left outer, right outer and full outer joins computed from the
// window pipeline: every window is finalized into one output tuple with the
// concatenation function of its class.

#include <algorithm>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tpjoin/error.hpp"
#include "tpjoin/instrument.hpp"
#include "tpjoin/lineage.hpp"
#include "tpjoin/model.hpp"
#include "tpjoin/theta.hpp"
#include "tpjoin/windows.hpp"

namespace tpjoin {

enum class JoinOp { Anti, LeftOuter, RightOuter, FullOuter };

/// Which way round the window pipeline ran: reversed means r and s swapped.
enum class Orientation { Forward, Reversed };

inline JoinOp parse_join_op(std::string_view s) {
  if (s == "anti") return JoinOp::Anti;
  if (s == "left") return JoinOp::LeftOuter;
  if (s == "right") return JoinOp::RightOuter;
  if (s == "full") return JoinOp::FullOuter;
  throw ParseError("unknown join op '" + std::string(s) + "' (expected anti|left|right|full)");
}

inline const char* to_string(JoinOp op) {
  switch (op) {
    case JoinOp::Anti:
      return "anti";
    case JoinOp::LeftOuter:
      return "left";
    case JoinOp::RightOuter:
      return "right";
    case JoinOp::FullOuter:
      return "full";
  }
  return "?";
}

struct OutputTuple {
  std::optional<Fact> f_r;
  std::optional<Fact> f_s;
  Lineage lam;
  Interval t;
  double p = 0.0;
};

inline ProbMap prob_map(const TPRelation& r, const TPRelation& s) {
  ProbMap pm;
  for (const auto* rel : {&r, &s}) {
    for (const auto& t : rel->tuples()) pm.emplace(t.var, t.p);
  }
  return pm;
}

/// Output lineage per window class: unmatched passes λ_r, negating uses
/// land_not, overlapping uses land. Overlapping windows are dropped for anti
/// joins. A reversed pipeline puts the window's r side into the s slot.
inline std::optional<OutputTuple> finalize_window(const Window& w, JoinOp op, Orientation side, const ProbMap& pm) {
  OutputTuple out;
  std::optional<Fact> own = w.f_r;
  std::optional<Fact> other;
  switch (w.cls()) {
    case WindowClass::Unmatched:
      out.lam = w.lam_r;
      break;
    case WindowClass::Negating:
      out.lam = land_not(w.lam_r, w.lam_s);
      break;
    case WindowClass::Overlapping:
      if (op == JoinOp::Anti) return std::nullopt;
      // left relation's variable first either way
      out.lam = side == Orientation::Forward ? land(w.lam_r, w.lam_s) : land(w.lam_s, w.lam_r);
      other = w.f_s;
      break;
  }
  if (side == Orientation::Forward) {
    out.f_r = std::move(own);
    out.f_s = std::move(other);
  } else {
    out.f_r = std::move(other);
    out.f_s = std::move(own);
  }
  out.t = w.t;
  out.p = probability(out.lam, pm);
  return out;
}

inline bool output_less(const OutputTuple& a, const OutputTuple& b) {
  if (a.f_r != b.f_r) return a.f_r < b.f_r;
  if (a.f_s != b.f_s) return a.f_s < b.f_s;
  return a.t < b.t;
}

/// Deterministic order (f_r, f_s, ts, te), null fact slots first.
inline void sort_output(std::vector<OutputTuple>& rows) { std::stable_sort(rows.begin(), rows.end(), output_less); }

inline std::vector<OutputTuple> negation_join(const TPRelation& r, const TPRelation& s, const Theta& th, JoinOp op,
                                              Counters* counters = nullptr) {
  StageClock clock(counters);
  std::vector<OutputTuple> out;
  {
    const ProbMap pm = prob_map(r, s);
    // Intermediates are released before each lap so stage times add up.
    auto run = [&](const TPRelation& a, const TPRelation& b, const Theta& t, JoinOp fop, Orientation side) {
      auto x = overlap_join(a, b, t, counters);
      clock.lap("overlap_join");
      auto y = lawa_u_stream(x);
      x = {};
      clock.lap("lawa_u");
      LawaN sweep(y, counters);
      while (auto w = sweep.next()) {
        if (auto o = finalize_window(*w, fop, side, pm)) out.push_back(std::move(*o));
      }
      y = {};
      clock.lap("lawa_n");
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
  clock.lap("lawa_n");
  return out;
}

// Output TSV ------------------------------------------------------------------

inline std::string format_probability(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", p);
  return buf;
}

/// Header `l_<cols> r_<cols> lineage ts te p`; anti joins carry only the left
/// columns. Null fact slots print `-` in every column.
inline void write_output(std::ostream& os, const Schema& left, const Schema& right, JoinOp op,
                         const std::vector<OutputTuple>& rows) {
  const bool with_right = op != JoinOp::Anti;
  for (const auto& c : left) os << "l_" << c.name << '\t';
  if (with_right) {
    for (const auto& c : right) os << "r_" << c.name << '\t';
  }
  os << "lineage\tts\tte\tp\n";
  auto slot = [&](const std::optional<Fact>& f, std::size_t width) {
    for (std::size_t i = 0; i < width; ++i) os << (f ? to_string((*f)[i]) : std::string("-")) << '\t';
  };
  for (const auto& row : rows) {
    slot(row.f_r, left.size());
    if (with_right) slot(row.f_s, right.size());
    os << render_lineage(row.lam) << '\t' << row.t.ts << '\t' << row.t.te << '\t' << format_probability(row.p)
       << '\n';
  }
}

/// Reads an output TSV back. Attribute values come back as strings; a slot
/// whose cells are all `-` is null.
inline std::vector<OutputTuple> read_output(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("output: missing header");
  auto head = detail::split(line, '\t');
  if (head.size() < 4) throw ParseError("output: malformed header");
  std::size_t left = 0, right = 0;
  for (std::size_t i = 0; i + 4 < head.size(); ++i) {
    if (head[i].starts_with("l_")) {
      ++left;
    } else if (head[i].starts_with("r_")) {
      ++right;
    } else {
      throw ParseError("output: unexpected column '" + head[i] + "'");
    }
  }
  std::vector<OutputTuple> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto cells = detail::split(line, '\t');
    if (cells.size() != head.size()) throw ParseError("output line " + std::to_string(lineno) + ": wrong arity");
    auto slot = [&](std::size_t from, std::size_t width) -> std::optional<Fact> {
      if (width == 0) return std::nullopt;
      bool all_dash = true;
      Fact f;
      for (std::size_t i = from; i < from + width; ++i) {
        all_dash = all_dash && cells[i] == "-";
        f.emplace_back(cells[i]);
      }
      if (all_dash) return std::nullopt;
      return f;
    };
    OutputTuple row;
    row.f_r = slot(0, left);
    row.f_s = slot(left, right);
    std::size_t base = left + right;
    row.lam = parse_lineage(cells[base]);
    auto ts = detail::parse_int(cells[base + 1]);
    auto te = detail::parse_int(cells[base + 2]);
    auto p = detail::parse_double(cells[base + 3]);
    if (!ts || !te || !p) throw ParseError("output line " + std::to_string(lineno) + ": bad number");
    row.t = {*ts, *te};
    row.p = *p;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace tpjoin

#pragma once

// TP relations: facts, half-open intervals, tuples, TSV ingestion,
// snapshots and synthetic data generation.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "tpjoin/error.hpp"

namespace tpjoin {

using TimePoint = std::int64_t;

struct Interval {
  TimePoint ts = 0;
  TimePoint te = 0;

  [[nodiscard]] bool contains(TimePoint t) const { return ts <= t && t < te; }
  [[nodiscard]] bool overlaps(const Interval& o) const { return ts < o.te && o.ts < te; }
  [[nodiscard]] TimePoint length() const { return te - ts; }

  friend auto operator<=>(const Interval&, const Interval&) = default;
};

/// Intersection of two overlapping intervals; callers check overlaps() first.
inline Interval intersect(const Interval& a, const Interval& b) {
  return {std::max(a.ts, b.ts), std::min(a.te, b.te)};
}

inline std::ostream& operator<<(std::ostream& os, const Interval& iv) {
  return os << '[' << iv.ts << ',' << iv.te << ')';
}

using Value = std::variant<std::int64_t, std::string>;
using Fact = std::vector<Value>;

enum class ColumnType { Str, Int };

struct Column {
  std::string name;
  ColumnType type = ColumnType::Str;

  friend bool operator==(const Column&, const Column&) = default;
};

using Schema = std::vector<Column>;

inline std::string to_string(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  return std::get<std::string>(v);
}

/// Comma-joined rendering used by the window dump and diff reports.
inline std::string render_fact(const Fact& f) {
  std::string out;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i) out += ',';
    out += to_string(f[i]);
  }
  return out;
}

inline std::string render_fact(const std::optional<Fact>& f) {
  return f ? render_fact(*f) : std::string("-");
}

struct FactHash {
  std::size_t operator()(const Fact& f) const noexcept {
    std::size_t h = 0x9e3779b97f4a7c15ULL;
    for (const auto& v : f) {
      h ^= std::hash<Value>{}(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

struct TPTuple {
  Fact fact;
  std::string var;
  Interval interval;
  double p = 1.0;
};

/// Duplicate-free set of TP tuples over one schema. Immutable once built;
/// the constructor enforces every invariant.
class TPRelation {
 public:
  TPRelation() = default;
  TPRelation(Schema schema, std::vector<TPTuple> tuples)
      : schema_(std::move(schema)), tuples_(std::move(tuples)) {
    validate();
  }

  [[nodiscard]] const Schema& schema() const { return schema_; }
  [[nodiscard]] const std::vector<TPTuple>& tuples() const { return tuples_; }
  [[nodiscard]] std::size_t size() const { return tuples_.size(); }
  [[nodiscard]] bool empty() const { return tuples_.empty(); }
  const TPTuple& operator[](std::size_t i) const { return tuples_[i]; }

  [[nodiscard]] std::vector<std::string> column_names() const {
    std::vector<std::string> names;
    for (const auto& c : schema_) names.push_back(c.name);
    return names;
  }

 private:
  void validate() const;

  Schema schema_;
  std::vector<TPTuple> tuples_;
};

namespace detail {

inline bool is_ident(std::string_view s) {
  if (s.empty()) return false;
  auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (!alpha(s[0])) return false;
  return std::all_of(s.begin() + 1, s.end(), [&](char c) { return alpha(c) || digit(c); });
}

inline std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      return out;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::optional<std::int64_t> parse_int(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::size_t i = 0;
  bool neg = false;
  if (s[0] == '-' || s[0] == '+') {
    neg = s[0] == '-';
    i = 1;
    if (s.size() == 1) return std::nullopt;
  }
  std::int64_t v = 0;
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') return std::nullopt;
    int d = s[i] - '0';
    if (v > (INT64_MAX - d) / 10) return std::nullopt;
    v = v * 10 + d;
  }
  return neg ? -v : v;
}

inline std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  std::size_t used = 0;
  try {
    double d = std::stod(s, &used);
    if (used != s.size()) return std::nullopt;
    return d;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace detail

inline void TPRelation::validate() const {
  std::unordered_set<std::string> names;
  for (const auto& c : schema_) {
    if (!names.insert(c.name).second) throw ValidationError("duplicate column name '" + c.name + "'");
  }
  std::unordered_set<std::string> vars;
  for (const auto& t : tuples_) {
    if (t.fact.size() != schema_.size()) {
      throw ValidationError("tuple " + t.var + " has " + std::to_string(t.fact.size()) +
                            " values, schema has " + std::to_string(schema_.size()));
    }
    for (std::size_t i = 0; i < schema_.size(); ++i) {
      bool is_int = std::holds_alternative<std::int64_t>(t.fact[i]);
      if (is_int != (schema_[i].type == ColumnType::Int)) {
        throw ValidationError("tuple " + t.var + ": value of column '" + schema_[i].name +
                              "' has the wrong type");
      }
    }
    if (!detail::is_ident(t.var)) throw ValidationError("invalid variable identifier '" + t.var + "'");
    if (!vars.insert(t.var).second) throw ValidationError("duplicate variable identifier '" + t.var + "'");
    if (!(t.interval.ts < t.interval.te)) {
      throw ValidationError("tuple " + t.var + ": empty interval");
    }
    if (!(t.p > 0.0 && t.p <= 1.0)) throw ValidationError("tuple " + t.var + ": p outside (0,1]");
  }

  // Same-fact intervals must be pairwise disjoint.
  std::vector<std::size_t> order(tuples_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = tuples_[a];
    const auto& y = tuples_[b];
    if (x.fact != y.fact) return x.fact < y.fact;
    return x.interval < y.interval;
  });
  for (std::size_t k = 1; k < order.size(); ++k) {
    const auto& prev = tuples_[order[k - 1]];
    const auto& cur = tuples_[order[k]];
    if (prev.fact == cur.fact && prev.interval.overlaps(cur.interval)) {
      throw ValidationError("duplicate-free violation: tuples " + prev.var + " and " + cur.var +
                            " share fact (" + render_fact(cur.fact) + ") over overlapping intervals");
    }
  }
}

/// Parses a relation in the TSV format: header `col:type ... var ts te p`.
/// When expected_columns is given the header's attribute names must match it.
inline TPRelation parse_relation(std::istream& in,
                                 const std::optional<std::vector<std::string>>& expected_columns = std::nullopt) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("line 1: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto head = detail::split(line, '\t');
  if (head.size() < 4 || head[head.size() - 4] != "var" || head[head.size() - 3] != "ts" ||
      head[head.size() - 2] != "te" || head[head.size() - 1] != "p") {
    throw ParseError("line 1: header must end with var, ts, te, p");
  }
  Schema schema;
  for (std::size_t i = 0; i + 4 < head.size(); ++i) {
    Column col;
    auto colon = head[i].find(':');
    col.name = head[i].substr(0, colon);
    if (colon != std::string::npos) {
      auto type = head[i].substr(colon + 1);
      if (type == "str") {
        col.type = ColumnType::Str;
      } else if (type == "int") {
        col.type = ColumnType::Int;
      } else {
        throw ParseError("line 1: unknown column type '" + type + "'");
      }
    }
    if (!detail::is_ident(col.name)) throw ParseError("line 1: invalid column name '" + col.name + "'");
    schema.push_back(std::move(col));
  }
  if (expected_columns) {
    std::vector<std::string> names;
    for (const auto& c : schema) names.push_back(c.name);
    if (names != *expected_columns) throw ParseError("line 1: header does not match the expected columns");
  }

  std::vector<TPTuple> tuples;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = detail::split(line, '\t');
    auto where = "line " + std::to_string(lineno) + ": ";
    if (cells.size() != schema.size() + 4) {
      throw ParseError(where + "expected " + std::to_string(schema.size() + 4) + " fields, got " +
                       std::to_string(cells.size()));
    }
    TPTuple t;
    for (std::size_t i = 0; i < schema.size(); ++i) {
      if (schema[i].type == ColumnType::Int) {
        auto v = detail::parse_int(cells[i]);
        if (!v) throw ParseError(where + "column '" + schema[i].name + "' is not an integer");
        t.fact.emplace_back(*v);
      } else {
        t.fact.emplace_back(cells[i]);
      }
    }
    std::size_t base = schema.size();
    t.var = cells[base];
    if (!detail::is_ident(t.var)) throw ParseError(where + "invalid variable identifier '" + t.var + "'");
    auto ts = detail::parse_int(cells[base + 1]);
    auto te = detail::parse_int(cells[base + 2]);
    if (!ts || !te) throw ParseError(where + "timestamps must be integers");
    if (!(*ts < *te)) throw ParseError(where + "interval must satisfy ts < te");
    t.interval = {*ts, *te};
    auto p = detail::parse_double(cells[base + 3]);
    if (!p || !(*p > 0.0 && *p <= 1.0)) throw ParseError(where + "p must be a decimal in (0,1]");
    t.p = *p;
    tuples.push_back(std::move(t));
  }
  return TPRelation(std::move(schema), std::move(tuples));
}

inline TPRelation load_relation(const std::string& path,
                                const std::optional<std::vector<std::string>>& expected_columns = std::nullopt) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  try {
    return parse_relation(in, expected_columns);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline void write_relation(std::ostream& os, const TPRelation& rel) {
  for (const auto& c : rel.schema()) {
    os << c.name << (c.type == ColumnType::Int ? ":int" : ":str") << '\t';
  }
  os << "var\tts\tte\tp\n";
  for (const auto& t : rel.tuples()) {
    for (const auto& v : t.fact) os << to_string(v) << '\t';
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", t.p);
    os << t.var << '\t' << t.interval.ts << '\t' << t.interval.te << '\t' << buf << '\n';
  }
}

/// Tuples valid at t, in relation order.
inline std::vector<TPTuple> snapshot(const TPRelation& rel, TimePoint t) {
  std::vector<TPTuple> out;
  for (const auto& tup : rel.tuples()) {
    if (tup.interval.contains(t)) out.push_back(tup);
  }
  return out;
}

/// Copies rel with interval starts resampled from the empirical start-point
/// distribution, lengths and facts unchanged, and fresh variables
/// `<prefix><i>`. Deterministic in seed.
inline TPRelation generate_shifted(const TPRelation& rel, std::uint64_t seed, const std::string& prefix,
                                   int max_attempts = 1000) {
  if (rel.empty()) throw ContractViolation("generate_shifted: input relation is empty");
  std::vector<TimePoint> starts;
  starts.reserve(rel.size());
  for (const auto& t : rel.tuples()) starts.push_back(t.interval.ts);

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, starts.size() - 1);
  std::unordered_map<Fact, std::vector<Interval>, FactHash> placed;
  std::vector<TPTuple> out;
  out.reserve(rel.size());
  for (std::size_t i = 0; i < rel.size(); ++i) {
    const auto& src = rel[i];
    auto& taken = placed[src.fact];
    bool ok = false;
    for (int attempt = 0; attempt < max_attempts && !ok; ++attempt) {
      TimePoint ts = starts[pick(rng)];
      Interval iv{ts, ts + src.interval.length()};
      ok = std::none_of(taken.begin(), taken.end(), [&](const Interval& o) { return o.overlaps(iv); });
      if (ok) {
        taken.push_back(iv);
        out.push_back({src.fact, prefix + std::to_string(i + 1), iv, src.p});
      }
    }
    if (!ok) {
      throw Error("generate_shifted: no duplicate-free placement for tuple " + src.var + " after " +
                  std::to_string(max_attempts) + " attempts");
    }
  }
  return TPRelation(rel.schema(), std::move(out));
}

/// Version-history style relation: each fact (a file path) holds a chain of
/// consecutive intervals, so same-fact tuples never overlap.
inline TPRelation generate_version_history(std::size_t n, std::uint64_t seed, const std::string& prefix,
                                           TimePoint horizon = 1'000'000) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> versions(1, 5);
  std::uniform_int_distribution<TimePoint> start(0, horizon);
  std::uniform_int_distribution<TimePoint> len(1, std::max<TimePoint>(2, horizon / 50));
  std::uniform_int_distribution<int> prob(1, 9);
  std::vector<TPTuple> tuples;
  tuples.reserve(n);
  std::size_t file = 0;
  while (tuples.size() < n) {
    std::string path = "src/f" + std::to_string(file++) + ".cpp";
    TimePoint t = start(rng);
    int k = versions(rng);
    for (int v = 0; v < k && tuples.size() < n; ++v) {
      TimePoint l = len(rng);
      tuples.push_back({{path}, prefix + std::to_string(tuples.size() + 1), {t, t + l}, prob(rng) / 10.0});
      t += l;
    }
  }
  return TPRelation({{"File_Path", ColumnType::Str}}, std::move(tuples));
}

}  // namespace tpjoin

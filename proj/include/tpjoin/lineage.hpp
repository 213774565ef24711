#pragma once

// Boolean lineage formulas over tuple variables, the concatenation functions
// used to build output lineages, and exact probability valuation under
// tuple independence.

#include <cstdint>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tpjoin/error.hpp"

namespace tpjoin {

/// Maximum number of variables for exhaustive probability enumeration.
inline constexpr std::size_t kEnumerationCap = 24;
/// Maximum number of combined variables for an equivalence test.
inline constexpr std::size_t kEquivalenceCap = 20;

/// Immutable, shareable lineage formula. A default-constructed Lineage is the
/// distinguished Null lineage (absence of a lineage, not Boolean false).
class Lineage {
 public:
  enum class Kind : std::uint8_t { Null, Var, Not, And, Or };

  Lineage() = default;

  static Lineage var(std::string name) {
    if (name.empty()) throw ContractViolation("lineage variable name is empty");
    return Lineage(std::make_shared<const Node>(Node{Kind::Var, std::move(name), {}}));
  }

  static Lineage negate(Lineage child) {
    if (child.is_null()) throw ContractViolation("Not over Null lineage");
    return Lineage(std::make_shared<const Node>(Node{Kind::Not, {}, {std::move(child)}}));
  }

  static Lineage conj(std::vector<Lineage> children) { return nary(Kind::And, std::move(children)); }
  static Lineage disj(std::vector<Lineage> children) { return nary(Kind::Or, std::move(children)); }

  [[nodiscard]] Kind kind() const { return node_ ? node_->kind : Kind::Null; }
  [[nodiscard]] bool is_null() const { return node_ == nullptr; }
  [[nodiscard]] bool is_leaf() const { return kind() == Kind::Var; }
  /// Variable name; only meaningful for Var nodes.
  [[nodiscard]] const std::string& name() const { return node_->name; }
  [[nodiscard]] std::span<const Lineage> children() const {
    if (!node_) return {};
    return node_->children;
  }

  /// Structural equality.
  friend bool operator==(const Lineage& a, const Lineage& b) {
    if (a.node_ == b.node_) return true;
    if (!a.node_ || !b.node_) return false;
    if (a.node_->kind != b.node_->kind || a.node_->name != b.node_->name) return false;
    return a.node_->children == b.node_->children;
  }

 private:
  struct Node {
    Kind kind;
    std::string name;
    std::vector<Lineage> children;
  };

  explicit Lineage(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static Lineage nary(Kind kind, std::vector<Lineage> children) {
    if (children.size() < 2) throw ContractViolation("And/Or lineage needs at least two children");
    for (const auto& c : children) {
      if (c.is_null()) throw ContractViolation("Null lineage inside a formula");
    }
    return Lineage(std::make_shared<const Node>(Node{kind, {}, std::move(children)}));
  }

  std::shared_ptr<const Node> node_;
};

using ProbMap = std::unordered_map<std::string, double>;

// Concatenation functions -----------------------------------------------------

/// l AND r; an argument that is already a conjunction is spliced in.
inline Lineage land(const Lineage& l, const Lineage& r) {
  if (l.is_null() || r.is_null()) throw ContractViolation("land: Null argument");
  std::vector<Lineage> kids;
  for (const Lineage* x : {&l, &r}) {
    if (x->kind() == Lineage::Kind::And) {
      kids.insert(kids.end(), x->children().begin(), x->children().end());
    } else {
      kids.push_back(*x);
    }
  }
  return Lineage::conj(std::move(kids));
}

/// l AND NOT r.
inline Lineage land_not(const Lineage& l, const Lineage& r) {
  if (l.is_null() || r.is_null()) throw ContractViolation("land_not: Null argument");
  return Lineage::conj({l, Lineage::negate(r)});
}

/// Disjunction of all members; a singleton is returned unchanged.
inline Lineage lor_all(std::span<const Lineage> ls) {
  if (ls.empty()) throw ContractViolation("lor_all: empty list");
  if (ls.size() == 1) {
    if (ls[0].is_null()) throw ContractViolation("lor_all: Null member");
    return ls[0];
  }
  return Lineage::disj(std::vector<Lineage>(ls.begin(), ls.end()));
}

inline Lineage lor_all(const std::vector<Lineage>& ls) { return lor_all(std::span<const Lineage>(ls)); }

// Variables -------------------------------------------------------------------

namespace detail {

inline void collect_vars(const Lineage& l, std::set<std::string>& out) {
  if (l.kind() == Lineage::Kind::Var) {
    out.insert(l.name());
    return;
  }
  for (const auto& c : l.children()) collect_vars(c, out);
}

inline void count_occurrences(const Lineage& l, std::unordered_map<std::string, int>& out) {
  if (l.kind() == Lineage::Kind::Var) {
    ++out[l.name()];
    return;
  }
  for (const auto& c : l.children()) count_occurrences(c, out);
}

}  // namespace detail

inline std::set<std::string> vars(const Lineage& l) {
  std::set<std::string> out;
  detail::collect_vars(l, out);
  return out;
}

/// True when every variable occurs at most once.
inline bool is_read_once(const Lineage& l) {
  std::unordered_map<std::string, int> counts;
  detail::count_occurrences(l, counts);
  for (const auto& [_, n] : counts) {
    if (n > 1) return false;
  }
  return true;
}

// Evaluation ------------------------------------------------------------------

namespace detail {

/// Formula compiled against a variable index, evaluated on bit assignments.
class CompiledFormula {
 public:
  CompiledFormula(const Lineage& l, const std::unordered_map<std::string, int>& index) {
    root_ = compile(l, index);
  }

  [[nodiscard]] bool eval(std::uint64_t assignment) const { return eval(root_, assignment); }

 private:
  struct Op {
    Lineage::Kind kind;
    int var = -1;
    std::vector<int> kids;
  };

  int compile(const Lineage& l, const std::unordered_map<std::string, int>& index) {
    Op op{l.kind(), -1, {}};
    if (l.kind() == Lineage::Kind::Var) {
      op.var = index.at(l.name());
    } else {
      for (const auto& c : l.children()) op.kids.push_back(compile(c, index));
    }
    ops_.push_back(std::move(op));
    return static_cast<int>(ops_.size()) - 1;
  }

  bool eval(int i, std::uint64_t a) const {
    const Op& op = ops_[i];
    switch (op.kind) {
      case Lineage::Kind::Var:
        return (a >> op.var) & 1U;
      case Lineage::Kind::Not:
        return !eval(op.kids[0], a);
      case Lineage::Kind::And:
        for (int k : op.kids) {
          if (!eval(k, a)) return false;
        }
        return true;
      case Lineage::Kind::Or:
        for (int k : op.kids) {
          if (eval(k, a)) return true;
        }
        return false;
      case Lineage::Kind::Null:
        break;
    }
    return false;
  }

  std::vector<Op> ops_;
  int root_ = -1;
};

inline double lookup(const ProbMap& pm, const std::string& v) {
  auto it = pm.find(v);
  if (it == pm.end()) throw ContractViolation("no probability for variable '" + v + "'");
  return it->second;
}

inline double read_once_rec(const Lineage& l, const ProbMap& pm) {
  switch (l.kind()) {
    case Lineage::Kind::Var:
      return lookup(pm, l.name());
    case Lineage::Kind::Not:
      return 1.0 - read_once_rec(l.children()[0], pm);
    case Lineage::Kind::And: {
      double p = 1.0;
      for (const auto& c : l.children()) p *= read_once_rec(c, pm);
      return p;
    }
    case Lineage::Kind::Or: {
      double q = 1.0;
      for (const auto& c : l.children()) q *= 1.0 - read_once_rec(c, pm);
      return 1.0 - q;
    }
    case Lineage::Kind::Null:
      break;
  }
  throw ContractViolation("probability of Null lineage");
}

}  // namespace detail

/// Compositional valuation; valid only for read-once formulas.
inline double probability_read_once(const Lineage& l, const ProbMap& pm) {
  if (l.is_null()) throw ContractViolation("probability of Null lineage");
  if (!is_read_once(l)) throw ContractViolation("formula is not read-once");
  return detail::read_once_rec(l, pm);
}

/// Sums the weight of every satisfying assignment.
inline double probability_enumerate(const Lineage& l, const ProbMap& pm) {
  if (l.is_null()) throw ContractViolation("probability of Null lineage");
  auto vs = vars(l);
  if (vs.size() > kEnumerationCap) {
    throw CapExceeded("probability: " + std::to_string(vs.size()) + " variables exceed the enumeration cap of " +
                      std::to_string(kEnumerationCap));
  }
  std::unordered_map<std::string, int> index;
  std::vector<double> probs;
  for (const auto& v : vs) {
    index.emplace(v, static_cast<int>(probs.size()));
    probs.push_back(detail::lookup(pm, v));
  }
  detail::CompiledFormula f(l, index);
  const std::uint64_t n = std::uint64_t{1} << probs.size();
  double total = 0.0;
  for (std::uint64_t a = 0; a < n; ++a) {
    if (!f.eval(a)) continue;
    double w = 1.0;
    for (std::size_t i = 0; i < probs.size(); ++i) w *= ((a >> i) & 1U) ? probs[i] : 1.0 - probs[i];
    total += w;
  }
  return total;
}

/// Exact probability that l is true; read-once formulas take the fast path.
inline double probability(const Lineage& l, const ProbMap& pm) {
  if (l.is_null()) throw ContractViolation("probability of Null lineage");
  if (is_read_once(l)) return detail::read_once_rec(l, pm);
  return probability_enumerate(l, pm);
}

/// Semantic equivalence by truth-table comparison over the combined variables.
inline bool equivalent(const Lineage& l, const Lineage& r) {
  if (l.is_null() || r.is_null()) return l.is_null() && r.is_null();
  if (l == r) return true;
  auto vs = vars(l);
  auto rv = vars(r);
  vs.insert(rv.begin(), rv.end());
  if (vs.size() > kEquivalenceCap) {
    throw CapExceeded("equivalent: " + std::to_string(vs.size()) + " variables exceed the equivalence cap of " +
                      std::to_string(kEquivalenceCap));
  }
  std::unordered_map<std::string, int> index;
  int i = 0;
  for (const auto& v : vs) index.emplace(v, i++);
  detail::CompiledFormula fl(l, index), fr(r, index);
  const std::uint64_t n = std::uint64_t{1} << vs.size();
  for (std::uint64_t a = 0; a < n; ++a) {
    if (fl.eval(a) != fr.eval(a)) return false;
  }
  return true;
}

// Text form -------------------------------------------------------------------

namespace detail {

inline void render_rec(const Lineage& l, std::string& out) {
  auto child = [&](const Lineage& c) {
    bool wrap = c.kind() == Lineage::Kind::And || c.kind() == Lineage::Kind::Or;
    if (wrap) out += '(';
    render_rec(c, out);
    if (wrap) out += ')';
  };
  switch (l.kind()) {
    case Lineage::Kind::Null:
      out += '-';
      return;
    case Lineage::Kind::Var:
      out += l.name();
      return;
    case Lineage::Kind::Not:
      out += '!';
      child(l.children()[0]);
      return;
    case Lineage::Kind::And:
    case Lineage::Kind::Or: {
      char op = l.kind() == Lineage::Kind::And ? '&' : '|';
      bool first = true;
      for (const auto& c : l.children()) {
        if (!first) out += op;
        first = false;
        child(c);
      }
      return;
    }
  }
}

class LineageParser {
 public:
  explicit LineageParser(std::string_view text) : text_(text) {}

  Lineage parse() {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '-') {
      ++pos_;
      skip_ws();
      if (pos_ != text_.size()) fail("trailing input after '-'");
      return {};
    }
    Lineage l = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character");
    return l;
  }

 private:
  Lineage expr() {
    std::vector<Lineage> terms{term()};
    while (accept('|')) terms.push_back(term());
    return terms.size() == 1 ? terms[0] : Lineage::disj(std::move(terms));
  }

  Lineage term() {
    std::vector<Lineage> factors{factor()};
    while (accept('&')) factors.push_back(factor());
    return factors.size() == 1 ? factors[0] : Lineage::conj(std::move(factors));
  }

  Lineage factor() {
    if (accept('!')) return Lineage::negate(factor());
    if (accept('(')) {
      Lineage inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    skip_ws();
    std::size_t start = pos_;
    auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
    auto alnum = [&](char c) { return alpha(c) || (c >= '0' && c <= '9'); };
    if (pos_ >= text_.size() || !alpha(text_[pos_])) fail("expected identifier, '!' or '('");
    while (pos_ < text_.size() && alnum(text_[pos_])) ++pos_;
    return Lineage::var(std::string(text_.substr(start, pos_ - start)));
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("lineage syntax error at position " + std::to_string(pos_) + ": " + what);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Canonical text: `&`, `|`, `!`, parentheses around And/Or children, `-` for Null.
inline std::string render_lineage(const Lineage& l) {
  std::string out;
  detail::render_rec(l, out);
  return out;
}

inline Lineage parse_lineage(std::string_view text) { return detail::LineageParser(text).parse(); }

}  // namespace tpjoin

#pragma once

// Join predicate over a pair of facts: a conjunction of column comparisons.

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tpjoin/error.hpp"
#include "tpjoin/model.hpp"

namespace tpjoin {

enum class Side { Left, Right };
enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

struct Operand {
  enum class Kind { LeftCol, RightCol, Literal };
  Kind kind = Kind::Literal;
  std::size_t column = 0;
  Value literal;
  ColumnType type = ColumnType::Str;
};

struct Comparison {
  Operand lhs;
  CmpOp op = CmpOp::Eq;
  Operand rhs;
};

namespace detail {

inline bool compare(const Value& a, CmpOp op, const Value& b) {
  switch (op) {
    case CmpOp::Eq:
      return a == b;
    case CmpOp::Ne:
      return a != b;
    case CmpOp::Lt:
      return a < b;
    case CmpOp::Le:
      return a <= b;
    case CmpOp::Gt:
      return a > b;
    case CmpOp::Ge:
      return a >= b;
  }
  return false;
}

/// a op b  <=>  b flip(op) a
inline CmpOp flip(CmpOp op) {
  switch (op) {
    case CmpOp::Lt:
      return CmpOp::Gt;
    case CmpOp::Le:
      return CmpOp::Ge;
    case CmpOp::Gt:
      return CmpOp::Lt;
    case CmpOp::Ge:
      return CmpOp::Le;
    default:
      return op;
  }
}

inline const char* op_text(CmpOp op) {
  switch (op) {
    case CmpOp::Eq:
      return "=";
    case CmpOp::Ne:
      return "!=";
    case CmpOp::Lt:
      return "<";
    case CmpOp::Le:
      return "<=";
    case CmpOp::Gt:
      return ">";
    case CmpOp::Ge:
      return ">=";
  }
  return "?";
}

inline const Value& resolve(const Operand& o, const Fact* left, const Fact* right) {
  switch (o.kind) {
    case Operand::Kind::LeftCol:
      return (*left)[o.column];
    case Operand::Kind::RightCol:
      return (*right)[o.column];
    case Operand::Kind::Literal:
      break;
  }
  return o.literal;
}

inline std::string literal_text(const Value& v) {
  if (std::holds_alternative<std::string>(v)) return "'" + std::get<std::string>(v) + "'";
  return to_string(v);
}

}  // namespace detail

/// One-sided predicate: theta with one side's columns bound to a fact.
class PartialPredicate {
 public:
  PartialPredicate(Side free_side, std::vector<Comparison> conjuncts, std::vector<std::string> free_names)
      : free_side_(free_side), conjuncts_(std::move(conjuncts)), free_names_(std::move(free_names)) {}

  /// Evaluates against a fact of the free side.
  bool operator()(const Fact& f) const {
    const Fact* l = free_side_ == Side::Left ? &f : nullptr;
    const Fact* r = free_side_ == Side::Right ? &f : nullptr;
    for (const auto& c : conjuncts_) {
      if (!detail::compare(detail::resolve(c.lhs, l, r), c.op, detail::resolve(c.rhs, l, r))) return false;
    }
    return true;
  }

  [[nodiscard]] Side free_side() const { return free_side_; }

  [[nodiscard]] std::string to_string() const {
    if (conjuncts_.empty()) return "true";
    std::string out;
    const char* prefix = free_side_ == Side::Left ? "l." : "r.";
    auto operand = [&](const Operand& o) {
      if (o.kind == Operand::Kind::Literal) return detail::literal_text(o.literal);
      return prefix + free_names_[o.column];
    };
    for (std::size_t i = 0; i < conjuncts_.size(); ++i) {
      if (i) out += " & ";
      out += operand(conjuncts_[i].lhs) + " " + detail::op_text(conjuncts_[i].op) + " " + operand(conjuncts_[i].rhs);
    }
    return out;
  }

 private:
  Side free_side_;
  std::vector<Comparison> conjuncts_;
  std::vector<std::string> free_names_;
};

class Theta {
 public:
  Theta() = default;
  Theta(std::vector<Comparison> conjuncts, Schema left, Schema right)
      : conjuncts_(std::move(conjuncts)), left_(std::move(left)), right_(std::move(right)) {}

  [[nodiscard]] const std::vector<Comparison>& conjuncts() const { return conjuncts_; }
  [[nodiscard]] bool is_true() const { return conjuncts_.empty(); }
  [[nodiscard]] const Schema& left_schema() const { return left_; }
  [[nodiscard]] const Schema& right_schema() const { return right_; }

  [[nodiscard]] bool eval(const Fact& lf, const Fact& rf) const {
    for (const auto& c : conjuncts_) {
      if (!detail::compare(detail::resolve(c.lhs, &lf, &rf), c.op, detail::resolve(c.rhs, &lf, &rf))) return false;
    }
    return true;
  }

  /// Binds the given side's columns to f; the result tests facts of the other side.
  [[nodiscard]] PartialPredicate instantiate(Side side, const Fact& f) const {
    auto bound = side == Side::Left ? Operand::Kind::LeftCol : Operand::Kind::RightCol;
    std::vector<Comparison> out;
    for (auto c : conjuncts_) {
      for (Operand* o : {&c.lhs, &c.rhs}) {
        if (o->kind == bound) {
          o->literal = f[o->column];
          o->kind = Operand::Kind::Literal;
        }
      }
      // keep the free column on the left: 'ZAK' = r.Loc -> r.Loc = 'ZAK'
      if (c.lhs.kind == Operand::Kind::Literal && c.rhs.kind != Operand::Kind::Literal) {
        std::swap(c.lhs, c.rhs);
        c.op = detail::flip(c.op);
      }
      out.push_back(std::move(c));
    }
    const Schema& free = side == Side::Left ? right_ : left_;
    std::vector<std::string> names;
    for (const auto& col : free) names.push_back(col.name);
    return {side == Side::Left ? Side::Right : Side::Left, std::move(out), std::move(names)};
  }

  /// Column pairs (left, right) joined by equality; used to hash-partition joins.
  [[nodiscard]] std::vector<std::pair<std::size_t, std::size_t>> equi_columns() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (const auto& c : conjuncts_) {
      if (c.op != CmpOp::Eq) continue;
      if (c.lhs.kind == Operand::Kind::LeftCol && c.rhs.kind == Operand::Kind::RightCol) {
        out.emplace_back(c.lhs.column, c.rhs.column);
      } else if (c.lhs.kind == Operand::Kind::RightCol && c.rhs.kind == Operand::Kind::LeftCol) {
        out.emplace_back(c.rhs.column, c.lhs.column);
      }
    }
    return out;
  }

  /// The same predicate with the roles of the two relations exchanged.
  [[nodiscard]] Theta mirrored() const {
    auto swap_side = [](Operand o) {
      if (o.kind == Operand::Kind::LeftCol) {
        o.kind = Operand::Kind::RightCol;
      } else if (o.kind == Operand::Kind::RightCol) {
        o.kind = Operand::Kind::LeftCol;
      }
      return o;
    };
    std::vector<Comparison> out;
    for (const auto& c : conjuncts_) out.push_back({swap_side(c.lhs), c.op, swap_side(c.rhs)});
    return {std::move(out), right_, left_};
  }

  [[nodiscard]] std::string to_string() const {
    if (conjuncts_.empty()) return "true";
    auto operand = [&](const Operand& o) -> std::string {
      switch (o.kind) {
        case Operand::Kind::LeftCol:
          return "l." + left_[o.column].name;
        case Operand::Kind::RightCol:
          return "r." + right_[o.column].name;
        case Operand::Kind::Literal:
          break;
      }
      return detail::literal_text(o.literal);
    };
    std::string out;
    for (std::size_t i = 0; i < conjuncts_.size(); ++i) {
      if (i) out += " & ";
      out += operand(conjuncts_[i].lhs) + " " + detail::op_text(conjuncts_[i].op) + " " + operand(conjuncts_[i].rhs);
    }
    return out;
  }

 private:
  std::vector<Comparison> conjuncts_;
  Schema left_;
  Schema right_;
};

namespace detail {

class ThetaParser {
 public:
  ThetaParser(std::string_view text, const Schema& left, const Schema& right)
      : text_(text), left_(left), right_(right) {}

  Theta parse() {
    skip_ws();
    if (peek_word("true")) {
      pos_ += 4;
      skip_ws();
      if (pos_ != text_.size()) fail("trailing input after 'true'");
      return Theta({}, left_, right_);
    }
    std::vector<Comparison> out{comparison()};
    skip_ws();
    while (pos_ < text_.size() && text_[pos_] == '&') {
      ++pos_;
      out.push_back(comparison());
      skip_ws();
    }
    if (pos_ != text_.size()) fail("unexpected character");
    return Theta(std::move(out), left_, right_);
  }

 private:
  Comparison comparison() {
    Comparison c;
    c.lhs = operand();
    c.op = op();
    c.rhs = operand();
    if (c.lhs.type != c.rhs.type) fail("type mismatch between operands");
    if (c.lhs.type == ColumnType::Str && c.op != CmpOp::Eq && c.op != CmpOp::Ne) {
      fail("ordered comparison on strings is not supported");
    }
    return c;
  }

  Operand operand() {
    skip_ws();
    if (pos_ >= text_.size()) fail("expected operand");
    char c = text_[pos_];
    if ((c == 'l' || c == 'r') && pos_ + 1 < text_.size() && text_[pos_ + 1] == '.') {
      const Schema& schema = c == 'l' ? left_ : right_;
      pos_ += 2;
      auto name = ident();
      for (std::size_t i = 0; i < schema.size(); ++i) {
        if (schema[i].name == name) {
          Operand o;
          o.kind = c == 'l' ? Operand::Kind::LeftCol : Operand::Kind::RightCol;
          o.column = i;
          o.type = schema[i].type;
          return o;
        }
      }
      fail(std::string("unknown column ") + c + "." + name);
    }
    if (c == '\'' || c == '"') {
      std::size_t close = text_.find(c, pos_ + 1);
      if (close == std::string_view::npos) fail("unterminated string literal");
      Operand o;
      o.literal = std::string(text_.substr(pos_ + 1, close - pos_ - 1));
      o.type = ColumnType::Str;
      pos_ = close + 1;
      return o;
    }
    if (c == '-' || (c >= '0' && c <= '9')) {
      std::size_t start = pos_++;
      while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') ++pos_;
      auto v = parse_int(text_.substr(start, pos_ - start));
      if (!v) fail("invalid integer literal");
      Operand o;
      o.literal = *v;
      o.type = ColumnType::Int;
      return o;
    }
    fail("expected l.<col>, r.<col>, integer or quoted string");
  }

  CmpOp op() {
    skip_ws();
    auto rest = text_.substr(pos_);
    auto take = [&](std::string_view tok, CmpOp o) {
      pos_ += tok.size();
      return o;
    };
    if (rest.starts_with("!=")) return take("!=", CmpOp::Ne);
    if (rest.starts_with("<=")) return take("<=", CmpOp::Le);
    if (rest.starts_with(">=")) return take(">=", CmpOp::Ge);
    if (rest.starts_with("=")) return take("=", CmpOp::Eq);
    if (rest.starts_with("<")) return take("<", CmpOp::Lt);
    if (rest.starts_with(">")) return take(">", CmpOp::Gt);
    fail("expected comparison operator");
  }

  std::string ident() {
    std::size_t start = pos_;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' ||
                (pos_ > start && c >= '0' && c <= '9');
      if (!ok) break;
      ++pos_;
    }
    if (pos_ == start) fail("expected column name");
    return std::string(text_.substr(start, pos_ - start));
  }

  bool peek_word(std::string_view w) const {
    if (!text_.substr(pos_).starts_with(w)) return false;
    std::size_t end = pos_ + w.size();
    return end == text_.size() || text_[end] == ' ' || text_[end] == '\t';
  }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("theta syntax error at position " + std::to_string(pos_) + ": " + what);
  }

  std::string_view text_;
  const Schema& left_;
  const Schema& right_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Theta parse_theta(std::string_view text, const Schema& left, const Schema& right) {
  return detail::ThetaParser(text, left, right).parse();
}

}  // namespace tpjoin

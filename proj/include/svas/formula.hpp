#pragma once

// Two-variable first-order logic over leaf-data forests with letters, child,
// next sibling, document order on leaves, data equality and identity.

#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "svas/forest.hpp"

namespace svas {

enum class Var : std::uint8_t { X = 0, Y = 1 };

inline char var_name(Var v) { return v == Var::X ? 'x' : 'y'; }

enum class FormulaKind : std::uint8_t {
  Letter,
  Child,
  Next,
  Prec,
  DataEq,
  Equal,
  Not,
  And,
  Or,
  Implies,
  Exists,
  Forall,
};

/// Value-semantic syntax tree. Binary atoms read their variables from `a` and
/// `b`; Letter uses `a`; quantifiers bind `a`. And/Or are n-ary (empty And is
/// true, empty Or is false).
struct Formula {
  FormulaKind kind = FormulaKind::And;
  Var a = Var::X;
  Var b = Var::Y;
  std::string letter;
  std::vector<Formula> args;

  friend bool operator==(const Formula&, const Formula&) = default;

  std::size_t size() const {
    std::size_t n = 1;
    for (const auto& f : args) n += f.size();
    return n;
  }
};

namespace fo {

inline Formula letter(std::string l, Var v) { return {FormulaKind::Letter, v, v, std::move(l), {}}; }
inline Formula child(Var p, Var c) { return {FormulaKind::Child, p, c, {}, {}}; }
inline Formula next(Var l, Var r) { return {FormulaKind::Next, l, r, {}, {}}; }
inline Formula prec(Var l, Var r) { return {FormulaKind::Prec, l, r, {}, {}}; }
inline Formula data_eq(Var l, Var r) { return {FormulaKind::DataEq, l, r, {}, {}}; }
inline Formula equal(Var l, Var r) { return {FormulaKind::Equal, l, r, {}, {}}; }
inline Formula neg(Formula f) { return {FormulaKind::Not, Var::X, Var::Y, {}, {std::move(f)}}; }
inline Formula conj(std::vector<Formula> fs) { return {FormulaKind::And, Var::X, Var::Y, {}, std::move(fs)}; }
inline Formula disj(std::vector<Formula> fs) { return {FormulaKind::Or, Var::X, Var::Y, {}, std::move(fs)}; }
inline Formula implies(Formula l, Formula r) {
  return {FormulaKind::Implies, Var::X, Var::Y, {}, {std::move(l), std::move(r)}};
}
inline Formula exists(Var v, Formula f) { return {FormulaKind::Exists, v, v, {}, {std::move(f)}}; }
inline Formula forall(Var v, Formula f) { return {FormulaKind::Forall, v, v, {}, {std::move(f)}}; }
inline Formula truth() { return conj({}); }
inline Formula falsity() { return disj({}); }
inline Var other(Var v) { return v == Var::X ? Var::Y : Var::X; }

}  // namespace fo

/// Bit 0: x free, bit 1: y free.
inline unsigned free_vars(const Formula& f) {
  auto bit = [](Var v) { return v == Var::X ? 1u : 2u; };
  switch (f.kind) {
    case FormulaKind::Letter: return bit(f.a);
    case FormulaKind::Child:
    case FormulaKind::Next:
    case FormulaKind::Prec:
    case FormulaKind::DataEq:
    case FormulaKind::Equal: return bit(f.a) | bit(f.b);
    case FormulaKind::Exists:
    case FormulaKind::Forall: return free_vars(f.args[0]) & ~bit(f.a);
    default: {
      unsigned m = 0;
      for (const auto& g : f.args) m |= free_vars(g);
      return m;
    }
  }
}

class FreeVariable : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class FormulaSyntaxError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void write_sexpr(std::ostream& os, const Formula& f) {
  auto binary = [&](std::string_view name) { os << name << '(' << var_name(f.a) << ',' << var_name(f.b) << ')'; };
  switch (f.kind) {
    case FormulaKind::Letter: os << "letter_" << f.letter << '(' << var_name(f.a) << ')'; return;
    case FormulaKind::Child: binary("child"); return;
    case FormulaKind::Next: binary("next"); return;
    case FormulaKind::Prec: binary("prec"); return;
    case FormulaKind::DataEq: binary("dataeq"); return;
    case FormulaKind::Equal: binary("eq"); return;
    case FormulaKind::Exists:
    case FormulaKind::Forall:
      os << '(' << (f.kind == FormulaKind::Exists ? "exists " : "forall ") << var_name(f.a) << ' ';
      write_sexpr(os, f.args[0]);
      os << ')';
      return;
    default: break;
  }
  os << '(' << (f.kind == FormulaKind::Not ? "not" : f.kind == FormulaKind::And ? "and" : f.kind == FormulaKind::Or ? "or" : "implies");
  for (const auto& g : f.args) {
    os << ' ';
    write_sexpr(os, g);
  }
  os << ')';
}

/// Prefix s-expression text.
inline std::string format_formula(const Formula& f) {
  std::ostringstream os;
  write_sexpr(os, f);
  return os.str();
}

namespace detail {

class SexprParser {
 public:
  explicit SexprParser(std::string_view s) : s_(s) {}

  Formula parse() {
    Formula f = term();
    skip();
    if (i_ != s_.size()) fail("trailing input");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw FormulaSyntaxError("formula offset " + std::to_string(i_) + ": " + why);
  }
  void skip() {
    while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\n' || s_[i_] == '\t' || s_[i_] == '\r')) ++i_;
  }
  std::string word() {
    skip();
    std::size_t j = i_;
    while (j < s_.size() && s_[j] != ' ' && s_[j] != '(' && s_[j] != ')' && s_[j] != '\n' && s_[j] != '\t') ++j;
    if (j == i_) fail("expected a word");
    std::string w(s_.substr(i_, j - i_));
    i_ = j;
    return w;
  }
  Var var() {
    skip();
    if (i_ >= s_.size() || (s_[i_] != 'x' && s_[i_] != 'y')) fail("expected variable x or y");
    return s_[i_++] == 'x' ? Var::X : Var::Y;
  }
  void expect(char c) {
    skip();
    if (i_ >= s_.size() || s_[i_] != c) fail(std::string("expected '") + c + "'");
    ++i_;
  }

  Formula term() {
    skip();
    if (i_ < s_.size() && s_[i_] == '(') {
      ++i_;
      std::string op = word();
      Formula f;
      if (op == "exists" || op == "forall") {
        Var v = var();
        Formula body = term();
        f = op == "exists" ? fo::exists(v, std::move(body)) : fo::forall(v, std::move(body));
      } else if (op == "not" || op == "and" || op == "or" || op == "implies") {
        std::vector<Formula> args;
        skip();
        while (i_ < s_.size() && s_[i_] != ')') {
          args.push_back(term());
          skip();
        }
        if (op == "not" && args.size() != 1) fail("not takes one argument");
        if (op == "implies" && args.size() != 2) fail("implies takes two arguments");
        f = op == "not" ? fo::neg(std::move(args[0]))
            : op == "and" ? fo::conj(std::move(args))
            : op == "or"  ? fo::disj(std::move(args))
                          : fo::implies(std::move(args[0]), std::move(args[1]));
      } else {
        fail("unknown operator '" + op + "'");
      }
      expect(')');
      return f;
    }
    // Atom: name(v) or name(v,w); the name runs up to '('.
    std::size_t j = i_;
    while (j < s_.size() && s_[j] != '(') ++j;
    std::string name(s_.substr(i_, j - i_));
    i_ = j;
    expect('(');
    Var v = var();
    if (name.rfind("letter_", 0) == 0) {
      expect(')');
      if (name.size() == 7) fail("empty letter");
      return fo::letter(name.substr(7), v);
    }
    expect(',');
    Var w = var();
    expect(')');
    if (name == "child") return fo::child(v, w);
    if (name == "next") return fo::next(v, w);
    if (name == "prec") return fo::prec(v, w);
    if (name == "dataeq") return fo::data_eq(v, w);
    if (name == "eq") return fo::equal(v, w);
    fail("unknown atom '" + name + "'");
  }

  std::string_view s_;
  std::size_t i_ = 0;
};

/// Truth table of a subformula over its free variables: a scalar, a vector
/// over x or y, or an n×n matrix indexed [x][y].
struct Table {
  bool dx = false, dy = false;
  std::size_t n = 0;
  std::vector<std::uint8_t> v;

  Table(bool x, bool y, std::size_t size) : dx(x), dy(y), n(size), v((x ? size : 1) * (y ? size : 1), 0) {}
  std::size_t idx(std::size_t x, std::size_t y) const { return (dx ? x : 0) * (dy ? n : 1) + (dy ? y : 0); }
  std::uint8_t at(std::size_t x, std::size_t y) const { return v[idx(x, y)]; }
};

class Evaluator {
 public:
  explicit Evaluator(const LeafDataForest& f) : view_(f) {}
  const ForestView& view() const { return view_; }

  Table eval(const Formula& f) const {
    const std::size_t n = view_.size();
    const unsigned fv = free_vars(f);
    Table t(fv & 1u, fv & 2u, n);
    auto fill = [&](auto&& pred) {
      for (std::size_t x = 0; x < (t.dx ? n : 1); ++x)
        for (std::size_t y = 0; y < (t.dy ? n : 1); ++y) t.v[t.idx(x, y)] = pred(x, y) ? 1 : 0;
    };
    auto pick = [](Var v, std::size_t x, std::size_t y) { return v == Var::X ? x : y; };
    switch (f.kind) {
      case FormulaKind::Letter:
        fill([&](std::size_t x, std::size_t y) { return view_.letter[pick(f.a, x, y)] == f.letter; });
        return t;
      case FormulaKind::Child:
        fill([&](std::size_t x, std::size_t y) { return view_.child(pick(f.a, x, y), pick(f.b, x, y)); });
        return t;
      case FormulaKind::Next:
        fill([&](std::size_t x, std::size_t y) { return view_.next(pick(f.a, x, y), pick(f.b, x, y)); });
        return t;
      case FormulaKind::Prec:
        fill([&](std::size_t x, std::size_t y) { return view_.prec(pick(f.a, x, y), pick(f.b, x, y)); });
        return t;
      case FormulaKind::DataEq:
        fill([&](std::size_t x, std::size_t y) { return view_.data_eq(pick(f.a, x, y), pick(f.b, x, y)); });
        return t;
      case FormulaKind::Equal:
        fill([&](std::size_t x, std::size_t y) { return pick(f.a, x, y) == pick(f.b, x, y); });
        return t;
      case FormulaKind::Not: {
        Table s = eval(f.args[0]);
        fill([&](std::size_t x, std::size_t y) { return !s.at(x, y); });
        return t;
      }
      case FormulaKind::And:
      case FormulaKind::Or: {
        const bool is_and = f.kind == FormulaKind::And;
        std::fill(t.v.begin(), t.v.end(), is_and ? 1 : 0);
        for (const auto& g : f.args) {
          Table s = eval(g);
          for (std::size_t x = 0; x < (t.dx ? n : 1); ++x)
            for (std::size_t y = 0; y < (t.dy ? n : 1); ++y) {
              auto& cell = t.v[t.idx(x, y)];
              cell = is_and ? (cell && s.at(x, y)) : (cell || s.at(x, y));
            }
        }
        return t;
      }
      case FormulaKind::Implies: {
        Table l = eval(f.args[0]);
        Table r = eval(f.args[1]);
        fill([&](std::size_t x, std::size_t y) { return !l.at(x, y) || r.at(x, y); });
        return t;
      }
      case FormulaKind::Exists:
      case FormulaKind::Forall: {
        const bool is_exists = f.kind == FormulaKind::Exists;
        Table s = eval(f.args[0]);
        const bool bound_x = f.a == Var::X;
        const bool bound_free = bound_x ? s.dx : s.dy;
        fill([&](std::size_t x, std::size_t y) {
          if (!bound_free) return n > 0 ? s.at(x, y) != 0 : !is_exists;
          for (std::size_t w = 0; w < n; ++w) {
            const bool val = bound_x ? s.at(w, y) : s.at(x, w);
            if (is_exists && val) return true;
            if (!is_exists && !val) return false;
          }
          return !is_exists;
        });
        return t;
      }
    }
    return t;
  }

 private:
  ForestView view_;
};

}  // namespace detail

inline Formula parse_formula(std::string_view text) { return detail::SexprParser(text).parse(); }

/// Standard first-order satisfaction of a sentence on a forest. Evaluation is
/// bottom-up over truth tables, O(|forest|² · |f|).
inline bool evaluate(const Formula& f, const LeafDataForest& forest) {
  if (free_vars(f) != 0) throw FreeVariable("formula has free variables");
  detail::Evaluator ev(forest);
  return ev.eval(f).at(0, 0) != 0;
}

}  // namespace svas

#pragma once

// Choice annotations: one predicate per nondeterministic jump, used to pick
// the intended ("honest") branch during policy-guided runs.

#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "svas/configuration.hpp"
#include "svas/program.hpp"
#include "svas/text.hpp"

namespace svas {

enum class PredicateKind : std::uint8_t { Zero, NonZero, Top, AllOnes };

/// `arg` is a counter index (Zero/NonZero), a symbol index (Top) or a level
/// (AllOnes).
struct Predicate {
  PredicateKind kind = PredicateKind::Zero;
  std::uint32_t arg = 0;

  static Predicate zero(std::uint32_t c) { return {PredicateKind::Zero, c}; }
  static Predicate nonzero(std::uint32_t c) { return {PredicateKind::NonZero, c}; }
  static Predicate top(std::uint32_t s) { return {PredicateKind::Top, s}; }
  static Predicate allones(std::uint32_t level) { return {PredicateKind::AllOnes, level}; }

  friend bool operator==(const Predicate&, const Predicate&) = default;
};

struct Annotation {
  Predicate predicate;
  /// Branch (0 = first target, 1 = second) taken when the predicate holds.
  int branch_if_true = 0;

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

struct DigitSymbols {
  std::uint32_t zero = 0;
  std::uint32_t one = 0;
  friend bool operator==(const DigitSymbols&, const DigitSymbols&) = default;
};

class AnnotationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ChoiceAnnotationTable {
  std::map<std::uint32_t, Annotation> entries;
  /// Level -> its digit symbols; needed to evaluate allones(level).
  std::map<std::uint32_t, DigitSymbols> digits;

  friend bool operator==(const ChoiceAnnotationTable&, const ChoiceAnnotationTable&) = default;

  const Annotation* find(std::uint32_t goto_index) const {
    auto it = entries.find(goto_index);
    return it == entries.end() ? nullptr : &it->second;
  }

  bool holds(const Predicate& pr, const Configuration& c) const {
    switch (pr.kind) {
      case PredicateKind::Zero: return c.counters.at(pr.arg) == 0;
      case PredicateKind::NonZero: return c.counters.at(pr.arg) != 0;
      case PredicateKind::Top: return !c.stack.empty() && c.stack.back() == pr.arg;
      case PredicateKind::AllOnes: {
        auto it = digits.find(pr.arg);
        if (it == digits.end()) throw AnnotationError("allones: level " + std::to_string(pr.arg) + " has no digits");
        for (auto s = c.stack.rbegin(); s != c.stack.rend(); ++s) {
          if (*s == it->second.zero) return false;
          if (*s != it->second.one) break;
        }
        return true;
      }
    }
    return false;
  }

  /// Branch chosen at the jump `goto_index` in configuration `c`.
  int choose(std::uint32_t goto_index, const Configuration& c) const {
    const Annotation* a = find(goto_index);
    if (!a) throw AnnotationError("jump " + std::to_string(goto_index) + " has no annotation");
    return holds(a->predicate, c) ? a->branch_if_true : 1 - a->branch_if_true;
  }

  /// Indices of distinct-target jumps of `p` that lack an annotation.
  std::vector<std::uint32_t> missing(const SvasProgram& p) const {
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < p.commands.size(); ++i) {
      const auto& c = p.commands[i];
      if (c.op == Op::Goto && c.arg != c.alt && !entries.count(i)) out.push_back(i);
    }
    return out;
  }

  /// Predicates must refer to declared counters, symbols and digit levels.
  bool well_formed(const SvasProgram& p) const {
    for (const auto& [idx, a] : entries) {
      if (idx >= p.commands.size() || p.commands[idx].op != Op::Goto) return false;
      switch (a.predicate.kind) {
        case PredicateKind::Zero:
        case PredicateKind::NonZero:
          if (a.predicate.arg >= p.counters.size()) return false;
          break;
        case PredicateKind::Top:
          if (a.predicate.arg >= p.alphabet.size()) return false;
          break;
        case PredicateKind::AllOnes:
          if (!digits.count(a.predicate.arg)) return false;
          break;
      }
    }
    for (const auto& [level, d] : digits)
      if (d.zero >= p.alphabet.size() || d.one >= p.alphabet.size()) return false;
    return true;
  }
};

inline std::string predicate_text(const SvasProgram& p, const Predicate& pr) {
  switch (pr.kind) {
    case PredicateKind::Zero: return "zero(" + p.counters.at(pr.arg) + ")";
    case PredicateKind::NonZero: return "nonzero(" + p.counters.at(pr.arg) + ")";
    case PredicateKind::Top: return "top(" + p.alphabet.at(pr.arg) + ")";
    case PredicateKind::AllOnes: return "allones(" + std::to_string(pr.arg) + ")";
  }
  return "?";
}

/// Sidecar text. Digit declarations come first as "level K ZERO ONE", then one
/// "goto-index predicate branch" line per annotated jump.
inline std::string serialize_annotations(const SvasProgram& p, const ChoiceAnnotationTable& t) {
  std::ostringstream os;
  for (const auto& [level, d] : t.digits)
    os << "level " << level << ' ' << p.alphabet.at(d.zero) << ' ' << p.alphabet.at(d.one) << '\n';
  for (const auto& [idx, a] : t.entries) os << idx << ' ' << predicate_text(p, a.predicate) << ' ' << a.branch_if_true << '\n';
  return os.str();
}

inline ChoiceAnnotationTable parse_annotations(const SvasProgram& p, std::string_view source) {
  ChoiceAnnotationTable t;
  auto lines = text::split_lines(source);
  for (std::size_t li = 0; li < lines.size(); ++li) {
    auto fail = [&](const std::string& why) -> AnnotationError {
      return AnnotationError("annotation line " + std::to_string(li + 1) + ": " + why);
    };
    auto toks = text::split_ws(text::strip_comment(lines[li]));
    if (toks.empty()) continue;
    if (toks[0] == "level") {
      if (toks.size() != 4) throw fail("expected 'level K ZERO ONE'");
      auto lvl = text::parse_u64(toks[1]);
      auto z = p.symbol_index(toks[2]);
      auto o = p.symbol_index(toks[3]);
      if (!lvl || !z || !o) throw fail("bad digit declaration");
      t.digits[static_cast<std::uint32_t>(*lvl)] = {*z, *o};
      continue;
    }
    if (toks.size() != 3) throw fail("expected 'index predicate branch'");
    auto idx = text::parse_u64(toks[0]);
    if (!idx || *idx >= p.commands.size() || p.commands[*idx].op != Op::Goto) throw fail("index is not a jump");
    if (toks[2] != "0" && toks[2] != "1") throw fail("branch must be 0 or 1");
    const std::string& pr = toks[1];
    auto open = pr.find('(');
    if (open == std::string::npos || pr.back() != ')') throw fail("malformed predicate");
    std::string name = pr.substr(0, open);
    std::string arg = pr.substr(open + 1, pr.size() - open - 2);
    Predicate predicate;
    if (name == "zero" || name == "nonzero") {
      auto c = p.counter_index(arg);
      if (!c) throw fail("unknown counter '" + arg + "'");
      predicate = name == "zero" ? Predicate::zero(*c) : Predicate::nonzero(*c);
    } else if (name == "top") {
      auto s = p.symbol_index(arg);
      if (!s) throw fail("unknown symbol '" + arg + "'");
      predicate = Predicate::top(*s);
    } else if (name == "allones") {
      auto lvl = text::parse_u64(arg);
      if (!lvl) throw fail("bad level");
      predicate = Predicate::allones(static_cast<std::uint32_t>(*lvl));
    } else {
      throw fail("unknown predicate '" + name + "'");
    }
    t.entries[static_cast<std::uint32_t>(*idx)] = {predicate, toks[2] == "1" ? 1 : 0};
  }
  if (!t.well_formed(p)) throw AnnotationError("annotations refer to undeclared names");
  return t;
}

}  // namespace svas

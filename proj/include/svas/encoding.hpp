#pragma once

// Accepting SVAS computations as leaf-data forests, the sentence whose models
// are those forests, and the inverse traversal used to check both.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "svas/exec.hpp"
#include "svas/forest.hpp"
#include "svas/formula.hpp"
#include "svas/program.hpp"

namespace svas {

class NotAccepted : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UnbalancedTrace : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string command_letter(std::uint32_t i) { return "c" + std::to_string(i); }
inline std::string pair_letter(std::uint32_t push, std::uint32_t pop) {
  return "p" + std::to_string(push) + "_" + std::to_string(pop);
}

/// A letter resolved against a program: either one non-stack command, or a
/// (push, pop) pair on the same symbol.
struct LetterInfo {
  bool pair = false;
  std::uint32_t first = 0;  // the command, or the push
  std::uint32_t last = 0;   // the command, or the pop
};

inline std::optional<LetterInfo> resolve_letter(const SvasProgram& p, std::string_view letter) {
  auto num = [](std::string_view s) -> std::optional<std::uint32_t> {
    if (s.empty() || s.size() > 9 || (s.size() > 1 && s[0] == '0')) return std::nullopt;
    auto v = text::parse_u64(s);
    if (!v) return std::nullopt;
    return static_cast<std::uint32_t>(*v);
  };
  const auto n = p.commands.size();
  if (letter.size() >= 2 && letter[0] == 'c') {
    auto i = num(letter.substr(1));
    if (!i || *i >= n || p.commands[*i].is_stack_op()) return std::nullopt;
    return LetterInfo{false, *i, *i};
  }
  if (letter.size() >= 4 && letter[0] == 'p') {
    auto us = letter.find('_');
    if (us == std::string_view::npos) return std::nullopt;
    auto i = num(letter.substr(1, us - 1));
    auto j = num(letter.substr(us + 1));
    if (!i || !j || *i >= n || *j >= n) return std::nullopt;
    const Command& a = p.commands[*i];
    const Command& b = p.commands[*j];
    if (a.op != Op::Push || b.op != Op::Pop || a.arg != b.arg) return std::nullopt;
    return LetterInfo{true, *i, *j};
  }
  return std::nullopt;
}

/// Σ(p): one letter per non-stack command, then one per same-symbol push/pop pair.
inline std::vector<std::string> letters_of(const SvasProgram& p) {
  std::vector<std::string> out;
  const auto n = static_cast<std::uint32_t>(p.commands.size());
  for (std::uint32_t i = 0; i < n; ++i)
    if (!p.commands[i].is_stack_op()) out.push_back(command_letter(i));
  for (std::uint32_t i = 0; i < n; ++i) {
    if (p.commands[i].op != Op::Push) continue;
    for (std::uint32_t j = 0; j < n; ++j)
      if (p.commands[j].op == Op::Pop && p.commands[j].arg == p.commands[i].arg) out.push_back(pair_letter(i, j));
  }
  return out;
}

inline LeafDataForest encode_trace(const SvasProgram& p, const RunTrace& t) {
  if (!t.accepted()) throw NotAccepted("trace is not accepted");
  if (t.steps.size() != t.length) throw NotAccepted("trace steps were not kept");
  std::uint64_t fresh = 0;
  std::vector<std::deque<std::uint64_t>> open_incs(p.counters.size());
  // Children lists under construction; level 0 collects the roots.
  std::vector<std::vector<ForestNode>> levels(1);
  std::vector<std::uint32_t> pushes;
  for (const auto& s : t.steps) {
    const Command& c = p.commands.at(s.index);
    switch (c.op) {
      case Op::Push:
        pushes.push_back(s.index);
        levels.emplace_back();
        break;
      case Op::Pop: {
        if (pushes.empty()) throw UnbalancedTrace("pop without a matching push");
        ForestNode node;
        node.letter = pair_letter(pushes.back(), s.index);
        node.children = std::move(levels.back());
        levels.pop_back();
        pushes.pop_back();
        if (node.children.empty()) node.data = fresh++;
        levels.back().push_back(std::move(node));
        break;
      }
      case Op::Inc:
        open_incs[c.arg].push_back(fresh);
        levels.back().push_back({command_letter(s.index), fresh++, {}});
        break;
      case Op::Dec: {
        auto& q = open_incs[c.arg];
        if (q.empty()) throw UnbalancedTrace("decrement without a pending increment");
        levels.back().push_back({command_letter(s.index), q.front(), {}});
        q.pop_front();
        break;
      }
      case Op::Goto:
      case Op::Halt:
        levels.back().push_back({command_letter(s.index), fresh++, {}});
        break;
    }
  }
  if (levels.size() != 1) throw UnbalancedTrace("push without a matching pop");
  return LeafDataForest{std::move(levels.front())};
}

namespace detail {

using fo::conj;
using fo::disj;
using fo::implies;
using fo::neg;

inline std::vector<std::uint32_t> successors(const SvasProgram& p, std::uint32_t k) {
  const Command& c = p.commands[k];
  if (c.op == Op::Halt) return {};
  if (c.op == Op::Goto) {
    if (c.arg == c.alt) return {c.arg};
    return {c.arg, c.alt};
  }
  if (k + 1 < p.commands.size()) return {k + 1};
  return {};
}

struct SigmaIndex {
  std::vector<std::string> letters;
  std::vector<LetterInfo> info;

  explicit SigmaIndex(const SvasProgram& p) : letters(letters_of(p)) {
    for (const auto& l : letters) info.push_back(*resolve_letter(p, l));
  }

  template <typename Pred>
  Formula any(Var v, Pred&& keep) const {
    std::vector<Formula> out;
    for (std::size_t i = 0; i < letters.size(); ++i)
      if (keep(info[i])) out.push_back(fo::letter(letters[i], v));
    if (out.size() == 1) return std::move(out.front());
    return disj(std::move(out));
  }

  Formula first_in(Var v, const std::vector<std::uint32_t>& s) const {
    return any(v, [&](const LetterInfo& li) { return std::count(s.begin(), s.end(), li.first) > 0; });
  }
};

}  // namespace detail

/// φ(p): conjunction of labelling, start/end, control-flow and data axioms.
inline Formula emit_formula(const SvasProgram& p) {
  using namespace detail;
  using fo::child;
  using fo::data_eq;
  using fo::equal;
  using fo::exists;
  using fo::forall;
  using fo::letter;
  using fo::next;
  using fo::prec;
  const Var x = Var::X, y = Var::Y;
  const SigmaIndex sigma(p);
  const auto n = static_cast<std::uint32_t>(p.commands.size());

  auto is_leaf = [&](Var v) { return neg(exists(fo::other(v), child(v, fo::other(v)))); };
  auto is_root = [&](Var v) { return neg(exists(fo::other(v), child(fo::other(v), v))); };
  auto no_prev = [&](Var v) { return neg(exists(fo::other(v), next(fo::other(v), v))); };
  auto no_next = [&](Var v) { return neg(exists(fo::other(v), next(v, fo::other(v)))); };

  std::vector<Formula> axioms;

  // A: letters.
  axioms.push_back(forall(x, sigma.any(x, [](const LetterInfo&) { return true; })));
  axioms.push_back(forall(x, implies(sigma.any(x, [](const LetterInfo& li) { return !li.pair; }), is_leaf(x))));

  // B: start and end.
  axioms.push_back(exists(x, equal(x, x)));
  axioms.push_back(forall(x, implies(conj({is_root(x), no_prev(x)}), sigma.first_in(x, {0}))));
  axioms.push_back(forall(x, implies(conj({is_root(x), no_next(x)}),
                                     sigma.any(x, [&](const LetterInfo& li) {
                                       return !li.pair && p.commands[li.first].op == Op::Halt;
                                     }))));

  // C: control flow, grouped by the command of the earlier event.
  std::vector<Formula> sibling, closing, opening;
  for (std::uint32_t k = 0; k < n; ++k) {
    const auto succ = successors(p, k);
    if (p.commands[k].op == Op::Push)
      opening.push_back(implies(sigma.any(x, [&](const LetterInfo& li) { return li.pair && li.first == k; }),
                                sigma.first_in(y, succ)));
    auto ends_at_k = sigma.any(x, [&](const LetterInfo& li) { return li.last == k; });
    if (ends_at_k.kind == FormulaKind::Or && ends_at_k.args.empty()) continue;
    sibling.push_back(implies(ends_at_k, sigma.first_in(y, succ)));
    closing.push_back(implies(ends_at_k, sigma.any(y, [&](const LetterInfo& li) {
      return li.pair && std::count(succ.begin(), succ.end(), li.last) > 0;
    })));
  }
  axioms.push_back(forall(x, forall(y, implies(next(x, y), conj(std::move(sibling))))));
  axioms.push_back(forall(x, forall(y, implies(conj({child(y, x), no_next(x)}), conj(std::move(closing))))));
  axioms.push_back(forall(x, forall(y, implies(conj({child(x, y), no_prev(y)}), conj(std::move(opening))))));
  // A childless pair node is an open immediately followed by its close.
  axioms.push_back(forall(x, implies(sigma.any(x, [](const LetterInfo& li) { return li.pair && li.last != li.first + 1; }),
                                     neg(is_leaf(x)))));

  // D: data classes.
  auto incs = [&](Var v, std::optional<std::uint32_t> c) {
    return sigma.any(v, [&, c](const LetterInfo& li) {
      return !li.pair && p.commands[li.first].op == Op::Inc && (!c || p.commands[li.first].arg == *c);
    });
  };
  auto decs = [&](Var v, std::optional<std::uint32_t> c) {
    return sigma.any(v, [&, c](const LetterInfo& li) {
      return !li.pair && p.commands[li.first].op == Op::Dec && (!c || p.commands[li.first].arg == *c);
    });
  };
  auto counter_op = [&](Var v) {
    return sigma.any(v, [&](const LetterInfo& li) { return !li.pair && p.commands[li.first].is_counter_op(); });
  };
  auto singleton = forall(y, implies(data_eq(x, y), equal(x, y)));
  axioms.push_back(forall(x, implies(neg(counter_op(x)), singleton)));
  axioms.push_back(forall(x, implies(incs(x, std::nullopt),
                                     forall(y, implies(conj({incs(y, std::nullopt), data_eq(x, y)}), equal(x, y))))));
  axioms.push_back(forall(x, implies(decs(x, std::nullopt),
                                     forall(y, implies(conj({decs(y, std::nullopt), data_eq(x, y)}), equal(x, y))))));
  for (std::uint32_t c = 0; c < p.counters.size(); ++c) {
    axioms.push_back(forall(x, implies(decs(x, c), exists(y, conj({incs(y, c), data_eq(x, y), prec(y, x)})))));
    axioms.push_back(forall(x, implies(incs(x, c), exists(y, conj({decs(y, c), data_eq(x, y)})))));
  }
  return conj(std::move(axioms));
}

/// Event sequence of a forest: open, children, close for internal nodes.
inline std::vector<std::uint32_t> forest_events(const SvasProgram& p, const LeafDataForest& f) {
  if (!f.well_formed()) throw DecodeError("data must sit exactly on the leaves");
  std::vector<std::uint32_t> out;
  auto visit = [&](auto&& self, const ForestNode& v) -> void {
    auto li = resolve_letter(p, v.letter);
    if (!li) throw DecodeError("unknown letter '" + v.letter + "'");
    if (!li->pair) {
      if (!v.is_leaf()) throw DecodeError("command letter '" + v.letter + "' on an internal node");
      out.push_back(li->first);
      return;
    }
    if (v.is_leaf() && li->last != li->first + 1)
      throw DecodeError("pair letter '" + v.letter + "' on a leaf but its pop does not follow its push");
    out.push_back(li->first);
    for (const auto& c : v.children) self(self, c);
    out.push_back(li->last);
  };
  for (const auto& r : f.roots) visit(visit, r);
  return out;
}

/// Replays the command sequence a forest describes. The result is Accepted only
/// if the replay visits exactly that sequence and accepts; a sequence that is
/// not a program path is reported as Rejected/PathMismatch.
inline RunTrace decode_forest(const SvasProgram& p, const LeafDataForest& f) {
  const auto events = forest_events(p, f);
  Witness w;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const Command& c = p.commands[events[i]];
    if (c.op != Op::Goto) continue;
    const bool take_alt = i + 1 < events.size() && events[i + 1] == c.alt && c.alt != c.arg;
    w.bits.push_back(take_alt ? 1 : 0);
  }
  RunTrace t = replay(p, w);
  const auto seq = t.command_sequence();
  const bool prefix = seq.size() <= events.size() && std::equal(seq.begin(), seq.end(), events.begin());
  if (prefix && seq.size() == events.size()) return t;
  if (prefix && !t.accepted() && t.reason != TraceReason::WitnessTooShort && t.reason != TraceReason::WitnessTooLong)
    return t;
  t.outcome = TraceOutcome::Rejected;
  t.reason = TraceReason::PathMismatch;
  return t;
}

/// Structural data check: every class is a lone non-counter leaf, or exactly
/// one Inc and one Dec leaf of the same counter with the Inc first.
inline bool data_matching_valid(const SvasProgram& p, const LeafDataForest& f) {
  const ForestView v(f);
  std::map<std::uint64_t, std::vector<std::size_t>> classes;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v.leaf[i]) classes[v.data[i]].push_back(i);
  auto command_of = [&](std::size_t node) -> const Command* {
    auto li = resolve_letter(p, v.letter[node]);
    if (!li || li->pair) return nullptr;
    return &p.commands[li->first];
  };
  for (const auto& [value, members] : classes) {
    if (members.size() == 1) {
      const Command* c = command_of(members[0]);
      if (c && c->is_counter_op()) return false;
      continue;
    }
    if (members.size() != 2) return false;
    const Command* a = command_of(members[0]);  // earlier in document order
    const Command* b = command_of(members[1]);
    if (!a || !b || a->op != Op::Inc || b->op != Op::Dec || a->arg != b->arg) return false;
  }
  return true;
}

/// Counter discipline of an encoding, restricted to Inc/Dec leaves: per
/// counter, a perfect matching of data classes with every Dec after its Inc.
inline bool counter_matching_perfect(const SvasProgram& p, const LeafDataForest& f) {
  const ForestView v(f);
  std::map<std::pair<std::uint32_t, std::uint64_t>, std::vector<std::size_t>> classes;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v.leaf[i]) continue;
    auto li = resolve_letter(p, v.letter[i]);
    if (!li || li->pair || !p.commands[li->first].is_counter_op()) continue;
    classes[{p.commands[li->first].arg, v.data[i]}].push_back(i);
  }
  std::set<std::uint64_t> seen;
  for (const auto& [key, members] : classes) {
    if (members.size() != 2 || !seen.insert(key.second).second) return false;
    auto op = [&](std::size_t node) { return p.commands[resolve_letter(p, v.letter[node])->first].op; };
    if (op(members[0]) != Op::Inc || op(members[1]) != Op::Dec) return false;
  }
  return true;
}

}  // namespace svas

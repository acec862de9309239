#pragma once

// Deterministic counter programs with zero tests, and the bounded-halting
// oracle used as ground truth for the compiler.

#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "svas/program.hpp"

namespace svas {

enum class CpOp : std::uint8_t { Inc, Dec, Goto, Ifz, Halt };

/// `counter` for Inc/Dec/Ifz; `target` for Goto and the zero branch of Ifz;
/// `other` for the nonzero branch of Ifz.
struct CpCommand {
  CpOp op = CpOp::Halt;
  std::uint32_t counter = 0;
  std::uint32_t target = 0;
  std::uint32_t other = 0;

  static CpCommand inc(std::uint32_t c) { return {CpOp::Inc, c, 0, 0}; }
  static CpCommand dec(std::uint32_t c) { return {CpOp::Dec, c, 0, 0}; }
  static CpCommand jump(std::uint32_t l) { return {CpOp::Goto, 0, l, 0}; }
  static CpCommand ifz(std::uint32_t c, std::uint32_t then_l, std::uint32_t else_l) {
    return {CpOp::Ifz, c, then_l, else_l};
  }
  static CpCommand halt() { return {CpOp::Halt, 0, 0, 0}; }

  friend bool operator==(const CpCommand& a, const CpCommand& b) {
    if (a.op != b.op) return false;
    switch (a.op) {
      case CpOp::Inc:
      case CpOp::Dec: return a.counter == b.counter;
      case CpOp::Goto: return a.target == b.target;
      case CpOp::Ifz: return a.counter == b.counter && a.target == b.target && a.other == b.other;
      case CpOp::Halt: return true;
    }
    return false;
  }
};

struct CounterProgram {
  std::vector<std::string> counters;
  std::vector<CpCommand> commands;
  std::map<std::string, std::uint32_t> labels;

  friend bool operator==(const CounterProgram& a, const CounterProgram& b) {
    return a.counters == b.counters && a.commands == b.commands;
  }
};

inline std::vector<Violation> validate(const CounterProgram& cp) {
  std::vector<Violation> out;
  const auto n = cp.commands.size();
  bool seen_halt = false;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = cp.commands[i];
    if ((c.op == CpOp::Inc || c.op == CpOp::Dec || c.op == CpOp::Ifz) && c.counter >= cp.counters.size())
      out.push_back({ViolationKind::UndeclaredCounter, i, "counter index out of range"});
    if ((c.op == CpOp::Goto && c.target >= n) || (c.op == CpOp::Ifz && (c.target >= n || c.other >= n)))
      out.push_back({ViolationKind::DanglingLabel, i, "jump target out of range"});
    if (c.op == CpOp::Halt) {
      seen_halt = true;
      if (i + 1 != n) out.push_back({ViolationKind::HaltNotLast, i, "halt must be the last command"});
    }
  }
  if (!seen_halt) out.push_back({ViolationKind::MissingHalt, n, "program has no halt"});
  return out;
}

inline CounterProgram parse_cp(std::string_view source) {
  detail::LineParser lp;
  std::vector<CpCommand> commands;
  std::size_t halt_line = 0;
  bool seen_halt = false;

  auto lines = text::split_lines(source);
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const std::size_t line = li + 1;
    auto body = text::trim(text::strip_comment(lines[li]));
    if (body.empty()) continue;
    if (lp.header(body, line, false)) continue;
    auto toks = lp.labels_and_tokens(body, line);
    if (toks.empty()) continue;
    const auto& kw = toks[0];
    auto expect = [&](std::size_t n) {
      if (toks.size() != n) throw ParseError(ParseErrorKind::Syntax, line, "malformed '" + kw + "' command");
    };
    if (seen_halt) throw ParseError(ParseErrorKind::HaltNotLast, halt_line, "halt is followed by further commands");
    lp.begin_command(line);
    const std::size_t idx = commands.size();
    if (kw == "inc" || kw == "dec") {
      expect(2);
      auto c = lp.counter(toks[1], line);
      commands.push_back(kw == "inc" ? CpCommand::inc(c) : CpCommand::dec(c));
    } else if (kw == "goto") {
      expect(2);
      lp.jumps.push_back({idx, 0, toks[1], line});
      commands.push_back(CpCommand::jump(0));
    } else if (kw == "ifz") {
      expect(6);
      if (toks[2] != "then" || toks[4] != "else")
        throw ParseError(ParseErrorKind::Syntax, line, "expected 'ifz c then L else M'");
      auto c = lp.counter(toks[1], line);
      lp.jumps.push_back({idx, 0, toks[3], line});
      lp.jumps.push_back({idx, 1, toks[5], line});
      commands.push_back(CpCommand::ifz(c, 0, 0));
    } else if (kw == "halt") {
      expect(1);
      commands.push_back(CpCommand::halt());
      seen_halt = true;
      halt_line = line;
    } else {
      throw ParseError(ParseErrorKind::Syntax, line, "unknown command '" + kw + "'");
    }
  }
  lp.finish();
  if (!seen_halt) throw ParseError(ParseErrorKind::MissingHalt, 0, "program has no halt");
  lp.resolve([&](std::size_t cmd, int slot, std::uint32_t target) {
    (slot == 0 ? commands[cmd].target : commands[cmd].other) = target;
  });

  CounterProgram cp;
  cp.counters = std::move(lp.counters);
  cp.commands = std::move(commands);
  cp.labels = std::move(lp.labels);
  return cp;
}

inline std::string command_text(const CounterProgram& cp, const CpCommand& c) {
  switch (c.op) {
    case CpOp::Inc: return "inc " + cp.counters.at(c.counter);
    case CpOp::Dec: return "dec " + cp.counters.at(c.counter);
    case CpOp::Goto: return "goto C" + std::to_string(c.target);
    case CpOp::Ifz:
      return "ifz " + cp.counters.at(c.counter) + " then C" + std::to_string(c.target) + " else C" +
             std::to_string(c.other);
    case CpOp::Halt: return "halt";
  }
  return "?";
}

inline std::string serialize_cp(const CounterProgram& cp) {
  std::ostringstream os;
  os << "counters:";
  for (const auto& c : cp.counters) os << ' ' << c;
  for (std::size_t i = 0; i < cp.commands.size(); ++i) os << "\nC" << i << ": " << command_text(cp, cp.commands[i]);
  return os.str();
}

struct BoundedRunResult {
  enum class Kind : std::uint8_t { HaltsWithinBound, ExceedsBound, AbortsOnDecrement, Diverges };
  Kind kind = Kind::Diverges;
  /// Trace length for HaltsWithinBound (commands executed, halt excluded);
  /// otherwise the 0-based index of the offending step, or for Diverges the
  /// step at which a configuration first repeats.
  std::uint64_t step = 0;
  /// Counter that would exceed the bound (ExceedsBound) or underflow.
  std::uint32_t counter = 0;

  bool halts() const { return kind == Kind::HaltsWithinBound; }
  friend bool operator==(const BoundedRunResult&, const BoundedRunResult&) = default;
};

inline std::string_view to_string(BoundedRunResult::Kind k) {
  switch (k) {
    case BoundedRunResult::Kind::HaltsWithinBound: return "HaltsWithinBound";
    case BoundedRunResult::Kind::ExceedsBound: return "ExceedsBound";
    case BoundedRunResult::Kind::AbortsOnDecrement: return "AbortsOnDecrement";
    case BoundedRunResult::Kind::Diverges: return "Diverges";
  }
  return "?";
}

/// Simulates the unique run of `cp` with every counter kept at most `bound`.
/// Repetition of a full configuration is conclusive divergence since the
/// bounded configuration space is finite.
inline BoundedRunResult bounded_halting(const CounterProgram& cp, std::uint64_t bound) {
  std::vector<std::uint64_t> vals(cp.counters.size(), 0);
  std::uint32_t pc = 0;
  std::set<std::pair<std::uint32_t, std::vector<std::uint64_t>>> seen;
  for (std::uint64_t t = 0;; ++t) {
    if (!seen.emplace(pc, vals).second) return {BoundedRunResult::Kind::Diverges, t, 0};
    const CpCommand& c = cp.commands.at(pc);
    switch (c.op) {
      case CpOp::Halt: return {BoundedRunResult::Kind::HaltsWithinBound, t, 0};
      case CpOp::Inc:
        if (vals[c.counter] >= bound) return {BoundedRunResult::Kind::ExceedsBound, t, c.counter};
        ++vals[c.counter];
        ++pc;
        break;
      case CpOp::Dec:
        if (vals[c.counter] == 0) return {BoundedRunResult::Kind::AbortsOnDecrement, t, c.counter};
        --vals[c.counter];
        ++pc;
        break;
      case CpOp::Goto: pc = c.target; break;
      case CpOp::Ifz: pc = vals[c.counter] == 0 ? c.target : c.other; break;
    }
  }
}

}  // namespace svas

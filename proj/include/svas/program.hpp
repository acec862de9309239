#pragma once

// SVAS programs: counters that may not go negative, a finite-alphabet stack,
// nondeterministic two-way jumps and a single trailing halt.

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "svas/text.hpp"

namespace svas {

enum class Op : std::uint8_t { Inc, Dec, Push, Pop, Goto, Halt };

/// One SVAS command. `arg` is a counter index (Inc/Dec), a symbol index
/// (Push/Pop) or the first jump target (Goto); `alt` is the second target.
struct Command {
  Op op = Op::Halt;
  std::uint32_t arg = 0;
  std::uint32_t alt = 0;

  static Command inc(std::uint32_t counter) { return {Op::Inc, counter, 0}; }
  static Command dec(std::uint32_t counter) { return {Op::Dec, counter, 0}; }
  static Command push(std::uint32_t symbol) { return {Op::Push, symbol, 0}; }
  static Command pop(std::uint32_t symbol) { return {Op::Pop, symbol, 0}; }
  static Command jump(std::uint32_t a, std::uint32_t b) { return {Op::Goto, a, b}; }
  static Command jump(std::uint32_t a) { return {Op::Goto, a, a}; }
  static Command halt() { return {Op::Halt, 0, 0}; }

  bool is_counter_op() const { return op == Op::Inc || op == Op::Dec; }
  bool is_stack_op() const { return op == Op::Push || op == Op::Pop; }

  friend bool operator==(const Command& a, const Command& b) {
    if (a.op != b.op) return false;
    switch (a.op) {
      case Op::Halt: return true;
      case Op::Goto: return a.arg == b.arg && a.alt == b.alt;
      default: return a.arg == b.arg;
    }
  }
};

struct SvasProgram {
  std::vector<std::string> counters;
  std::vector<std::string> alphabet;
  std::vector<Command> commands;
  std::map<std::string, std::uint32_t> labels;

  std::size_t size() const { return commands.size(); }

  // Structural equality ignores label names.
  friend bool operator==(const SvasProgram& a, const SvasProgram& b) {
    return a.counters == b.counters && a.alphabet == b.alphabet && a.commands == b.commands;
  }

  std::optional<std::uint32_t> counter_index(std::string_view name) const {
    for (std::size_t i = 0; i < counters.size(); ++i)
      if (counters[i] == name) return static_cast<std::uint32_t>(i);
    return std::nullopt;
  }
  std::optional<std::uint32_t> symbol_index(std::string_view name) const {
    for (std::size_t i = 0; i < alphabet.size(); ++i)
      if (alphabet[i] == name) return static_cast<std::uint32_t>(i);
    return std::nullopt;
  }
};

enum class ViolationKind {
  HaltNotLast,
  MissingHalt,
  DanglingLabel,
  UndeclaredCounter,
  UndeclaredSymbol,
};

inline std::string_view to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::HaltNotLast: return "HaltNotLast";
    case ViolationKind::MissingHalt: return "MissingHalt";
    case ViolationKind::DanglingLabel: return "DanglingLabel";
    case ViolationKind::UndeclaredCounter: return "UndeclaredCounter";
    case ViolationKind::UndeclaredSymbol: return "UndeclaredSymbol";
  }
  return "?";
}

struct Violation {
  ViolationKind kind;
  std::size_t command = 0;
  std::string message;
};

inline std::vector<Violation> validate(const SvasProgram& p) {
  std::vector<Violation> out;
  const auto n = p.commands.size();
  bool seen_halt = false;
  for (std::size_t i = 0; i < n; ++i) {
    const Command& c = p.commands[i];
    switch (c.op) {
      case Op::Inc:
      case Op::Dec:
        if (c.arg >= p.counters.size())
          out.push_back({ViolationKind::UndeclaredCounter, i, "counter index out of range"});
        break;
      case Op::Push:
      case Op::Pop:
        if (c.arg >= p.alphabet.size())
          out.push_back({ViolationKind::UndeclaredSymbol, i, "symbol index out of range"});
        break;
      case Op::Goto:
        if (c.arg >= n || c.alt >= n)
          out.push_back({ViolationKind::DanglingLabel, i, "jump target out of range"});
        break;
      case Op::Halt:
        seen_halt = true;
        if (i + 1 != n) out.push_back({ViolationKind::HaltNotLast, i, "halt must be the last command"});
        break;
    }
  }
  for (const auto& [name, idx] : p.labels)
    if (idx >= n) out.push_back({ViolationKind::DanglingLabel, idx, "label '" + name + "' has no command"});
  if (!seen_halt) out.push_back({ViolationKind::MissingHalt, n, "program has no halt"});
  return out;
}

enum class ParseErrorKind {
  Syntax,
  UndeclaredCounter,
  UndeclaredSymbol,
  DuplicateLabel,
  DuplicateDeclaration,
  HaltNotLast,
  MissingHalt,
  DanglingLabel,
};

inline std::string_view to_string(ParseErrorKind k) {
  switch (k) {
    case ParseErrorKind::Syntax: return "Syntax";
    case ParseErrorKind::UndeclaredCounter: return "UndeclaredCounter";
    case ParseErrorKind::UndeclaredSymbol: return "UndeclaredSymbol";
    case ParseErrorKind::DuplicateLabel: return "DuplicateLabel";
    case ParseErrorKind::DuplicateDeclaration: return "DuplicateDeclaration";
    case ParseErrorKind::HaltNotLast: return "HaltNotLast";
    case ParseErrorKind::MissingHalt: return "MissingHalt";
    case ParseErrorKind::DanglingLabel: return "DanglingLabel";
  }
  return "?";
}

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + std::string(to_string(kind)) + ": " + what),
        kind_(kind),
        line_(line) {}
  ParseErrorKind kind() const { return kind_; }
  /// 1-based source line; 0 when the error is not tied to a line.
  std::size_t line() const { return line_; }

 private:
  ParseErrorKind kind_;
  std::size_t line_;
};

namespace detail {

/// Shared front half of the SVAS and counter-program parsers: headers,
/// label prefixes, and deferred label resolution.
struct LineParser {
  struct PendingJump {
    std::size_t command;
    int slot;
    std::string label;
    std::size_t line;
  };

  std::vector<std::string> counters;
  std::vector<std::string> alphabet;
  std::map<std::string, std::uint32_t> labels;
  std::vector<PendingJump> jumps;
  std::vector<std::size_t> command_lines;
  std::vector<std::string> pending_labels;
  std::size_t pending_label_line = 0;
  bool seen_counters = false;
  bool seen_alphabet = false;

  static std::vector<std::string> declare(const std::vector<std::string>& names, std::size_t line) {
    std::vector<std::string> out;
    for (const auto& n : names) {
      if (!text::is_identifier(n)) throw ParseError(ParseErrorKind::Syntax, line, "bad name '" + n + "'");
      for (const auto& o : out)
        if (o == n) throw ParseError(ParseErrorKind::DuplicateDeclaration, line, "'" + n + "' declared twice");
      out.push_back(n);
    }
    return out;
  }

  /// Returns true when the line was a header.
  bool header(std::string_view body, std::size_t line, bool allow_alphabet) {
    auto take = [&](std::string_view key, bool& seen, std::vector<std::string>& into) {
      if (body.substr(0, key.size()) != key) return false;
      if (seen) throw ParseError(ParseErrorKind::DuplicateDeclaration, line, std::string(key) + " given twice");
      if (!command_lines.empty())
        throw ParseError(ParseErrorKind::Syntax, line, std::string(key) + " must precede commands");
      seen = true;
      into = declare(text::split_ws(body.substr(key.size())), line);
      return true;
    };
    if (take("counters:", seen_counters, counters)) return true;
    if (allow_alphabet && take("alphabet:", seen_alphabet, alphabet)) return true;
    return false;
  }

  /// Strips "LABEL:" prefixes, registering them for the next command.
  std::vector<std::string> labels_and_tokens(std::string_view body, std::size_t line) {
    auto toks = text::split_ws(body);
    std::size_t i = 0;
    while (i < toks.size() && toks[i].size() > 1 && toks[i].back() == ':') {
      std::string name = toks[i].substr(0, toks[i].size() - 1);
      if (!text::is_identifier(name)) throw ParseError(ParseErrorKind::Syntax, line, "bad label '" + name + "'");
      for (const auto& pl : pending_labels)
        if (pl == name) throw ParseError(ParseErrorKind::DuplicateLabel, line, "label '" + name + "' repeated");
      if (labels.count(name)) throw ParseError(ParseErrorKind::DuplicateLabel, line, "label '" + name + "' repeated");
      pending_labels.push_back(name);
      pending_label_line = line;
      ++i;
    }
    return {toks.begin() + static_cast<std::ptrdiff_t>(i), toks.end()};
  }

  void begin_command(std::size_t line) {
    auto idx = static_cast<std::uint32_t>(command_lines.size());
    for (auto& l : pending_labels) labels.emplace(std::move(l), idx);
    pending_labels.clear();
    command_lines.push_back(line);
  }

  std::uint32_t counter(const std::string& name, std::size_t line) const {
    for (std::size_t i = 0; i < counters.size(); ++i)
      if (counters[i] == name) return static_cast<std::uint32_t>(i);
    throw ParseError(ParseErrorKind::UndeclaredCounter, line, "counter '" + name + "' not declared");
  }

  std::uint32_t symbol(const std::string& name, std::size_t line) const {
    for (std::size_t i = 0; i < alphabet.size(); ++i)
      if (alphabet[i] == name) return static_cast<std::uint32_t>(i);
    throw ParseError(ParseErrorKind::UndeclaredSymbol, line, "symbol '" + name + "' not declared");
  }

  void finish() {
    if (!pending_labels.empty())
      throw ParseError(ParseErrorKind::DanglingLabel, pending_label_line,
                       "label '" + pending_labels.front() + "' is not followed by a command");
  }

  /// Resolves deferred jump targets through `set(command, slot, index)`.
  template <typename Setter>
  void resolve(Setter&& set) const {
    for (const auto& j : jumps) {
      auto it = labels.find(j.label);
      if (it == labels.end())
        throw ParseError(ParseErrorKind::DanglingLabel, j.line, "label '" + j.label + "' is not defined");
      set(j.command, j.slot, it->second);
    }
  }
};

}  // namespace detail

inline SvasProgram parse_svas(std::string_view source) {
  detail::LineParser lp;
  std::vector<Command> commands;
  std::size_t halt_line = 0;
  bool seen_halt = false;

  auto lines = text::split_lines(source);
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const std::size_t line = li + 1;
    auto body = text::trim(text::strip_comment(lines[li]));
    if (body.empty()) continue;
    if (lp.header(body, line, true)) continue;
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
      commands.push_back(kw == "inc" ? Command::inc(c) : Command::dec(c));
    } else if (kw == "push" || kw == "pop") {
      expect(2);
      auto s = lp.symbol(toks[1], line);
      commands.push_back(kw == "push" ? Command::push(s) : Command::pop(s));
    } else if (kw == "goto") {
      if (toks.size() == 2) {
        lp.jumps.push_back({idx, 0, toks[1], line});
        lp.jumps.push_back({idx, 1, toks[1], line});
      } else {
        expect(4);
        if (toks[2] != "or") throw ParseError(ParseErrorKind::Syntax, line, "expected 'goto L1 or L2'");
        lp.jumps.push_back({idx, 0, toks[1], line});
        lp.jumps.push_back({idx, 1, toks[3], line});
      }
      commands.push_back(Command::jump(0, 0));
    } else if (kw == "halt") {
      expect(1);
      commands.push_back(Command::halt());
      seen_halt = true;
      halt_line = line;
    } else {
      throw ParseError(ParseErrorKind::Syntax, line, "unknown command '" + kw + "'");
    }
  }
  lp.finish();
  if (!seen_halt) throw ParseError(ParseErrorKind::MissingHalt, 0, "program has no halt");
  lp.resolve([&](std::size_t cmd, int slot, std::uint32_t target) {
    (slot == 0 ? commands[cmd].arg : commands[cmd].alt) = target;
  });

  SvasProgram p;
  p.counters = std::move(lp.counters);
  p.alphabet = std::move(lp.alphabet);
  p.commands = std::move(commands);
  p.labels = std::move(lp.labels);
  return p;
}

inline std::string command_text(const SvasProgram& p, const Command& c) {
  switch (c.op) {
    case Op::Inc: return "inc " + p.counters.at(c.arg);
    case Op::Dec: return "dec " + p.counters.at(c.arg);
    case Op::Push: return "push " + p.alphabet.at(c.arg);
    case Op::Pop: return "pop " + p.alphabet.at(c.arg);
    case Op::Goto: return "goto C" + std::to_string(c.arg) + " or C" + std::to_string(c.alt);
    case Op::Halt: return "halt";
  }
  return "?";
}

/// Canonical text: every command labelled "Ci:", jumps refer to those labels.
inline std::string serialize_svas(const SvasProgram& p) {
  std::ostringstream os;
  os << "counters:";
  for (const auto& c : p.counters) os << ' ' << c;
  os << "\nalphabet:";
  for (const auto& a : p.alphabet) os << ' ' << a;
  for (std::size_t i = 0; i < p.commands.size(); ++i) os << "\nC" << i << ": " << command_text(p, p.commands[i]);
  return os.str();
}

}  // namespace svas

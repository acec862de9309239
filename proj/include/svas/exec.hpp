#pragma once

// Execution semantics: the one-step relation, witness replay, policy-guided
// runs, and exhaustive breadth-first reachability search.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "svas/annotation.hpp"
#include "svas/configuration.hpp"
#include "svas/program.hpp"

namespace svas {

enum class AbortReason : std::uint8_t { DecrementOfZero, PopOnEmpty, PopMismatch };

inline std::string_view to_string(AbortReason r) {
  switch (r) {
    case AbortReason::DecrementOfZero: return "DecrementOfZero";
    case AbortReason::PopOnEmpty: return "PopOnEmpty";
    case AbortReason::PopMismatch: return "PopMismatch";
  }
  return "?";
}

struct Successor {
  Configuration config;
  std::optional<std::uint8_t> choice;
};

struct StepOutcome {
  enum class Kind : std::uint8_t { Successors, Abort, Halted };
  Kind kind = Kind::Halted;
  std::vector<Successor> successors;
  AbortReason reason = AbortReason::DecrementOfZero;
};

namespace detail {

/// Applies a non-jump command in place. Returns the abort reason on failure.
inline std::optional<AbortReason> apply(const Command& cmd, Configuration& c) {
  switch (cmd.op) {
    case Op::Inc: ++c.counters[cmd.arg]; break;
    case Op::Dec:
      if (c.counters[cmd.arg] == 0) return AbortReason::DecrementOfZero;
      --c.counters[cmd.arg];
      break;
    case Op::Push: c.stack.push_back(cmd.arg); break;
    case Op::Pop:
      if (c.stack.empty()) return AbortReason::PopOnEmpty;
      if (c.stack.back() != cmd.arg) return AbortReason::PopMismatch;
      c.stack.pop_back();
      break;
    case Op::Goto:
    case Op::Halt: break;
  }
  ++c.pc;
  return std::nullopt;
}

}  // namespace detail

inline StepOutcome step(const SvasProgram& p, const Configuration& c) {
  if (c.pc >= p.commands.size()) throw std::out_of_range("pc outside program");
  const Command& cmd = p.commands[c.pc];
  StepOutcome out;
  if (cmd.op == Op::Halt) {
    out.kind = StepOutcome::Kind::Halted;
    return out;
  }
  if (cmd.op == Op::Goto) {
    out.kind = StepOutcome::Kind::Successors;
    Configuration a = c, b = c;
    a.pc = cmd.arg;
    b.pc = cmd.alt;
    out.successors.push_back({std::move(a), 0});
    out.successors.push_back({std::move(b), 1});
    return out;
  }
  Configuration next = c;
  if (auto r = detail::apply(cmd, next)) {
    out.kind = StepOutcome::Kind::Abort;
    out.reason = *r;
    return out;
  }
  out.kind = StepOutcome::Kind::Successors;
  out.successors.push_back({std::move(next), std::nullopt});
  return out;
}

inline bool is_accepting(const SvasProgram& p, const Configuration& c) {
  return c.pc < p.commands.size() && p.commands[c.pc].op == Op::Halt && c.all_counters_zero() && c.stack.empty();
}

/// One bit per executed jump, in execution order.
struct Witness {
  std::vector<std::uint8_t> bits;
  friend bool operator==(const Witness&, const Witness&) = default;
};

inline std::string format_witness(const Witness& w) {
  std::string s;
  s.reserve(w.bits.size());
  for (auto b : w.bits) s.push_back(b ? '1' : '0');
  return s;
}

inline Witness parse_witness(std::string_view text) {
  Witness w;
  for (char ch : text) {
    if (ch == '0' || ch == '1') w.bits.push_back(static_cast<std::uint8_t>(ch - '0'));
    else if (ch == '\n' || ch == '\r' || ch == ' ' || ch == '\t') continue;
    else throw std::invalid_argument("witness may contain only '0' and '1'");
  }
  return w;
}

enum class TraceOutcome : std::uint8_t { Accepted, Rejected, Aborted, LimitHit };

enum class TraceReason : std::uint8_t {
  None,
  DecrementOfZero,
  PopOnEmpty,
  PopMismatch,
  NonZeroAtHalt,
  WitnessTooShort,
  WitnessTooLong,
  PathMismatch,
  StepLimit,
};

inline std::string_view to_string(TraceOutcome o) {
  switch (o) {
    case TraceOutcome::Accepted: return "Accepted";
    case TraceOutcome::Rejected: return "Rejected";
    case TraceOutcome::Aborted: return "Aborted";
    case TraceOutcome::LimitHit: return "LimitHit";
  }
  return "?";
}

inline std::string_view to_string(TraceReason r) {
  switch (r) {
    case TraceReason::None: return "none";
    case TraceReason::DecrementOfZero: return "DecrementOfZero";
    case TraceReason::PopOnEmpty: return "PopOnEmpty";
    case TraceReason::PopMismatch: return "PopMismatch";
    case TraceReason::NonZeroAtHalt: return "NonZeroAtHalt";
    case TraceReason::WitnessTooShort: return "WitnessTooShort";
    case TraceReason::WitnessTooLong: return "WitnessTooLong";
    case TraceReason::PathMismatch: return "PathMismatch";
    case TraceReason::StepLimit: return "StepLimit";
  }
  return "?";
}

struct TraceStep {
  std::uint32_t index = 0;
  Command command;
  /// Configuration after the step; left empty when configurations are not kept.
  Configuration after;
};

struct RunTrace {
  std::vector<TraceStep> steps;
  std::vector<std::uint64_t> inc_counts;
  std::vector<std::uint64_t> dec_counts;
  TraceOutcome outcome = TraceOutcome::Rejected;
  TraceReason reason = TraceReason::None;
  Configuration final_config;
  /// Number of steps taken, whether or not they were kept.
  std::uint64_t length = 0;

  bool accepted() const { return outcome == TraceOutcome::Accepted; }

  std::vector<std::uint32_t> command_sequence() const {
    std::vector<std::uint32_t> out;
    out.reserve(steps.size());
    for (const auto& s : steps) out.push_back(s.index);
    return out;
  }
};

struct TraceOptions {
  bool keep_steps = true;
  bool keep_configurations = true;
  /// Called with every configuration reached, starting with the initial one.
  std::function<void(const Configuration&)> observer;
};

class UnknownCounter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// (increments, decrements) executed on `counter` along the trace.
inline std::pair<std::uint64_t, std::uint64_t> count_events(const RunTrace& t, std::uint32_t counter) {
  if (t.inc_counts.empty() && t.dec_counts.empty()) return {0, 0};
  if (counter >= t.inc_counts.size()) throw UnknownCounter("counter index " + std::to_string(counter));
  return {t.inc_counts[counter], t.dec_counts[counter]};
}

inline std::pair<std::uint64_t, std::uint64_t> count_events(const RunTrace& t, const SvasProgram& p,
                                                            std::string_view counter) {
  auto idx = p.counter_index(counter);
  if (!idx) throw UnknownCounter("unknown counter '" + std::string(counter) + "'");
  return count_events(t, *idx);
}

namespace detail {

/// Shared driver for replay and policy runs. `choose` returns the branch for a
/// jump, or nullopt to stop with the given rejection.
template <typename Choose>
RunTrace drive(const SvasProgram& p, Choose&& choose, std::uint64_t max_steps, const TraceOptions& opts) {
  RunTrace t;
  t.inc_counts.assign(p.counters.size(), 0);
  t.dec_counts.assign(p.counters.size(), 0);
  Configuration c = Configuration::initial(p);
  if (opts.observer) opts.observer(c);
  auto record = [&](std::uint32_t idx, const Command& cmd) {
    ++t.length;
    if (!opts.keep_steps) return;
    TraceStep s{idx, cmd, {}};
    if (opts.keep_configurations) s.after = c;
    t.steps.push_back(std::move(s));
  };
  std::uint64_t taken = 0;
  while (true) {
    const std::uint32_t idx = c.pc;
    const Command& cmd = p.commands.at(idx);
    if (cmd.op == Op::Halt) {
      record(idx, cmd);
      auto verdict = choose.at_halt();
      if (verdict != TraceReason::None) {
        t.outcome = TraceOutcome::Rejected;
        t.reason = verdict;
      } else if (!c.all_counters_zero() || !c.stack.empty()) {
        t.outcome = TraceOutcome::Rejected;
        t.reason = TraceReason::NonZeroAtHalt;
      } else {
        t.outcome = TraceOutcome::Accepted;
      }
      break;
    }
    if (taken >= max_steps) {
      t.outcome = TraceOutcome::LimitHit;
      t.reason = TraceReason::StepLimit;
      break;
    }
    ++taken;
    if (cmd.op == Op::Goto) {
      auto branch = choose(idx, c);
      if (!branch) {
        t.outcome = TraceOutcome::Rejected;
        t.reason = choose.failure();
        break;
      }
      c.pc = *branch ? cmd.alt : cmd.arg;
      record(idx, cmd);
      if (opts.observer) opts.observer(c);
      continue;
    }
    if (auto r = apply(cmd, c)) {
      t.outcome = TraceOutcome::Aborted;
      t.reason = *r == AbortReason::DecrementOfZero ? TraceReason::DecrementOfZero
                 : *r == AbortReason::PopOnEmpty    ? TraceReason::PopOnEmpty
                                                    : TraceReason::PopMismatch;
      break;
    }
    if (cmd.op == Op::Inc) ++t.inc_counts[cmd.arg];
    if (cmd.op == Op::Dec) ++t.dec_counts[cmd.arg];
    record(idx, cmd);
    if (opts.observer) opts.observer(c);
  }
  t.final_config = std::move(c);
  return t;
}

struct WitnessChooser {
  const Witness& w;
  std::size_t used = 0;
  std::optional<std::uint8_t> operator()(std::uint32_t, const Configuration&) {
    if (used >= w.bits.size()) return std::nullopt;
    return w.bits[used++];
  }
  TraceReason failure() const { return TraceReason::WitnessTooShort; }
  TraceReason at_halt() const { return used == w.bits.size() ? TraceReason::None : TraceReason::WitnessTooLong; }
};

struct PolicyChooser {
  const ChoiceAnnotationTable& ann;
  const SvasProgram& p;
  std::optional<std::uint8_t> operator()(std::uint32_t idx, const Configuration& c) {
    const Command& cmd = p.commands[idx];
    if (cmd.arg == cmd.alt) return 0;
    return static_cast<std::uint8_t>(ann.choose(idx, c));
  }
  TraceReason failure() const { return TraceReason::None; }
  TraceReason at_halt() const { return TraceReason::None; }
};

}  // namespace detail

/// Deterministic run consuming one witness bit per executed jump.
inline RunTrace replay(const SvasProgram& p, const Witness& w, const TraceOptions& opts = {}) {
  detail::WitnessChooser chooser{w};
  // Between two jumps at most |p| commands run, so the witness bounds the run.
  const std::uint64_t bound = (w.bits.size() + 1) * (p.commands.size() + 1);
  return detail::drive(p, chooser, bound, opts);
}

/// Runs `p` resolving every distinct-target jump by its annotation.
inline RunTrace run_policy(const SvasProgram& p, const ChoiceAnnotationTable& ann, std::uint64_t max_steps,
                           const TraceOptions& opts = {}) {
  if (auto miss = ann.missing(p); !miss.empty())
    throw AnnotationError("MissingAnnotation: jump " + std::to_string(miss.front()) + " is not annotated");
  detail::PolicyChooser chooser{ann, p};
  return detail::drive(p, chooser, max_steps, opts);
}

/// Line per step "idx<TAB>command<TAB>counters<TAB>stack", then a "#" footer.
inline std::string format_trace(const SvasProgram& p, const RunTrace& t) {
  std::ostringstream os;
  for (const auto& s : t.steps)
    os << s.index << '\t' << command_text(p, s.command) << '\t' << format_counters(p, s.after) << '\t'
       << format_stack(p, s.after) << '\n';
  os << "# outcome=" << to_string(t.outcome) << " reason=" << to_string(t.reason) << " steps=" << t.length
     << '\n';
  for (std::size_t i = 0; i < p.counters.size(); ++i)
    os << "# count " << p.counters[i] << " inc=" << t.inc_counts[i] << " dec=" << t.dec_counts[i] << '\n';
  return os.str();
}

struct SearchLimits {
  std::uint64_t max_configurations = 1'000'000;
  std::uint64_t max_stack_depth = 64;
  std::uint64_t max_counter_value = 1'000;
};

struct SearchStats {
  std::uint64_t explored = 0;
  std::uint64_t frontier_peak = 0;
  double wall_seconds = 0;
  bool limit_hit = false;
};

struct SearchResult {
  enum class Verdict : std::uint8_t { Reachable, Unreachable, Inconclusive };
  Verdict verdict = Verdict::Inconclusive;
  Witness witness;
  SearchStats stats;
};

inline std::string_view to_string(SearchResult::Verdict v) {
  switch (v) {
    case SearchResult::Verdict::Reachable: return "Reachable";
    case SearchResult::Verdict::Unreachable: return "Unreachable";
    case SearchResult::Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

/// Deterministic key=value stats line; wall time is reported separately.
inline std::string format_stats(const SearchResult& r) {
  std::ostringstream os;
  os << "verdict=" << to_string(r.verdict) << " explored=" << r.stats.explored
     << " frontier_peak=" << r.stats.frontier_peak << " limit_hit=" << (r.stats.limit_hit ? 1 : 0);
  return os.str();
}

struct SearchOptions {
  /// Called once for every configuration taken off the frontier.
  std::function<void(const Configuration&)> observer;
};

namespace detail {

struct SearchNode {
  Configuration config;
  std::uint64_t tally = 0;
  friend bool operator==(const SearchNode&, const SearchNode&) = default;
};

struct SearchNodeHash {
  std::size_t operator()(const SearchNode& n) const noexcept {
    return ConfigurationHash{}(n.config) ^ (n.tally * 0x9e3779b97f4a7c15ULL);
  }
};

/// Breadth-first exploration over (configuration, tally) pairs. `weights`, when
/// non-empty, adds weights[pc] to the tally each time command pc executes.
/// `on_accept` returns true to stop the search.
template <typename OnAccept>
SearchStats explore(const SvasProgram& p, const SearchLimits& limits, const std::vector<std::uint64_t>& weights,
                    const SearchOptions& opts, std::vector<SearchNode>& nodes, std::vector<std::int64_t>& parent,
                    std::vector<std::int8_t>& bit, OnAccept&& on_accept) {
  const auto started = std::chrono::steady_clock::now();
  SearchStats stats;
  std::unordered_map<SearchNode, std::uint32_t, SearchNodeHash> seen;
  std::deque<std::uint32_t> frontier;

  auto admit = [&](SearchNode n, std::int64_t from, std::int8_t b) {
    if (n.config.stack.size() > limits.max_stack_depth) {
      stats.limit_hit = true;
      return;
    }
    for (auto v : n.config.counters)
      if (v > limits.max_counter_value) {
        stats.limit_hit = true;
        return;
      }
    if (seen.count(n)) return;
    if (nodes.size() >= limits.max_configurations) {
      stats.limit_hit = true;
      return;
    }
    auto id = static_cast<std::uint32_t>(nodes.size());
    seen.emplace(n, id);
    nodes.push_back(std::move(n));
    parent.push_back(from);
    bit.push_back(b);
    frontier.push_back(id);
    stats.frontier_peak = std::max<std::uint64_t>(stats.frontier_peak, frontier.size());
  };

  admit(SearchNode{Configuration::initial(p), 0}, -1, -1);
  while (!frontier.empty()) {
    const std::uint32_t id = frontier.front();
    frontier.pop_front();
    ++stats.explored;
    const SearchNode& node = nodes[id];
    if (opts.observer) opts.observer(node.config);
    const Command& cmd = p.commands[node.config.pc];
    if (cmd.op == Op::Halt) {
      if (node.config.all_counters_zero() && node.config.stack.empty() && on_accept(id)) break;
      continue;
    }
    const std::uint64_t tally = node.tally + (weights.empty() ? 0 : weights[node.config.pc]);
    if (cmd.op == Op::Goto) {
      SearchNode a{node.config, tally};
      a.config.pc = cmd.arg;
      if (cmd.arg == cmd.alt) {
        admit(std::move(a), id, 0);
      } else {
        SearchNode b{node.config, tally};
        b.config.pc = cmd.alt;
        admit(std::move(a), id, 0);
        admit(std::move(b), id, 1);
      }
      continue;
    }
    SearchNode next{node.config, tally};
    if (apply(cmd, next.config)) continue;
    admit(std::move(next), id, -1);
  }
  stats.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return stats;
}

}  // namespace detail

/// Breadth-first search for an accepting configuration. Reachable carries the
/// shortest witness; Unreachable means the space closed without hitting limits.
inline SearchResult search_reach(const SvasProgram& p, const SearchLimits& limits, const SearchOptions& opts = {}) {
  std::vector<detail::SearchNode> nodes;
  std::vector<std::int64_t> parent;
  std::vector<std::int8_t> bit;
  std::optional<std::uint32_t> hit;
  SearchResult r;
  r.stats = detail::explore(p, limits, {}, opts, nodes, parent, bit, [&](std::uint32_t id) {
    hit = id;
    return true;
  });
  if (hit) {
    r.verdict = SearchResult::Verdict::Reachable;
    for (std::int64_t at = *hit; at >= 0; at = parent[static_cast<std::size_t>(at)]) {
      // A same-target jump still consumes one bit; record it as 0.
      auto from = parent[static_cast<std::size_t>(at)];
      if (from >= 0 && p.commands[nodes[static_cast<std::size_t>(from)].config.pc].op == Op::Goto)
        r.witness.bits.push_back(static_cast<std::uint8_t>(std::max<std::int8_t>(bit[static_cast<std::size_t>(at)], 0)));
    }
    std::reverse(r.witness.bits.begin(), r.witness.bits.end());
  } else {
    r.verdict = r.stats.limit_hit ? SearchResult::Verdict::Inconclusive : SearchResult::Verdict::Unreachable;
  }
  return r;
}

struct TallyResult {
  /// Distinct tallies observed at accepting configurations.
  std::set<std::uint64_t> accepting_tallies;
  /// True when the (configuration, tally) space closed without hitting limits.
  bool closed = false;
  SearchStats stats;
};

/// Exhaustively enumerates every reachable (configuration, tally) pair, where
/// the tally sums `weights[pc]` over executed commands. The tallies found at
/// accepting configurations are exactly those of the accepting runs.
inline TallyResult accepting_tallies(const SvasProgram& p, const SearchLimits& limits,
                                     const std::vector<std::uint64_t>& weights, const SearchOptions& opts = {}) {
  if (weights.size() != p.commands.size()) throw std::invalid_argument("one weight per command required");
  std::vector<detail::SearchNode> nodes;
  std::vector<std::int64_t> parent;
  std::vector<std::int8_t> bit;
  TallyResult r;
  r.stats = detail::explore(p, limits, weights, opts, nodes, parent, bit, [&](std::uint32_t id) {
    r.accepting_tallies.insert(nodes[id].tally);
    return false;
  });
  r.closed = !r.stats.limit_hit;
  return r;
}

}  // namespace svas

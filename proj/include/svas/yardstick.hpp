#pragma once

// Compiler from (2⇑n)-bounded counter programs to SVAS.
//
// Every simulated counter x is paired with x' so that x + x' = 2⇑n. Zero tests
// move x' into s_n and call Dec_n, which can only complete after exactly 2⇑n
// decrements of s_n. Dec_{k+1} is built from level-k machinery: it pushes a
// 2⇑k-digit binary number of level-k digits, increments it until it is all
// ones (one decrement of s_{k+1} per increment) and pops it again. Digit and
// increment counts are enforced by the auxiliary pairs (t_k, t_k') and
// (u_k, u_k') together with level-k zero tests.
//
// Layout of every emitted program:
//   Init_1 .. Init_n | main code | Dec_n .. Dec_1 bodies | drain epilogue | halt

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "svas/annotation.hpp"
#include "svas/configuration.hpp"
#include "svas/counter_program.hpp"
#include "svas/program.hpp"
#include "svas/tetration.hpp"

namespace svas {

class LevelTooSmall : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Where a command came from: a gadget path such as
/// "Dec_2/increment/ZT_1(t1)/pass1/transfer" and, inside the translation of a
/// counter program, the index of the source command.
struct SourceEntry {
  std::string gadget;
  std::optional<std::uint32_t> source;
};

enum class Phase : std::uint8_t { Init, Main, Epilogue, Nested };

struct RegionTag {
  Phase phase = Phase::Main;
  /// For Init: the level being initialised.
  std::uint32_t level = 0;
};

struct LevelInfo {
  std::uint32_t level = 0;
  std::uint32_t s = 0, s_bar = 0, t = 0, t_bar = 0, u = 0, u_bar = 0;
  std::uint32_t zero_digit = 0, one_digit = 0;
  /// Every complement pair whose sum is 2⇑level once the level is initialised.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  /// Return symbol of each Dec_level call site, in call-site order.
  std::vector<std::uint32_t> return_symbols;
  /// Index of the push that opens each call.
  std::vector<std::uint32_t> call_sites;
  std::uint32_t dec_entry = 0;
};

struct CompiledUnit {
  SvasProgram program;
  ChoiceAnnotationTable annotations;
  /// levels[k - 1] describes level k.
  std::vector<LevelInfo> levels;
  std::vector<SourceEntry> sourcemap;
  std::vector<RegionTag> regions;
  /// Commands that sit between the two halves of a complement-pair update.
  std::vector<bool> transient;
  /// Simulated counters: (x, x') at the top level.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> simulated;
  std::uint32_t epilogue_start = 0;

  std::uint32_t top_level() const { return static_cast<std::uint32_t>(levels.size()); }
  const LevelInfo& level(std::uint32_t k) const { return levels.at(k - 1); }
};

namespace detail {

class UnitBuilder {
 public:
  using Label = std::uint32_t;

  UnitBuilder(std::uint32_t n, const std::vector<std::string>& simulated) {
    for (std::uint32_t k = 1; k <= n; ++k) {
      LevelInfo li;
      li.level = k;
      const std::string ks = std::to_string(k);
      li.s = counter("s" + ks);
      li.s_bar = counter("s" + ks + "'");
      li.t = counter("t" + ks);
      li.t_bar = counter("t" + ks + "'");
      li.u = counter("u" + ks);
      li.u_bar = counter("u" + ks + "'");
      li.pairs = {{li.s, li.s_bar}, {li.t, li.t_bar}, {li.u, li.u_bar}};
      li.zero_digit = symbol("d0_" + ks);
      li.one_digit = symbol("d1_" + ks);
      unit_.annotations.digits[k] = {li.zero_digit, li.one_digit};
      unit_.levels.push_back(std::move(li));
      dec_entry_.push_back(label());
    }
    for (const auto& name : simulated) {
      auto x = counter(unique_counter_name(name));
      auto xb = counter(unique_counter_name(unit_.program.counters[x] + "'"));
      unit_.simulated.emplace_back(x, xb);
      unit_.levels.back().pairs.emplace_back(x, xb);
    }
    trap_ = symbol("trap");
  }

  std::uint32_t n() const { return static_cast<std::uint32_t>(unit_.levels.size()); }
  const std::vector<std::pair<std::uint32_t, std::uint32_t>>& simulated() const { return unit_.simulated; }
  LevelInfo& lvl(std::uint32_t k) { return unit_.levels[k - 1]; }

  Label label() {
    label_pos_.push_back(std::nullopt);
    return static_cast<Label>(label_pos_.size() - 1);
  }
  void bind(Label l) { label_pos_[l] = here(); }
  std::uint32_t here() const { return static_cast<std::uint32_t>(unit_.program.commands.size()); }

  class Scope {
   public:
    Scope(UnitBuilder& b, std::string name) : b_(b) { b_.path_.push_back(std::move(name)); }
    ~Scope() { b_.path_.pop_back(); }
    Scope(const Scope&) = delete;
    Scope& operator=(const Scope&) = delete;

   private:
    UnitBuilder& b_;
  };

  void set_region(RegionTag r) { region_ = r; }
  void set_source(std::optional<std::uint32_t> s) { source_ = s; }

  std::uint32_t emit(Command c, std::optional<RegionTag> region = std::nullopt) {
    std::string path;
    for (const auto& part : path_) path += (path.empty() ? "" : "/") + part;
    unit_.program.commands.push_back(c);
    unit_.sourcemap.push_back({path, source_});
    unit_.regions.push_back(region.value_or(region_));
    unit_.transient.push_back(false);
    return here() - 1;
  }

  void inc(std::uint32_t c) { emit(Command::inc(c)); }
  void dec(std::uint32_t c) { emit(Command::dec(c)); }
  void push(std::uint32_t s) { emit(Command::push(s)); }
  void pop(std::uint32_t s) { emit(Command::pop(s)); }

  /// Two commands forming one complement-pair update; configurations between
  /// them are marked transient.
  void paired(Command first, Command second) {
    emit(first);
    unit_.transient[emit(second)] = true;
  }

  std::uint32_t jump(Label a, Label b, std::optional<Annotation> ann = std::nullopt,
                     std::optional<RegionTag> region = std::nullopt) {
    auto idx = emit(Command::jump(0, 0), region);
    fixups_.push_back({idx, a, b});
    if (ann) unit_.annotations.entries[idx] = *ann;
    return idx;
  }
  void jump(Label a) { jump(a, a); }

  /// Nondeterministic loop: while the guard holds, run `body`.
  template <typename Body>
  void loop_while(const std::string& name, Predicate guard, Body&& body) {
    Scope sc(*this, name);
    Label head = label(), in = label(), out = label();
    bind(head);
    jump(in, out, Annotation{guard, 0});
    bind(in);
    body();
    jump(head);
    bind(out);
  }

  /// Calls Dec_k through a fresh return symbol.
  void call_dec(std::uint32_t k) {
    auto& li = lvl(k);
    const auto site = static_cast<std::uint32_t>(li.call_sites.size());
    auto sym = symbol("r" + std::to_string(k) + "_" + std::to_string(site));
    Label back = label();
    li.call_sites.push_back(emit(Command::push(sym)));
    li.return_symbols.push_back(sym);
    jump(dec_entry_[k - 1]);
    bind(back);
    returns_[k - 1].push_back({back, region_});
  }

  /// Zero test of c at level k using (s_k, s_k') and Dec_k, run twice so that
  /// (c, c_bar) end up restored.
  void zero_test(std::uint32_t k, std::uint32_t c, std::uint32_t c_bar) {
    const auto& names = unit_.program.counters;
    Scope sc(*this, "ZT_" + std::to_string(k) + "(" + names[c] + ")");
    auto pass = [&](const std::string& name, std::uint32_t tested, std::uint32_t moved) {
      Scope ps(*this, name);
      const auto s = lvl(k).s, s_bar = lvl(k).s_bar;
      loop_while("transfer", Predicate::nonzero(moved), [&] {
        paired(Command::dec(moved), Command::inc(tested));
        paired(Command::dec(s_bar), Command::inc(s));
      });
      Scope cs(*this, "call");
      call_dec(k);
    };
    pass("pass1", c, c_bar);
    pass("pass2", c_bar, c);
  }

  /// Counting skeleton over level-k digits; `step` runs once per counted step,
  /// 2⇑(k+1) times in total on any completing run.
  void skeleton(std::uint32_t k, const std::function<void()>& step) {
    const LevelInfo li = lvl(k);
    {
      Scope sc(*this, "push-phase");
      loop_while("push", Predicate::nonzero(li.u_bar), [&] {
        push(li.zero_digit);
        paired(Command::inc(li.u), Command::dec(li.u_bar));
      });
      zero_test(k, li.u_bar, li.u);
    }
    Label top = label(), incr = label(), fin = label();
    bind(top);
    {
      Scope sc(*this, "increment");
      jump(incr, fin, Annotation{Predicate::allones(k), 1});
      bind(incr);
      loop_while("pop-ones", Predicate::top(li.one_digit), [&] {
        pop(li.one_digit);
        paired(Command::inc(li.t), Command::dec(li.t_bar));
      });
      pop(li.zero_digit);
      push(li.one_digit);
      loop_while("push-zeros", Predicate::nonzero(li.t), [&] {
        push(li.zero_digit);
        paired(Command::dec(li.t), Command::inc(li.t_bar));
      });
      zero_test(k, li.t, li.t_bar);
      {
        Scope st(*this, "step");
        step();
      }
      jump(top);
    }
    bind(fin);
    Scope sc(*this, "final");
    loop_while("pop-ones", Predicate::nonzero(li.u), [&] {
      pop(li.one_digit);
      paired(Command::dec(li.u), Command::inc(li.u_bar));
    });
    zero_test(k, li.u, li.u_bar);
    Scope st(*this, "step");
    step();
  }

  void init_step(std::uint32_t k) {
    const auto& li = lvl(k);
    inc(li.s_bar);
    inc(li.t_bar);
    inc(li.u_bar);
    if (k == n())
      for (const auto& [x, xb] : unit_.simulated) inc(xb);
  }

  void emit_inits() {
    for (std::uint32_t k = 1; k <= n(); ++k) {
      set_region({Phase::Init, k});
      Scope sc(*this, "Init_" + std::to_string(k));
      if (k == 1) {
        {
          Scope st(*this, "step");
          init_step(1);
        }
        Scope st(*this, "step");
        init_step(1);
      } else {
        skeleton(k - 1, [&] { init_step(k); });
      }
    }
  }

  void emit_dec_bodies() {
    set_region({Phase::Nested, 0});
    set_source(std::nullopt);
    for (std::uint32_t k = n(); k >= 1; --k) {
      Scope sc(*this, "Dec_" + std::to_string(k));
      bind(dec_entry_[k - 1]);
      lvl(k).dec_entry = here();
      const auto s = lvl(k).s, s_bar = lvl(k).s_bar;
      auto step = [&] { paired(Command::dec(s), Command::inc(s_bar)); };
      if (k == 1) {
        Scope b(*this, "body");
        step();
        step();
      } else {
        skeleton(k - 1, step);
      }
      emit_dispatch(k);
    }
  }

  /// Return dispatch: a chain of jumps, one per call site, each guessing the
  /// return symbol on top of the stack; a wrong guess aborts at the pop.
  void emit_dispatch(std::uint32_t k) {
    Scope sc(*this, "return");
    const auto& li = lvl(k);
    const auto& rets = returns_[k - 1];
    std::vector<Label> leaves;
    for (std::size_t i = 0; i < rets.size(); ++i) leaves.push_back(label());
    Label trap = label();
    for (std::size_t i = 0; i < rets.size(); ++i) {
      Label next = i + 1 < rets.size() ? label() : trap;
      jump(leaves[i], next, Annotation{Predicate::top(li.return_symbols[i]), 0});
      if (next != trap) bind(next);
    }
    bind(trap);
    pop(trap_);
    for (std::size_t i = 0; i < rets.size(); ++i) {
      bind(leaves[i]);
      pop(li.return_symbols[i]);
      jump(rets[i].back, rets[i].back, std::nullopt, rets[i].region);
    }
  }

  void emit_epilogue(Label start) {
    set_region({Phase::Epilogue, 0});
    set_source(std::nullopt);
    Scope sc(*this, "epilogue");
    bind(start);
    unit_.epilogue_start = here();
    for (std::uint32_t c = 0; c < unit_.program.counters.size(); ++c) {
      const auto c_copy = c;
      loop_while("drain(" + unit_.program.counters[c] + ")", Predicate::nonzero(c), [&] { dec(c_copy); });
    }
    emit(Command::halt());
  }

  CompiledUnit finish() {
    for (const auto& f : fixups_) {
      auto& cmd = unit_.program.commands[f.command];
      cmd.arg = *label_pos_.at(f.a);
      cmd.alt = *label_pos_.at(f.b);
    }
    return std::move(unit_);
  }

  std::uint32_t counter(const std::string& name) {
    auto& cs = unit_.program.counters;
    cs.push_back(name);
    return static_cast<std::uint32_t>(cs.size() - 1);
  }
  std::uint32_t symbol(const std::string& name) {
    auto& as = unit_.program.alphabet;
    as.push_back(name);
    return static_cast<std::uint32_t>(as.size() - 1);
  }

 private:
  std::string unique_counter_name(std::string name) const {
    const auto& cs = unit_.program.counters;
    auto taken = [&](const std::string& s) {
      for (const auto& c : cs)
        if (c == s) return true;
      return false;
    };
    while (taken(name)) name += "_";
    return name;
  }

  struct Fixup {
    std::uint32_t command;
    Label a, b;
  };
  struct ReturnPoint {
    Label back;
    RegionTag region;
  };

  CompiledUnit unit_;
  std::vector<std::optional<std::uint32_t>> label_pos_;
  std::vector<Fixup> fixups_;
  std::vector<std::string> path_;
  std::vector<Label> dec_entry_;
  std::map<std::uint32_t, std::vector<ReturnPoint>> returns_;
  std::uint32_t trap_ = 0;
  RegionTag region_;
  std::optional<std::uint32_t> source_;
};

/// Shared driver: inits, `main` (which must end by jumping to the epilogue),
/// Dec bodies, epilogue.
template <typename Main>
CompiledUnit build_unit(std::uint32_t n, const std::vector<std::string>& simulated, Main&& main) {
  UnitBuilder b(n, simulated);
  b.emit_inits();
  auto epilogue = b.label();
  b.set_region({Phase::Main, 0});
  main(b, epilogue);
  b.emit_dec_bodies();
  b.emit_epilogue(epilogue);
  return b.finish();
}

inline void check_executable_level(std::uint32_t k) {
  if (k < 1) throw LevelTooSmall("level must be at least 1");
  (void)tetration(2, k).to_u64();
}

}  // namespace detail

/// Compiles `cp` into an SVAS that simulates it while its counters stay at most
/// 2⇑n. The level is independent of the size of `cp`.
inline CompiledUnit compile(const CounterProgram& cp, std::uint32_t n) {
  if (n < 1) throw LevelTooSmall("level must be at least 1");
  if (auto v = validate(cp); !v.empty()) throw std::invalid_argument("invalid counter program: " + v.front().message);
  return detail::build_unit(n, cp.counters, [&](detail::UnitBuilder& b, detail::UnitBuilder::Label epilogue) {
    const auto& sim = b.simulated();
    std::vector<detail::UnitBuilder::Label> at;
    for (std::size_t i = 0; i < cp.commands.size(); ++i) at.push_back(b.label());
    for (std::uint32_t i = 0; i < cp.commands.size(); ++i) {
      const CpCommand& c = cp.commands[i];
      b.bind(at[i]);
      b.set_source(i);
      detail::UnitBuilder::Scope sc(b, "main/C" + std::to_string(i));
      switch (c.op) {
        case CpOp::Inc: {
          auto [x, xb] = sim[c.counter];
          b.paired(Command::inc(x), Command::dec(xb));
          break;
        }
        case CpOp::Dec: {
          auto [x, xb] = sim[c.counter];
          b.paired(Command::dec(x), Command::inc(xb));
          break;
        }
        case CpOp::Goto: b.jump(at[c.target]); break;
        case CpOp::Ifz: {
          auto [x, xb] = sim[c.counter];
          auto zero = b.label(), nonzero = b.label();
          b.jump(zero, nonzero, Annotation{Predicate::zero(x), 0});
          b.bind(zero);
          {
            detail::UnitBuilder::Scope z(b, "zero");
            b.zero_test(n, x, xb);
            b.jump(at[c.target]);
          }
          b.bind(nonzero);
          detail::UnitBuilder::Scope nz(b, "nonzero");
          b.paired(Command::dec(x), Command::inc(xb));
          b.paired(Command::inc(x), Command::dec(xb));
          b.jump(at[c.other]);
          break;
        }
        case CpOp::Halt: b.jump(epilogue); break;
      }
    }
    b.set_source(std::nullopt);
  });
}

/// Standalone program: initialise levels 1..k, move s_k' fully into s_k, call
/// Dec_k once, drain, halt.
inline CompiledUnit emit_dec_harness(std::uint32_t k) {
  detail::check_executable_level(k);
  return detail::build_unit(k, {}, [&](detail::UnitBuilder& b, detail::UnitBuilder::Label epilogue) {
    detail::UnitBuilder::Scope sc(b, "harness");
    const auto s = b.lvl(k).s, s_bar = b.lvl(k).s_bar;
    b.loop_while("load", Predicate::nonzero(s_bar), [&] { b.paired(Command::dec(s_bar), Command::inc(s)); });
    {
      detail::UnitBuilder::Scope cs(b, "call");
      b.call_dec(k);
    }
    b.jump(epilogue);
  });
}

/// Standalone program: initialise levels 1..k and a level-k pair (x, x'),
/// increment x `preload` times, run the zero test of x, drain, halt.
inline CompiledUnit emit_ztest_harness(std::uint32_t k, std::uint64_t preload) {
  detail::check_executable_level(k);
  if (preload > tetration(2, k).to_u64()) throw std::invalid_argument("preload exceeds 2⇑k");
  return detail::build_unit(k, {"x"}, [&](detail::UnitBuilder& b, detail::UnitBuilder::Label epilogue) {
    detail::UnitBuilder::Scope sc(b, "harness");
    const auto [x, xb] = b.simulated()[0];
    {
      detail::UnitBuilder::Scope pl(b, "preload");
      for (std::uint64_t i = 0; i < preload; ++i) b.paired(Command::inc(x), Command::dec(xb));
    }
    b.zero_test(k, x, xb);
    b.jump(epilogue);
  });
}

/// "index gadget-path [source-command]" per command.
inline std::string serialize_sourcemap(const CompiledUnit& u) {
  std::ostringstream os;
  for (std::size_t i = 0; i < u.sourcemap.size(); ++i) {
    os << i << ' ' << u.sourcemap[i].gadget;
    if (u.sourcemap[i].source) os << ' ' << *u.sourcemap[i].source;
    os << '\n';
  }
  return os.str();
}

/// Weight 1 on every "dec s_k" inside the Dec_k body, 0 elsewhere.
inline std::vector<std::uint64_t> dec_body_weights(const CompiledUnit& u, std::uint32_t k) {
  const std::string prefix = "Dec_" + std::to_string(k) + "/";
  const auto s = u.level(k).s;
  std::vector<std::uint64_t> w(u.program.commands.size(), 0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const auto& c = u.program.commands[i];
    if (c.op == Op::Dec && c.arg == s && u.sourcemap[i].gadget.rfind(prefix, 0) == 0) w[i] = 1;
  }
  return w;
}

/// Checks c + c' = 2⇑k for every pair of every level whose initialisation has
/// completed. The phase of a configuration is read off the bottom of its stack
/// (digits pushed by Init_j, or the return symbol of the outermost call) or,
/// with an empty stack, off the region of its pc.
class PairSumChecker {
 public:
  explicit PairSumChecker(const CompiledUnit& u) : u_(u) {
    for (std::uint32_t k = 1; k <= u.top_level(); ++k) bound_.push_back(tetration(2, k).to_u64());
    symbol_phase_.assign(u.program.alphabet.size(), RegionTag{Phase::Nested, 0});
    for (const auto& li : u.levels) {
      symbol_phase_[li.zero_digit] = {Phase::Init, li.level + 1};
      symbol_phase_[li.one_digit] = {Phase::Init, li.level + 1};
      for (auto site : li.call_sites) {
        const auto sym = u.program.commands[site].arg;
        symbol_phase_[sym] = u.regions[site];
      }
    }
  }

  /// Number of levels whose pairs must currently hold; nullopt when the
  /// configuration is transient or in the epilogue.
  std::optional<std::uint32_t> checked_levels(const Configuration& c) const {
    if (u_.transient[c.pc]) return std::nullopt;
    RegionTag r = c.stack.empty() ? u_.regions[c.pc] : symbol_phase_[c.stack.front()];
    switch (r.phase) {
      case Phase::Init: return r.level - 1;
      case Phase::Main: return u_.top_level();
      case Phase::Epilogue:
      case Phase::Nested: return std::nullopt;
    }
    return std::nullopt;
  }

  /// Number of violated pairs in `c`.
  std::size_t violations(const Configuration& c) {
    ++checked_;
    auto levels = checked_levels(c);
    if (!levels) return 0;
    ++applied_;
    std::size_t bad = 0;
    for (std::uint32_t k = 1; k <= *levels; ++k)
      for (const auto& [a, b] : u_.levels[k - 1].pairs)
        if (c.counters[a] + c.counters[b] != bound_[k - 1]) ++bad;
    total_violations_ += bad;
    return bad;
  }

  std::uint64_t checked() const { return checked_; }
  std::uint64_t applied() const { return applied_; }
  std::uint64_t total_violations() const { return total_violations_; }

 private:
  const CompiledUnit& u_;
  std::vector<std::uint64_t> bound_;
  std::vector<RegionTag> symbol_phase_;
  std::uint64_t checked_ = 0, applied_ = 0, total_violations_ = 0;
};

}  // namespace svas

// svas: command-line front end for the SVAS toolkit.
//
// Exit status: 0 for a positive verdict, 1 for a negative one, 2 for errors.

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "svas/annotation.hpp"
#include "svas/counter_program.hpp"
#include "svas/encoding.hpp"
#include "svas/exec.hpp"
#include "svas/forest.hpp"
#include "svas/formula.hpp"
#include "svas/mutate.hpp"
#include "svas/program.hpp"
#include "svas/tetration.hpp"
#include "svas/yardstick.hpp"

namespace {

using namespace svas;

constexpr int kYes = 0;
constexpr int kNo = 1;
constexpr int kError = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
}

std::string strip_extension(const std::string& path) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path;
  return path.substr(0, dot);
}

void report_seconds(const char* what, std::chrono::steady_clock::time_point start) {
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cerr << "time " << what << "=" << s << "s\n";
}

struct Limits {
  std::uint64_t max_configs = SearchLimits{}.max_configurations;
  std::uint64_t max_depth = SearchLimits{}.max_stack_depth;
  std::uint64_t max_counter = SearchLimits{}.max_counter_value;

  void attach(CLI::App* cmd) {
    cmd->add_option("--max-configs", max_configs, "Visited-set budget")->check(CLI::PositiveNumber);
    cmd->add_option("--max-depth", max_depth, "Stack depth cap")->check(CLI::PositiveNumber);
    cmd->add_option("--max-counter", max_counter, "Counter value cap")->check(CLI::PositiveNumber);
  }
  SearchLimits get() const { return {max_configs, max_depth, max_counter}; }
};

int finish_trace(const SvasProgram& p, const RunTrace& t, const std::string& trace_out) {
  const std::string text = format_trace(p, t);
  if (trace_out.empty()) std::cout << text;
  else {
    write_file(trace_out, text);
    std::cout << "outcome=" << to_string(t.outcome) << " reason=" << to_string(t.reason) << " steps=" << t.length
              << '\n';
  }
  return t.accepted() ? kYes : kNo;
}

int run(int argc, char** argv) {
  CLI::App app{"Vector addition systems with a stack: interpreter, search, yardstick compiler and data logic"};
  app.require_subcommand(1);
  int status = kYes;

  // compile
  std::string cp_path, out_prefix;
  std::uint32_t level = 1;
  auto* compile_cmd = app.add_subcommand("compile", "Compile a counter program into an SVAS at level n");
  compile_cmd->add_option("program", cp_path, "Counter program (.cp)")->required();
  compile_cmd->add_option("-n,--level", level, "Level n (bound 2⇑n)")->check(CLI::PositiveNumber);
  compile_cmd->add_option("-o,--out", out_prefix, "Output prefix for .svas/.ann/.map (default: input stem)");
  compile_cmd->callback([&] {
    const auto start = std::chrono::steady_clock::now();
    const auto unit = compile(parse_cp(read_file(cp_path)), level);
    const std::string prefix = out_prefix.empty() ? strip_extension(cp_path) : out_prefix;
    write_file(prefix + ".svas", serialize_svas(unit.program) + "\n");
    write_file(prefix + ".ann", serialize_annotations(unit.program, unit.annotations));
    write_file(prefix + ".map", serialize_sourcemap(unit));
    std::cout << "commands=" << unit.program.size() << " counters=" << unit.program.counters.size()
              << " symbols=" << unit.program.alphabet.size() << '\n';
    report_seconds("compile", start);
  });

  // run
  std::string svas_path, ann_path, trace_out;
  std::uint64_t max_steps = 10'000'000;
  auto* run_cmd = app.add_subcommand("run", "Run an SVAS resolving jumps by its annotations");
  run_cmd->add_option("program", svas_path, "SVAS program (.svas)")->required();
  run_cmd->add_option("-a,--annotations", ann_path, "Annotation sidecar (default: program stem + .ann)");
  run_cmd->add_option("--max-steps", max_steps, "Step limit")->check(CLI::PositiveNumber);
  run_cmd->add_option("--trace-out", trace_out, "Write the trace here instead of stdout");
  run_cmd->callback([&] {
    const auto p = parse_svas(read_file(svas_path));
    const auto ann =
        parse_annotations(p, read_file(ann_path.empty() ? strip_extension(svas_path) + ".ann" : ann_path));
    const auto start = std::chrono::steady_clock::now();
    TraceOptions opts;
    opts.keep_steps = !trace_out.empty() || max_steps <= 1'000'000;
    status = finish_trace(p, run_policy(p, ann, max_steps, opts), trace_out);
    report_seconds("run", start);
  });

  // search
  Limits search_limits;
  std::string witness_out;
  auto* search_cmd = app.add_subcommand("search", "Breadth-first reachability search");
  search_cmd->add_option("program", svas_path, "SVAS program (.svas)")->required();
  search_limits.attach(search_cmd);
  search_cmd->add_option("-w,--witness", witness_out, "Witness output (default: program stem + .witness)");
  search_cmd->callback([&] {
    const auto p = parse_svas(read_file(svas_path));
    const auto r = search_reach(p, search_limits.get());
    std::cout << format_stats(r) << '\n';
    std::cerr << "time search=" << r.stats.wall_seconds << "s\n";
    if (r.verdict == SearchResult::Verdict::Reachable) {
      const std::string path = witness_out.empty() ? strip_extension(svas_path) + ".witness" : witness_out;
      write_file(path, format_witness(r.witness) + "\n");
      std::cout << "witness=" << path << " bits=" << r.witness.bits.size() << '\n';
    }
    status = r.verdict == SearchResult::Verdict::Reachable ? kYes : kNo;
  });

  // replay
  std::string witness_path;
  auto* replay_cmd = app.add_subcommand("replay", "Replay a witness deterministically");
  replay_cmd->add_option("program", svas_path, "SVAS program (.svas)")->required();
  replay_cmd->add_option("witness", witness_path, "Witness file")->required();
  replay_cmd->add_option("--trace-out", trace_out, "Write the trace here instead of stdout");
  replay_cmd->callback([&] {
    const auto p = parse_svas(read_file(svas_path));
    status = finish_trace(p, replay(p, parse_witness(read_file(witness_path))), trace_out);
  });

  // dec-harness
  std::uint32_t harness_level = 1;
  bool exhaustive = false, honest = false;
  Limits harness_limits;
  harness_limits.max_configs = 50'000'000;
  auto* dec_cmd = app.add_subcommand("dec-harness", "Check that Dec_k decrements s_k exactly 2⇑k times");
  dec_cmd->add_option("k", harness_level, "Level k")->required()->check(CLI::PositiveNumber);
  auto* ex_flag = dec_cmd->add_flag("--exhaustive", exhaustive, "Enumerate every accepting run");
  dec_cmd->add_flag("--honest", honest, "Run the annotated policy once")->excludes(ex_flag);
  harness_limits.attach(dec_cmd);
  dec_cmd->add_option("--max-steps", max_steps, "Step limit for --honest")->check(CLI::PositiveNumber);
  dec_cmd->callback([&] {
    const auto u = emit_dec_harness(harness_level);
    const auto expected = tetration(2, harness_level).to_u64();
    const std::string s_name = u.program.counters[u.level(harness_level).s];
    PairSumChecker checker(u);
    const auto start = std::chrono::steady_clock::now();
    std::cout << "commands: " << u.program.size() << '\n';
    if (!honest) {
      SearchOptions opts;
      opts.observer = [&](const Configuration& c) { checker.violations(c); };
      const auto r = accepting_tallies(u.program, harness_limits.get(), dec_body_weights(u, harness_level), opts);
      std::cout << "explored: " << r.stats.explored << (r.closed ? " (closed)" : " (limit hit)") << '\n';
      const auto& ts = r.accepting_tallies;
      std::cout << "accepting runs: " << (ts.empty() ? "0" : "≥1") << "; " << s_name << " decrements: ";
      if (ts.size() == 1) std::cout << "always " << *ts.begin();
      else {
        std::cout << "{";
        bool first = true;
        for (auto v : ts) std::cout << (first ? "" : ",") << v, first = false;
        std::cout << "}";
      }
      std::cout << "\npair-sum violations: " << checker.total_violations() << '\n';
      status = r.closed && ts.size() == 1 && *ts.begin() == expected && checker.total_violations() == 0 ? kYes : kNo;
    } else {
      TraceOptions opts;
      opts.keep_configurations = false;
      opts.observer = [&](const Configuration& c) { checker.violations(c); };
      const auto t = run_policy(u.program, u.annotations, max_steps, opts);
      const auto weights = dec_body_weights(u, harness_level);
      std::uint64_t dec = 0;
      for (const auto& s : t.steps) dec += weights[s.index];
      std::cout << "outcome: " << to_string(t.outcome) << " steps=" << t.length << '\n';
      std::cout << s_name << " decrements: " << dec << "\npair-sum violations: " << checker.total_violations()
                << '\n';
      status = t.accepted() && dec == expected && checker.total_violations() == 0 ? kYes : kNo;
    }
    report_seconds("dec-harness", start);
  });

  // zt-harness
  std::uint64_t preload = 0;
  Limits zt_limits;
  zt_limits.max_configs = 50'000'000;
  auto* zt_cmd = app.add_subcommand("zt-harness", "Search the zero-test harness with a preloaded counter");
  zt_cmd->add_option("k", harness_level, "Level k")->required()->check(CLI::PositiveNumber);
  zt_cmd->add_option("--preload", preload, "Initial value of the tested counter");
  zt_limits.attach(zt_cmd);
  zt_cmd->callback([&] {
    const auto u = emit_ztest_harness(harness_level, preload);
    const auto r = search_reach(u.program, zt_limits.get());
    std::cout << "commands=" << u.program.size() << ' ' << format_stats(r) << '\n';
    std::cerr << "time zt-harness=" << r.stats.wall_seconds << "s\n";
    status = r.verdict == SearchResult::Verdict::Reachable ? kYes : kNo;
  });

  // oracle
  std::uint64_t bound = 0;
  std::uint32_t oracle_level = 0;
  auto* oracle_cmd = app.add_subcommand("oracle", "Bounded halting of a counter program");
  oracle_cmd->add_option("program", cp_path, "Counter program (.cp)")->required();
  auto* bound_opt = oracle_cmd->add_option("--bound", bound, "Counter bound");
  oracle_cmd->add_option("-n,--level", oracle_level, "Use the bound 2⇑n")->excludes(bound_opt);
  oracle_cmd->callback([&] {
    const auto cp = parse_cp(read_file(cp_path));
    const std::uint64_t b = oracle_level ? tetration(2, oracle_level).to_u64() : bound;
    const auto r = bounded_halting(cp, b);
    std::cout << to_string(r.kind) << " step=" << r.step;
    if (r.kind == BoundedRunResult::Kind::ExceedsBound || r.kind == BoundedRunResult::Kind::AbortsOnDecrement)
      std::cout << " counter=" << cp.counters[r.counter];
    std::cout << " bound=" << b << '\n';
    status = r.halts() ? kYes : kNo;
  });

  // encode
  std::string forest_out;
  auto* encode_cmd = app.add_subcommand("encode", "Encode an accepted witness run as a leaf-data forest");
  encode_cmd->add_option("program", svas_path, "SVAS program (.svas)")->required();
  encode_cmd->add_option("witness", witness_path, "Witness file")->required();
  encode_cmd->add_option("-o,--out", forest_out, "Forest output (default: stdout)");
  encode_cmd->callback([&] {
    const auto p = parse_svas(read_file(svas_path));
    const auto f = encode_trace(p, replay(p, parse_witness(read_file(witness_path))));
    if (forest_out.empty()) std::cout << serialize_forest(f);
    else write_file(forest_out, serialize_forest(f));
  });

  // formula
  std::string forest_path;
  auto* formula_cmd = app.add_subcommand("formula", "Print the sentence of a program, or evaluate it on a forest");
  formula_cmd->add_option("program", svas_path, "SVAS program (.svas)")->required();
  formula_cmd->add_option("--forest", forest_path, "Evaluate on this forest instead of printing");
  formula_cmd->callback([&] {
    const auto p = parse_svas(read_file(svas_path));
    const auto phi = emit_formula(p);
    if (forest_path.empty()) {
      std::cout << format_formula(phi) << '\n';
      return;
    }
    const bool sat = evaluate(phi, parse_forest(read_file(forest_path)));
    std::cout << (sat ? "satisfied" : "not satisfied") << '\n';
    status = sat ? kYes : kNo;
  });

  // check
  auto* check_cmd = app.add_subcommand("check", "Cross-check the sentence against decoding on one forest");
  check_cmd->add_option("program", svas_path, "SVAS program (.svas)")->required();
  auto* w_opt = check_cmd->add_option("--witness", witness_path, "Encode this witness run");
  check_cmd->add_option("--forest", forest_path, "Check this forest")->excludes(w_opt);
  check_cmd->callback([&] {
    const auto p = parse_svas(read_file(svas_path));
    LeafDataForest f;
    if (!witness_path.empty()) f = encode_trace(p, replay(p, parse_witness(read_file(witness_path))));
    else if (!forest_path.empty()) f = parse_forest(read_file(forest_path));
    else throw CLI::ValidationError("check", "one of --witness or --forest is required");
    const bool sat = evaluate(emit_formula(p), f);
    std::string decoded;
    bool accepted = false;
    try {
      const auto t = decode_forest(p, f);
      decoded = std::string(to_string(t.outcome)) + "/" + std::string(to_string(t.reason));
      accepted = t.accepted();
    } catch (const DecodeError& e) {
      decoded = std::string("DecodeError(") + e.what() + ")";
    }
    const bool matching = data_matching_valid(p, f);
    const bool agree = sat == (accepted && matching);
    std::cout << "phi=" << (sat ? "true" : "false") << "\ndecoded=" << decoded
              << "\ndata-matching=" << (matching ? "valid" : "invalid") << "\nagreement=" << (agree ? "yes" : "no")
              << '\n';
    status = !agree ? kError : sat ? kYes : kNo;
  });

  // mutate
  std::uint64_t seed = 0;
  auto* mutate_cmd = app.add_subcommand("mutate", "Apply one seeded edit to a forest");
  mutate_cmd->add_option("forest", forest_path, "Forest file")->required();
  mutate_cmd->add_option("--seed", seed, "Random seed");
  mutate_cmd->add_option("-o,--out", forest_out, "Forest output (default: stdout)");
  mutate_cmd->callback([&] {
    const auto m = mutate_forest_detailed(parse_forest(read_file(forest_path)), seed);
    std::cerr << "edit=" << to_string(m.kind) << '\n';
    if (forest_out.empty()) std::cout << serialize_forest(m.forest);
    else write_file(forest_out, serialize_forest(m.forest));
  });

  // sizes
  std::uint32_t from = 1, to = 10;
  auto* sizes_cmd = app.add_subcommand("sizes", "Command counts of compile(cp, n) over a range of n");
  sizes_cmd->add_option("program", cp_path, "Counter program (.cp)")->required();
  sizes_cmd->add_option("--from", from, "First level")->check(CLI::PositiveNumber);
  sizes_cmd->add_option("--to", to, "Last level")->check(CLI::PositiveNumber);
  sizes_cmd->callback([&] {
    const auto cp = parse_cp(read_file(cp_path));
    if (to < from) throw CLI::ValidationError("sizes", "--to must not be below --from");
    for (std::uint32_t n = from; n <= to; ++n) std::cout << n << ' ' << compile(cp, n).program.size() << '\n';
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kError;
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kError;
  }
}

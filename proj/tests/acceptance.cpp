// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "svas/encoding.hpp"
#include "svas/exec.hpp"
#include "svas/mutate.hpp"
#include "svas/yardstick.hpp"

using namespace svas;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::vector<std::pair<std::string, CounterProgram>> corpus() {
  std::vector<std::pair<std::string, CounterProgram>> out;
  for (const auto& e : std::filesystem::directory_iterator(std::string(SVAS_TEST_DIR) + "/corpus"))
    if (e.path().extension() == ".cp") out.emplace_back(e.path().stem().string(), parse_cp(oracle::slurp(e.path())));
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

std::vector<std::pair<std::string, SvasProgram>> logic_programs() {
  std::vector<std::pair<std::string, SvasProgram>> out;
  for (const auto& e : std::filesystem::directory_iterator(std::string(SVAS_TEST_DIR) + "/logic"))
    if (e.path().extension() == ".svas")
      out.emplace_back(e.path().stem().string(), parse_svas(oracle::slurp(e.path())));
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

RunTrace run_bits(const SvasProgram& p, const std::vector<int>& bits) {
  Witness w;
  for (int b : bits) w.bits.push_back(static_cast<std::uint8_t>(b));
  return replay(p, w);
}

const SearchLimits kWide{20'000'000, 64, 1000};

// Pair-sum violations seen by every check of criteria 1-5.
std::uint64_t g_violations = 0;
std::uint64_t g_applied = 0;

struct Tally {
  PairSumChecker checker;
  explicit Tally(const CompiledUnit& u) : checker(u) {}
  ~Tally() {
    g_violations += checker.total_violations();
    g_applied += checker.applied();
  }
  std::function<void(const Configuration&)> observer() {
    return [this](const Configuration& c) { checker.violations(c); };
  }
};

Verdict dec_exhaustive(std::uint32_t k) {
  auto u = emit_dec_harness(k);
  Tally tally(u);
  SearchOptions opts;
  opts.observer = tally.observer();
  auto r = accepting_tallies(u.program, kWide, dec_body_weights(u, k), opts);
  std::ostringstream d;
  d << "explored=" << r.stats.explored << " closed=" << r.closed << " tallies={";
  for (auto v : r.accepting_tallies) d << v << (v == *r.accepting_tallies.rbegin() ? "" : ",");
  d << "} expected " << oracle::tower_of_twos(k);
  const bool pass = r.closed && r.accepting_tallies == std::set<std::uint64_t>{oracle::tower_of_twos(k)};
  return {pass, d.str()};
}

Verdict dec_honest(std::uint32_t k) {
  auto u = emit_dec_harness(k);
  Tally tally(u);
  TraceOptions opts;
  opts.keep_configurations = false;
  opts.observer = tally.observer();
  auto t = run_policy(u.program, u.annotations, 5'000'000, opts);
  const auto w = dec_body_weights(u, k);
  std::uint64_t decs = 0;
  for (const auto& s : t.steps) decs += w[s.index];
  std::ostringstream d;
  d << "outcome=" << to_string(t.outcome) << " steps=" << t.length << " decrements=" << decs << " expected "
    << oracle::tower_of_twos(k);
  return {t.accepted() && decs == oracle::tower_of_twos(k), d.str()};
}

Verdict zero_tests() {
  bool pass = true;
  std::ostringstream d;
  for (std::uint32_t k = 1; k <= 2; ++k) {
    for (std::uint64_t preload : {0, 1, 2}) {
      auto u = emit_ztest_harness(k, preload);
      Tally tally(u);
      SearchOptions opts;
      opts.observer = tally.observer();
      auto r = search_reach(u.program, kWide, opts);
      const auto want = preload == 0 ? SearchResult::Verdict::Reachable : SearchResult::Verdict::Unreachable;
      pass = pass && r.verdict == want;
      d << "k=" << k << ",x=" << preload << ":" << to_string(r.verdict) << " ";
    }
  }
  return {pass, d.str()};
}

Verdict end_to_end() {
  bool pass = true;
  std::ostringstream d;
  std::size_t agree = 0, total = 0;
  for (const auto& [name, cp] : corpus()) {
    for (std::uint32_t n = 1; n <= 3; ++n) {
      const bool halts = bounded_halting(cp, oracle::tower_of_twos(n)).halts();
      auto u = compile(cp, n);
      Tally tally(u);
      bool accepted;
      if (n <= 2) {
        SearchOptions opts;
        opts.observer = tally.observer();
        auto r = search_reach(u.program, kWide, opts);
        if (r.verdict == SearchResult::Verdict::Inconclusive) {
          pass = false;
          d << name << "@" << n << ":inconclusive ";
          continue;
        }
        accepted = r.verdict == SearchResult::Verdict::Reachable;
        if (accepted && !replay(u.program, r.witness).accepted()) {
          pass = false;
          d << name << "@" << n << ":bad-witness ";
        }
      } else {
        TraceOptions opts;
        opts.keep_steps = false;
        opts.keep_configurations = false;
        opts.observer = tally.observer();
        accepted = run_policy(u.program, u.annotations, 2'000'000, opts).accepted();
      }
      ++total;
      if (accepted == halts) ++agree;
      else {
        pass = false;
        d << name << "@" << n << ":mismatch ";
      }
    }
  }
  d << agree << "/" << total << " agree (n=1,2 exhaustive search, n=3 annotated runs)";
  return {pass, d.str()};
}

Verdict pair_sums() {
  std::ostringstream d;
  d << "violations=" << g_violations << " over " << g_applied << " checked configurations";
  return {g_violations == 0 && g_applied > 0, d.str()};
}

Verdict sizes() {
  bool pass = true;
  std::ostringstream d;
  for (const auto& [name, cp] : corpus()) {
    std::vector<std::int64_t> s;
    for (std::uint32_t n = 1; n <= 10; ++n) s.push_back(static_cast<std::int64_t>(compile(cp, n).program.size()));
    for (std::size_t i = 2; i < s.size(); ++i) pass = pass && s[i] - 2 * s[i - 1] + s[i - 2] == 0;
    if (name == "transfer") d << "transfer: " << s[0] << " + " << (s[1] - s[0]) << "(n-1); ";
  }
  d << "second differences all zero: " << (pass ? "yes" : "no");
  return {pass, d.str()};
}

Verdict logic_completeness() {
  bool pass = true;
  std::ostringstream d;
  for (const auto& [name, p] : logic_programs()) {
    const auto phi = emit_formula(p);
    auto ws = oracle::accepting_witnesses(p, 16, 10);
    std::size_t ok = 0;
    for (const auto& bits : ws) ok += evaluate(phi, encode_trace(p, run_bits(p, bits)));
    pass = pass && ws.size() >= 5 && ok == ws.size();
    d << name << ":" << ok << "/" << ws.size() << " ";
  }
  return {pass, d.str()};
}

Verdict logic_soundness() {
  std::size_t total = 0, disagree = 0, positive = 0;
  std::uint64_t seed = 0;
  for (const auto& [name, p] : logic_programs()) {
    const auto phi = emit_formula(p);
    for (const auto& bits : oracle::accepting_witnesses(p, 12, 6)) {
      const auto f = encode_trace(p, run_bits(p, bits));
      for (int i = 0; i < 200; ++i, ++total) {
        const auto m = mutate_forest(f, seed++);
        bool decoded = false;
        try {
          decoded = decode_forest(p, m).accepted();
        } catch (const DecodeError&) {
        }
        const bool expect = decoded && data_matching_valid(p, m);
        positive += expect;
        disagree += evaluate(phi, m) != expect;
      }
    }
  }
  std::ostringstream d;
  d << total << " mutants, " << positive << " still accepted, " << disagree << " disagreements";
  return {total >= 50 && disagree == 0, d.str()};
}

Verdict evaluator_laws() {
  using namespace fo;
  const Var x = Var::X, y = Var::Y;
  auto leaf = [](Var v) { return neg(exists(other(v), child(v, other(v)))); };
  // Brute-force structural facts, stated as sentences and checked on every forest.
  const std::vector<Formula> facts = {
      forall(x, neg(prec(x, x))),
      forall(x, forall(y, implies(prec(x, y), neg(prec(y, x))))),
      forall(x, forall(y, implies(conj({leaf(x), leaf(y), neg(equal(x, y))}), disj({prec(x, y), prec(y, x)})))),
      forall(x, implies(leaf(x), data_eq(x, x))),
      forall(x, forall(y, implies(data_eq(x, y), data_eq(y, x)))),
      forall(x, forall(y, implies(data_eq(x, y), conj({leaf(x), leaf(y)})))),
  };
  std::mt19937_64 rng(2024);
  std::size_t checks = 0, failures = 0;
  for (int i = 0; i < 100; ++i) {
    const auto f = oracle::random_forest(rng, 8);
    for (const auto& fact : facts) failures += !evaluate(fact, f), ++checks;
    // Transitivity of both relations, by brute force over node triples.
    const oracle::Structure s(f);
    const int n = static_cast<int>(s.nodes.size());
    auto holds = [&](const Formula& g, int a, int b) { return oracle::satisfies(s, g, a, b); };
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
          if (holds(prec(x, y), a, b) && holds(prec(x, y), b, c)) failures += !holds(prec(x, y), a, c);
          if (holds(data_eq(x, y), a, b) && holds(data_eq(x, y), b, c)) failures += !holds(data_eq(x, y), a, c);
        }
    for (int j = 0; j < 100; ++j) {
      const auto g = oracle::random_sentence(rng, 3);
      const bool v = evaluate(g, f);
      failures += evaluate(conj({g, neg(g)}), f);
      failures += !evaluate(disj({g, neg(g)}), f);
      failures += v != oracle::satisfies(f, g);
      checks += 3;
    }
  }
  std::ostringstream d;
  d << checks << " checks on 100 forests x 100 sentences, " << failures << " failures";
  return {failures == 0, d.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"Dec_1 decrements s1 exactly 2 times on every accepting run", [] { return dec_exhaustive(1); }},
      {"Dec_2 decrements s2 exactly 4 times on every accepting run", [] { return dec_exhaustive(2); }},
      {"Dec_3 annotated run decrements s3 exactly 16 times", [] { return dec_honest(3); }},
      {"zero test accepts only a zero counter (k=1,2)", zero_tests},
      {"compiled programs accept iff the bounded run halts", end_to_end},
      {"complement pairs sum to 2^^k wherever checked", pair_sums},
      {"program size is affine in n", sizes},
      {"sentence holds on encodings of accepted runs", logic_completeness},
      {"sentence agrees with decoding on mutated forests", logic_soundness},
      {"evaluator laws on random forests", evaluator_laws},
  };
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    all = all && v.pass;
    std::cout << "criterion " << i + 1 << ": " << (v.pass ? "PASS" : "FAIL") << "  " << criteria[i].first << "  ["
              << v.detail << "] (" << secs << "s)" << std::endl;
  }
  return all ? 0 : 1;
}

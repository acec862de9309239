#pragma once

#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "svas/program.hpp"

namespace svas {

/// Program counter, counter valuation (indexed like `SvasProgram::counters`)
/// and stack contents with the top at the back.
struct Configuration {
  std::uint32_t pc = 0;
  std::vector<std::uint64_t> counters;
  std::vector<std::uint32_t> stack;

  static Configuration initial(const SvasProgram& p) {
    return Configuration{0, std::vector<std::uint64_t>(p.counters.size(), 0), {}};
  }

  bool all_counters_zero() const {
    for (auto v : counters)
      if (v != 0) return false;
    return true;
  }

  friend bool operator==(const Configuration&, const Configuration&) = default;
};

struct ConfigurationHash {
  std::size_t operator()(const Configuration& c) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ c.pc;
    auto mix = [&h](std::uint64_t v) {
      h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    };
    for (auto v : c.counters) mix(v);
    mix(0xfeedULL);
    for (auto s : c.stack) mix(s);
    return static_cast<std::size_t>(h);
  }
};

/// "x=1,y=0" in declaration order; "-" when there are no counters.
inline std::string format_counters(const SvasProgram& p, const Configuration& c) {
  if (c.counters.empty()) return "-";
  std::ostringstream os;
  for (std::size_t i = 0; i < c.counters.size(); ++i) {
    if (i) os << ',';
    os << p.counters[i] << '=' << c.counters[i];
  }
  return os.str();
}

/// Bottom-to-top, space separated; "-" when empty.
inline std::string format_stack(const SvasProgram& p, const Configuration& c) {
  if (c.stack.empty()) return "-";
  std::ostringstream os;
  for (std::size_t i = 0; i < c.stack.size(); ++i) {
    if (i) os << ' ';
    os << p.alphabet[c.stack[i]];
  }
  return os.str();
}

}  // namespace svas

#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace svas {

using BigInt = boost::multiprecision::cpp_int;

class TooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TetrationValue {
  std::uint64_t base = 2;
  std::uint64_t height = 0;
  BigInt value = 1;

  /// The value as a machine word; throws TooLarge if it does not fit.
  std::uint64_t to_u64() const {
    if (value > std::numeric_limits<std::uint64_t>::max())
      throw TooLarge("tetration value does not fit in 64 bits");
    return value.convert_to<std::uint64_t>();
  }
};

/// Default budget on the decimal digits of a tetration result.
inline constexpr std::uint64_t kTetrationDigitLimit = 100'000;

/// b ⇑ k: 1 for k = 0, b^(b ⇑ (k-1)) otherwise.
inline TetrationValue tetration(std::uint64_t base, std::uint64_t height,
                                std::uint64_t digit_limit = kTetrationDigitLimit) {
  if (base < 2) throw std::invalid_argument("tetration base must be at least 2");
  const double log10_base = std::log10(static_cast<double>(base));
  BigInt v = 1;
  for (std::uint64_t k = 1; k <= height; ++k) {
    // digits(b^v) ~ v * log10(b); reject before materializing.
    if (v > BigInt(std::numeric_limits<std::uint32_t>::max()) ||
        static_cast<double>(v.convert_to<std::uint64_t>()) * log10_base + 1 > static_cast<double>(digit_limit))
      throw TooLarge("tetration(" + std::to_string(base) + ", " + std::to_string(height) + ") exceeds " +
                     std::to_string(digit_limit) + " digits");
    v = boost::multiprecision::pow(BigInt(base), v.convert_to<unsigned>());
  }
  return {base, height, v};
}

}  // namespace svas

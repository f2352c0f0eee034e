#include "resolv/bigint.hpp"

#include <cmath>
#include <stdexcept>

namespace resolv {

BigInt pow_int(unsigned base, std::uint64_t exponent) {
  BigInt result = 1;
  BigInt factor = base;
  while (exponent > 0) {
    if (exponent & 1u) result *= factor;
    exponent >>= 1;
    if (exponent > 0) factor *= factor;
  }
  return result;
}

BigInt exact_scaled(double p) {
  if (!std::isfinite(p) || p < 0.0) {
    throw std::invalid_argument("exact_scaled: probability must be finite and nonnegative");
  }
  if (p == 0.0) return 0;
  int exponent = 0;
  const double fraction = std::frexp(p, &exponent);  // p = fraction * 2^exponent
  const auto mantissa = static_cast<std::uint64_t>(std::ldexp(fraction, 53));
  BigInt result = mantissa;
  const int shift = exponent - 53 + kExactScaleBits;
  if (shift >= 0) {
    result <<= shift;
  } else {
    // Subnormals: the low bits being dropped are zero.
    result >>= -shift;
  }
  return result;
}

std::uint64_t bit_length(const BigInt& x) {
  if (x == 0) return 0;
  return static_cast<std::uint64_t>(boost::multiprecision::msb(x)) + 1;
}

double ratio_to_double(const BigInt& num, const BigInt& den) {
  if (den <= 0) throw std::invalid_argument("ratio_to_double: denominator must be positive");
  if (num < 0) throw std::invalid_argument("ratio_to_double: numerator must be nonnegative");
  if (num == 0) return 0.0;

  // Scale so that the integer quotient carries at least 64 significant bits.
  const auto num_bits = static_cast<std::int64_t>(bit_length(num));
  const auto den_bits = static_cast<std::int64_t>(bit_length(den));
  std::int64_t shift = 65 + den_bits - num_bits;
  BigInt quotient;
  if (shift >= 0) {
    quotient = (num << static_cast<unsigned>(shift)) / den;
  } else {
    quotient = num / (den << static_cast<unsigned>(-shift));
  }
  const auto q_bits = static_cast<std::int64_t>(bit_length(quotient));
  if (q_bits > 64) {
    quotient >>= static_cast<unsigned>(q_bits - 64);
    shift -= q_bits - 64;
  }
  const auto top = quotient.convert_to<std::uint64_t>();
  return std::ldexp(static_cast<double>(top), static_cast<int>(-shift));
}

double log_bigint(const BigInt& x) {
  if (x <= 0) throw std::invalid_argument("log_bigint: argument must be positive");
  const auto bits = bit_length(x);
  if (bits <= 64) return std::log(static_cast<double>(x.convert_to<std::uint64_t>()));
  const auto drop = bits - 64;
  const BigInt top = x >> static_cast<unsigned>(drop);
  return std::log(static_cast<double>(top.convert_to<std::uint64_t>())) +
         static_cast<double>(drop) * std::log(2.0);
}

}  // namespace resolv

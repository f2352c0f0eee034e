#pragma once

#include <cstdint>

#include <boost/multiprecision/cpp_int.hpp>

namespace resolv {

using BigInt = boost::multiprecision::cpp_int;

// Every finite double is an integer multiple of 2^-1074, so probabilities are
// summed exactly after scaling by this power of two.
inline constexpr int kExactScaleBits = 1074;

BigInt pow_int(unsigned base, std::uint64_t exponent);

// p * 2^kExactScaleBits as an exact integer. p must be finite and >= 0.
BigInt exact_scaled(double p);

// num / den rounded to double (den > 0, num >= 0). Relative error <= 2^-52.
double ratio_to_double(const BigInt& num, const BigInt& den);

// Natural log of x > 0.
double log_bigint(const BigInt& x);

// Number of significant bits (0 for zero).
std::uint64_t bit_length(const BigInt& x);

}  // namespace resolv

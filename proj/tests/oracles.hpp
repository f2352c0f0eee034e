#pragma once

// Independent reference computations used by the unit and acceptance tests.
// They work on plain vectors and share no code with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace oracle {

using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

inline long double log_base(long double x, int base) {
  return std::log(x) / std::log(static_cast<long double>(base));
}

inline double entropy(const std::vector<double>& p, int base) {
  long double h = 0.0L;
  for (const double v : p) {
    if (v > 0.0) h += static_cast<long double>(v) * log_base(1.0L / v, base);
  }
  return static_cast<double>(h);
}

inline std::vector<double> sorted_desc(std::vector<double> p) {
  std::sort(p.begin(), p.end(), std::greater<>());
  return p;
}

// All |base|^n sequence probabilities of an i.i.d. source.
inline std::vector<double> expand_iid(const std::vector<double>& base, unsigned n) {
  std::vector<double> out{1.0};
  for (unsigned k = 0; k < n; ++k) {
    std::vector<double> next;
    next.reserve(out.size() * base.size());
    for (const double a : out) {
      for (const double b : base) next.push_back(a * b);
    }
    out = std::move(next);
  }
  return out;
}

// Minimum partial entropy over every subset with mass >= 1 - delta.
inline double g_exhaustive(const std::vector<double>& p, double delta, int base) {
  const std::size_t k = p.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
    long double mass = 0.0L, cost = 0.0L;
    for (std::size_t i = 0; i < k; ++i) {
      if (mask >> i & 1U) {
        mass += p[i];
        if (p[i] > 0.0) cost += p[i] * log_base(1.0L / p[i], base);
      }
    }
    if (mass >= 1.0L - delta - 1e-12L) best = std::min(best, static_cast<double>(cost));
  }
  return best;
}

// Greedy prefix value on an explicit vector.
inline double g_greedy(const std::vector<double>& p, double delta, int base) {
  const auto s = sorted_desc(p);
  long double mass = 0.0L, cost = 0.0L;
  for (const double v : s) {
    if (mass >= 1.0L - delta - 1e-12L) break;
    mass += v;
    if (v > 0.0) cost += v * log_base(1.0L / v, base);
  }
  return static_cast<double>(cost);
}

// Top element of the variational ball in majorization order: its sorted
// cumulative sums are min(1, F(k) + delta) where F is the sorted cumulative of p.
inline std::vector<double> majorizing_point(const std::vector<double>& p, double delta) {
  const auto s = sorted_desc(p);
  std::vector<double> v(s.size());
  long double f = 0.0L, prev = 0.0L;
  for (std::size_t k = 0; k < s.size(); ++k) {
    f += s[k];
    const long double cum = std::min(1.0L, f + delta);
    v[k] = static_cast<double>(std::max(0.0L, cum - prev));
    prev = cum;
  }
  return v;
}

inline double h_majorizing(const std::vector<double>& p, double delta, int base) {
  return entropy(majorizing_point(p, delta), base);
}

// Smallest a with Pr[log 1/p > a] <= delta over an explicit vector.
inline double info_quantile(const std::vector<double>& p, double delta, int base) {
  std::vector<std::pair<double, double>> info;  // (info, p)
  for (const double v : p) {
    if (v > 0.0) info.emplace_back(static_cast<double>(log_base(1.0L / v, base)), v);
  }
  std::sort(info.begin(), info.end());
  for (std::size_t i = 0; i < info.size(); ++i) {
    long double tail = 0.0L;
    for (std::size_t j = 0; j < info.size(); ++j) {
      if (info[j].first > info[i].first * (1.0 + 1e-12) + 1e-15) tail += info[j].second;
    }
    if (tail <= delta + 1e-12L) return info[i].first;
  }
  return info.empty() ? 0.0 : info.back().first;
}

// Inverse of Q(x) = erfc(x / sqrt 2) / 2 by bisection.
inline double inverse_q_bisection(double p) {
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (0.5 * std::erfc(mid / std::sqrt(2.0)) > p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline Rational exact(double x) { return Rational(x); }

inline Integer power(unsigned base, unsigned m) {
  Integer r = 1;
  for (unsigned i = 0; i < m; ++i) r *= base;
  return r;
}

inline Integer floor_div(const Rational& q) {
  return boost::multiprecision::numerator(q) / boost::multiprecision::denominator(q);
}

}  // namespace oracle

#pragma once

namespace resolv {

// Standard normal CDF and its complement.
double normal_cdf(double x);
double normal_q(double x);

// Inverse of the standard normal CDF, p in (0,1). Rational approximation
// (Acklam) followed by one Halley step; absolute error well below 1e-8.
double inverse_normal_cdf(double p);

// Inverse of Q(x) = 1 - Phi(x), p in (0,1).
double inverse_q(double p);

}  // namespace resolv

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "resolv/distribution.hpp"

namespace resolv {

enum class SmoothMethod { GreedySet, HoYeung, Conditional, GridOracle, SubsetOracle };

std::string_view to_string(SmoothMethod method);
SmoothMethod smooth_method_from_string(std::string_view name);

struct SmoothEntropyResult {
  double delta = 0.0;
  double value = 0.0;
  SmoothMethod method = SmoothMethod::HoYeung;
  // Actual variational distance (ball quantities, G) or divergence (divergence
  // ball) from the witness to the input.
  double achieved_radius = 0.0;
  // Explicit witness; absent for grouped inputs.
  std::optional<FiniteDistribution> witness;
  // Witness pieces for grouped inputs, in descending per-atom probability.
  std::vector<Group> grouped_witness;
  // G_[delta] only: labels of the chosen set.
  std::vector<std::string> witness_set;
};

// Minimum partial entropy over the greedy prefix (descending p) carrying mass
// >= 1 - delta. The witness keeps p on the set and moves the leftover mass to
// the first atom outside it.
SmoothEntropyResult g_delta(const FiniteDistribution& d, double delta);
SmoothEntropyResult g_delta(const GroupedDistribution& d, double delta);

inline constexpr std::size_t kSubsetOracleMaxSupport = 20;

// Exact minimum over all subsets of the support; support size <= 20.
SmoothEntropyResult g_delta_subset_oracle(const FiniteDistribution& d, double delta);

// Smooth Renyi entropy of order one via the majorizing distribution: delta is
// added to the most likely atom and the tail beyond the (1 - delta)-quantile
// index is removed.
SmoothEntropyResult h_delta(const FiniteDistribution& d, double delta);
SmoothEntropyResult h_delta(const GroupedDistribution& d, double delta);

// Minimum entropy over simplex grid points inside the variational ball; at most
// three atoms.
SmoothEntropyResult h_delta_grid_oracle(const FiniteDistribution& d, double delta,
                                        double grid_step);

// Constructive upper bound on the divergence-ball smooth entropy: best
// conditional distribution d(.|A) over greedy prefixes A with log 1/P(A) <= delta.
SmoothEntropyResult h_div_upper(const FiniteDistribution& d, double delta);

SmoothEntropyResult h_div_grid_oracle(const FiniteDistribution& d, double delta,
                                      double grid_step);

// 2 delta^2 / ln K: divergence radius whose ball sits inside the variational delta-ball.
double pinsker_radius(double delta, int base);
// log_K 1 / (1 - delta).
double conditional_radius(double delta, int base);
// Entropy resolution of a grid oracle at the given step (base-K units).
double grid_slack(double grid_step);

struct SecondOrderPoint {
  unsigned n = 0;
  double smooth_entropy = 0.0;
  double term = 0.0;  // (H_[delta](X^n) - nR) / sqrt(n)
};

struct SecondOrderSeries {
  double delta = 0.0;
  double rate = 0.0;
  std::vector<SecondOrderPoint> points;
  double gaussian_limit = 0.0;
  double varentropy = 0.0;
  double q_inverse = 0.0;  // +inf at delta = 0
};

// -sqrt(V/2pi) exp(-Q^-1(delta)^2 / 2) for the single-letter base.
double gaussian_second_order_limit(const FiniteDistribution& base, double delta);

// n_list must be strictly increasing. Points may be evaluated concurrently;
// the result does not depend on it.
SecondOrderSeries second_order_series(const FiniteDistribution& base, double delta, double rate,
                                      std::span<const unsigned> n_list,
                                      std::size_t type_class_cap = kDefaultTypeClassCap,
                                      bool parallel = false);

}  // namespace resolv

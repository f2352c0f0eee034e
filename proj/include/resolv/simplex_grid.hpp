#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace resolv {

inline constexpr std::size_t kMaxGridDimension = 3;

struct GridMinimum {
  std::vector<double> point;
  double value = 0.0;
};

using PointPredicate = std::function<bool(std::span<const double>)>;
using PointObjective = std::function<double(std::span<const double>)>;

// Brute-force minimization over the probability simplex of dimension <= 3.
//
// Candidates are the seeds followed by every grid point {i/N} with
// N = ceil(1/step), visited in lexicographic order of the grid coordinates.
// One refinement pass then scans a (step/10)-lattice within two coarse steps of
// the incumbent. Ties keep the earliest candidate. Returns nullopt when no
// candidate is feasible.
std::optional<GridMinimum> simplex_grid_minimize(std::size_t dimension, double step,
                                                 std::span<const std::vector<double>> seeds,
                                                 const PointPredicate& feasible,
                                                 const PointObjective& objective);

// Shannon entropy of a coordinate vector in base-K units.
double coordinate_entropy(std::span<const double> point, int base);

// Variational distance between coordinate vectors of equal length.
double coordinate_distance(std::span<const double> a, std::span<const double> b);

// D(v || x) in base-K units; +inf when v charges a zero of x.
double coordinate_divergence(std::span<const double> v, std::span<const double> x, int base);

}  // namespace resolv

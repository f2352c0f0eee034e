#include "resolv/simplex_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace resolv {

double coordinate_entropy(std::span<const double> point, int base) {
  double h = 0.0;
  for (const double v : point) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return std::max(0.0, h / std::log(static_cast<double>(base)));
}

double coordinate_distance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
  return 0.5 * sum;
}

double coordinate_divergence(std::span<const double> v, std::span<const double> x, int base) {
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] <= 0.0) continue;
    if (x[i] <= 0.0) return std::numeric_limits<double>::infinity();
    sum += v[i] * std::log(v[i] / x[i]);
  }
  return std::max(0.0, sum / std::log(static_cast<double>(base)));
}

namespace {

class Incumbent {
 public:
  Incumbent(const PointPredicate& feasible, const PointObjective& objective)
      : feasible_(feasible), objective_(objective) {}

  void offer(std::span<const double> point) {
    if (!feasible_(point)) return;
    const double value = objective_(point);
    if (!best_ || value < best_->value) {
      best_ = GridMinimum{std::vector<double>(point.begin(), point.end()), value};
    }
  }

  const std::optional<GridMinimum>& best() const { return best_; }

 private:
  const PointPredicate& feasible_;
  const PointObjective& objective_;
  std::optional<GridMinimum> best_;
};

}  // namespace

std::optional<GridMinimum> simplex_grid_minimize(std::size_t dimension, double step,
                                                 std::span<const std::vector<double>> seeds,
                                                 const PointPredicate& feasible,
                                                 const PointObjective& objective) {
  if (dimension == 0 || dimension > kMaxGridDimension) {
    throw std::invalid_argument("grid search supports 1 to 3 coordinates");
  }
  if (!(step > 0.0 && step <= 0.5)) throw std::invalid_argument("grid step must lie in (0, 0.5]");

  Incumbent incumbent(feasible, objective);
  for (const auto& seed : seeds) {
    if (seed.size() != dimension) throw std::invalid_argument("seed has wrong dimension");
    incumbent.offer(seed);
  }

  const auto cells = static_cast<long>(std::ceil(1.0 / step - 1e-9));
  const double n = static_cast<double>(cells);
  std::vector<double> point(dimension, 0.0);
  if (dimension == 1) {
    point[0] = 1.0;
    incumbent.offer(point);
    return incumbent.best();
  }
  if (dimension == 2) {
    for (long i = 0; i <= cells; ++i) {
      point[0] = static_cast<double>(i) / n;
      point[1] = static_cast<double>(cells - i) / n;
      incumbent.offer(point);
    }
  } else {
    for (long i = 0; i <= cells; ++i) {
      for (long j = 0; i + j <= cells; ++j) {
        point[0] = static_cast<double>(i) / n;
        point[1] = static_cast<double>(j) / n;
        point[2] = static_cast<double>(cells - i - j) / n;
        incumbent.offer(point);
      }
    }
  }

  if (!incumbent.best()) return std::nullopt;

  // Local refinement on a 10x finer lattice around the incumbent.
  const std::vector<double> centre = incumbent.best()->point;
  const double fine = 1.0 / (10.0 * n);
  constexpr long reach = 20;
  const auto settle = [&](std::vector<double>& p) {
    double rest = 1.0;
    for (std::size_t k = 0; k + 1 < dimension; ++k) rest -= p[k];
    if (rest < -1e-15) return false;
    p[dimension - 1] = std::max(0.0, rest);
    for (const double v : p) {
      if (v < 0.0 || v > 1.0) return false;
    }
    return true;
  };
  if (dimension == 2) {
    for (long u = -reach; u <= reach; ++u) {
      point[0] = centre[0] + static_cast<double>(u) * fine;
      if (settle(point)) incumbent.offer(point);
    }
  } else {
    for (long u = -reach; u <= reach; ++u) {
      for (long v = -reach; v <= reach; ++v) {
        point[0] = centre[0] + static_cast<double>(u) * fine;
        point[1] = centre[1] + static_cast<double>(v) * fine;
        if (settle(point)) incumbent.offer(point);
      }
    }
  }
  return incumbent.best();
}

}  // namespace resolv

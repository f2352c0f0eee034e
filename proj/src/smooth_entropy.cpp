#include "resolv/smooth_entropy.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "resolv/gaussian.hpp"
#include "resolv/simplex_grid.hpp"

namespace resolv {

namespace {

void require_delta_unit(double delta) {
  if (!(delta >= 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in [0,1)");
}

double self_info_term(double mass, int base) {
  return mass > 0.0 ? -mass * log_k(mass, base) : 0.0;
}

std::vector<Atom> positive_atoms(const FiniteDistribution& d) {
  std::vector<Atom> out;
  for (const auto& atom : d.atoms()) {
    if (atom.p > 0.0) out.push_back(atom);
  }
  return out;
}

// Leftover mass of a set moved to the first atom outside it.
FiniteDistribution set_witness(const FiniteDistribution& d, const std::vector<bool>& in_set) {
  std::vector<Atom> atoms = d.atoms();
  double outside = 0.0;
  std::optional<std::size_t> receiver;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (in_set[i]) continue;
    outside += atoms[i].p;
    atoms[i].p = 0.0;
    if (!receiver) receiver = i;
  }
  if (receiver) atoms[*receiver].p = outside;
  return FiniteDistribution(std::move(atoms), d.base());
}

BigInt bigint_from_long_double(long double x) {
  if (!(x >= 0.0L)) return 0;
  if (x < 9.0e18L) return BigInt(static_cast<std::uint64_t>(x));
  int exponent = 0;
  const long double fraction = std::frexp(x, &exponent);
  BigInt out(static_cast<std::uint64_t>(std::ldexp(fraction, 64)));
  const int shift = exponent - 64;
  if (shift >= 0) out <<= shift;
  else out >>= -shift;
  return out;
}

Group make_piece(double mass, const BigInt& count, double info, int base) {
  Group g;
  g.count = count;
  g.mass = mass;
  g.info = info;
  g.p = std::exp(-info * std::log(static_cast<double>(base)));
  return g;
}

Group singleton_piece(double mass, int base) {
  Group g;
  g.count = 1;
  g.mass = mass;
  g.p = mass;
  g.info = mass > 0.0 ? -log_k(mass, base) : std::numeric_limits<double>::infinity();
  return g;
}

// Locates the group holding the (1 - delta)-quantile atom and how many of its
// atoms are needed to reach the target mass.
struct QuantileCut {
  std::size_t group = 0;
  long double atoms_needed = 1.0L;  // k >= 1
  double mass_before = 0.0;
};

QuantileCut find_cut(const GroupedDistribution& d, double target) {
  const auto& groups = d.groups();
  const long double ln_base = std::log(static_cast<long double>(d.log_base()));
  double cum = 0.0;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const bool last = i + 1 == groups.size();
    if (cum + groups[i].mass >= target - kCumulativeTolerance || last) {
      const long double p = std::exp(-static_cast<long double>(groups[i].info) * ln_base);
      const long double need = static_cast<long double>(target) - cum - kCumulativeTolerance;
      long double k = need > 0.0L ? std::ceil(need / p) : 1.0L;
      const long double count = static_cast<long double>(log_bigint(groups[i].count));
      if (k < 1.0L) k = 1.0L;
      if (std::log(k) > count) k = std::exp(count);
      return {i, k, cum};
    }
    cum += groups[i].mass;
  }
  return {groups.size() - 1, 1.0L, cum};
}

}  // namespace

std::string_view to_string(SmoothMethod method) {
  switch (method) {
    case SmoothMethod::GreedySet: return "greedy-set";
    case SmoothMethod::HoYeung: return "ho-yeung";
    case SmoothMethod::Conditional: return "conditional";
    case SmoothMethod::GridOracle: return "grid-oracle";
    case SmoothMethod::SubsetOracle: return "subset-oracle";
  }
  return "unknown";
}

SmoothMethod smooth_method_from_string(std::string_view name) {
  for (auto m : {SmoothMethod::GreedySet, SmoothMethod::HoYeung, SmoothMethod::Conditional,
                 SmoothMethod::GridOracle, SmoothMethod::SubsetOracle}) {
    if (to_string(m) == name) return m;
  }
  throw std::invalid_argument("unknown smoothing method '" + std::string(name) + "'");
}

double pinsker_radius(double delta, int base) {
  return 2.0 * delta * delta / std::log(static_cast<double>(base));
}

double conditional_radius(double delta, int base) { return -log_k(1.0 - delta, base); }

double grid_slack(double grid_step) { return 4.0 * grid_step; }

SmoothEntropyResult g_delta(const FiniteDistribution& d, double delta) {
  require_delta_unit(delta);
  const double target = 1.0 - delta;
  std::vector<bool> in_set(d.size(), false);
  SmoothEntropyResult result;
  result.delta = delta;
  result.method = SmoothMethod::GreedySet;
  double cum = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (cum >= target - kCumulativeTolerance) break;
    const auto& atom = d[i];
    if (atom.p <= 0.0) break;
    in_set[i] = true;
    cum += atom.p;
    result.value += self_info_term(atom.p, d.base());
    result.witness_set.push_back(atom.label);
  }
  result.witness = set_witness(d, in_set);
  result.achieved_radius = variational_distance(*result.witness, d);
  return result;
}

SmoothEntropyResult g_delta(const GroupedDistribution& d, double delta) {
  require_delta_unit(delta);
  const int base = d.log_base();
  const auto cut = find_cut(d, 1.0 - delta);
  SmoothEntropyResult result;
  result.delta = delta;
  result.method = SmoothMethod::GreedySet;
  double selected = 0.0;
  for (std::size_t i = 0; i < cut.group; ++i) {
    const auto& g = d.groups()[i];
    result.value += g.mass * g.info;
    selected += g.mass;
    result.grouped_witness.push_back(g);
  }
  const auto& g = d.groups()[cut.group];
  const long double ln_base = std::log(static_cast<long double>(base));
  const long double p = std::exp(-static_cast<long double>(g.info) * ln_base);
  const double mass = std::min(static_cast<double>(cut.atoms_needed * p), g.mass);
  result.value += mass * g.info;
  selected += mass;
  result.grouped_witness.push_back(
      make_piece(mass, bigint_from_long_double(cut.atoms_needed), g.info, base));
  result.achieved_radius = std::max(0.0, d.total() - selected);
  return result;
}

SmoothEntropyResult g_delta_subset_oracle(const FiniteDistribution& d, double delta) {
  require_delta_unit(delta);
  const auto positive = positive_atoms(d);
  if (positive.size() > kSubsetOracleMaxSupport) {
    throw std::invalid_argument("subset oracle supports at most 20 atoms");
  }
  const std::size_t count = positive.size();
  const std::size_t masks = std::size_t{1} << count;
  std::vector<double> mass(masks, 0.0);
  std::vector<double> cost(masks, 0.0);
  std::vector<double> atom_cost(count);
  for (std::size_t i = 0; i < count; ++i) atom_cost[i] = self_info_term(positive[i].p, d.base());

  const double target = 1.0 - delta - kCumulativeTolerance;
  std::size_t best_mask = masks - 1;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t mask = 1; mask < masks; ++mask) {
    const auto low = static_cast<std::size_t>(__builtin_ctzll(mask));
    const std::size_t rest = mask & (mask - 1);
    mass[mask] = mass[rest] + positive[low].p;
    cost[mask] = cost[rest] + atom_cost[low];
    if (mass[mask] >= target && cost[mask] < best) {
      best = cost[mask];
      best_mask = mask;
    }
  }

  SmoothEntropyResult result;
  result.delta = delta;
  result.method = SmoothMethod::SubsetOracle;
  std::vector<bool> in_set(d.size(), false);
  double value = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    if (best_mask & (std::size_t{1} << i)) {
      in_set[*d.index_of(positive[i].label)] = true;
      value += atom_cost[i];
      result.witness_set.push_back(positive[i].label);
    }
  }
  result.value = value;
  result.witness = set_witness(d, in_set);
  result.achieved_radius = variational_distance(*result.witness, d);
  return result;
}

SmoothEntropyResult h_delta(const FiniteDistribution& d, double delta) {
  require_delta_unit(delta);
  std::vector<Atom> atoms = d.atoms();
  const std::size_t support = d.support_size();

  // j*: first index whose cumulative mass reaches 1 - delta.
  const double target = 1.0 - delta;
  std::size_t cut = support - 1;
  double cum = 0.0;
  for (std::size_t i = 0; i < support; ++i) {
    cum += atoms[i].p;
    if (cum >= target - kCumulativeTolerance) {
      cut = i;
      break;
    }
  }
  double tail = 0.0;
  for (std::size_t i = support; i-- > cut + 1;) tail += atoms[i].p;
  const double epsilon = std::clamp(delta - tail, 0.0, atoms[cut].p);

  for (std::size_t i = cut + 1; i < atoms.size(); ++i) atoms[i].p = 0.0;
  if (cut == 0) {
    atoms[0].p = atoms[0].p + delta - epsilon;
  } else {
    atoms[0].p += delta;
    atoms[cut].p -= epsilon;
  }

  SmoothEntropyResult result;
  result.delta = delta;
  result.method = SmoothMethod::HoYeung;
  result.witness = FiniteDistribution(std::move(atoms), d.base());
  result.value = entropy(*result.witness);
  result.achieved_radius = variational_distance(*result.witness, d);
  return result;
}

SmoothEntropyResult h_delta(const GroupedDistribution& d, double delta) {
  require_delta_unit(delta);
  const int base = d.log_base();
  const auto& groups = d.groups();
  const auto cut = find_cut(d, 1.0 - delta);
  const Group& cut_group = groups[cut.group];
  const long double ln_base = std::log(static_cast<long double>(base));
  const long double p_cut = std::exp(-static_cast<long double>(cut_group.info) * ln_base);

  // Atoms of the cut group before the split one.
  const long double full_before_cut = cut.atoms_needed - 1.0L;
  double tail = 0.0;
  for (std::size_t i = groups.size(); i-- > cut.group + 1;) tail += groups[i].mass;
  const double full_cut_mass = static_cast<double>(full_before_cut * p_cut);
  tail += std::max(0.0, cut_group.mass - full_cut_mass - static_cast<double>(p_cut));
  const double epsilon = std::clamp(delta - tail, 0.0, static_cast<double>(p_cut));
  const double residual = static_cast<double>(p_cut) - epsilon;

  SmoothEntropyResult result;
  result.delta = delta;
  result.method = SmoothMethod::HoYeung;
  auto& pieces = result.grouped_witness;

  const Group& top = groups.front();
  if (cut.group == 0 && cut.atoms_needed <= 1.0L) {
    // The split atom is the most likely one.
    pieces.push_back(singleton_piece(top.p + delta - epsilon, base));
    result.achieved_radius = delta - epsilon;
  } else {
    pieces.push_back(singleton_piece(top.p + delta, base));
    if (cut.group == 0) {
      const long double middle = cut.atoms_needed - 2.0L;
      if (middle > 0.0L) {
        pieces.push_back(make_piece(static_cast<double>(middle * p_cut),
                                    bigint_from_long_double(middle), top.info, base));
      }
    } else {
      if (top.count > 1) {
        pieces.push_back(make_piece(std::max(0.0, top.mass - top.p), top.count - 1, top.info,
                                    base));
      }
      for (std::size_t i = 1; i < cut.group; ++i) pieces.push_back(groups[i]);
      if (full_before_cut > 0.0L) {
        pieces.push_back(make_piece(full_cut_mass, bigint_from_long_double(full_before_cut),
                                    cut_group.info, base));
      }
    }
    if (residual > 0.0) pieces.push_back(singleton_piece(residual, base));
    result.achieved_radius = delta;
  }

  double h = 0.0;
  for (const auto& piece : pieces) {
    if (piece.mass > 0.0) h += piece.mass * piece.info;
  }
  result.value = std::max(0.0, h);
  return result;
}

namespace {

struct GridProblem {
  std::vector<std::string> labels;
  std::vector<double> target;
};

GridProblem grid_problem(const FiniteDistribution& d) {
  if (d.size() > kMaxGridDimension) {
    throw std::invalid_argument("grid oracle supports at most 3 atoms");
  }
  return {d.labels(), d.probabilities()};
}

FiniteDistribution point_to_distribution(const std::vector<std::string>& labels,
                                         std::span<const double> point, int base) {
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < labels.size(); ++i) atoms.push_back({labels[i], point[i]});
  return FiniteDistribution(std::move(atoms), base);
}

}  // namespace

SmoothEntropyResult h_delta_grid_oracle(const FiniteDistribution& d, double delta,
                                        double grid_step) {
  require_delta_unit(delta);
  const auto problem = grid_problem(d);
  const int base = d.base();
  const std::vector<std::vector<double>> seeds{problem.target};
  const auto best = simplex_grid_minimize(
      problem.labels.size(), grid_step, seeds,
      [&](std::span<const double> v) {
        return coordinate_distance(v, problem.target) <= delta + kCumulativeTolerance;
      },
      [base](std::span<const double> v) { return coordinate_entropy(v, base); });

  SmoothEntropyResult result;
  result.delta = delta;
  result.method = SmoothMethod::GridOracle;
  result.value = best->value;
  result.witness = point_to_distribution(problem.labels, best->point, base);
  result.achieved_radius = variational_distance(*result.witness, d);
  return result;
}

SmoothEntropyResult h_div_upper(const FiniteDistribution& d, double delta) {
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    throw std::invalid_argument("divergence radius must be finite and nonnegative");
  }
  const int base = d.base();
  const auto positive = positive_atoms(d);
  std::vector<double> prefix(positive.size() + 1, 0.0);
  for (std::size_t i = 0; i < positive.size(); ++i) prefix[i + 1] = prefix[i] + positive[i].p;
  const double total = prefix.back();

  std::size_t best_len = positive.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t len = 1; len <= positive.size(); ++len) {
    const double alpha = prefix[len] / total;
    if (-log_k(alpha, base) > delta + kCumulativeTolerance) continue;
    double h = 0.0;
    for (std::size_t i = 0; i < len; ++i) h += self_info_term(positive[i].p / prefix[len], base);
    if (h < best) {
      best = h;
      best_len = len;
    }
  }

  std::vector<Atom> atoms = d.atoms();
  const double alpha_mass = prefix[best_len];
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    atoms[i].p = i < best_len ? atoms[i].p / alpha_mass : 0.0;
  }

  SmoothEntropyResult result;
  result.delta = delta;
  result.method = SmoothMethod::Conditional;
  result.witness = FiniteDistribution(std::move(atoms), base);
  result.value = entropy(*result.witness);
  result.achieved_radius = -log_k(alpha_mass / total, base);
  return result;
}

SmoothEntropyResult h_div_grid_oracle(const FiniteDistribution& d, double delta,
                                      double grid_step) {
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    throw std::invalid_argument("divergence radius must be finite and nonnegative");
  }
  const auto problem = grid_problem(d);
  const int base = d.base();
  const std::vector<std::vector<double>> seeds{problem.target};
  const auto best = simplex_grid_minimize(
      problem.labels.size(), grid_step, seeds,
      [&](std::span<const double> v) {
        return coordinate_divergence(v, problem.target, base) <= delta + kCumulativeTolerance;
      },
      [base](std::span<const double> v) { return coordinate_entropy(v, base); });

  SmoothEntropyResult result;
  result.delta = delta;
  result.method = SmoothMethod::GridOracle;
  result.value = best->value;
  result.witness = point_to_distribution(problem.labels, best->point, base);
  result.achieved_radius = kl_divergence(*result.witness, d);
  return result;
}

double gaussian_second_order_limit(const FiniteDistribution& base, double delta) {
  require_delta_unit(delta);
  if (delta == 0.0) return 0.0;
  const double q = inverse_q(delta);
  return -std::sqrt(varentropy(base) / (2.0 * std::numbers::pi)) * std::exp(-0.5 * q * q);
}

SecondOrderSeries second_order_series(const FiniteDistribution& base, double delta, double rate,
                                      std::span<const unsigned> n_list,
                                      std::size_t type_class_cap, bool parallel) {
  require_delta_unit(delta);
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] == 0) throw std::invalid_argument("blocklengths must be positive");
    if (i > 0 && n_list[i] <= n_list[i - 1]) {
      throw std::invalid_argument("blocklengths must be strictly increasing");
    }
  }
  const auto evaluate = [&](unsigned n) {
    const auto power = iid_power(base, n, type_class_cap);
    SecondOrderPoint point;
    point.n = n;
    point.smooth_entropy = h_delta(power, delta).value;
    point.term = (point.smooth_entropy - static_cast<double>(n) * rate) /
                 std::sqrt(static_cast<double>(n));
    return point;
  };

  SecondOrderSeries series;
  series.delta = delta;
  series.rate = rate;
  series.varentropy = varentropy(base);
  series.q_inverse = delta == 0.0 ? std::numeric_limits<double>::infinity() : inverse_q(delta);
  series.gaussian_limit = gaussian_second_order_limit(base, delta);
  if (parallel) {
    std::vector<std::future<SecondOrderPoint>> pending;
    for (const unsigned n : n_list) pending.push_back(std::async(std::launch::async, evaluate, n));
    for (auto& f : pending) series.points.push_back(f.get());
  } else {
    for (const unsigned n : n_list) series.points.push_back(evaluate(n));
  }
  return series;
}

}  // namespace resolv

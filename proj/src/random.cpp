#include "resolv/random.hpp"

#include <cmath>
#include <limits>

namespace resolv {

namespace {

std::vector<double> dirichlet_weights(Rng& rng, std::size_t k, double zero_chance,
                                      double tie_chance) {
  std::vector<double> w(k);
  const bool quantize = rng.uniform01() < tie_chance;
  double sum = 0.0;
  for (auto& v : w) {
    v = -std::log1p(-rng.uniform01());
    if (quantize) v = std::ceil(v * 4.0);
    if (rng.uniform01() < zero_chance) v = 0.0;
    sum += v;
  }
  if (sum <= 0.0) {
    w[0] = 1.0;
    sum = 1.0;
  }
  for (auto& v : w) v /= sum;
  return w;
}

}  // namespace

std::uint64_t Rng::below(std::uint64_t bound) {
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - max % bound;
  std::uint64_t x = 0;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

FiniteDistribution random_distribution(Rng& rng, const RandomDistributionOptions& options) {
  const std::size_t k = rng.between(options.min_atoms, options.max_atoms);
  const auto w = dirichlet_weights(rng, k, options.zero_atom_chance, options.tie_chance);
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < k; ++i) atoms.push_back({"a" + std::to_string(i), w[i]});
  return FiniteDistribution(std::move(atoms), options.base);
}

FiniteDistribution random_distribution_on(Rng& rng, const std::vector<std::string>& labels,
                                          int base) {
  const auto w = dirichlet_weights(rng, labels.size(), 0.0, 0.0);
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < labels.size(); ++i) atoms.push_back({labels[i], w[i]});
  return FiniteDistribution(std::move(atoms), base);
}

Channel random_channel(Rng& rng, std::size_t inputs, std::size_t outputs, int base) {
  std::vector<std::string> in, out;
  for (std::size_t i = 0; i < inputs; ++i) in.push_back("x" + std::to_string(i));
  for (std::size_t j = 0; j < outputs; ++j) out.push_back("y" + std::to_string(j));
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < inputs; ++i) rows.push_back(dirichlet_weights(rng, outputs, 0.1, 0.2));
  return Channel(std::move(in), std::move(out), std::move(rows), base);
}

}  // namespace resolv

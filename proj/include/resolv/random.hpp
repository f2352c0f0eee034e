#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "resolv/channel.hpp"
#include "resolv/distribution.hpp"

namespace resolv {

// Seeded generator with platform-independent derived draws (the standard
// distribution adaptors are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  // Uniform on {0, ..., bound - 1}.
  std::uint64_t below(std::uint64_t bound);
  // Uniform on {lo, ..., hi}.
  std::size_t between(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }

 private:
  std::mt19937_64 engine_;
};

struct RandomDistributionOptions {
  std::size_t min_atoms = 2;
  std::size_t max_atoms = 8;
  int base = 2;
  double zero_atom_chance = 0.0;  // per atom
  double tie_chance = 0.25;       // quantize weights to create ties
};

// Flat Dirichlet weights, labels "a0", "a1", ...
FiniteDistribution random_distribution(Rng& rng, const RandomDistributionOptions& options = {});

// Random distribution on exactly the given labels.
FiniteDistribution random_distribution_on(Rng& rng, const std::vector<std::string>& labels,
                                          int base = 2);

Channel random_channel(Rng& rng, std::size_t inputs, std::size_t outputs, int base = 2);

}  // namespace resolv

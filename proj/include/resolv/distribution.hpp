#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "resolv/bigint.hpp"

namespace resolv {

inline constexpr double kMassTolerance = 1e-9;
inline constexpr double kCumulativeTolerance = 1e-12;
inline constexpr std::size_t kDefaultTypeClassCap = 2'000'000;

// log base K of x.
double log_k(double x, int base);

struct Atom {
  std::string label;
  double p = 0.0;

  friend bool operator==(const Atom&, const Atom&) = default;
};

// Finite-support probability vector. Atoms are kept in canonical order:
// descending p, ties broken by ascending label.
class FiniteDistribution {
 public:
  FiniteDistribution(std::vector<Atom> atoms, int base = 2);

  // Labels are zero-padded indices ("0", "1", ... or "00", "01", ...) so that
  // label order matches input order.
  static FiniteDistribution from_probabilities(std::span<const double> probabilities,
                                               int base = 2);

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  int base() const noexcept { return base_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  const Atom& operator[](std::size_t i) const { return atoms_[i]; }

  // Probability of a label; 0 when the label is not present.
  double p(std::string_view label) const;
  std::optional<std::size_t> index_of(std::string_view label) const;
  bool contains(std::string_view label) const { return index_of(label).has_value(); }

  std::size_t support_size() const noexcept;
  bool has_zero_atoms() const noexcept { return support_size() != atoms_.size(); }
  double total() const noexcept;

  std::vector<std::string> labels() const;
  std::vector<double> probabilities() const;

  friend bool operator==(const FiniteDistribution&, const FiniteDistribution&) = default;

 private:
  std::vector<Atom> atoms_;
  int base_ = 2;
  std::vector<std::size_t> by_label_;  // atom indices sorted by label
};

// One type class (or several type classes sharing a per-atom probability).
struct Group {
  double info = 0.0;  // log_K 1/p, kept separately because p underflows for large n
  double p = 0.0;
  BigInt count = 1;
  double mass = 0.0;  // p * count

  friend bool operator==(const Group&, const Group&) = default;
};

// The i.i.d. power of a single-letter distribution, stored by type classes.
// Type classes with identical per-atom probability are merged.
class GroupedDistribution {
 public:
  GroupedDistribution(FiniteDistribution base, unsigned n, std::vector<Group> groups);

  const FiniteDistribution& base() const noexcept { return base_; }
  unsigned n() const noexcept { return n_; }
  int log_base() const noexcept { return base_.base(); }
  const std::vector<Group>& groups() const noexcept { return groups_; }
  double total() const noexcept;

 private:
  FiniteDistribution base_;
  unsigned n_ = 1;
  std::vector<Group> groups_;
};

struct SpectralQuantile {
  double delta = 0.0;
  double value = 0.0;
};

double entropy(const FiniteDistribution& d);
double entropy(const GroupedDistribution& d);

double renyi_entropy(const FiniteDistribution& d, double alpha);

// Variance of log_K 1/p(X) in base-K units squared.
double varentropy(const FiniteDistribution& d);

// Both operands are read over the union of their labels; missing labels count as 0.
double variational_distance(const FiniteDistribution& p, const FiniteDistribution& q);
double kl_divergence(const FiniteDistribution& p, const FiniteDistribution& q);

GroupedDistribution iid_power(const FiniteDistribution& base, unsigned n,
                              std::size_t type_class_cap = kDefaultTypeClassCap);

SpectralQuantile info_quantile(const FiniteDistribution& d, double delta);
SpectralQuantile info_quantile(const GroupedDistribution& d, double delta);

// Group cap honoring the RESOLV_TYPECLASS_CAP environment variable.
std::size_t type_class_cap_from_env();

// Number of type classes of an alphabet of the given size over n.
BigInt type_class_count(std::size_t alphabet, unsigned n);

}  // namespace resolv

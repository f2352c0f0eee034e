#include "resolv/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace resolv {

namespace {

void require_same_base(int a, int b) {
  if (a != b) {
    throw std::invalid_argument("log base mismatch: " + std::to_string(a) + " vs " +
                                std::to_string(b));
  }
}

bool canonical_less(const Atom& a, const Atom& b) {
  if (a.p != b.p) return a.p > b.p;
  return a.label < b.label;
}

}  // namespace

double log_k(double x, int base) { return std::log(x) / std::log(static_cast<double>(base)); }

FiniteDistribution::FiniteDistribution(std::vector<Atom> atoms, int base)
    : atoms_(std::move(atoms)), base_(base) {
  if (base_ < 2) throw std::invalid_argument("log base must be >= 2");
  if (atoms_.empty()) throw std::invalid_argument("distribution has no atoms");
  std::unordered_set<std::string> seen;
  for (const auto& atom : atoms_) {
    if (!std::isfinite(atom.p) || atom.p < 0.0 || atom.p > 1.0 + kMassTolerance) {
      throw std::invalid_argument("atom '" + atom.label + "' has invalid probability");
    }
    if (!seen.insert(atom.label).second) {
      throw std::invalid_argument("duplicate atom label '" + atom.label + "'");
    }
  }
  if (std::abs(total() - 1.0) > kMassTolerance) {
    throw std::invalid_argument("probabilities sum to " + std::to_string(total()) +
                                ", expected 1");
  }
  std::sort(atoms_.begin(), atoms_.end(), canonical_less);
  by_label_.resize(atoms_.size());
  std::iota(by_label_.begin(), by_label_.end(), std::size_t{0});
  std::sort(by_label_.begin(), by_label_.end(),
            [this](std::size_t a, std::size_t b) { return atoms_[a].label < atoms_[b].label; });
}

FiniteDistribution FiniteDistribution::from_probabilities(std::span<const double> probabilities,
                                                          int base) {
  const std::size_t width = std::to_string(probabilities.empty() ? 0 : probabilities.size() - 1)
                                .size();
  std::vector<Atom> atoms;
  atoms.reserve(probabilities.size());
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    std::string label = std::to_string(i);
    label.insert(0, width - label.size(), '0');
    atoms.push_back({std::move(label), probabilities[i]});
  }
  return FiniteDistribution(std::move(atoms), base);
}

std::optional<std::size_t> FiniteDistribution::index_of(std::string_view label) const {
  const auto it = std::lower_bound(
      by_label_.begin(), by_label_.end(), label,
      [this](std::size_t i, std::string_view l) { return atoms_[i].label < l; });
  if (it == by_label_.end() || atoms_[*it].label != label) return std::nullopt;
  return *it;
}

double FiniteDistribution::p(std::string_view label) const {
  const auto i = index_of(label);
  return i ? atoms_[*i].p : 0.0;
}

std::size_t FiniteDistribution::support_size() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(atoms_.begin(), atoms_.end(), [](const Atom& a) { return a.p > 0.0; }));
}

double FiniteDistribution::total() const noexcept {
  double sum = 0.0;
  for (const auto& atom : atoms_) sum += atom.p;
  return sum;
}

std::vector<std::string> FiniteDistribution::labels() const {
  std::vector<std::string> out;
  out.reserve(atoms_.size());
  for (const auto& atom : atoms_) out.push_back(atom.label);
  return out;
}

std::vector<double> FiniteDistribution::probabilities() const {
  std::vector<double> out;
  out.reserve(atoms_.size());
  for (const auto& atom : atoms_) out.push_back(atom.p);
  return out;
}

GroupedDistribution::GroupedDistribution(FiniteDistribution base, unsigned n,
                                         std::vector<Group> groups)
    : base_(std::move(base)), n_(n), groups_(std::move(groups)) {
  if (n_ == 0) throw std::invalid_argument("blocklength must be positive");
  if (groups_.empty()) throw std::invalid_argument("grouped distribution has no groups");
  for (std::size_t i = 0; i < groups_.size(); ++i) {
    if (groups_[i].count <= 0 || !(groups_[i].mass >= 0.0)) {
      throw std::invalid_argument("group has invalid count or mass");
    }
    if (i > 0 && groups_[i].info < groups_[i - 1].info) {
      throw std::invalid_argument("groups must be ordered by descending probability");
    }
  }
  if (std::abs(total() - 1.0) > kMassTolerance) {
    throw std::invalid_argument("grouped masses sum to " + std::to_string(total()));
  }
}

double GroupedDistribution::total() const noexcept {
  double sum = 0.0;
  for (const auto& g : groups_) sum += g.mass;
  return sum;
}

double entropy(const FiniteDistribution& d) {
  double h = 0.0;
  for (const auto& atom : d.atoms()) {
    if (atom.p > 0.0) h -= atom.p * std::log(atom.p);
  }
  return std::max(0.0, h / std::log(static_cast<double>(d.base())));
}

double entropy(const GroupedDistribution& d) {
  double h = 0.0;
  for (const auto& g : d.groups()) h += g.mass * g.info;
  return std::max(0.0, h);
}

double renyi_entropy(const FiniteDistribution& d, double alpha) {
  if (!(alpha > 0.0) || alpha == 1.0 || !std::isfinite(alpha)) {
    throw std::invalid_argument("Renyi order must be positive, finite and != 1");
  }
  double sum = 0.0;
  for (const auto& atom : d.atoms()) {
    if (atom.p > 0.0) sum += std::pow(atom.p, alpha);
  }
  return std::max(0.0, log_k(sum, d.base()) / (1.0 - alpha));
}

double varentropy(const FiniteDistribution& d) {
  const double h = entropy(d);
  double v = 0.0;
  for (const auto& atom : d.atoms()) {
    if (atom.p > 0.0) {
      const double dev = -log_k(atom.p, d.base()) - h;
      v += atom.p * dev * dev;
    }
  }
  return v;
}

double variational_distance(const FiniteDistribution& p, const FiniteDistribution& q) {
  require_same_base(p.base(), q.base());
  // Summed in label order over the union so the result is exactly symmetric.
  std::vector<std::string> labels = p.labels();
  for (const auto& atom : q.atoms()) {
    if (!p.contains(atom.label)) labels.push_back(atom.label);
  }
  std::sort(labels.begin(), labels.end());
  double sum = 0.0;
  for (const auto& label : labels) sum += std::abs(p.p(label) - q.p(label));
  return std::min(1.0, 0.5 * sum);
}

double kl_divergence(const FiniteDistribution& p, const FiniteDistribution& q) {
  require_same_base(p.base(), q.base());
  double sum = 0.0;
  for (const auto& atom : p.atoms()) {
    if (atom.p <= 0.0) continue;
    const double qp = q.p(atom.label);
    if (qp <= 0.0) return std::numeric_limits<double>::infinity();
    sum += atom.p * std::log(atom.p / qp);
  }
  return std::max(0.0, sum / std::log(static_cast<double>(p.base())));
}

BigInt type_class_count(std::size_t alphabet, unsigned n) {
  if (alphabet == 0) return 0;
  // C(n + k - 1, k - 1)
  BigInt c = 1;
  const std::size_t k1 = alphabet - 1;
  for (std::size_t j = 1; j <= k1; ++j) {
    c *= (n + j);
    c /= j;
  }
  return c;
}

namespace {

struct RawClass {
  double info;
  BigInt count;
};

void enumerate_types(std::span<const double> infos, std::size_t level, unsigned remaining,
                     const BigInt& partial_count, double partial_info,
                     std::vector<RawClass>& out) {
  if (level + 1 == infos.size()) {
    out.push_back({partial_info + remaining * infos[level], partial_count});
    return;
  }
  BigInt binom = 1;  // C(remaining, j)
  for (unsigned j = 0; j <= remaining; ++j) {
    enumerate_types(infos, level + 1, remaining - j, partial_count * binom,
                    partial_info + j * infos[level], out);
    binom *= (remaining - j);
    binom /= (j + 1);
  }
}

}  // namespace

GroupedDistribution iid_power(const FiniteDistribution& base, unsigned n,
                              std::size_t type_class_cap) {
  if (n == 0) throw std::invalid_argument("blocklength must be positive");
  std::vector<double> infos;
  for (const auto& atom : base.atoms()) {
    if (atom.p > 0.0) infos.push_back(-log_k(atom.p, base.base()));
  }
  const BigInt classes = type_class_count(infos.size(), n);
  if (classes > type_class_cap) {
    throw std::length_error("type-class count " + classes.str() + " exceeds cap " +
                            std::to_string(type_class_cap));
  }

  std::vector<RawClass> raw;
  raw.reserve(classes.convert_to<std::size_t>());
  enumerate_types(infos, 0, n, BigInt(1), 0.0, raw);
  std::stable_sort(raw.begin(), raw.end(),
                   [](const RawClass& a, const RawClass& b) { return a.info < b.info; });

  const double ln_base = std::log(static_cast<double>(base.base()));
  std::vector<Group> groups;
  for (auto& cls : raw) {
    if (!groups.empty() &&
        std::abs(cls.info - groups.back().info) <=
            kCumulativeTolerance * std::max(1.0, std::abs(cls.info))) {
      groups.back().count += cls.count;
      continue;
    }
    Group g;
    g.info = std::max(0.0, cls.info);
    g.count = std::move(cls.count);
    groups.push_back(std::move(g));
  }
  for (auto& g : groups) {
    g.p = std::exp(-g.info * ln_base);
    g.mass = std::exp(log_bigint(g.count) - g.info * ln_base);
  }
  return GroupedDistribution(base, n, std::move(groups));
}

SpectralQuantile info_quantile(const FiniteDistribution& d, double delta) {
  if (!(delta >= 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in [0,1)");
  std::vector<Atom> positive;
  for (const auto& atom : d.atoms()) {
    if (atom.p > 0.0) positive.push_back(atom);
  }
  // suffix[i] = mass of atoms i.. (canonical order is ascending information).
  std::vector<double> suffix(positive.size() + 1, 0.0);
  for (std::size_t i = positive.size(); i-- > 0;) suffix[i] = suffix[i + 1] + positive[i].p;

  for (std::size_t i = 0; i < positive.size(); ++i) {
    std::size_t last = i;
    while (last + 1 < positive.size() && positive[last + 1].p == positive[i].p) ++last;
    if (suffix[last + 1] <= delta + kCumulativeTolerance) {
      return {delta, std::max(0.0, -log_k(positive[i].p, d.base()))};
    }
    i = last;
  }
  return {delta, std::max(0.0, -log_k(positive.back().p, d.base()))};
}

SpectralQuantile info_quantile(const GroupedDistribution& d, double delta) {
  if (!(delta >= 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in [0,1)");
  const auto& groups = d.groups();
  std::vector<double> suffix(groups.size() + 1, 0.0);
  for (std::size_t i = groups.size(); i-- > 0;) suffix[i] = suffix[i + 1] + groups[i].mass;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (groups[i].mass <= 0.0) continue;
    if (suffix[i + 1] <= delta + kCumulativeTolerance) return {delta, groups[i].info};
  }
  return {delta, groups.back().info};
}

std::size_t type_class_cap_from_env() {
  const char* raw = std::getenv("RESOLV_TYPECLASS_CAP");
  if (raw == nullptr || *raw == '\0') return kDefaultTypeClassCap;
  char* end = nullptr;
  const unsigned long long value = std::strtoull(raw, &end, 10);
  if (end == raw || *end != '\0' || value == 0) {
    throw std::invalid_argument("RESOLV_TYPECLASS_CAP must be a positive integer");
  }
  return static_cast<std::size_t>(value);
}

}  // namespace resolv

#include "resolv/slice_code.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace resolv {

namespace {

constexpr double kBoundTolerance = 1e-9;

// ceil(x) that ignores floating noise just above an integer.
unsigned ceil_tolerant(double x) {
  const double c = std::ceil(x - kCumulativeTolerance * std::max(1.0, std::abs(x)));
  return c <= 0.0 ? 0u : static_cast<unsigned>(c);
}

bool within(double value, double bound) {
  return value <= bound + kBoundTolerance * std::max(1.0, std::abs(bound));
}

struct ExactMasses {
  std::vector<BigInt> atom;  // canonical order of V
  BigInt total;
  BigInt inside;  // mass of T_n
};

std::vector<bool> membership(const SliceCode& code) {
  std::vector<bool> in_t(code.target_V.size(), false);
  for (const auto& slice : code.slices) {
    for (const auto& entry : slice.atoms) in_t[*code.target_V.index_of(entry.label)] = true;
  }
  return in_t;
}

ExactMasses exact_masses(const FiniteDistribution& V, const std::vector<bool>& in_t) {
  ExactMasses out;
  out.atom.reserve(V.size());
  for (std::size_t i = 0; i < V.size(); ++i) {
    out.atom.push_back(exact_scaled(V[i].p));
    out.total += out.atom.back();
    if (in_t[i]) out.inside += out.atom.back();
  }
  return out;
}

BigInt slice_mass_exact(const Slice& slice) {
  BigInt mass = 0;
  for (const auto& entry : slice.atoms) mass += exact_scaled(entry.p);
  return mass;
}

SliceCode build(const FiniteDistribution& V, unsigned n, double gamma, std::optional<double> c_n,
                Measure variant) {
  if (n == 0) throw std::invalid_argument("blocklength must be positive");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be > 0");
  if (variant == Measure::Divergence && gamma > 0.5) {
    throw std::invalid_argument("divergence variant requires gamma in (0, 1/2]");
  }
  const int base = V.base();
  const double s = static_cast<double>(n) * gamma;

  std::vector<double> info(V.size(), std::numeric_limits<double>::infinity());
  double max_info = 0.0;
  for (std::size_t i = 0; i < V.size(); ++i) {
    if (V[i].p > 0.0) {
      info[i] = std::max(0.0, -log_k(V[i].p, base));
      max_info = std::max(max_info, info[i]);
    }
  }
  const double threshold = c_n.value_or(max_info / static_cast<double>(n));
  if (!(threshold >= 0.0) || !std::isfinite(threshold)) {
    throw std::invalid_argument("c_n must be finite and nonnegative");
  }

  std::vector<bool> in_t(V.size(), false);
  for (std::size_t i = 0; i < V.size(); ++i) {
    in_t[i] = V[i].p > 0.0 &&
              info[i] / static_cast<double>(n) <=
                  threshold + kCumulativeTolerance * std::max(1.0, threshold);
  }
  const ExactMasses exact = exact_masses(V, in_t);
  if (exact.inside == 0) throw std::invalid_argument("c_n leaves T_n empty");

  SliceCode code{.target_V = V};
  code.n = n;
  code.gamma = gamma;
  code.c_n = threshold;
  code.variant = variant;
  code.gamma0 = ratio_to_double(exact.total - exact.inside, exact.total);
  if (code.gamma0 > gamma + kCumulativeTolerance) {
    throw std::invalid_argument("c_n leaves more than gamma of V outside T_n");
  }
  code.beta = std::max(1u, ceil_tolerant(static_cast<double>(n) * threshold + s));

  std::map<unsigned, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < V.size(); ++i) {
    if (!in_t[i]) continue;
    const unsigned m = std::max(1u, ceil_tolerant(info[i] + s));
    if (static_cast<double>(m) * std::log2(static_cast<double>(base)) >
        static_cast<double>(kMaxCellBits)) {
      throw std::length_error("coin length " + std::to_string(m) + " exceeds the cell budget");
    }
    members[m].push_back(i);
  }

  const BigInt& denominator = variant == Measure::Variational ? exact.total : exact.inside;
  if (variant == Measure::Variational && exact.inside != exact.total) {
    for (std::size_t i = 0; i < V.size(); ++i) {
      if (!in_t[i]) {
        code.lambda_atom = V[i].label;
        break;
      }
    }
    code.length_pmf.emplace_back(0u, code.gamma0);
  }

  for (const auto& [m, indices] : members) {
    const BigInt cells = pow_int(static_cast<unsigned>(base), m);
    BigInt slice_mass = 0;
    for (const auto i : indices) slice_mass += exact.atom[i];

    Slice slice;
    slice.m = m;
    slice.mass = ratio_to_double(slice_mass, exact.total);
    BigInt assigned = 0;
    for (const auto i : indices) {
      SliceEntry entry;
      entry.label = V[i].label;
      entry.p = V[i].p;
      entry.floor_cells = exact.atom[i] * cells / slice_mass;
      assigned += entry.floor_cells;
      slice.atoms.push_back(std::move(entry));
    }
    // Leftover cells go one each to atoms in slice order.
    BigInt leftover = cells - assigned;
    BigInt cursor = 0;
    for (auto& entry : slice.atoms) {
      BigInt width = entry.floor_cells;
      if (leftover > 0) {
        entry.granted = true;
        width += 1;
        leftover -= 1;
      }
      entry.cells = {cursor, cursor + width};
      cursor += width;
    }
    code.length_pmf.emplace_back(m, ratio_to_double(slice_mass, denominator));
    code.slices.push_back(std::move(slice));
  }
  return code;
}

double pow_base(int base, double exponent) { return std::pow(static_cast<double>(base), exponent); }

}  // namespace

std::string_view to_string(Measure measure) {
  return measure == Measure::Variational ? "vd" : "div";
}

Measure measure_from_string(std::string_view name) {
  if (name == "vd" || name == "variational") return Measure::Variational;
  if (name == "div" || name == "divergence") return Measure::Divergence;
  throw std::invalid_argument("unknown measure '" + std::string(name) + "' (expected vd|div)");
}

const Slice* SliceCode::slice(unsigned m) const {
  const auto it = std::lower_bound(slices.begin(), slices.end(), m,
                                   [](const Slice& s, unsigned v) { return s.m < v; });
  return it != slices.end() && it->m == m ? &*it : nullptr;
}

double SliceCode::length_probability(unsigned m) const {
  for (const auto& [length, p] : length_pmf) {
    if (length == m) return p;
  }
  return 0.0;
}

SliceCode build_slice_code(const FiniteDistribution& V, unsigned n, double gamma,
                           std::optional<double> c_n) {
  return build(V, n, gamma, c_n, Measure::Variational);
}

SliceCode build_slice_code_div(const FiniteDistribution& V, unsigned n, double gamma,
                               std::optional<double> c_n) {
  return build(V, n, gamma, c_n, Measure::Divergence);
}

FiniteDistribution induced_distribution(const SliceCode& code) {
  const auto& V = code.target_V;
  const auto in_t = membership(code);
  const ExactMasses exact = exact_masses(V, in_t);
  const BigInt& denominator =
      code.variant == Measure::Variational ? exact.total : exact.inside;

  std::vector<Atom> atoms;
  atoms.reserve(V.size());
  for (const auto& atom : V.atoms()) atoms.push_back({atom.label, 0.0});
  for (const auto& slice : code.slices) {
    const BigInt slice_mass = slice_mass_exact(slice);
    const BigInt scale = pow_int(static_cast<unsigned>(code.base()), slice.m) * denominator;
    for (const auto& entry : slice.atoms) {
      atoms[*V.index_of(entry.label)].p = ratio_to_double(entry.cells.size() * slice_mass, scale);
    }
  }
  if (code.lambda_atom) {
    atoms[*V.index_of(*code.lambda_atom)].p =
        ratio_to_double(exact.total - exact.inside, exact.total);
  }
  return FiniteDistribution(std::move(atoms), V.base());
}

const std::string& decode_cell(const SliceCode& code, unsigned m, const BigInt& cell_index) {
  if (m == 0) {
    if (!code.lambda_atom || cell_index != 0) {
      throw std::out_of_range("empty coin string is not mapped by this code");
    }
    return *code.lambda_atom;
  }
  const Slice* slice = code.slice(m);
  if (slice == nullptr) throw std::out_of_range("coin length " + std::to_string(m) + " unused");
  if (cell_index < 0 || cell_index >= slice->atoms.back().cells.hi) {
    throw std::out_of_range("cell index outside K^m");
  }
  const auto it = std::upper_bound(
      slice->atoms.begin(), slice->atoms.end(), cell_index,
      [](const BigInt& cell, const SliceEntry& e) { return cell < e.cells.hi; });
  return it->label;
}

double expected_length(const SliceCode& code) {
  double sum = 0.0;
  for (const auto& [m, p] : code.length_pmf) sum += static_cast<double>(m) * p;
  return sum;
}

std::vector<std::string> check_code_invariants(const SliceCode& code) {
  std::vector<std::string> issues;
  const auto& V = code.target_V;
  const int base = code.base();
  const double s = code.offset();
  const auto in_t = membership(code);

  // Partition of T_n: every positive atom below the threshold sits in exactly one slice.
  std::size_t listed = 0;
  for (const auto& slice : code.slices) listed += slice.atoms.size();
  std::size_t expected_t = 0;
  for (std::size_t i = 0; i < V.size(); ++i) {
    const bool should = V[i].p > 0.0 &&
                        -log_k(V[i].p, base) / code.n <=
                            code.c_n + kCumulativeTolerance * std::max(1.0, code.c_n);
    if (should) ++expected_t;
    if (should != in_t[i]) issues.push_back("atom '" + V[i].label + "' misplaced w.r.t. T_n");
  }
  if (listed != expected_t) issues.push_back("slices do not partition T_n");

  double pmf_total = 0.0;
  for (const auto& [m, p] : code.length_pmf) pmf_total += p;
  if (std::abs(pmf_total - 1.0) > kCumulativeTolerance) {
    issues.push_back("length pmf sums to " + std::to_string(pmf_total));
  }

  for (std::size_t k = 0; k < code.slices.size(); ++k) {
    const auto& slice = code.slices[k];
    const std::string tag = "slice m=" + std::to_string(slice.m) + ": ";
    if (k > 0 && slice.m <= code.slices[k - 1].m) issues.push_back(tag + "not ascending");
    if (slice.m > code.beta) issues.push_back(tag + "exceeds beta_n");
    if (slice.atoms.empty()) {
      issues.push_back(tag + "empty");
      continue;
    }
    const double size_cap = pow_base(base, static_cast<double>(slice.m) - s);
    if (static_cast<double>(slice.atoms.size()) > size_cap * (1.0 + kBoundTolerance)) {
      issues.push_back(tag + "holds more than K^(m-s) atoms");
    }
    const BigInt cells = pow_int(static_cast<unsigned>(base), slice.m);
    BigInt cursor = 0;
    std::size_t grants = 0;
    bool grants_prefix = true;
    for (const auto& entry : slice.atoms) {
      if (entry.cells.lo != cursor || entry.cells.hi < entry.cells.lo) {
        issues.push_back(tag + "intervals are not contiguous");
      }
      const BigInt width = entry.cells.size();
      if (width != entry.floor_cells + (entry.granted ? 1 : 0)) {
        issues.push_back(tag + "grant bookkeeping mismatch for '" + entry.label + "'");
      }
      if (entry.granted) {
        if (!grants_prefix) issues.push_back(tag + "grants are not in slice order");
        ++grants;
      } else {
        grants_prefix = false;
      }
      cursor = entry.cells.hi;
      const auto m = std::max(1u, ceil_tolerant(-log_k(entry.p, base) + s));
      if (m != slice.m) issues.push_back(tag + "atom '" + entry.label + "' has length " +
                                         std::to_string(m));
    }
    if (cursor != cells) issues.push_back(tag + "cells do not tile K^m exactly");
    if (grants >= slice.atoms.size() && grants > 0) {
      issues.push_back(tag + "granted every atom");
    }
  }
  if (code.variant == Measure::Divergence && code.lambda_atom) {
    issues.push_back("divergence variant must not map the empty string");
  }
  return issues;
}

CoinSampler::CoinSampler(const SliceCode& code, std::uint64_t seed)
    : code_(code), engine_(seed) {
  double cum = 0.0;
  for (const auto& entry : code.length_pmf) {
    cum += entry.second;
    cumulative_.push_back(cum);
  }
}

double CoinSampler::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t CoinSampler::uniform_below(std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = 0;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

CoinDraw CoinSampler::draw() {
  const double u = uniform01() * cumulative_.back();
  std::size_t k = static_cast<std::size_t>(
      std::upper_bound(cumulative_.begin(), cumulative_.end(), u) - cumulative_.begin());
  k = std::min(k, cumulative_.size() - 1);
  while (code_.length_pmf[k].second <= 0.0 && k > 0) --k;

  CoinDraw out;
  out.m = code_.length_pmf[k].first;
  const auto base = static_cast<std::uint64_t>(code_.base());
  if (base == 2) {
    unsigned remaining = out.m;
    while (remaining > 0) {
      const unsigned take = std::min(remaining, 64u);
      std::uint64_t word = engine_();
      if (take < 64) word &= (std::uint64_t{1} << take) - 1;
      out.cell <<= take;
      out.cell += word;
      remaining -= take;
    }
  } else {
    for (unsigned i = 0; i < out.m; ++i) {
      out.cell *= base;
      out.cell += uniform_below(base);
    }
  }
  return out;
}

const std::string& CoinSampler::draw_decoded() {
  const CoinDraw d = draw();
  return decode_cell(code_, d.m, d.cell);
}

std::map<std::string, std::uint64_t> sample_decoded(const SliceCode& code, std::uint64_t draws,
                                                    std::uint64_t seed) {
  CoinSampler sampler(code, seed);
  std::map<std::string, std::uint64_t> counts;
  for (std::uint64_t i = 0; i < draws; ++i) ++counts[sampler.draw_decoded()];
  return counts;
}

VerificationReport verify_code(const SliceCode& code, const FiniteDistribution& target_X,
                               double delta, double gamma) {
  const auto& V = code.target_V;
  if (V.base() != target_X.base()) throw std::invalid_argument("log base mismatch");
  for (const auto& atom : V.atoms()) {
    if (!target_X.contains(atom.label)) {
      throw std::invalid_argument("target universe lacks atom '" + atom.label + "'");
    }
  }
  const int base = V.base();
  const double s = static_cast<double>(code.n) * gamma;
  const double k_minus_s = pow_base(base, -s);
  const bool divergence = code.variant == Measure::Divergence;
  const double keep = 1.0 - code.gamma0;

  VerificationReport r{.induced = induced_distribution(code)};
  r.variant = code.variant;
  r.expected_length = expected_length(code);
  r.structure_ok = check_code_invariants(code).empty();

  r.per_atom_dev_ok = true;
  for (const auto& slice : code.slices) {
    double allowed = slice.mass * pow_base(base, -static_cast<double>(slice.m));
    if (divergence) allowed /= keep;
    for (const auto& entry : slice.atoms) {
      const double want = divergence ? entry.p / keep : entry.p;
      const double dev = std::abs(r.induced.p(entry.label) - want);
      if (dev > allowed * (1.0 + kBoundTolerance) + 1e-15) r.per_atom_dev_ok = false;
    }
  }

  r.distance_to_V = variational_distance(r.induced, V);
  r.distance_bound = 0.5 * k_minus_s + gamma;
  r.distance_ok = within(r.distance_to_V, r.distance_bound);

  r.length_bound = (1.0 + k_minus_s) * (entropy(V) + s + 1.0);
  if (divergence) r.length_bound *= 1.0 + 2.0 * gamma;
  r.length_ok = within(r.expected_length, r.length_bound);

  r.distance_to_target = variational_distance(target_X, r.induced);
  r.target_bound = delta + 2.0 * gamma + 0.5 * k_minus_s;
  r.target_premise = within(variational_distance(target_X, V), delta + gamma);
  r.target_ok = !r.target_premise || within(r.distance_to_target, r.target_bound);

  r.divergence_V_to_target = kl_divergence(V, target_X);
  r.divergence_to_target = kl_divergence(r.induced, target_X);
  r.divergence_bound = delta + gamma * (2.0 * delta + 5.0);
  if (divergence) {
    const double ratio = (1.0 + 2.0 * gamma) * (1.0 + k_minus_s);
    for (const auto& atom : r.induced.atoms()) {
      if (atom.p > ratio * V.p(atom.label) * (1.0 + kBoundTolerance) + 1e-15) {
        r.pointwise_ratio_ok = false;
      }
    }
    r.divergence_premise = within(r.divergence_V_to_target, delta + gamma);
    r.divergence_ok =
        !r.divergence_premise || within(r.divergence_to_target, r.divergence_bound);
  }

  r.pass = r.structure_ok && r.per_atom_dev_ok && r.distance_ok && r.length_ok && r.target_ok &&
           r.divergence_ok && r.pointwise_ratio_ok;
  return r;
}

}  // namespace resolv

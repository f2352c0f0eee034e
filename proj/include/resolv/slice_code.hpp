#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "resolv/bigint.hpp"
#include "resolv/distribution.hpp"

namespace resolv {

enum class Measure { Variational, Divergence };

std::string_view to_string(Measure measure);
Measure measure_from_string(std::string_view name);

// Cells of slice m are base-K numerals of coin strings of length m.
inline constexpr std::uint64_t kMaxCellBits = 1u << 16;

// Half-open cell range [lo, hi).
struct CellInterval {
  BigInt lo;
  BigInt hi;

  BigInt size() const { return hi - lo; }
  friend bool operator==(const CellInterval&, const CellInterval&) = default;
};

struct SliceEntry {
  std::string label;
  double p = 0.0;      // probability under the synthesized target V
  BigInt floor_cells;  // allocation before the leftover grant
  bool granted = false;
  CellInterval cells;

  friend bool operator==(const SliceEntry&, const SliceEntry&) = default;
};

struct Slice {
  unsigned m = 0;
  double mass = 0.0;  // Pr{V in S_n(m)}
  std::vector<SliceEntry> atoms;  // canonical order of V

  friend bool operator==(const Slice&, const Slice&) = default;
};

// Information-spectrum slicing encoder: atoms of V are grouped by the coin
// length ceil(log_K 1/V(x) + n*gamma) and each slice is synthesized from a
// uniform coin of that length.
struct SliceCode {
  FiniteDistribution target_V;
  unsigned n = 1;
  double gamma = 0.0;
  double c_n = 0.0;  // spectrum threshold, base-K units per symbol
  Measure variant = Measure::Variational;
  double gamma0 = 0.0;  // Pr{V outside T_n}
  unsigned beta = 0;    // ceil(n (c_n + gamma))
  std::vector<Slice> slices{};  // occupied slices, ascending m >= 1
  std::vector<std::pair<unsigned, double>> length_pmf{};  // ascending m
  std::optional<std::string> lambda_atom{};  // image of the empty coin string

  double offset() const { return static_cast<double>(n) * gamma; }
  int base() const { return target_V.base(); }
  const Slice* slice(unsigned m) const;
  double length_probability(unsigned m) const;

  friend bool operator==(const SliceCode&, const SliceCode&) = default;
};

// Variational variant. c_n defaults to the largest per-symbol information
// value of V, which keeps every positive atom in T_n.
SliceCode build_slice_code(const FiniteDistribution& V, unsigned n, double gamma,
                           std::optional<double> c_n = std::nullopt);

// Divergence variant: gamma in (0, 1/2], no empty-string atom, coin-length pmf
// renormalized by 1 - gamma0.
SliceCode build_slice_code_div(const FiniteDistribution& V, unsigned n, double gamma,
                               std::optional<double> c_n = std::nullopt);

FiniteDistribution induced_distribution(const SliceCode& code);

// The mapping phi_n restricted to coin strings of length m.
const std::string& decode_cell(const SliceCode& code, unsigned m, const BigInt& cell_index);

double expected_length(const SliceCode& code);

// Structural invariants (partition, slice sizes, tiling, grants, pmf mass).
// Returns one message per violation.
std::vector<std::string> check_code_invariants(const SliceCode& code);

struct CoinDraw {
  unsigned m = 0;
  BigInt cell;
};

// Draws variable-length uniform coins for a code: L_n from the length pmf,
// then a uniform cell among K^L_n.
class CoinSampler {
 public:
  CoinSampler(const SliceCode& code, std::uint64_t seed);

  CoinDraw draw();
  const std::string& draw_decoded();

 private:
  double uniform01();
  std::uint64_t uniform_below(std::uint64_t bound);

  const SliceCode& code_;
  std::mt19937_64 engine_;
  std::vector<double> cumulative_;
};

std::map<std::string, std::uint64_t> sample_decoded(const SliceCode& code, std::uint64_t draws,
                                                    std::uint64_t seed);

struct ChannelCheck {
  Measure measure = Measure::Variational;
  double output_value = 0.0;  // d(WX, WX~) or D(WX~ || WX)
  double output_bound = 0.0;
  bool ok = false;

  friend bool operator==(const ChannelCheck&, const ChannelCheck&) = default;
};

struct VerificationReport {
  Measure variant = Measure::Variational;
  FiniteDistribution induced;
  double expected_length = 0.0;
  bool structure_ok = false;
  bool per_atom_dev_ok = false;
  double distance_to_V = 0.0;
  double distance_bound = 0.0;
  bool distance_ok = false;
  double length_bound = 0.0;
  bool length_ok = false;
  // d(X, X~) <= delta + 2 gamma + K^-s / 2, checked when d(V, X) <= delta + gamma.
  double distance_to_target = 0.0;
  double target_bound = 0.0;
  bool target_premise = false;
  bool target_ok = false;
  // Divergence variant: D(X~ || X) <= delta + gamma (2 delta + 5), checked
  // when D(V || X) <= delta + gamma.
  double divergence_V_to_target = 0.0;
  double divergence_to_target = 0.0;
  double divergence_bound = 0.0;
  bool divergence_premise = false;
  bool divergence_ok = true;
  bool pointwise_ratio_ok = true;
  std::optional<ChannelCheck> channel{};
  bool pass = false;

  friend bool operator==(const VerificationReport&, const VerificationReport&) = default;
};

VerificationReport verify_code(const SliceCode& code, const FiniteDistribution& target_X,
                               double delta, double gamma);

}  // namespace resolv

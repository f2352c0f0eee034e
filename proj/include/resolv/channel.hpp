#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include "resolv/distribution.hpp"
#include "resolv/slice_code.hpp"
#include "resolv/smooth_entropy.hpp"

namespace resolv {

inline constexpr double kDefaultGridStep = 0.005;

// Row-stochastic transition matrix W(y|x) over labelled finite alphabets.
class Channel {
 public:
  // rows[i][j] = W(outputs[j] | inputs[i]).
  Channel(std::vector<std::string> inputs, std::vector<std::string> outputs,
          std::vector<std::vector<double>> rows, int base = 2);

  static Channel identity(const std::vector<std::string>& labels, int base = 2);
  // Inputs and outputs "0" and "1".
  static Channel binary_symmetric(double crossover, int base = 2);

  const std::vector<std::string>& inputs() const { return inputs_; }
  const std::vector<std::string>& outputs() const { return outputs_; }
  int base() const { return base_; }
  double w(std::size_t input, std::size_t output) const { return rows_[input][output]; }
  std::size_t input_index(const std::string& label) const;
  std::size_t output_index(const std::string& label) const;
  FiniteDistribution row(const std::string& input) const;

  friend bool operator==(const Channel& a, const Channel& b) {
    return a.inputs_ == b.inputs_ && a.outputs_ == b.outputs_ && a.rows_ == b.rows_ &&
           a.base_ == b.base_;
  }

 private:
  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
  std::vector<std::vector<double>> rows_;
  int base_;
  std::unordered_map<std::string, std::size_t> input_index_;
  std::unordered_map<std::string, std::size_t> output_index_;
};

// Output distribution over every output label (zero atoms kept).
FiniteDistribution push_forward(const Channel& W, const FiniteDistribution& d);

inline constexpr std::size_t kMaxChannelOracleInputs = 3;

// Minimum H(V) over grid inputs V with d(WV, WX) <= delta or D(WV || WX) <= delta.
SmoothEntropyResult channel_smooth_entropy_oracle(const Channel& W, const FiniteDistribution& X,
                                                  double delta, Measure measure,
                                                  double grid_step = kDefaultGridStep);

// Oracle witness at radius delta + gamma, slice code on it at blocklength n,
// source-level verification plus the output-side check.
VerificationReport resolve_channel(const Channel& W, const FiniteDistribution& X, double delta,
                                   double gamma, Measure measure, unsigned n = 1,
                                   double grid_step = kDefaultGridStep);

}  // namespace resolv

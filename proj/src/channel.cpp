#include "resolv/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "resolv/simplex_grid.hpp"

namespace resolv {

namespace {

std::unordered_map<std::string, std::size_t> index_labels(const std::vector<std::string>& labels,
                                                          const char* what) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!index.emplace(labels[i], i).second) {
      throw std::invalid_argument(std::string("duplicate ") + what + " label '" + labels[i] + "'");
    }
  }
  return index;
}

bool within(double value, double bound) {
  return value <= bound + 1e-9 * std::max(1.0, std::abs(bound));
}

// Grid coordinates: inputs in the canonical order of X followed by inputs X
// does not mention; outputs in the canonical order of WX.
struct ChannelProblem {
  std::vector<std::string> input_labels;
  std::vector<std::size_t> input_rows;
  std::vector<std::size_t> output_cols;
  std::vector<double> seed;
  std::vector<double> target;
};

ChannelProblem channel_problem(const Channel& W, const FiniteDistribution& X) {
  if (W.inputs().size() > kMaxChannelOracleInputs) {
    throw std::invalid_argument("channel oracle supports at most 3 inputs");
  }
  ChannelProblem problem;
  for (const auto& atom : X.atoms()) {
    problem.input_labels.push_back(atom.label);
    problem.input_rows.push_back(W.input_index(atom.label));
    problem.seed.push_back(atom.p);
  }
  for (std::size_t i = 0; i < W.inputs().size(); ++i) {
    if (X.contains(W.inputs()[i])) continue;
    problem.input_labels.push_back(W.inputs()[i]);
    problem.input_rows.push_back(i);
    problem.seed.push_back(0.0);
  }
  const FiniteDistribution output = push_forward(W, X);
  for (const auto& atom : output.atoms()) {
    problem.output_cols.push_back(W.output_index(atom.label));
    problem.target.push_back(atom.p);
  }
  return problem;
}

std::vector<double> apply(const Channel& W, const ChannelProblem& problem,
                          std::span<const double> v) {
  std::vector<double> out(problem.output_cols.size(), 0.0);
  for (std::size_t j = 0; j < out.size(); ++j) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      out[j] += v[i] * W.w(problem.input_rows[i], problem.output_cols[j]);
    }
  }
  return out;
}

}  // namespace

Channel::Channel(std::vector<std::string> inputs, std::vector<std::string> outputs,
                 std::vector<std::vector<double>> rows, int base)
    : inputs_(std::move(inputs)),
      outputs_(std::move(outputs)),
      rows_(std::move(rows)),
      base_(base),
      input_index_(index_labels(inputs_, "input")),
      output_index_(index_labels(outputs_, "output")) {
  if (base_ < 2) throw std::invalid_argument("log base must be >= 2");
  if (inputs_.empty() || outputs_.empty()) throw std::invalid_argument("empty channel alphabet");
  if (rows_.size() != inputs_.size()) throw std::invalid_argument("one row per input required");
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (rows_[i].size() != outputs_.size()) {
      throw std::invalid_argument("row '" + inputs_[i] + "' has wrong length");
    }
    double sum = 0.0;
    for (const double w : rows_[i]) {
      if (!std::isfinite(w) || w < 0.0 || w > 1.0) {
        throw std::invalid_argument("row '" + inputs_[i] + "' has an entry outside [0,1]");
      }
      sum += w;
    }
    if (std::abs(sum - 1.0) > kMassTolerance) {
      throw std::invalid_argument("row '" + inputs_[i] + "' does not sum to 1");
    }
  }
}

Channel Channel::identity(const std::vector<std::string>& labels, int base) {
  std::vector<std::vector<double>> rows(labels.size(), std::vector<double>(labels.size(), 0.0));
  for (std::size_t i = 0; i < labels.size(); ++i) rows[i][i] = 1.0;
  return Channel(labels, labels, std::move(rows), base);
}

Channel Channel::binary_symmetric(double crossover, int base) {
  if (!(crossover >= 0.0 && crossover <= 1.0)) {
    throw std::invalid_argument("crossover probability must lie in [0,1]");
  }
  return Channel({"0", "1"}, {"0", "1"},
                 {{1.0 - crossover, crossover}, {crossover, 1.0 - crossover}}, base);
}

std::size_t Channel::input_index(const std::string& label) const {
  const auto it = input_index_.find(label);
  if (it == input_index_.end()) throw std::invalid_argument("unknown channel input '" + label + "'");
  return it->second;
}

std::size_t Channel::output_index(const std::string& label) const {
  const auto it = output_index_.find(label);
  if (it == output_index_.end()) {
    throw std::invalid_argument("unknown channel output '" + label + "'");
  }
  return it->second;
}

FiniteDistribution Channel::row(const std::string& input) const {
  const auto& r = rows_[input_index(input)];
  std::vector<Atom> atoms;
  for (std::size_t j = 0; j < outputs_.size(); ++j) atoms.push_back({outputs_[j], r[j]});
  return FiniteDistribution(std::move(atoms), base_);
}

FiniteDistribution push_forward(const Channel& W, const FiniteDistribution& d) {
  if (W.base() != d.base()) throw std::invalid_argument("log base mismatch");
  std::vector<double> out(W.outputs().size(), 0.0);
  for (const auto& atom : d.atoms()) {
    const std::size_t i = W.input_index(atom.label);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += atom.p * W.w(i, j);
  }
  std::vector<Atom> atoms;
  atoms.reserve(out.size());
  for (std::size_t j = 0; j < out.size(); ++j) atoms.push_back({W.outputs()[j], out[j]});
  return FiniteDistribution(std::move(atoms), d.base());
}

SmoothEntropyResult channel_smooth_entropy_oracle(const Channel& W, const FiniteDistribution& X,
                                                  double delta, Measure measure,
                                                  double grid_step) {
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    throw std::invalid_argument("delta must be finite and nonnegative");
  }
  if (measure == Measure::Variational && delta >= 1.0) {
    throw std::invalid_argument("delta must lie in [0,1) for the variational ball");
  }
  if (W.base() != X.base()) throw std::invalid_argument("log base mismatch");
  const auto problem = channel_problem(W, X);
  const int base = W.base();
  const std::vector<std::vector<double>> seeds{problem.seed};

  PointPredicate feasible;
  if (measure == Measure::Variational) {
    feasible = [&](std::span<const double> v) {
      return coordinate_distance(apply(W, problem, v), problem.target) <=
             delta + kCumulativeTolerance;
    };
  } else {
    feasible = [&](std::span<const double> v) {
      return coordinate_divergence(apply(W, problem, v), problem.target, base) <=
             delta + kCumulativeTolerance;
    };
  }
  const auto best = simplex_grid_minimize(
      problem.input_labels.size(), grid_step, seeds, feasible,
      [base](std::span<const double> v) { return coordinate_entropy(v, base); });

  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < problem.input_labels.size(); ++i) {
    atoms.push_back({problem.input_labels[i], best->point[i]});
  }
  SmoothEntropyResult result;
  result.delta = delta;
  result.method = SmoothMethod::GridOracle;
  result.value = best->value;
  result.witness = FiniteDistribution(std::move(atoms), base);
  const FiniteDistribution wx = push_forward(W, X);
  const FiniteDistribution wv = push_forward(W, *result.witness);
  result.achieved_radius = measure == Measure::Variational ? variational_distance(wv, wx)
                                                           : kl_divergence(wv, wx);
  return result;
}

VerificationReport resolve_channel(const Channel& W, const FiniteDistribution& X, double delta,
                                   double gamma, Measure measure, unsigned n, double grid_step) {
  const auto oracle = channel_smooth_entropy_oracle(W, X, delta + gamma, measure, grid_step);
  const FiniteDistribution& V = *oracle.witness;
  const SliceCode code = measure == Measure::Variational ? build_slice_code(V, n, gamma)
                                                         : build_slice_code_div(V, n, gamma);
  VerificationReport report = verify_code(code, X, delta, gamma);

  const FiniteDistribution wx = push_forward(W, X);
  const FiniteDistribution wxt = push_forward(W, report.induced);
  const double s = static_cast<double>(n) * gamma;
  ChannelCheck check;
  check.measure = measure;
  if (measure == Measure::Variational) {
    check.output_value = variational_distance(wx, wxt);
    check.output_bound = delta + 2.0 * gamma + 0.5 * std::pow(static_cast<double>(W.base()), -s);
  } else {
    check.output_value = kl_divergence(wxt, wx);
    check.output_bound = delta + gamma * (2.0 * delta + 5.0) + grid_slack(grid_step);
  }
  check.ok = within(check.output_value, check.output_bound);
  report.channel = check;
  report.pass = report.pass && check.ok;
  return report;
}

}  // namespace resolv

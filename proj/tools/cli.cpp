#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "resolv/channel.hpp"
#include "resolv/io.hpp"
#include "resolv/simplex_grid.hpp"
#include "resolv/slice_code.hpp"
#include "resolv/smooth_entropy.hpp"
#include "resolv/suites.hpp"

namespace resolv::cli {

namespace {

struct Config {
  std::string dist_path;
  std::string channel_path;
  std::optional<double> delta;
  std::optional<double> gamma;
  std::string measure = "vd";
  unsigned n = 1;
  std::vector<unsigned> n_list;
  std::optional<double> rate;
  std::optional<double> c_n;
  double grid_step = kDefaultGridStep;
  std::optional<std::uint64_t> seed;
  std::uint64_t samples = 0;
  std::uint64_t cases = 0;
  std::vector<std::string> quantities;
  std::vector<std::string> suites;
  std::string out_path;
  std::string format = "json";
  bool witness = false;
  bool direct = false;
};

void require(bool condition, const std::string& message) {
  if (!condition) throw InputError(message);
}

double require_delta(const Config& c) {
  require(c.delta.has_value(), "--delta is required");
  require(std::isfinite(*c.delta) && *c.delta >= 0.0, "--delta must be finite and >= 0");
  return *c.delta;
}

double require_gamma(const Config& c) {
  require(c.gamma.has_value(), "--gamma is required");
  require(std::isfinite(*c.gamma) && *c.gamma > 0.0, "--gamma must be > 0");
  return *c.gamma;
}

void require_grid_step(const Config& c) {
  require(c.grid_step > 0.0 && c.grid_step <= 0.5, "--grid-step must lie in (0, 0.5]");
}

FiniteDistribution require_finite(const DistributionInput& input, const char* command) {
  if (const auto* d = std::get_if<FiniteDistribution>(&input)) return *d;
  throw InputError(std::string(command) + " needs an explicit distribution, not an i.i.d. power");
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw InputError("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : fallback_; }

 private:
  std::ofstream file_;
  std::ostream& fallback_;
};

void emit_json(const Config& c, std::ostream& out, const Json& j) {
  Output o(c.out_path, out);
  o.stream() << j.dump(2) << '\n';
}

// entropy and quantile records share the smooth-record layout.
Json plain_record(std::string_view quantity, double delta, double value, std::string_view method) {
  return {{"quantity", std::string(quantity)},
          {"delta", number_json(delta)},
          {"value", number_json(value)},
          {"method", std::string(method)},
          {"achieved_radius", number_json(0.0)}};
}

Json smooth_record(const Config& c, const DistributionInput& input, const std::string& q,
                   double delta) {
  const auto* finite = std::get_if<FiniteDistribution>(&input);
  const auto* grouped = std::get_if<GroupedDistribution>(&input);
  const bool unit_delta = delta < 1.0;
  const auto needs_unit = [&] { require(unit_delta, "--delta must lie in [0,1) for " + q); };
  const auto needs_finite = [&] {
    require(finite != nullptr, "quantity " + q + " needs an explicit distribution");
  };

  if (q == "entropy") {
    return plain_record(q, delta, finite ? entropy(*finite) : entropy(*grouped), "shannon");
  }
  if (q == "quantile") {
    needs_unit();
    const auto sq = finite ? info_quantile(*finite, delta) : info_quantile(*grouped, delta);
    return plain_record(q, delta, sq.value, "spectral-quantile");
  }
  if (q == "g") {
    needs_unit();
    return smooth_result_to_json(q, finite ? g_delta(*finite, delta) : g_delta(*grouped, delta),
                                 c.witness);
  }
  if (q == "h") {
    needs_unit();
    return smooth_result_to_json(q, finite ? h_delta(*finite, delta) : h_delta(*grouped, delta),
                                 c.witness);
  }
  needs_finite();
  if (q == "g-oracle") {
    needs_unit();
    require(finite->support_size() <= kSubsetOracleMaxSupport,
            "g-oracle supports at most 20 positive atoms");
    return smooth_result_to_json(q, g_delta_subset_oracle(*finite, delta), c.witness);
  }
  if (q == "hdiv-upper") return smooth_result_to_json(q, h_div_upper(*finite, delta), c.witness);
  require(finite->size() <= kMaxGridDimension, q + " supports at most 3 atoms");
  if (q == "h-grid") {
    needs_unit();
    return smooth_result_to_json(q, h_delta_grid_oracle(*finite, delta, c.grid_step), c.witness);
  }
  if (q == "hdiv-grid") {
    return smooth_result_to_json(q, h_div_grid_oracle(*finite, delta, c.grid_step), c.witness);
  }
  throw InputError("unknown quantity '" + q + "'");
}

int cmd_smooth(const Config& c, std::ostream& out) {
  const double delta = require_delta(c);
  require_grid_step(c);
  require(c.format == "json" || c.format == "csv", "--format must be json or csv");
  const auto input = read_distribution_file(c.dist_path, type_class_cap_from_env());
  const std::vector<std::string> quantities =
      c.quantities.empty() ? std::vector<std::string>{"h"} : c.quantities;

  Json records = Json::array();
  for (const auto& q : quantities) records.push_back(smooth_record(c, input, q, delta));

  if (c.format == "json") {
    emit_json(c, out, records);
    return kExitOk;
  }
  Output o(c.out_path, out);
  o.stream() << "quantity,delta,value,method,achieved_radius\n";
  for (const auto& r : records) {
    o.stream() << r["quantity"].get<std::string>() << ',' << r["delta"].dump() << ','
               << r["value"].dump() << ',' << r["method"].get<std::string>() << ','
               << r["achieved_radius"].dump() << '\n';
  }
  return kExitOk;
}

Json sampling_json(const SliceCode& code, std::uint64_t draws, std::uint64_t seed, bool& ok) {
  const auto induced = induced_distribution(code);
  const auto counts = sample_decoded(code, draws, seed);
  Json atoms = Json::array();
  ok = true;
  for (const auto& atom : induced.atoms()) {
    const auto it = counts.find(atom.label);
    const std::uint64_t observed = it == counts.end() ? 0 : it->second;
    const double mean = static_cast<double>(draws) * atom.p;
    const double sigma = std::sqrt(static_cast<double>(draws) * atom.p * (1.0 - atom.p));
    const bool within = std::abs(static_cast<double>(observed) - mean) <= 3.0 * sigma + 1e-9;
    ok = ok && within;
    atoms.push_back({{"label", atom.label},
                     {"count", observed},
                     {"expected", number_json(mean)},
                     {"sigma", number_json(sigma)},
                     {"within_3sigma", within}});
  }
  return {{"draws", draws}, {"seed", seed}, {"atoms", std::move(atoms)}, {"pass", ok}};
}

int cmd_code(const Config& c, std::ostream& out) {
  const double gamma = require_gamma(c);
  const double delta = c.delta.value_or(0.0);
  require(std::isfinite(delta) && delta >= 0.0, "--delta must be finite and >= 0");
  const Measure measure = measure_from_string(c.measure);
  require(measure == Measure::Variational || gamma <= 0.5, "--gamma must be <= 0.5 for div");
  require(c.n >= 1, "--n must be >= 1");
  require(c.format == "json", "code emits json only");
  require(c.samples == 0 || c.seed.has_value(), "--samples requires --seed");
  if (!c.direct && measure == Measure::Variational) {
    require(delta + gamma < 1.0, "--delta + --gamma must be < 1 for the variational ball");
  }
  const auto X = require_finite(read_distribution_file(c.dist_path), "code");

  std::string source = "direct";
  FiniteDistribution V = X;
  if (!c.direct) {
    const auto smoothed = measure == Measure::Variational ? h_delta(X, delta + gamma)
                                                          : h_div_upper(X, delta + gamma);
    V = *smoothed.witness;
    source = std::string(to_string(smoothed.method));
  }
  const SliceCode code = measure == Measure::Variational ? build_slice_code(V, c.n, gamma, c.c_n)
                                                         : build_slice_code_div(V, c.n, gamma, c.c_n);
  const auto report = verify_code(code, X, delta, gamma);

  Json j = {{"witness_method", source},
            {"code", slice_code_to_json(code)},
            {"report", report_to_json(report)}};
  bool sampling_ok = true;
  if (c.samples > 0) j["sampling"] = sampling_json(code, c.samples, *c.seed, sampling_ok);
  emit_json(c, out, j);
  return report.pass && sampling_ok ? kExitOk : kExitVerificationFailure;
}

int cmd_channel(const Config& c, std::ostream& out) {
  const double delta = require_delta(c);
  const double gamma = require_gamma(c);
  const Measure measure = measure_from_string(c.measure);
  require(measure == Measure::Divergence || delta + gamma < 1.0,
          "--delta + --gamma must be < 1 for the variational ball");
  require(measure == Measure::Variational || gamma <= 0.5, "--gamma must be <= 0.5 for div");
  require(c.n >= 1, "--n must be >= 1");
  require_grid_step(c);
  require(c.format == "json", "channel emits json only");
  const Channel W = read_channel_file(c.channel_path);
  const auto X = require_finite(read_distribution_file(c.dist_path), "channel");
  require(W.inputs().size() <= kMaxChannelOracleInputs, "channel oracle supports at most 3 inputs");

  const auto oracle = channel_smooth_entropy_oracle(W, X, delta + gamma, measure, c.grid_step);
  const auto report = resolve_channel(W, X, delta, gamma, measure, c.n, c.grid_step);
  emit_json(c, out,
            {{"oracle", smooth_result_to_json("channel-oracle", oracle, true)},
             {"report", report_to_json(report)}});
  return report.pass ? kExitOk : kExitVerificationFailure;
}

int cmd_second_order(const Config& c, std::ostream& out) {
  const double delta = require_delta(c);
  require(delta < 1.0, "--delta must lie in [0,1)");
  require(c.format == "csv" || c.format == "json", "--format must be csv or json");
  for (std::size_t i = 1; i < c.n_list.size(); ++i) {
    require(c.n_list[i] > c.n_list[i - 1], "--n-list must be strictly increasing");
  }
  for (const unsigned n : c.n_list) require(n >= 1, "--n-list entries must be >= 1");
  const auto base = require_finite(read_distribution_file(c.dist_path), "second-order");
  const double rate = c.rate.value_or((1.0 - delta) * entropy(base));
  require(std::isfinite(rate), "--rate must be finite");

  SecondOrderSeries series;
  try {
    series = second_order_series(base, delta, rate, c.n_list, type_class_cap_from_env(), true);
  } catch (const std::length_error& e) {
    throw InputError(e.what());
  }

  Output o(c.out_path, out);
  if (c.format == "csv") {
    write_second_order_csv(o.stream(), series);
    return kExitOk;
  }
  Json points = Json::array();
  for (const auto& p : series.points) {
    points.push_back({{"n", p.n},
                      {"smooth_entropy", number_json(p.smooth_entropy)},
                      {"term", number_json(p.term)}});
  }
  o.stream() << Json{{"delta", number_json(series.delta)},
                     {"rate", number_json(series.rate)},
                     {"varentropy", number_json(series.varentropy)},
                     {"q_inverse", number_json(series.q_inverse)},
                     {"gaussian_limit", number_json(series.gaussian_limit)},
                     {"points", std::move(points)}}
                    .dump(2)
             << '\n';
  return kExitOk;
}

int cmd_verify_suite(const Config& c, std::ostream& out) {
  require(c.format == "json", "verify-suite emits json only");
  std::vector<std::string> names = c.suites;
  if (names.empty()) {
    for (const auto& info : property_suites()) names.push_back(info.name);
  }
  std::vector<std::uint64_t> cases;
  for (const auto& name : names) {
    const auto& all = property_suites();
    const auto it = std::find_if(all.begin(), all.end(), [&](const auto& s) { return s.name == name; });
    require(it != all.end(), "unknown suite '" + name + "'");
    cases.push_back(c.cases > 0 ? c.cases : it->default_cases);
  }
  const std::uint64_t seed = c.seed.value_or(1);

  Json suites = Json::array();
  std::uint64_t failures = 0;
  for (std::size_t i = 0; i < names.size(); ++i) {
    const auto r = run_suite(names[i], cases[i], seed);
    failures += r.failures;
    Json entry = {{"name", r.name}, {"cases", r.cases}, {"failures", r.failures}};
    if (!r.first_failure.empty()) entry["first_failure"] = r.first_failure;
    suites.push_back(std::move(entry));
  }
  emit_json(c, out, {{"seed", seed}, {"suites", std::move(suites)}});
  return failures == 0 ? kExitOk : kExitVerificationFailure;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Smooth entropies and variable-length resolvability codes"};
  app.require_subcommand(1);
  Config c;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", c.out_path, "Write output to this file");
    sub->add_option("--format", c.format, "json or csv");
  };

  auto* smooth = app.add_subcommand("smooth", "Smooth entropy quantities of a distribution");
  smooth->add_option("--dist", c.dist_path, "Distribution JSON")->required();
  smooth->add_option("--delta", c.delta, "Ball radius");
  smooth->add_option("--quantity", c.quantities,
                     "entropy|quantile|g|g-oracle|h|h-grid|hdiv-upper|hdiv-grid")
      ->delimiter(',');
  smooth->add_option("--grid-step", c.grid_step, "Grid oracle step");
  smooth->add_flag("--witness", c.witness, "Include witnesses");
  add_common(smooth);

  auto* code = app.add_subcommand("code", "Build and verify a slice code");
  code->add_option("--dist", c.dist_path, "Target distribution X")->required();
  code->add_option("--delta", c.delta, "Smoothing radius (default 0)");
  code->add_option("--gamma", c.gamma, "Offset parameter gamma");
  code->add_option("--n", c.n, "Blocklength for the offset s = n gamma");
  code->add_option("--measure", c.measure, "vd or div");
  code->add_option("--c-n", c.c_n, "Spectrum threshold per symbol");
  code->add_flag("--direct", c.direct, "Synthesize X itself instead of a smoothed witness");
  code->add_option("--samples", c.samples, "Number of coin draws to decode");
  code->add_option("--seed", c.seed, "Sampling seed");
  add_common(code);

  auto* channel = app.add_subcommand("channel", "Channel resolvability run");
  channel->add_option("--channel", c.channel_path, "Channel JSON")->required();
  channel->add_option("--dist", c.dist_path, "Input distribution X")->required();
  channel->add_option("--delta", c.delta, "Ball radius");
  channel->add_option("--gamma", c.gamma, "Offset parameter gamma");
  channel->add_option("--measure", c.measure, "vd or div");
  channel->add_option("--n", c.n, "Blocklength for the offset s = n gamma");
  channel->add_option("--grid-step", c.grid_step, "Grid oracle step");
  add_common(channel);

  auto* second = app.add_subcommand("second-order", "Second-order smooth entropy terms");
  second->add_option("--dist", c.dist_path, "Single-letter distribution")->required();
  second->add_option("--delta", c.delta, "Ball radius");
  second->add_option("--rate", c.rate, "First-order rate (default (1 - delta) H)");
  second->add_option("--n-list", c.n_list, "Blocklengths, comma separated")->delimiter(',');
  add_common(second);

  auto* suite = app.add_subcommand("verify-suite", "Run property suites");
  suite->add_option("--suite", c.suites, "Suite names (default all)")->delimiter(',');
  suite->add_option("--cases", c.cases, "Cases per suite (default per suite)");
  suite->add_option("--seed", c.seed, "Seed (default 1)");
  add_common(suite);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  if (second->parsed() && c.format == "json" && second->count("--format") == 0) c.format = "csv";

  try {
    if (smooth->parsed()) return cmd_smooth(c, out);
    if (code->parsed()) return cmd_code(c, out);
    if (channel->parsed()) return cmd_channel(c, out);
    if (second->parsed()) return cmd_second_order(c, out);
    return cmd_verify_suite(c, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::length_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
}

}  // namespace resolv::cli

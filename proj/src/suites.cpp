#include "resolv/suites.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "resolv/channel.hpp"
#include "resolv/random.hpp"
#include "resolv/slice_code.hpp"
#include "resolv/smooth_entropy.hpp"

namespace resolv {

namespace {

constexpr double kTol = 1e-9;
constexpr double kGridStep = 0.005;

// Returns an empty string on success, otherwise a description of the failure.
using CaseFn = std::function<std::string(Rng&)>;

std::string fail(const std::string& what, double lhs, double rhs) {
  std::ostringstream os;
  os.precision(12);
  os << what << ": " << lhs << " vs " << rhs;
  return os.str();
}

double log_e_over_e(int base) { return log_k(std::numbers::e, base) / std::numbers::e; }

int random_base(Rng& rng) { return rng.uniform01() < 0.75 ? 2 : 3; }

FiniteDistribution small(Rng& rng, std::size_t lo, std::size_t hi, int base, double zeros = 0.0) {
  return random_distribution(rng, {.min_atoms = lo, .max_atoms = hi, .base = base,
                                   .zero_atom_chance = zeros});
}

double pick(Rng& rng, std::initializer_list<double> values) {
  return *(values.begin() + rng.below(values.size()));
}

bool majorizes(const FiniteDistribution& v, std::vector<double> point) {
  std::sort(point.begin(), point.end(), std::greater<>());
  double a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < point.size(); ++i) {
    a += i < v.size() ? v[i].p : 0.0;
    b += point[i];
    if (a < b - 1e-12) return false;
  }
  return true;
}

std::string pinsker(Rng& rng) {
  const int base = random_base(rng);
  const auto p = small(rng, 2, 8, base);
  const auto q = random_distribution_on(rng, p.labels(), base);
  const double d = variational_distance(p, q);
  const double bound = 2.0 * d * d / std::log(static_cast<double>(base));
  const double div = kl_divergence(q, p);
  return bound <= div + 1e-12 ? "" : fail("2d^2/lnK > D", bound, div);
}

std::string triangle(Rng& rng) {
  const auto p = small(rng, 2, 8, 2, 0.2);
  const auto q = random_distribution_on(rng, p.labels());
  const auto r = random_distribution_on(rng, p.labels());
  const double pq = variational_distance(p, q), qp = variational_distance(q, p);
  if (std::abs(pq - qp) > 1e-15) return fail("asymmetric distance", pq, qp);
  const double pr = variational_distance(p, r);
  const double via = pq + variational_distance(q, r);
  return pr <= via + 1e-12 ? "" : fail("triangle", pr, via);
}

std::string renyi_monotone(Rng& rng) {
  const auto d = small(rng, 2, 10, random_base(rng), 0.1);
  std::vector<double> alphas;
  for (int i = 0; i < 6; ++i) {
    double a = rng.uniform(0.05, 5.0);
    if (std::abs(a - 1.0) < 1e-6) a = 1.5;
    alphas.push_back(a);
  }
  std::sort(alphas.begin(), alphas.end());
  for (std::size_t i = 1; i < alphas.size(); ++i) {
    const double lo = renyi_entropy(d, alphas[i - 1]), hi = renyi_entropy(d, alphas[i]);
    if (hi > lo + kTol) return fail("renyi increased in alpha", hi, lo);
  }
  return "";
}

std::string iid_entropy(Rng& rng) {
  const auto b = small(rng, 2, 3, random_base(rng));
  const auto n = static_cast<unsigned>(rng.between(1, 100));
  const double h = entropy(iid_power(b, n));
  const double want = n * entropy(b);
  return std::abs(h - want) <= 1e-6 ? "" : fail("H(X^n) != nH(X)", h, want);
}

std::string quantile_monotone(Rng& rng) {
  const auto d = small(rng, 1, 12, random_base(rng), 0.1);
  double d1 = rng.uniform01() * 0.999, d2 = rng.uniform01() * 0.999;
  if (d1 > d2) std::swap(d1, d2);
  const double q1 = info_quantile(d, d1).value, q2 = info_quantile(d, d2).value;
  if (q2 > q1 + kTol) return fail("quantile increased in delta", q2, q1);
  const auto g = iid_power(small(rng, 2, 3, 2), static_cast<unsigned>(rng.between(1, 60)));
  const double g1 = info_quantile(g, d1).value, g2 = info_quantile(g, d2).value;
  return g2 <= g1 + kTol ? "" : fail("grouped quantile increased in delta", g2, g1);
}

std::string smooth_monotone(Rng& rng) {
  const int base = random_base(rng);
  const auto d = small(rng, 1, 12, base, 0.1);
  double d1 = rng.uniform01() * 0.95, d2 = rng.uniform01() * 0.95;
  if (d1 > d2) std::swap(d1, d2);
  if (g_delta(d, d2).value > g_delta(d, d1).value + kTol) return "G increased in delta";
  if (h_delta(d, d2).value > h_delta(d, d1).value + kTol) return "H increased in delta";
  if (h_div_upper(d, d2).value > h_div_upper(d, d1).value + kTol) {
    return "divergence upper bound increased in delta";
  }
  const auto t = small(rng, 2, 3, base);
  if (h_delta_grid_oracle(t, d2, kGridStep).value >
      h_delta_grid_oracle(t, d1, kGridStep).value + kTol) {
    return "grid oracle increased in delta";
  }
  if (h_div_grid_oracle(t, d2, kGridStep).value >
      h_div_grid_oracle(t, d1, kGridStep).value + kTol) {
    return "divergence grid oracle increased in delta";
  }
  return "";
}

std::string gh_gaps(Rng& rng) {
  const int base = random_base(rng);
  const auto d = small(rng, 1, 20, base, 0.05);
  const double delta = pick(rng, {0.0, 0.1, 0.3, 0.6});
  const double g = g_delta(d, delta).value;
  const double h = h_delta(d, delta).value;
  const double c = log_e_over_e(base);
  if (h > g + c + kTol) return fail("H > G + log e / e", h, g + c);
  if (g > h + 2.0 * c + kTol) return fail("G > H + 2 log e / e", g, h + 2.0 * c);
  if (d.support_size() <= 15) {
    const double exact = g_delta_subset_oracle(d, delta).value;
    if (exact > g + kTol) return fail("subset oracle above greedy", exact, g);
    if (h > exact + c + kTol) return fail("H > G* + log e / e", h, exact + c);
    if (exact > h + 2.0 * c + kTol) return fail("G* > H + 2 log e / e", exact, h + 2.0 * c);
  }
  return "";
}

std::string ho_yeung(Rng& rng) {
  const int base = random_base(rng);
  const auto d = small(rng, 1, 3, base, 0.1);
  const double delta = rng.uniform01() * 0.95;
  const auto hy = h_delta(d, delta);
  const double grid = h_delta_grid_oracle(d, delta, kGridStep).value;
  if (hy.value > grid + kTol) return fail("H above grid oracle", hy.value, grid);
  if (grid - hy.value > grid_slack(kGridStep)) return fail("grid oracle far above H", grid, hy.value);
  // Majorization of every point of a coarse grid inside the ball.
  const auto target = d.probabilities();
  constexpr int cells = 40;
  std::vector<std::vector<double>> points;
  if (d.size() == 1) points.push_back({1.0});
  for (int i = 0; i <= cells && d.size() > 1; ++i) {
    const double a = i / double(cells);
    if (d.size() == 2) {
      points.push_back({a, 1.0 - a});
      continue;
    }
    for (int j = 0; i + j <= cells; ++j) {
      points.push_back({a, j / double(cells), (cells - i - j) / double(cells)});
    }
  }
  for (const auto& v : points) {
    double dist = 0.0;
    for (std::size_t a = 0; a < v.size(); ++a) dist += std::abs(v[a] - target[a]);
    if (0.5 * dist <= delta && !majorizes(*hy.witness, v)) return "witness fails to majorize";
  }
  return "";
}

std::string div_inclusion(Rng& rng) {
  const int base = random_base(rng);
  const auto d = small(rng, 2, 3, base);
  const double delta = rng.uniform01() * 0.95;
  const double h = h_delta(d, delta).value;
  const double oracle = h_div_grid_oracle(d, pinsker_radius(delta, base), kGridStep).value;
  return h <= oracle + grid_slack(kGridStep) ? "" : fail("H above divergence oracle", h, oracle);
}

std::string conditional_witness(Rng& rng) {
  const int base = random_base(rng);
  const auto d = small(rng, 1, 3, base, 0.1);
  const double delta = rng.uniform01() * 2.0;
  const auto upper = h_div_upper(d, delta);
  const double div = kl_divergence(*upper.witness, d);
  if (std::abs(div - upper.achieved_radius) > kTol) {
    return fail("D(witness||d) != log 1/alpha0", div, upper.achieved_radius);
  }
  if (upper.achieved_radius > delta + kTol) return fail("radius above delta", div, delta);
  const double oracle = h_div_grid_oracle(d, delta, kGridStep).value;
  return oracle <= upper.value + grid_slack(kGridStep)
             ? ""
             : fail("divergence oracle above construction", oracle, upper.value);
}

std::string code_vd(Rng& rng) {
  const auto X = small(rng, 1, 12, random_base(rng), 0.05);
  const double delta = pick(rng, {0.0, 0.1, 0.3});
  const double gamma = pick(rng, {0.2, 0.5});
  const auto n = static_cast<unsigned>(rng.between(1, 4));
  const auto V = *h_delta(X, delta + gamma).witness;
  const auto report = verify_code(build_slice_code(V, n, gamma), X, delta, gamma);
  if (!report.target_premise) return "witness outside the delta + gamma ball";
  return report.pass ? "" : fail("variational code bound violated", report.distance_to_target,
                                 report.target_bound);
}

std::string code_div(Rng& rng) {
  const auto X = small(rng, 1, 12, random_base(rng), 0.05);
  const double delta = pick(rng, {0.0, 0.1, 0.3});
  const double gamma = rng.uniform(0.05, 0.5);
  const auto n = static_cast<unsigned>(std::ceil(8.0 / gamma));
  const auto V = *h_div_upper(X, delta + gamma).witness;
  // Truncate T_n at a random information level that keeps gamma0 <= gamma.
  std::optional<double> c_n;
  if (rng.uniform01() < 0.5) {
    double tail = 0.0;
    for (std::size_t i = V.support_size(); i-- > 1;) {
      if (tail + V[i].p > gamma || V[i].p == V[i - 1].p) break;
      tail += V[i].p;
      if (rng.uniform01() < 0.5) {
        c_n = -log_k(V[i - 1].p, V.base()) / n;
        break;
      }
    }
  }
  const auto report = verify_code(build_slice_code_div(V, n, gamma, c_n), X, delta, gamma);
  if (!report.pointwise_ratio_ok) return "pointwise ratio bound violated";
  if (!report.divergence_premise) return "witness outside the divergence ball";
  return report.pass ? "" : fail("divergence code bound violated", report.divergence_to_target,
                                 report.divergence_bound);
}

std::string data_processing(Rng& rng) {
  const int base = random_base(rng);
  const auto W = random_channel(rng, rng.between(2, 5), rng.between(2, 5), base);
  const auto P = random_distribution_on(rng, W.inputs(), base);
  const auto Q = random_distribution_on(rng, W.inputs(), base);
  const auto WP = push_forward(W, P), WQ = push_forward(W, Q);
  const double d_in = variational_distance(P, Q), d_out = variational_distance(WP, WQ);
  if (d_out > d_in + 1e-12) return fail("variational data processing", d_out, d_in);
  const double k_in = kl_divergence(P, Q), k_out = kl_divergence(WP, WQ);
  return k_out <= k_in + kTol ? "" : fail("divergence data processing", k_out, k_in);
}

std::string channel_inclusion(Rng& rng) {
  const int base = random_base(rng);
  const auto W = random_channel(rng, rng.between(2, 3), rng.between(2, 4), base);
  const auto X = random_distribution_on(rng, W.inputs(), base);
  const double delta = rng.uniform01() * 0.6;
  const double channel = channel_smooth_entropy_oracle(W, X, delta, Measure::Variational).value;
  const double source = h_delta_grid_oracle(X, delta, kGridStep).value;
  if (channel > source + kTol) return fail("channel oracle above source oracle", channel, source);
  const auto I = Channel::identity(X.labels(), base);
  const double same = channel_smooth_entropy_oracle(I, X, delta, Measure::Variational).value;
  return std::abs(same - source) <= grid_slack(kGridStep)
             ? ""
             : fail("identity channel differs from source", same, source);
}

std::string channel_resolution(Rng& rng) {
  const int base = 2;
  const auto W = random_channel(rng, rng.between(2, 3), rng.between(2, 3), base);
  const auto X = random_distribution_on(rng, W.inputs(), base);
  const double delta = pick(rng, {0.0, 0.1, 0.2});
  const double gamma = pick(rng, {0.1, 0.25});
  const bool div = rng.uniform01() < 0.5;
  const unsigned n = div ? static_cast<unsigned>(std::ceil(8.0 / gamma)) : 1u;
  const auto report =
      resolve_channel(W, X, delta, gamma, div ? Measure::Divergence : Measure::Variational, n);
  return report.pass ? "" : fail("channel resolution bound violated", report.channel->output_value,
                                 report.channel->output_bound);
}

std::string code_determinism(Rng& rng) {
  const auto V = small(rng, 1, 10, random_base(rng), 0.1);
  const double gamma = rng.uniform(0.05, 1.0);
  const auto n = static_cast<unsigned>(rng.between(1, 5));
  const auto a = build_slice_code(V, n, gamma);
  if (!(a == build_slice_code(V, n, gamma))) return "rebuilt code differs";
  const auto issues = check_code_invariants(a);
  return issues.empty() ? "" : issues.front();
}

std::string sampling(Rng& rng) {
  const auto V = small(rng, 1, 6, 2, 0.1);
  const double gamma = rng.uniform(0.1, 1.0);
  const auto code = build_slice_code(V, 1, gamma);
  const auto induced = induced_distribution(code);
  constexpr std::uint64_t draws = 100'000;
  const auto counts = sample_decoded(code, draws, rng.next());
  for (const auto& atom : induced.atoms()) {
    const auto it = counts.find(atom.label);
    const double observed = it == counts.end() ? 0.0 : static_cast<double>(it->second);
    const double mean = draws * atom.p;
    const double sigma = std::sqrt(draws * atom.p * (1.0 - atom.p));
    if (std::abs(observed - mean) > 3.0 * sigma + 1e-9) {
      return fail("count outside 3 sigma for " + atom.label, observed, mean);
    }
  }
  return "";
}

struct Entry {
  SuiteInfo info;
  CaseFn fn;
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries{
      {{"pinsker", 1000, "2 d(p,q)^2 / ln K <= D(q||p)"}, pinsker},
      {{"triangle", 1000, "symmetry and triangle inequality of d"}, triangle},
      {{"renyi-monotone", 500, "Renyi entropy nonincreasing in alpha"}, renyi_monotone},
      {{"iid-entropy", 200, "H(X^n) = n H(X) for n <= 100"}, iid_entropy},
      {{"quantile-monotone", 500, "spectral quantile nonincreasing in delta"}, quantile_monotone},
      {{"smooth-monotone", 60, "smooth entropies nonincreasing in delta"}, smooth_monotone},
      {{"gh-gaps", 1000, "G and H within log e / e gaps"}, gh_gaps},
      {{"ho-yeung", 100, "majorizing witness matches the grid oracle"}, ho_yeung},
      {{"div-inclusion", 100, "H <= divergence oracle at radius 2 delta^2 / ln K"}, div_inclusion},
      {{"conditional-witness", 100, "conditional witness radius and oracle comparison"}, conditional_witness},
      {{"code-vd", 200, "variational slice code bounds"}, code_vd},
      {{"code-div", 200, "divergence slice code bounds"}, code_div},
      {{"data-processing", 500, "d and D contract under channels"}, data_processing},
      {{"channel-inclusion", 40, "channel oracle <= source oracle"}, channel_inclusion},
      {{"channel-resolution", 40, "composed channel resolvability bounds"}, channel_resolution},
      {{"code-determinism", 200, "rebuilt codes are identical and valid"}, code_determinism},
      {{"sampling", 10, "decoded coin draws within 3 sigma bands"}, sampling},
  };
  return entries;
}

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

const std::vector<SuiteInfo>& property_suites() {
  static const std::vector<SuiteInfo> infos = [] {
    std::vector<SuiteInfo> out;
    for (const auto& e : registry()) out.push_back(e.info);
    return out;
  }();
  return infos;
}

SuiteResult run_suite(const std::string& name, std::uint64_t cases, std::uint64_t seed) {
  const auto& entries = registry();
  const auto it = std::find_if(entries.begin(), entries.end(),
                               [&](const Entry& e) { return e.info.name == name; });
  if (it == entries.end()) throw std::invalid_argument("unknown suite '" + name + "'");
  std::uint64_t salt = 0;
  for (const char c : name) salt = mix(salt ^ static_cast<unsigned char>(c));
  Rng rng(mix(seed ^ salt));

  SuiteResult result{.name = name, .cases = cases};
  for (std::uint64_t i = 0; i < cases; ++i) {
    std::string message;
    try {
      message = it->fn(rng);
    } catch (const std::exception& e) {
      message = std::string("exception: ") + e.what();
    }
    if (!message.empty()) {
      if (result.failures == 0) result.first_failure = "case " + std::to_string(i) + ": " + message;
      ++result.failures;
    }
  }
  return result;
}

}  // namespace resolv

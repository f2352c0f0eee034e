#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <limits>

#include "oracles.hpp"
#include "resolv/distribution.hpp"
#include "resolv/random.hpp"

using namespace resolv;

namespace {

FiniteDistribution dist(std::initializer_list<double> p, int base = 2) {
  return FiniteDistribution::from_probabilities(std::vector<double>(p), base);
}

const FiniteDistribution kHalfQuarter = dist({0.5, 0.25, 0.25});

}  // namespace

TEST(FiniteDistribution, CanonicalOrderBreaksTiesByLabel) {
  const FiniteDistribution d({{"c", 0.25}, {"a", 0.25}, {"b", 0.5}});
  ASSERT_EQ(d.size(), 3u);
  EXPECT_EQ(d[0].label, "b");
  EXPECT_EQ(d[1].label, "a");
  EXPECT_EQ(d[2].label, "c");
  EXPECT_EQ(d.index_of("c"), 2u);
  EXPECT_DOUBLE_EQ(d.p("a"), 0.25);
  EXPECT_EQ(d.p("missing"), 0.0);
}

TEST(FiniteDistribution, ZeroAtomsAreFlagged) {
  const FiniteDistribution d({{"x", 1.0}, {"y", 0.0}});
  EXPECT_TRUE(d.has_zero_atoms());
  EXPECT_EQ(d.support_size(), 1u);
}

TEST(FiniteDistribution, RejectsInvalidInput) {
  EXPECT_THROW(FiniteDistribution({{"a", 0.5}, {"b", 0.4}}), std::invalid_argument);
  EXPECT_THROW(FiniteDistribution({{"a", 0.5}, {"a", 0.5}}), std::invalid_argument);
  EXPECT_THROW(FiniteDistribution({{"a", -0.1}, {"b", 1.1}}), std::invalid_argument);
  EXPECT_THROW(FiniteDistribution({}), std::invalid_argument);
  EXPECT_THROW(FiniteDistribution({{"a", 1.0}}, 1), std::invalid_argument);
  EXPECT_THROW(FiniteDistribution({{"a", std::nan("")}}), std::invalid_argument);
  EXPECT_NO_THROW(FiniteDistribution({{"a", 0.5 + 4e-10}, {"b", 0.5}}));
}

TEST(FiniteDistribution, FromProbabilitiesPadsLabels) {
  std::vector<double> p(12, 1.0 / 12.0);
  const auto d = FiniteDistribution::from_probabilities(p);
  EXPECT_EQ(d[0].label, "00");
  EXPECT_EQ(d[11].label, "11");
}

TEST(Entropy, Examples) {
  EXPECT_DOUBLE_EQ(entropy(dist({0.5, 0.5})), 1.0);
  EXPECT_EQ(entropy(dist({1.0})), 0.0);
  EXPECT_NEAR(entropy(kHalfQuarter), 1.5, 1e-15);
  EXPECT_NEAR(entropy(dist({1.0 / 3, 1.0 / 3, 1.0 / 3}, 3)), 1.0, 1e-15);
  EXPECT_EQ(entropy(FiniteDistribution({{"a", 1.0}, {"b", 0.0}})), 0.0);
}

TEST(Entropy, MatchesLongDoubleOracle) {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const auto d = random_distribution(rng, {.max_atoms = 30, .base = 2 + i % 3,
                                             .zero_atom_chance = 0.1});
    EXPECT_NEAR(entropy(d), oracle::entropy(d.probabilities(), d.base()), 1e-12);
  }
}

TEST(RenyiEntropy, Examples) {
  for (const double alpha : {0.3, 0.999, 2.0, 7.0}) {
    EXPECT_NEAR(renyi_entropy(dist({0.25, 0.25, 0.25, 0.25}), alpha), 2.0, 1e-12);
  }
  EXPECT_NEAR(renyi_entropy(dist({0.5, 0.5}), 2.0), 1.0, 1e-15);
  EXPECT_THROW(renyi_entropy(kHalfQuarter, 1.0), std::invalid_argument);
  EXPECT_THROW(renyi_entropy(kHalfQuarter, 0.0), std::invalid_argument);
  EXPECT_THROW(renyi_entropy(kHalfQuarter, -2.0), std::invalid_argument);
}

TEST(RenyiEntropy, ApproachesShannonAsOrderTendsToOne) {
  Rng rng(12);
  for (int i = 0; i < 100; ++i) {
    const auto d = random_distribution(rng, {.max_atoms = 12});
    EXPECT_NEAR(renyi_entropy(d, 0.999), entropy(d), 1e-2);
  }
}

TEST(VariationalDistance, Examples) {
  EXPECT_EQ(variational_distance(kHalfQuarter, kHalfQuarter), 0.0);
  const FiniteDistribution a({{"x", 0.5}, {"y", 0.5}});
  const FiniteDistribution b({{"u", 0.25}, {"v", 0.75}});
  EXPECT_DOUBLE_EQ(variational_distance(a, b), 1.0);
  EXPECT_DOUBLE_EQ(variational_distance(dist({0.5, 0.5}), dist({0.75, 0.25})), 0.25);
  EXPECT_THROW(variational_distance(dist({1.0}, 2), dist({1.0}, 3)), std::invalid_argument);
}

TEST(KlDivergence, Examples) {
  EXPECT_EQ(kl_divergence(kHalfQuarter, kHalfQuarter), 0.0);
  const FiniteDistribution p({{"x", 0.5}, {"y", 0.5}});
  const FiniteDistribution q({{"x", 1.0}, {"y", 0.0}});
  EXPECT_TRUE(std::isinf(kl_divergence(p, q)));
  EXPECT_EQ(kl_divergence(q, p), 1.0);
  EXPECT_NEAR(kl_divergence(dist({0.75, 0.25}), dist({0.5, 0.5})), 0.188721875540867, 1e-12);
}

TEST(IidPower, Examples) {
  const auto fair = iid_power(dist({0.5, 0.5}), 3);
  ASSERT_EQ(fair.groups().size(), 1u);
  EXPECT_DOUBLE_EQ(fair.groups()[0].p, 0.125);
  EXPECT_EQ(fair.groups()[0].count, 8);

  const auto b = iid_power(dist({0.8, 0.2}), 2);
  ASSERT_EQ(b.groups().size(), 3u);
  const double want_p[] = {0.64, 0.16, 0.04};
  const int want_count[] = {1, 2, 1};
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(b.groups()[i].p, want_p[i], 1e-15);
    EXPECT_EQ(b.groups()[i].count, want_count[i]);
  }

  const auto d = dist({0.6, 0.3, 0.1});
  const auto one = iid_power(d, 1);
  ASSERT_EQ(one.groups().size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(one.groups()[i].p, d[i].p, 1e-15);
}

TEST(IidPower, MatchesExplicitExpansion) {
  Rng rng(21);
  for (int i = 0; i < 40; ++i) {
    const auto base = random_distribution(rng, {.min_atoms = 2, .max_atoms = 3, .tie_chance = 0.5});
    const auto n = static_cast<unsigned>(rng.between(1, 8));
    const auto g = iid_power(base, n);
    const auto explicit_p = oracle::expand_iid(base.probabilities(), n);
    EXPECT_NEAR(g.total(), 1.0, 1e-12);
    EXPECT_NEAR(entropy(g), oracle::entropy(explicit_p, 2), 1e-10);
    oracle::Integer atoms = 0;
    for (const auto& grp : g.groups()) atoms += grp.count;
    EXPECT_EQ(atoms, oracle::power(static_cast<unsigned>(base.size()), n));
    for (std::size_t k = 1; k < g.groups().size(); ++k) {
      EXPECT_LT(g.groups()[k - 1].info, g.groups()[k].info);
    }
    for (const double delta : {0.0, 0.1, 0.37, 0.8}) {
      EXPECT_NEAR(info_quantile(g, delta).value, oracle::info_quantile(explicit_p, delta, 2), 1e-9)
          << "n=" << n << " delta=" << delta;
    }
  }
}

TEST(IidPower, EntropyIsAdditive) {
  Rng rng(22);
  for (int i = 0; i < 50; ++i) {
    const auto base = random_distribution(rng, {.min_atoms = 2, .max_atoms = 3});
    const auto n = static_cast<unsigned>(rng.between(1, 100));
    EXPECT_NEAR(entropy(iid_power(base, n)), n * entropy(base), 1e-6);
  }
}

TEST(IidPower, LargeBlocklengthKeepsMass) {
  const auto g = iid_power(dist({0.8, 0.2}), 10000);
  EXPECT_EQ(g.groups().size(), 10001u);
  EXPECT_NEAR(g.total(), 1.0, 1e-9);
}

TEST(IidPower, CapAndEnvironmentOverride) {
  EXPECT_THROW(iid_power(dist({0.5, 0.3, 0.2}), 100, 50), std::length_error);
  EXPECT_EQ(type_class_count(3, 100), 5151);
  ::setenv("RESOLV_TYPECLASS_CAP", "17", 1);
  EXPECT_EQ(type_class_cap_from_env(), 17u);
  ::setenv("RESOLV_TYPECLASS_CAP", "abc", 1);
  EXPECT_THROW(type_class_cap_from_env(), std::invalid_argument);
  ::unsetenv("RESOLV_TYPECLASS_CAP");
  EXPECT_EQ(type_class_cap_from_env(), kDefaultTypeClassCap);
}

TEST(InfoQuantile, Examples) {
  EXPECT_EQ(info_quantile(dist({1.0}), 0.3).value, 0.0);
  EXPECT_DOUBLE_EQ(info_quantile(kHalfQuarter, 0.0).value, 2.0);
  EXPECT_DOUBLE_EQ(info_quantile(kHalfQuarter, 0.5).value, 1.0);
  EXPECT_DOUBLE_EQ(info_quantile(kHalfQuarter, 0.49).value, 2.0);
  EXPECT_THROW(info_quantile(kHalfQuarter, 1.0), std::invalid_argument);
}

TEST(InfoQuantile, MatchesOracleAndStaysInRange) {
  Rng rng(31);
  for (int i = 0; i < 300; ++i) {
    const auto d = random_distribution(rng, {.min_atoms = 1, .max_atoms = 15,
                                             .zero_atom_chance = 0.1, .tie_chance = 0.5});
    const double delta = rng.uniform01() * 0.99;
    const double q = info_quantile(d, delta).value;
    EXPECT_NEAR(q, oracle::info_quantile(d.probabilities(), delta, 2), 1e-12);
    EXPECT_GE(q, 0.0);
    EXPECT_LE(q, -log_k(d[d.support_size() - 1].p, 2) + 1e-12);
  }
}

TEST(Properties, PinskerTriangleSymmetry) {
  Rng rng(41);
  for (int i = 0; i < 1000; ++i) {
    const int base = 2 + i % 2;
    const auto p = random_distribution(rng, {.max_atoms = 10, .base = base});
    const auto q = random_distribution_on(rng, p.labels(), base);
    const auto r = random_distribution_on(rng, p.labels(), base);
    const double d = variational_distance(p, q);
    EXPECT_LE(2.0 * d * d / std::log(double(base)), kl_divergence(q, p) + 1e-12);
    EXPECT_EQ(d, variational_distance(q, p));
    EXPECT_LE(variational_distance(p, r), d + variational_distance(q, r) + 1e-12);
  }
}

TEST(Properties, RenyiNonincreasingInOrder) {
  Rng rng(42);
  for (int i = 0; i < 300; ++i) {
    const auto d = random_distribution(rng, {.max_atoms = 10, .zero_atom_chance = 0.1});
    double prev = std::numeric_limits<double>::infinity();
    for (const double alpha : {0.1, 0.5, 0.9, 0.999, 1.001, 1.5, 3.0, 10.0}) {
      const double h = renyi_entropy(d, alpha);
      EXPECT_LE(h, prev + 1e-9);
      prev = h;
    }
  }
}

TEST(Properties, QuantileNonincreasingInDelta) {
  Rng rng(43);
  for (int i = 0; i < 300; ++i) {
    const auto d = random_distribution(rng, {.max_atoms = 12, .tie_chance = 0.5});
    double prev = std::numeric_limits<double>::infinity();
    for (double delta = 0.0; delta < 1.0; delta += 0.05) {
      const double q = info_quantile(d, delta).value;
      EXPECT_LE(q, prev + 1e-12);
      prev = q;
    }
  }
}

TEST(Varentropy, Examples) {
  EXPECT_EQ(varentropy(dist({0.5, 0.5})), 0.0);
  // Bernoulli(0.2): (log2 4)^2 * 0.16 = 0.64 bits^2.
  EXPECT_NEAR(varentropy(dist({0.8, 0.2})), 0.64, 1e-12);
}

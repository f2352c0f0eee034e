#include <gtest/gtest.h>

#include <cmath>

#include "resolv/channel.hpp"
#include "resolv/random.hpp"

using namespace resolv;

namespace {

FiniteDistribution binary(double p0) { return FiniteDistribution({{"0", p0}, {"1", 1.0 - p0}}); }

Channel constant_channel() {
  return Channel({"a", "b", "c"}, {"u", "v"}, {{0.3, 0.7}, {0.3, 0.7}, {0.3, 0.7}});
}

// Matrix-vector product in input order, kept separate from push_forward.
std::vector<double> apply(const Channel& W, const FiniteDistribution& d) {
  std::vector<double> out(W.outputs().size(), 0.0);
  for (std::size_t i = 0; i < W.inputs().size(); ++i) {
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += d.p(W.inputs()[i]) * W.w(i, j);
  }
  return out;
}

}  // namespace

TEST(Channel, Validation) {
  EXPECT_THROW(Channel({"a"}, {"x", "y"}, {{0.5, 0.4}}), std::invalid_argument);
  EXPECT_THROW(Channel({"a", "a"}, {"x"}, {{1.0}, {1.0}}), std::invalid_argument);
  EXPECT_THROW(Channel({"a"}, {"x"}, {{1.0}, {1.0}}), std::invalid_argument);
  EXPECT_THROW(Channel({"a"}, {"x", "y"}, {{1.0}}), std::invalid_argument);
  EXPECT_THROW(Channel::binary_symmetric(1.5), std::invalid_argument);
  const auto bsc = Channel::binary_symmetric(0.1);
  EXPECT_EQ(bsc.row("0").p("1"), 0.1);
  EXPECT_THROW(bsc.row("2"), std::invalid_argument);
}

TEST(PushForward, Examples) {
  const auto d = FiniteDistribution({{"a", 0.2}, {"b", 0.5}, {"c", 0.3}});
  EXPECT_EQ(push_forward(Channel::identity({"a", "b", "c"}), d), d);
  const auto bsc = Channel::binary_symmetric(0.1);
  EXPECT_EQ(push_forward(bsc, binary(0.5)), binary(0.5));
  const auto out = push_forward(bsc, binary(1.0));
  EXPECT_DOUBLE_EQ(out.p("0"), 0.9);
  EXPECT_DOUBLE_EQ(out.p("1"), 0.1);
  EXPECT_THROW(push_forward(bsc, d), std::invalid_argument);
  EXPECT_THROW(push_forward(Channel::binary_symmetric(0.1, 3), binary(0.5)),
               std::invalid_argument);
}

TEST(PushForward, MatchesMatrixProduct) {
  Rng rng(201);
  for (int i = 0; i < 200; ++i) {
    const auto W = random_channel(rng, rng.between(1, 6), rng.between(1, 6));
    const auto d = random_distribution_on(rng, W.inputs());
    const auto out = push_forward(W, d);
    const auto want = apply(W, d);
    for (std::size_t j = 0; j < want.size(); ++j) {
      EXPECT_NEAR(out.p(W.outputs()[j]), want[j], 1e-15);
    }
  }
}

TEST(DataProcessing, DistanceAndDivergenceContract) {
  Rng rng(202);
  for (int i = 0; i < 500; ++i) {
    const int base = 2 + i % 2;
    const auto W = random_channel(rng, rng.between(2, 5), rng.between(2, 5), base);
    const auto P = random_distribution_on(rng, W.inputs(), base);
    const auto Q = random_distribution_on(rng, W.inputs(), base);
    EXPECT_LE(variational_distance(push_forward(W, P), push_forward(W, Q)),
              variational_distance(P, Q) + 1e-12);
    EXPECT_LE(kl_divergence(push_forward(W, P), push_forward(W, Q)), kl_divergence(P, Q) + 1e-9);
  }
}

TEST(ChannelOracle, IdentityMatchesSourceOracles) {
  Rng rng(203);
  for (int i = 0; i < 20; ++i) {
    const auto X = random_distribution(rng, {.min_atoms = 2, .max_atoms = 3});
    const auto I = Channel::identity(X.labels());
    const double delta = rng.uniform01() * 0.8;
    const auto vd = channel_smooth_entropy_oracle(I, X, delta, Measure::Variational);
    const auto src = h_delta_grid_oracle(X, delta, kDefaultGridStep);
    EXPECT_EQ(vd.value, src.value);
    EXPECT_EQ(*vd.witness, *src.witness);
    const auto div = channel_smooth_entropy_oracle(I, X, delta, Measure::Divergence);
    EXPECT_EQ(div.value, h_div_grid_oracle(X, delta, kDefaultGridStep).value);
  }
}

TEST(ChannelOracle, Examples) {
  const auto X = FiniteDistribution({{"a", 0.5}, {"b", 0.3}, {"c", 0.2}});
  EXPECT_EQ(channel_smooth_entropy_oracle(constant_channel(), X, 0.0, Measure::Variational).value,
            0.0);
  EXPECT_EQ(channel_smooth_entropy_oracle(constant_channel(), X, 0.0, Measure::Divergence).value,
            0.0);
  const auto r =
      channel_smooth_entropy_oracle(Channel::binary_symmetric(0.1), binary(0.5), 0.0,
                                    Measure::Variational);
  EXPECT_NEAR(r.value, 1.0, 1e-12);
  EXPECT_LE(r.achieved_radius, 1e-12);
  const auto four = Channel::identity({"a", "b", "c", "d"});
  EXPECT_THROW(channel_smooth_entropy_oracle(
                   four, FiniteDistribution({{"a", 0.25}, {"b", 0.25}, {"c", 0.25}, {"d", 0.25}}),
                   0.1, Measure::Variational),
               std::invalid_argument);
}

TEST(ChannelOracle, ChannelBallContainsSourceBall) {
  Rng rng(204);
  for (int i = 0; i < 30; ++i) {
    const auto W = random_channel(rng, rng.between(2, 3), rng.between(2, 4));
    const auto X = random_distribution_on(rng, W.inputs());
    const double delta = rng.uniform01() * 0.6;
    const auto r = channel_smooth_entropy_oracle(W, X, delta, Measure::Variational);
    EXPECT_LE(r.value, h_delta_grid_oracle(X, delta, kDefaultGridStep).value + 1e-9);
    EXPECT_LE(r.achieved_radius, delta + 1e-9);
  }
}

TEST(ResolveChannel, IdentityReductionIsBitExact) {
  Rng rng(205);
  for (int i = 0; i < 20; ++i) {
    const auto X = random_distribution(rng, {.min_atoms = 2, .max_atoms = 3});
    const auto I = Channel::identity(X.labels());
    const double delta = 0.1, gamma = 0.25;
    for (const Measure m : {Measure::Variational, Measure::Divergence}) {
      const unsigned n = m == Measure::Variational ? 1 : 32;
      auto report = resolve_channel(I, X, delta, gamma, m, n);
      const auto V = m == Measure::Variational
                         ? *h_delta_grid_oracle(X, delta + gamma, kDefaultGridStep).witness
                         : *h_div_grid_oracle(X, delta + gamma, kDefaultGridStep).witness;
      const auto code = m == Measure::Variational ? build_slice_code(V, n, gamma)
                                                  : build_slice_code_div(V, n, gamma);
      const auto source = verify_code(code, X, delta, gamma);
      ASSERT_TRUE(report.channel.has_value());
      EXPECT_TRUE(report.channel->ok);
      if (m == Measure::Variational) {
        EXPECT_EQ(report.channel->output_value, variational_distance(X, source.induced));
      } else {
        EXPECT_EQ(report.channel->output_value, kl_divergence(source.induced, X));
      }
      report.channel.reset();
      EXPECT_EQ(report, source);
    }
  }
}

TEST(ResolveChannel, ConstantChannel) {
  const auto X = FiniteDistribution({{"a", 0.5}, {"b", 0.3}, {"c", 0.2}});
  const auto report = resolve_channel(constant_channel(), X, 0.0, 0.5, Measure::Variational);
  ASSERT_TRUE(report.channel.has_value());
  EXPECT_EQ(report.channel->output_value, 0.0);
  EXPECT_EQ(report.expected_length, std::ceil(0.5));
  EXPECT_TRUE(report.pass);
}

TEST(ResolveChannel, BinarySymmetricEndToEnd) {
  const auto W = Channel::binary_symmetric(0.1);
  const auto X = binary(0.5);
  const double delta = 0.1, gamma = 0.25;
  const auto report = resolve_channel(W, X, delta, gamma, Measure::Variational);
  ASSERT_TRUE(report.channel.has_value());
  EXPECT_TRUE(report.pass);
  const auto V = *channel_smooth_entropy_oracle(W, X, delta + gamma, Measure::Variational).witness;
  EXPECT_LE(report.channel->output_value,
            variational_distance(report.induced, V) + delta + gamma + 1e-12);
  const auto div = resolve_channel(W, X, delta, gamma, Measure::Divergence, 32);
  EXPECT_TRUE(div.pass);
}

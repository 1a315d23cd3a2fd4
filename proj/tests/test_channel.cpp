#include "oracles.hpp"
#include "streamcode/channel.hpp"
#include "streamcode/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

using namespace streamcode;
using namespace streamcode::channel;

namespace {

ErasureTrace bits(std::initializer_list<int> b)
{
  ErasureTrace t;
  for (int x : b) {
    t.erased.push_back(static_cast<std::uint8_t>(x));
  }
  return t;
}

double mean_burst(const BurstHistogram& h)
{
  double n = 0;
  double sum = 0;
  for (auto [len, count] : h) {
    n += static_cast<double>(count);
    sum += static_cast<double>(len * count);
  }
  return sum / n;
}

} // namespace

TEST(GilbertElliott, NeverLeavingGoodIsIid)
{
  const double eps = 0.03;
  const auto t = ge_trace({0.0, 0.5, eps}, 200000, 1);
  const double sigma = std::sqrt(eps * (1 - eps) / 200000);
  EXPECT_NEAR(t.erasure_rate(), eps, 3 * sigma);
}

TEST(GilbertElliott, ImmediateExitGivesSingleErasures)
{
  const auto h = burst_histogram(ge_trace({0.2, 1.0, 0.0}, 100000, 2));
  ASSERT_EQ(h.size(), 1u);
  EXPECT_EQ(h.begin()->first, 1u);
}

TEST(GilbertElliott, StationaryLossRate)
{
  const GilbertElliottParams p{5e-4, 0.5, 1e-2};
  // beta/(alpha+beta) eps + alpha/(alpha+beta)
  const double expected = 0.5 / (0.5 + 5e-4) * 1e-2 + 5e-4 / (0.5 + 5e-4);
  EXPECT_NEAR(ge_loss_rate(p), expected, 1e-15);
  EXPECT_NEAR(expected, 1.099e-2, 1e-5);
  const auto t = ge_trace(p, 1000000, 3);
  EXPECT_NEAR(t.erasure_rate(), expected, 3 * oracle::ge_loss_sigma(5e-4, 0.5, 1e-2, 1e6));
}

TEST(GilbertElliott, GeometricBursts)
{
  const auto h = burst_histogram(ge_trace({0.1, 0.5, 0.0}, 1300000, 4));
  const auto s = summarize(h);
  ASSERT_GE(s.bursts, 100000u);
  EXPECT_NEAR(s.mean_length, 2.0, 0.04);
  EXPECT_NEAR(mean_burst(h), s.mean_length, 1e-12);
  EXPECT_EQ(s.min_length, 1u);
}

TEST(GilbertElliott, Validation)
{
  EXPECT_THROW(ge_trace({-0.1, 0.5, 0.0}, 10, 1), ParameterError);
  EXPECT_THROW(ge_trace({0.1, 1.5, 0.0}, 10, 1), ParameterError);
  EXPECT_THROW(ge_trace({0.1, 0.5, 2.0}, 10, 1), ParameterError);
  EXPECT_THROW(fritchman_trace({0, 0.1, 0.5, 0.0}, 10, 1), ParameterError);
}

TEST(Fritchman, SingleErrorStateMatchesGilbertElliott)
{
  const auto f = summarize(burst_histogram(fritchman_trace({1, 0.1, 0.5, 0.0}, 1300000, 5)));
  const auto g = summarize(burst_histogram(ge_trace({0.1, 0.5, 0.0}, 1300000, 6)));
  EXPECT_NEAR(f.mean_length, g.mean_length, 0.05);
  EXPECT_NEAR(static_cast<double>(f.bursts), static_cast<double>(g.bursts), 0.02 * static_cast<double>(g.bursts));
}

TEST(Fritchman, NegativeBinomialBursts)
{
  const auto h = burst_histogram(fritchman_trace({8, 0.1, 0.5, 0.0}, 2800000, 7));
  const auto s = summarize(h);
  ASSERT_GE(s.bursts, 100000u);
  EXPECT_NEAR(s.mean_length, 16.0, 0.32);
  EXPECT_EQ(s.min_length, 8u);
  // histogram follows NB(8, 0.5) around its mode
  for (std::size_t len = 12; len <= 20; ++len) {
    const double expected = negative_binomial_pmf(8, 0.5, len) * static_cast<double>(s.bursts);
    EXPECT_NEAR(static_cast<double>(h.at(len)), expected, 5 * std::sqrt(expected)) << len;
  }
}

TEST(Pmf, Normalized)
{
  double g = 0;
  double nb8 = 0;
  double nb19 = 0;
  for (std::size_t l = 1; l < 2000; ++l) {
    g += geometric_pmf(0.5, l);
    nb8 += negative_binomial_pmf(8, 0.5, l);
    nb19 += negative_binomial_pmf(19, 0.5, l);
  }
  EXPECT_NEAR(g, 1.0, 1e-12);
  EXPECT_NEAR(nb8, 1.0, 1e-9);
  EXPECT_NEAR(nb19, 1.0, 1e-9);
  EXPECT_EQ(negative_binomial_pmf(8, 0.5, 7), 0.0);
  // P(L = 11) = C(10, 7) / 2^11
  EXPECT_NEAR(negative_binomial_pmf(8, 0.5, 11), 120.0 / 2048.0, 1e-12);
  EXPECT_NEAR(geometric_pmf(0.5, 3), 0.125, 1e-15);
}

TEST(Periodic, Examples)
{
  EXPECT_EQ(periodic_period(10, 3, 12), 20);
  const auto t = periodic_trace(10, 3, 12, 5);
  ASSERT_EQ(t.length(), 100u);
  for (std::size_t i = 0; i < t.length(); ++i) {
    EXPECT_EQ(t[i], i % 20 < 9) << i;
  }
  const auto same = periodic_trace(4, 4, 6, 3);
  EXPECT_EQ(periodic_period(4, 4, 6), 7);
  EXPECT_EQ(same.erasures(), 9u);
  EXPECT_EQ(periodic_trace(1, 1, 6, 10).erasures(), 0u);
  EXPECT_THROW(periodic_trace(3, 4, 6, 1), ParameterError);
  EXPECT_THROW(periodic_trace(9, 2, 6, 1), ParameterError);
}

TEST(Adversary, Examples)
{
  const AdversaryParams p{3, 2, 5};
  EXPECT_TRUE(adversary_admissible(p, bits({1, 1, 1, 0, 0, 0, 0, 1, 1, 1})));
  EXPECT_TRUE(adversary_admissible(p, bits({0, 0, 0, 0, 0, 0})));
  EXPECT_FALSE(adversary_admissible(p, bits({1, 0, 1, 0, 1})));
  EXPECT_FALSE(adversary_admissible(p, bits({1, 1, 1, 1})));
  EXPECT_THROW((AdversaryParams{2, 3, 5}.validate()), ParameterError);
  EXPECT_THROW((AdversaryParams{6, 1, 5}.validate()), ParameterError);
}

TEST(Adversary, EnumerationIsExactlyTheAdmissibleSet)
{
  for (auto [B, N, W] : {std::tuple{3, 2, 5}, std::tuple{2, 1, 4}, std::tuple{4, 1, 6}, std::tuple{2, 2, 3}}) {
    const AdversaryParams p{B, N, W};
    const int horizon = 12;
    std::set<std::vector<std::uint8_t>> yielded;
    adversary_patterns(p, horizon, [&](const std::vector<std::uint8_t>& t) {
      EXPECT_TRUE(adversary_admissible(p, t));
      yielded.insert(t);
      return true;
    });
    std::set<std::vector<std::uint8_t>> brute;
    for (unsigned mask = 0; mask < (1u << horizon); ++mask) {
      std::vector<std::uint8_t> t(horizon);
      for (int i = 0; i < horizon; ++i) {
        t[static_cast<std::size_t>(i)] = (mask >> i) & 1;
      }
      ASSERT_EQ(adversary_admissible(p, t), oracle::admissible(t, B, N, W));
      if (oracle::admissible(t, B, N, W)) {
        brute.insert(t);
      }
    }
    EXPECT_EQ(yielded, brute);
    EXPECT_DOUBLE_EQ(adversary_count(p, horizon), static_cast<double>(brute.size()));
  }
}

TEST(Adversary, StopsEarlyAndRefusesHugeEnumerations)
{
  std::size_t seen = 0;
  const auto visited = adversary_patterns({3, 2, 5}, 10, [&](const std::vector<std::uint8_t>&) { return ++seen < 7; });
  EXPECT_EQ(visited, 7u);
  EXPECT_THROW(adversary_patterns({10, 4, 20}, 60, [](const std::vector<std::uint8_t>&) { return true; }, 1e5),
               EnumerationTooLarge);
}

TEST(Histogram, Examples)
{
  EXPECT_TRUE(burst_histogram(bits({0, 0, 0})).empty());
  const auto h = burst_histogram(bits({1, 1, 0, 1}));
  EXPECT_EQ(h, (BurstHistogram{{1, 1}, {2, 1}}));
  const auto s = summarize(h);
  EXPECT_EQ(s.bursts, 2u);
  EXPECT_EQ(s.min_length, 1u);
  EXPECT_EQ(s.max_length, 2u);
  EXPECT_DOUBLE_EQ(s.mean_length, 1.5);
}

TEST(RunLength, RoundTrip)
{
  const auto t = bits({0, 0, 1, 1, 1, 0});
  EXPECT_EQ(to_run_length(t), "2c 3e 1c");
  EXPECT_EQ(from_run_length("2c 3e 1c").erased, t.erased);
  EXPECT_TRUE(from_run_length("").erased.empty());
  EXPECT_THROW(from_run_length("3x"), UsageError);
  const auto g = ge_trace({0.05, 0.3, 0.01}, 5000, 8);
  EXPECT_EQ(from_run_length(to_run_length(g)).erased, g.erased);
}

TEST(TraceProperties, Reproducible)
{
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const GilbertElliottParams ge{0.05, 0.4, 0.02};
    const FritchmanParams fr{3, 0.05, 0.4, 0.02};
    ASSERT_EQ(ge_trace(ge, 500, seed), ge_trace(ge, 500, seed));
    ASSERT_EQ(fritchman_trace(fr, 500, seed), fritchman_trace(fr, 500, seed));
  }
  EXPECT_NE(ge_trace({0.05, 0.4, 0.02}, 500, 1).erased, ge_trace({0.05, 0.4, 0.02}, 500, 2).erased);
}

TEST(TraceProperties, LossSetsNestInEpsilon)
{
  // same seed, larger epsilon: a superset of erasures
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto lo = ge_trace({0.01, 0.5, 0.001}, 400, seed);
    const auto hi = ge_trace({0.01, 0.5, 0.02}, 400, seed);
    for (std::size_t i = 0; i < lo.length(); ++i) {
      ASSERT_LE(lo.erased[i], hi.erased[i]);
    }
  }
}

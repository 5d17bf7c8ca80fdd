#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "hicov/normal_dist.hpp"
#include "hicov/rng.hpp"

using namespace hicov;

// Known-answer values produced by numpy.random.Philox (Philox4x64-10).
TEST(Philox, KnownAnswers) {
  {
    const auto out = philox4x64_10({1, 0, 0, 0}, {0, 0});
    EXPECT_EQ(out[0], 0x02f4ba6408e4d89bULL);
    EXPECT_EQ(out[1], 0x3dd62b0b9ca8c5b2ULL);
    EXPECT_EQ(out[2], 0x1c8667a55d902e79ULL);
    EXPECT_EQ(out[3], 0x907d7a052fd5b4dcULL);
  }
  {
    const auto out = philox4x64_10({0, 0, 0, 0}, {~0ULL, ~0ULL});
    EXPECT_EQ(out[0], 0x44b7493d1acfc229ULL);
    EXPECT_EQ(out[1], 0x6636af8e997921ddULL);
    EXPECT_EQ(out[2], 0x3f73e132b5b3780eULL);
    EXPECT_EQ(out[3], 0x605644dde03b01b1ULL);
  }
  {
    const auto out = philox4x64_10({6, 7, 11, 13}, {17, 19});
    EXPECT_EQ(out[0], 0xa24681443386b8caULL);
    EXPECT_EQ(out[1], 0x7d70522488addd45ULL);
    EXPECT_EQ(out[2], 0x4987e1e611e648ecULL);
    EXPECT_EQ(out[3], 0xc64f89184f5d5e72ULL);
  }
}

TEST(Philox, StreamWalksCounter) {
  PhiloxStream s({17, 19}, 7, 11, 13);
  const auto first = philox4x64_10({0, 7, 11, 13}, {17, 19});
  const auto second = philox4x64_10({1, 7, 11, 13}, {17, 19});
  for (int i = 0; i < 4; ++i) EXPECT_EQ(s(), first[i]);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(s(), second[i]);
  EXPECT_EQ(s.blocks_consumed(), 2u);
}

TEST(Philox, SubstreamsAreDistinctAndReproducible) {
  std::set<std::uint64_t> firsts;
  for (std::uint64_t g = 0; g < 4; ++g) {
    for (std::uint64_t r = 0; r < 50; ++r) {
      auto a = substream(42, StreamPurpose::Dataset, g, r);
      auto b = substream(42, StreamPurpose::Dataset, g, r);
      const auto va = a();
      EXPECT_EQ(va, b());
      firsts.insert(va);
    }
  }
  EXPECT_EQ(firsts.size(), 200u);
  auto mean_stream = substream(42, StreamPurpose::Mean, 0, 0);
  auto data_stream = substream(42, StreamPurpose::Dataset, 0, 0);
  EXPECT_NE(mean_stream(), data_stream());
}

TEST(Philox, UniformIsOpenAndCentered) {
  auto s = substream(1, StreamPurpose::Dataset, 0, 0);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  // sd of the mean is sqrt(1/12/n) ~ 6.5e-4
  EXPECT_NEAR(sum / n, 0.5, 4 * 6.5e-4);
}

// Reference quantiles from mpmath at 30 digits.
TEST(NormalDist, QuantileAccuracy) {
  EXPECT_NEAR(normal_quantile(0.95), 1.64485362695147271486, 1e-14);
  EXPECT_NEAR(normal_quantile(0.975), 1.95996398454005423552, 1e-14);
  EXPECT_NEAR(normal_quantile(0.999), 3.09023230616781354154, 1e-13);
  EXPECT_NEAR(normal_quantile(1e-10), -6.36134090240405620470, 1e-12);
  EXPECT_NEAR(upper_critical_value(0.05), 1.64485362695147271486, 1e-14);
  EXPECT_EQ(normal_quantile(0.5), 0.0);
  EXPECT_THROW(normal_quantile(0.0), DomainError);
  EXPECT_THROW(upper_critical_value(1.0), DomainError);
}

TEST(NormalDist, CdfReferenceValues) {
  EXPECT_NEAR(normal_cdf(-0.35515), 0.361238610177230976307, 1e-15);
  EXPECT_NEAR(normal_cdf(3.0), 0.998650101968369905473, 1e-15);
  EXPECT_NEAR(normal_cdf(-8.0) / 6.22096057427178412352e-16, 1.0, 1e-12);
}

TEST(NormalDist, FastQuantileRoundTrips) {
  for (double p = 1e-6; p < 1.0; p += 0.0137) {
    const double exact = normal_quantile(p);
    EXPECT_LE(std::abs(normal_quantile_fast(p) - exact), 1.15e-9 * std::max(1.0, std::abs(exact)));
    EXPECT_NEAR(normal_cdf(normal_quantile(p)) / p, 1.0, 1e-13);
  }
}

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "hyperwind/dataset.hpp"
#include "hyperwind/stats.hpp"

using namespace hyperwind;

TEST(Stats, KsAgainstUniform) {
  const std::vector<double> xs = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  const double d = ks_statistic(xs, [](double x) { return std::clamp(x, 0.0, 1.0); });
  EXPECT_NEAR(d, 0.1, 1e-12);
}

TEST(Stats, KsCritical) {
  EXPECT_NEAR(ks_critical(0.01), 1.627624, 1e-5);
  EXPECT_NEAR(ks_critical(0.05), 1.358102, 1e-5);
}

TEST(Stats, NormalCdf) {
  EXPECT_NEAR(normal_cdf(0.0), 0.5, 1e-15);
  EXPECT_NEAR(normal_cdf(1.959963984540054), 0.975, 1e-12);
  EXPECT_NEAR(normal_cdf(-1.0), 0.15865525393145707, 1e-14);
}

TEST(Stats, QuantileType7) {
  EXPECT_DOUBLE_EQ(quantile({1, 2, 3, 4}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile({1, 2, 3, 4, 5}, 0.25), 2.0);
  EXPECT_DOUBLE_EQ(quantile({10, 0}, 1.0), 10.0);
  EXPECT_DOUBLE_EQ(median({3, 1, 2}), 2.0);
}

TEST(Stats, LinearFitExactLine) {
  const std::vector<double> x = {1, 2, 3, 4}, y = {-1, -3, -5, -7};
  const auto f = linear_fit(x, y);
  EXPECT_NEAR(f.slope, -2.0, 1e-12);
  EXPECT_NEAR(f.intercept, 1.0, 1e-12);
  EXPECT_NEAR(f.r2, 1.0, 1e-12);
  EXPECT_EQ(f.points, 4u);
}

TEST(Stats, InverseSqrtWhitens) {
  const std::vector<double> a = {4.0, 1.0, 1.0, 2.0};
  const auto s = inverse_sqrt(a, 2);
  // S A S^T = I
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      double v = 0.0;
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) v += s[i * 2 + k] * a[k * 2 + l] * s[j * 2 + l];
      EXPECT_NEAR(v, i == j ? 1.0 : 0.0, 1e-12);
    }
  const auto ev = symmetric_eigenvalues(a, 2);
  EXPECT_NEAR(ev[0], 3.0 - std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(ev[1], 3.0 + std::sqrt(2.0), 1e-12);
}

TEST(Stats, MomentAccumulatorMergeMatchesDirect) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  MomentAccumulator all(2), left(2), right(2);
  std::vector<std::array<double, 2>> xs;
  for (int i = 0; i < 1000; ++i) {
    std::array<double, 2> x{g(rng), 0.5 * g(rng) + 1.0};
    xs.push_back(x);
    all.add(x);
    (i < 300 ? left : right).add(x);
  }
  left.merge(right);
  EXPECT_EQ(left.count(), 1000u);
  for (int j = 0; j < 2; ++j) EXPECT_NEAR(left.mean()[j], all.mean()[j], 1e-12);
  const auto ca = all.covariance(), cb = left.covariance();
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(ca[i], cb[i], 1e-12);
  // Two-pass covariance oracle.
  double m0 = 0, m1 = 0;
  for (auto& x : xs) m0 += x[0], m1 += x[1];
  m0 /= 1000, m1 /= 1000;
  double c01 = 0;
  for (auto& x : xs) c01 += (x[0] - m0) * (x[1] - m1);
  EXPECT_NEAR(ca[1], c01 / 999, 1e-12);
}

TEST(Stats, LatticeJitterIsUniformAndDeterministic) {
  std::vector<double> v;
  for (std::uint64_t i = 0; i < 5000; ++i) v.push_back(lattice_jitter(9, i, 0));
  EXPECT_EQ(lattice_jitter(9, 3, 0), v[3]);
  const double d = ks_statistic(v, [](double x) { return std::clamp(x + 0.5, 0.0, 1.0); });
  EXPECT_LT(d, ks_critical(0.001) / std::sqrt(5000.0));
}

namespace {

// Synthetic dataset of Gaussian ray windings i(r(t)) ~ N(t e, t A).
Dataset gaussian_rays(std::vector<double> times, std::vector<double> e, double scale, std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Dataset data;
  for (std::size_t i = 0; i < n; ++i) {
    PathRecord p;
    p.dim = 2;
    p.ray_times = times;
    double prev = 0.0;
    double x[2] = {0.0, 0.0};
    for (double t : times) {
      for (int j = 0; j < 2; ++j) x[j] += e[j] * (t - prev) + scale * std::sqrt(t - prev) * g(rng);
      prev = t;
      for (int j = 0; j < 2; ++j) p.ray_winding.push_back(std::llround(x[j]));
    }
    data.paths.push_back(std::move(p));
  }
  return data;
}

}  // namespace

TEST(Stats, LlnAndCltOnGaussianData) {
  const auto data = gaussian_rays({100, 400, 1600}, {0.3, 0.0}, 2.0, 4000, 3);
  const std::vector<double> e = {0.3, 0.0}, se = {0.0, 0.0};
  EXPECT_TRUE(lln_test(data, e, se).pass);
  const std::vector<double> wrong = {0.5, 0.0};
  EXPECT_FALSE(lln_test(data, wrong, se).pass);
  const std::vector<double> cov = {4.0, 0.0, 0.0, 4.0};
  EXPECT_TRUE(clt_test(data, e, cov, 2).pass);
  const std::vector<double> bad_cov = {1.0, 0.0, 0.0, 1.0};
  EXPECT_FALSE(clt_test(data, e, bad_cov, 2).pass);
}

#include <gtest/gtest.h>

#include <cmath>

#include "json.hpp"
#include "silevy/rng.hpp"
#include "silevy/stats.hpp"

using namespace silevy;

namespace {

std::vector<double> normals(std::uint64_t seed, std::size_t n, double shift = 0.0) {
  rng::Philox g(seed, 0);
  std::vector<double> x(n);
  for (auto& v : x) v = rng::normal(g) + shift;
  return x;
}

const std::vector<double> kZ = {0.0, 0.5, 1.0, 2.0, 3.5};

}  // namespace

TEST(Ecf, AllZeroSamples) {
  const std::vector<double> x(100, 0.0);
  const auto e = stats::ecf(x, kZ);
  for (const auto& v : e.values) EXPECT_EQ(v, std::complex<double>(1.0, 0.0));
}

TEST(Ecf, SymmetricPair) {
  std::vector<double> x;
  for (int i = 0; i < 50; ++i) {
    x.push_back(-1.0);
    x.push_back(1.0);
  }
  const auto e = stats::ecf(x, kZ);
  for (std::size_t k = 0; k < kZ.size(); ++k) {
    EXPECT_NEAR(e.values[k].real(), std::cos(kZ[k]), 1e-14);
    EXPECT_NEAR(e.values[k].imag(), 0.0, 1e-14);
  }
}

TEST(Ecf, StandardNormalAtOne) {
  const auto x = normals(1, 100000);
  const std::vector<double> z = {1.0};
  const auto e = stats::ecf(x, z);
  EXPECT_NEAR(e.radius(), 0.0158113883, 1e-9);
  EXPECT_LT(e.max_deviation([](double zz) { return std::exp(-0.5 * zz * zz); }), e.radius());
}

TEST(Ecf, BoundedAndExactAtZero) {
  const auto x = normals(2, 1000, 0.7);
  const auto e = stats::ecf(x, kZ);
  EXPECT_EQ(e.values[0], std::complex<double>(1.0, 0.0));
  for (const auto& v : e.values) EXPECT_LE(std::abs(v), 1.0 + 1e-12);
}

TEST(Ecf, EmptySampleThrows) { EXPECT_THROW(stats::ecf(std::vector<double>{}, kZ), std::invalid_argument); }

TEST(Ks, IdenticalSamples) {
  const auto x = normals(3, 800);
  const auto r = stats::ks_two_sample(x, x);
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_EQ(r.p_value, 1.0);
}

TEST(Ks, DetectsShift) {
  const auto r = stats::ks_two_sample(normals(4, 10000), normals(5, 10000, 1.0));
  EXPECT_LT(r.p_value, 1e-6);
}

TEST(Ks, SmallSamplesRejected) {
  const auto x = normals(6, 499);
  EXPECT_THROW(stats::ks_two_sample(x, x), std::invalid_argument);
}

TEST(Ks, StatisticAgainstBruteForce) {
  const auto a = normals(7, 600);
  const auto b = normals(8, 700, 0.1);
  double d = 0.0;
  std::vector<double> pts = a;
  pts.insert(pts.end(), b.begin(), b.end());
  for (double t : pts) {
    double fa = 0.0;
    double fb = 0.0;
    for (double v : a) fa += v <= t ? 1.0 : 0.0;
    for (double v : b) fb += v <= t ? 1.0 : 0.0;
    d = std::max(d, std::abs(fa / a.size() - fb / b.size()));
  }
  EXPECT_NEAR(stats::ks_two_sample(a, b).statistic, d, 1e-15);
}

TEST(Ks, KolmogorovSurvivalValues) {
  EXPECT_NEAR(stats::kolmogorov_survival(1.36), 0.0494, 5e-4);
  EXPECT_NEAR(stats::kolmogorov_survival(1.63), 0.0098, 3e-4);
  EXPECT_EQ(stats::kolmogorov_survival(0.0), 1.0);
}

TEST(Ks, NullCalibration) {
  int rejections = 0;
  for (std::uint64_t r = 0; r < 200; ++r) {
    if (stats::ks_two_sample(normals(100 + 2 * r, 500), normals(101 + 2 * r, 500)).p_value < 0.05) ++rejections;
  }
  EXPECT_LE(rejections, 20);
  EXPECT_GE(rejections, 2);
}

TEST(Factorization, IndependentColumnsStayWithinRadius) {
  const std::vector<std::pair<double, double>> zp = {{0.5, 0.5}, {1.0, -1.0}, {0.3, 1.2}, {2.0, 0.7}};
  int inside = 0;
  for (std::uint64_t r = 0; r < 100; ++r) {
    const auto res = stats::factorization_gap(normals(1000 + r, 2000), normals(5000 + r, 2000), zp);
    inside += res.gap < res.radius ? 1 : 0;
  }
  EXPECT_GE(inside, 99);
}

TEST(Factorization, DependentColumnsAreDetected) {
  const auto a = normals(9, 5000);
  const std::vector<std::pair<double, double>> zp = {{1.0, 1.0}};
  const auto res = stats::factorization_gap(a, a, zp);
  EXPECT_GT(res.gap, res.radius);
}

TEST(Summaries, Basic) {
  const std::vector<double> x = {1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(stats::mean(x), 2.5);
  EXPECT_DOUBLE_EQ(stats::variance(x), 5.0 / 3.0);
  EXPECT_DOUBLE_EQ(stats::median(x), 2.5);
  EXPECT_DOUBLE_EQ(stats::median({3, 1, 2}), 2.0);
  EXPECT_DOUBLE_EQ(stats::correlation(x, x), 1.0);
}

TEST(Reports, JsonShape) {
  const std::vector<stats::TestReport> r = {{"a", 0.5, 1.0, true}, {"b", 2.0, 1.0, false}};
  const auto j = nlohmann::json::parse(stats::to_json(r));
  ASSERT_EQ(j.size(), 2u);
  EXPECT_EQ(j[0]["test"], "a");
  EXPECT_EQ(j[1]["pass"], false);
  EXPECT_EQ(stats::to_json(r), stats::to_json(r));
}

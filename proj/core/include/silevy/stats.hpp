#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace silevy::stats {

inline constexpr double kDefaultRadiusConstant = 5.0;
inline constexpr std::size_t kMinKsSample = 500;

struct EcfEstimate {
  std::vector<double> z;
  std::vector<std::complex<double>> values;
  std::size_t n = 0;
  double c = kDefaultRadiusConstant;

  double radius() const;
  /// max_k |values[k] - target(z[k])|
  double max_deviation(const std::function<std::complex<double>(double)>& target) const;
};

/// (1/n) sum_k exp(i z x_k) at every z. Throws std::invalid_argument on an
/// empty sample.
EcfEstimate ecf(std::span<const double> samples, std::span<const double> zgrid,
                double c = kDefaultRadiusConstant);

/// (1/n) sum_k exp(i sum_j lambda_j x_kj) over rows x_k.
std::complex<double> joint_ecf(const std::vector<std::vector<double>>& rows, std::span<const double> lambdas);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Two-sided two-sample Kolmogorov-Smirnov test with the asymptotic p-value.
/// Both samples need at least kMinKsSample values.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Kolmogorov survival function Q(t) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 t^2).
double kolmogorov_survival(double t);

struct FactorizationResult {
  double gap = 0.0;     ///< max |phi12 - phi1 phi2| over the z pairs
  double radius = 0.0;  ///< 3 c / sqrt(n)
};

FactorizationResult factorization_gap(std::span<const double> a, std::span<const double> b,
                                      const std::vector<std::pair<double, double>>& zpairs,
                                      double c = kDefaultRadiusConstant);

double mean(std::span<const double> x);
/// Unbiased sample variance.
double variance(std::span<const double> x);
double covariance(std::span<const double> a, std::span<const double> b);
double correlation(std::span<const double> a, std::span<const double> b);
double median(std::vector<double> x);

/// Column j of a row-per-path table.
std::vector<double> column(const std::vector<std::vector<double>>& rows, std::size_t j);

struct TestReport {
  std::string test;
  double statistic = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

/// JSON array of {test, statistic, threshold, pass}, fixed key order.
std::string to_json(const std::vector<TestReport>& reports, int indent = 2);

}  // namespace silevy::stats

#include "silevy/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>

#include "json.hpp"

#include "silevy/batch.hpp"

namespace silevy {

unsigned default_threads() {
  if (const char* env = std::getenv("SILEVY_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

namespace stats {

double EcfEstimate::radius() const { return c / std::sqrt(static_cast<double>(n)); }

double EcfEstimate::max_deviation(const std::function<std::complex<double>(double)>& target) const {
  double worst = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) worst = std::max(worst, std::abs(values[k] - target(z[k])));
  return worst;
}

EcfEstimate ecf(std::span<const double> samples, std::span<const double> zgrid, double c) {
  if (samples.empty()) throw std::invalid_argument("ecf of an empty sample");
  EcfEstimate out;
  out.z.assign(zgrid.begin(), zgrid.end());
  out.n = samples.size();
  out.c = c;
  out.values.reserve(zgrid.size());
  const double inv = 1.0 / static_cast<double>(samples.size());
  for (double z : zgrid) {
    if (z == 0.0) {
      out.values.emplace_back(1.0, 0.0);
      continue;
    }
    double re = 0.0;
    double im = 0.0;
    for (double x : samples) {
      re += std::cos(z * x);
      im += std::sin(z * x);
    }
    out.values.emplace_back(re * inv, im * inv);
  }
  return out;
}

std::complex<double> joint_ecf(const std::vector<std::vector<double>>& rows, std::span<const double> lambdas) {
  if (rows.empty()) throw std::invalid_argument("joint ecf of an empty sample");
  double re = 0.0;
  double im = 0.0;
  for (const auto& row : rows) {
    if (row.size() < lambdas.size()) throw std::invalid_argument("row shorter than the lambda vector");
    double arg = 0.0;
    for (std::size_t j = 0; j < lambdas.size(); ++j) arg += lambdas[j] * row[j];
    re += std::cos(arg);
    im += std::sin(arg);
  }
  const double inv = 1.0 / static_cast<double>(rows.size());
  return {re * inv, im * inv};
}

double kolmogorov_survival(double t) {
  if (t <= 0.0) return 1.0;
  if (t < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * t * t);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.size() < kMinKsSample || b.size() < kMinKsSample) {
    throw std::invalid_argument("ks_two_sample needs at least " + std::to_string(kMinKsSample) +
                                " values per sample");
  }
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  const double ne = std::sqrt(nx * ny / (nx + ny));
  KsResult out;
  out.statistic = d;
  out.p_value = d == 0.0 ? 1.0 : kolmogorov_survival((ne + 0.12 + 0.11 / ne) * d);
  return out;
}

FactorizationResult factorization_gap(std::span<const double> a, std::span<const double> b,
                                      const std::vector<std::pair<double, double>>& zpairs, double c) {
  if (a.size() != b.size() || a.empty()) throw std::invalid_argument("factorization_gap needs paired samples");
  const double inv = 1.0 / static_cast<double>(a.size());
  FactorizationResult out;
  for (const auto& [z1, z2] : zpairs) {
    std::complex<double> p1 = 0.0;
    std::complex<double> p2 = 0.0;
    std::complex<double> p12 = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      p1 += std::polar(1.0, z1 * a[k]);
      p2 += std::polar(1.0, z2 * b[k]);
      p12 += std::polar(1.0, z1 * a[k] + z2 * b[k]);
    }
    out.gap = std::max(out.gap, std::abs(p12 * inv - (p1 * inv) * (p2 * inv)));
  }
  out.radius = 3.0 * c / std::sqrt(static_cast<double>(a.size()));
  return out;
}

double mean(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("mean of an empty sample");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double covariance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw std::invalid_argument("covariance needs paired samples");
  const double ma = mean(a);
  const double mb = mean(b);
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - ma) * (b[k] - mb);
  return s / static_cast<double>(a.size() - 1);
}

double variance(std::span<const double> x) { return covariance(x, x); }

double correlation(std::span<const double> a, std::span<const double> b) {
  const double va = variance(a);
  const double vb = variance(b);
  if (va == 0.0 || vb == 0.0) return 0.0;
  return covariance(a, b) / std::sqrt(va * vb);
}

double median(std::vector<double> x) {
  if (x.empty()) throw std::invalid_argument("median of an empty sample");
  const std::size_t mid = x.size() / 2;
  std::nth_element(x.begin(), x.begin() + static_cast<long>(mid), x.end());
  if (x.size() % 2 == 1) return x[mid];
  const double upper = x[mid];
  const double lower = *std::max_element(x.begin(), x.begin() + static_cast<long>(mid));
  return 0.5 * (lower + upper);
}

std::vector<double> column(const std::vector<std::vector<double>>& rows, std::size_t j) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.at(j));
  return out;
}

std::string to_json(const std::vector<TestReport>& reports, int indent) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    nlohmann::ordered_json o;
    o["test"] = r.test;
    o["statistic"] = r.statistic;
    o["threshold"] = r.threshold;
    o["pass"] = r.pass;
    arr.push_back(std::move(o));
  }
  return arr.dump(indent);
}

}  // namespace stats
}  // namespace silevy

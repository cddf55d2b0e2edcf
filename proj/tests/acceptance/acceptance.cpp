#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "silevy/batch.hpp"
#include "silevy/verify.hpp"

namespace {

struct Criterion {
  int number;
  std::string title;
  std::string suite;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "canonical representation", "canonical"},
      {2, "finite-dimensional distributions", "fdd"},
      {3, "m-stationarity", "stationarity"},
      {4, "representation independence and additivity", "representation"},
      {5, "flow projection", "flows"},
      {6, "Chapman-Kolmogorov and semilattice product", "chapman-kolmogorov"},
      {7, "semigroup of laws", "semigroup"},
      {8, "jump machinery", "jumps"},
      {9, "Levy-Ito decomposition", "levy-ito"},
      {10, "Gaussian pointwise continuity", "continuity"},
      {11, "determinism", "determinism"},
  };
  silevy::verify::Options o;
  o.seed = 42;
  o.threads = silevy::default_threads();
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    const auto r = silevy::verify::run_suite(c.suite, o);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (const auto& t : r.reports) {
      std::printf("    %-62s statistic=%-12.4g threshold=%-10.4g %s\n", t.test.c_str(), t.statistic, t.threshold,
                  t.pass ? "ok" : "FAILED");
    }
    std::printf("criterion %2d %-45s %s (%.1fs)\n", c.number, c.title.c_str(), r.passed() ? "PASS" : "FAIL", secs);
    std::fflush(stdout);
    failed += r.passed() ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

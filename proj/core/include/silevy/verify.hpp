#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "silevy/laws.hpp"
#include "silevy/rng.hpp"
#include "silevy/simulate.hpp"
#include "silevy/stats.hpp"

namespace silevy::verify {

struct Options {
  std::uint64_t seed = 42;
  unsigned threads = 1;
  /// Confidence radius constant for characteristic-function checks.
  double ecf_c = stats::kDefaultRadiusConstant;
  double kernel_tol = 1e-5;
};

struct SuiteResult {
  std::string suite;
  std::vector<stats::TestReport> reports;
  /// Informational entries; they do not affect passed().
  std::vector<stats::TestReport> details;

  bool passed() const;
  /// {"suite": ..., "pass": ..., "reports": [...], "details": [...]}
  std::string to_json() const;
};

struct NamedTriplet {
  std::string name;
  LevyTriplet triplet;
};

/// brownian, poisson, compound-normal, truncated-stable, jump-diffusion,
/// deterministic.
std::vector<NamedTriplet> shipped_triplets();
LevyTriplet shipped_triplet(const std::string& name);

/// Suite names in run order; "all" runs every one of them.
const std::vector<std::string>& suite_names();

/// Runs one suite. Throws ConfigError("suite", ...) for unknown names.
SuiteResult run_suite(const std::string& name, const Options& options);
/// Expands "all".
std::vector<SuiteResult> run(const std::string& name, const Options& options);

/// Random grid-aligned region of positive measure with up to three
/// subtracted rectangles.
IncrementRegion random_region(rng::Philox& gen, int level, std::size_t dim);

}  // namespace silevy::verify

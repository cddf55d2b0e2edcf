#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "silevy/indexing.hpp"
#include "silevy/laws.hpp"

namespace silevy {

struct ProcessSpec {
  LevyTriplet triplet;
  std::size_t dimension = 2;
  int level = 4;
  std::uint64_t seed = 0;

  void validate() const;
};

struct JumpAtom {
  Point location{};
  double mark = 0.0;
};

/// One realization: Gaussian white noise on the level-n cells plus a list of
/// jump atoms. Drift and compensation stay analytic and are added when a
/// region is evaluated. Immutable after construction.
class SamplePath {
 public:
  /// `gaussian_cells` must hold one value per level-n cell (row-major) or be
  /// empty for a path without Gaussian part.
  SamplePath(ProcessSpec spec, std::uint64_t path_id, std::vector<double> gaussian_cells,
             std::vector<JumpAtom> jumps);

  const ProcessSpec& spec() const { return spec_; }
  std::uint64_t path_id() const { return path_id_; }
  const DissectionLevel& grid() const { return grid_; }
  std::size_t dim() const { return spec_.dimension; }
  int level() const { return spec_.level; }

  double gaussian_cell(std::size_t index) const;
  bool has_gaussian() const { return !gaussian_.empty(); }
  const std::vector<JumpAtom>& jumps() const { return jumps_; }

  /// gamma, per unit measure.
  double drift_rate() const { return spec_.triplet.gamma; }
  /// Integral of x 1{|x| <= 1} against nu, per unit measure.
  double compensation_rate() const { return compensation_; }

  /// Sum of the random part (noise + marks) over cells below the grid corner
  /// with integer coordinates k (summed-area table lookup).
  double random_sum(std::span<const std::size_t> corner_units) const;
  /// Noise plus marks inside one level-n cell.
  double cell_random(std::size_t index) const { return cell_total_[index]; }

 private:
  void build_tables();

  ProcessSpec spec_;
  std::uint64_t path_id_;
  DissectionLevel grid_;
  std::vector<double> gaussian_;
  std::vector<JumpAtom> jumps_;
  double compensation_;
  std::vector<double> cell_total_;
  std::vector<double> prefix_;
};

/// Samples path `path_id` of the batch defined by spec.seed. Deterministic in
/// (seed, path_id) and independent of any other path.
SamplePath sample_path(const ProcessSpec& spec, std::uint64_t path_id = 0);

/// Increment over an aligned region by direct cell summation.
/// Throws AlignmentError for non-aligned regions.
double evaluate(const SamplePath& path, const IncrementRegion& region);

/// X_U for an aligned rectangle from the summed-area table.
double evaluate(const SamplePath& path, const RectSet& set);

/// The same increment by inclusion-exclusion over corner values
/// X_{u0 ∩ U_i1 ∩ ... ∩ U_ik}.
double evaluate_inclusion_exclusion(const SamplePath& path, const IncrementRegion& region);

/// X over a finite union of aligned rectangles (inclusion-exclusion).
double evaluate_union(const SamplePath& path, std::span<const RectSet> sets);

struct ApproximateValue {
  double value = 0.0;
  double measure_gap = 0.0;
};

/// Evaluation of an arbitrary region through its grid alignment.
ApproximateValue evaluate_approx(const SamplePath& path, const IncrementRegion& region);

/// Joint characteristic function E[exp(i sum_j lambda_j dX_{C_j})] from the
/// overlap atoms of the regions.
std::complex<double> fdd_char(const ProcessSpec& spec, std::span<const IncrementRegion> regions,
                              std::span<const double> lambdas);

/// Increments of `regions` on paths [first_path, first_path + paths), row per
/// path. Runs on `threads` workers; the result does not depend on threads.
std::vector<std::vector<double>> simulate_increments(const ProcessSpec& spec,
                                                     std::span<const IncrementRegion> regions,
                                                     std::size_t paths, unsigned threads = 1,
                                                     std::uint64_t first_path = 0);

}  // namespace silevy

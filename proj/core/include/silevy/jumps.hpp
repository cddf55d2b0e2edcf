#pragma once

#include <cstddef>
#include <vector>

#include "silevy/indexing.hpp"
#include "silevy/laws.hpp"
#include "silevy/simulate.hpp"

namespace silevy {

struct JumpRecord {
  Point location{};  ///< centre of the detecting cell
  double mark = 0.0;
  int detection_level = 0;
};

/// dX over the level-`level` dyadic cell with the given row-major index.
/// Above the stored level the Gaussian part is refined by conditional
/// splitting: a cell value g of measure v splits into 2^N children that sum
/// to g and have variance sigma^2 v / 2^N each. The split of a cell depends
/// only on (seed, path id, level, cell index), so every query agrees.
double cell_increment(const SamplePath& path, int level, std::size_t cell);

/// All cell increments at `level`, row-major.
std::vector<double> level_increments(const SamplePath& path, int level);

/// dX over the level-nmax cell containing t.
double point_mass_jump(const SamplePath& path, const Point& t, int nmax);

/// Exact N_U(B) and X^B_U from the atom list. Throws UnsupportedError when
/// the closure of B contains 0.
std::size_t count_jumps(const SamplePath& path, const RectSet& u, const MarkSet& b);
double partial_sum(const SamplePath& path, const RectSet& u, const MarkSet& b);

struct ScanEstimate {
  std::size_t count = 0;
  double sum = 0.0;
};

/// The same quantities recovered from level-n cell increments inside U (U
/// aligned at `level`): every cell whose increment minus its deterministic
/// part lies in B counts as one jump.
ScanEstimate scan_jumps(const SamplePath& path, const RectSet& u, const MarkSet& b, int level);

/// Cells whose increment minus the deterministic part exceeds `threshold` in
/// absolute value, in row-major order.
std::vector<JumpRecord> extract_jumps(const SamplePath& path, int level, double threshold);

/// The Levy-Ito parts of one path.
///   X0_U     = gamma m(U) + Gaussian part of U
///   X1_U(e)  = sum_{|x|>e} x  -  m(U) * integral_{e<|x|<=1} x nu(dx)
/// so that X0 + X1(e) = X when e is at or below the smallest mark.
class LevyItoDecomposition {
 public:
  explicit LevyItoDecomposition(const SamplePath& path);

  double gaussian_part(const RectSet& u) const;
  /// Throws UnsupportedError when eps is below the truncation of the spec.
  double jump_part(const RectSet& u, double eps) const;

 private:
  const SamplePath& path_;
};

struct LevyItoReport {
  std::vector<double> epsilons;
  /// max over the dyadic family of |X1_U(eps) - X1_U(eps_final)|
  std::vector<double> tail_curve;
  /// max over the family of |X0_U + X1_U(eps_final) - X_U|
  double reconstruction_error = 0.0;
  std::size_t jump_count = 0;
};

/// Decomposes the path over the family of aligned rectangles [0, k 2^-L],
/// L = min(family_level, path level). `epsilons` must be decreasing.
LevyItoReport levy_ito_decompose(const SamplePath& path, const std::vector<double>& epsilons,
                                 int family_level = 3);

/// S_n = max over level-n cells of |dX_cell| for each requested level.
std::vector<double> gaussian_sup_diagnostic(const SamplePath& path, const std::vector<int>& levels);

}  // namespace silevy

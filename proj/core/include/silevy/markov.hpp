#pragma once

#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <vector>

#include "silevy/indexing.hpp"
#include "silevy/laws.hpp"

namespace silevy {

/// GridLaw with cumulative masses, for O(log n) interval probabilities under
/// the same cell-spreading convention as GridLaw::probability.
class CumulativeLaw {
 public:
  explicit CumulativeLaw(GridLaw law);

  const GridLaw& law() const { return law_; }
  double cdf(double x) const;
  double probability(const Interval& iv) const;
  double probability(const MarkSet& set) const;

 private:
  GridLaw law_;
  std::vector<double> cumulative_;  // cumulative_[j] = mass of nodes < j
};

/// Memoized mu^v keyed by the volume. Safe under concurrent use.
class LawCache {
 public:
  LawCache(LevyTriplet triplet, GridParams grid);

  std::shared_ptr<const CumulativeLaw> get(double volume) const;
  std::size_t size() const;

 private:
  LevyTriplet triplet_;
  GridParams grid_;
  mutable std::shared_mutex mutex_;
  mutable std::map<double, std::shared_ptr<const CumulativeLaw>> laws_;
};

/// Volume-parameterized kernel Q_v(x, B) = mu^v(B - x) of a Levy process.
class TransitionKernel {
 public:
  /// The grid defaults to default_grid(triplet, 1), which covers every
  /// volume of a subset of [0,1]^N.
  explicit TransitionKernel(LevyTriplet triplet, std::optional<GridParams> grid = {});

  const LevyTriplet& triplet() const { return triplet_; }
  const GridParams& grid() const { return grid_; }

  std::shared_ptr<const CumulativeLaw> law(double volume) const;

 private:
  LevyTriplet triplet_;
  GridParams grid_;
  std::shared_ptr<LawCache> cache_;
};

/// mu^v(B - x). Volume 0 is exactly 1{x in B}.
double kernel_eval(const TransitionKernel& kernel, double v, double x, const MarkSet& b);
double kernel_eval(const TransitionKernel& kernel, double v, double x, const Interval& b);

struct ChapmanKolmogorovResult {
  /// max over half-lines and single cells B of |composed(B) - Q_{v1+v2}(0, B)|
  double max_error = 0.0;
  double total_variation = 0.0;
};

/// Composes Q_{v1} and Q_{v2} by discrete convolution and compares with
/// Q_{v1+v2}.
ChapmanKolmogorovResult chapman_kolmogorov_check(const TransitionKernel& kernel, double v1, double v2);

/// Joint law of the left-neighbourhood increments of a finite semilattice,
/// binned into a product of intervals.
struct SemilatticeLaw {
  std::vector<RectSet> elements;
  std::vector<IncrementRegion> neighbourhoods;  ///< L_i = A_i minus earlier A_j
  std::vector<double> volumes;                  ///< m(L_i)
  /// Indices i with m(L_i) > 0; the other increments are 0 almost surely.
  std::vector<std::size_t> active;
  /// Bin edges for each active coordinate; bin k is (edges[k-1], edges[k]]
  /// with edges[-1] = -inf and edges[K-1] = +inf.
  std::vector<std::vector<double>> edges;
  /// Row-major over the active coordinates (last fastest).
  std::vector<double> chain;
  std::vector<double> product;

  /// Half the L1 distance between the chain and product tables.
  double total_variation() const;
};

/// Checks that `elements` is intersection-closed, starts with the minimal
/// set and is consistently ordered; throws ConsistencyError naming the
/// offending pair otherwise.
void check_semilattice(const std::vector<RectSet>& elements);

/// Assembles the joint law of (dX_{L_0}, ..., dX_{L_m}) through the chain of
/// kernels on the accumulated unions, alongside the product of independent
/// mu^{m(L_i)}. `bins` intervals per active coordinate are cut at quantiles
/// of the marginal law.
SemilatticeLaw semilattice_fdd(const TransitionKernel& kernel, const std::vector<RectSet>& elements,
                               std::size_t bins = 4);

}  // namespace silevy

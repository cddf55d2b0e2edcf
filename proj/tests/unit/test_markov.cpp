#include <gtest/gtest.h>

#include <cmath>
#include <thread>

#include "helpers.hpp"
#include "silevy/error.hpp"
#include "silevy/markov.hpp"
#include "silevy/simulate.hpp"
#include "silevy/stats.hpp"

using namespace silevy;

namespace {

LevyTriplet poisson_one() { return LevyTriplet::compound_poisson(1.0, MarkDistribution::point(1.0)); }

RectSet R(double x, double y) { return RectSet{x, y}; }

}  // namespace

TEST(KernelEval, VolumeZeroIsDelta) {
  const TransitionKernel k(LevyTriplet::gaussian(1.0));
  EXPECT_EQ(kernel_eval(k, 0.0, 0.3, Interval::closed(0, 1)), 1.0);
  EXPECT_EQ(kernel_eval(k, 0.0, 1.3, Interval::closed(0, 1)), 0.0);
  EXPECT_EQ(kernel_eval(k, 0.0, 1.0, Interval::left_open(0, 1)), 1.0);
  EXPECT_EQ(kernel_eval(k, 0.0, 0.0, Interval::left_open(0, 1)), 0.0);
}

TEST(KernelEval, GaussianHalfLine) {
  const TransitionKernel k(LevyTriplet::gaussian(1.0));
  EXPECT_NEAR(kernel_eval(k, 1.0, 0.0, Interval::left_open(-INFINITY, 0.0)), 0.5, 1e-4);
}

TEST(KernelEval, PoissonAtomAtZero) {
  const TransitionKernel k(poisson_one());
  const double h = k.grid().step;
  EXPECT_NEAR(kernel_eval(k, 1.0, 0.0, Interval::open(-0.5 * h, 0.5 * h)), std::exp(-1.0), 1e-4);
}

TEST(KernelEval, SpatialHomogeneity) {
  const TransitionKernel k(LevyTriplet::compound_poisson(2.0, MarkDistribution::normal(0.0, 1.0), 0.0, 0.3));
  for (double x : {-1.0, 0.25, 2.0}) {
    for (const auto& b : {Interval::closed(-0.5, 0.7), Interval::open(1.0, 3.0)}) {
      const Interval shifted{b.lo - x, b.hi - x, b.lo_closed, b.hi_closed};
      EXPECT_NEAR(kernel_eval(k, 0.6, x, b), kernel_eval(k, 0.6, 0.0, shifted), 1e-12);
    }
  }
}

TEST(KernelEval, MemoizedLawsAreShared) {
  const TransitionKernel k(LevyTriplet::gaussian(1.0));
  EXPECT_EQ(k.law(0.4).get(), k.law(0.4).get());
  std::vector<std::thread> pool;
  std::vector<double> seen(8);
  for (int i = 0; i < 8; ++i) {
    pool.emplace_back([&, i] { seen[i] = k.law(0.1 * (i % 3 + 1))->cdf(0.0); });
  }
  for (auto& t : pool) t.join();
  for (double v : seen) EXPECT_NEAR(v, 0.5, 1e-6);
}

TEST(ChapmanKolmogorov, ZeroVolumeIsExact) {
  const TransitionKernel k(LevyTriplet::gaussian(1.0));
  EXPECT_LT(chapman_kolmogorov_check(k, 0.0, 1.0).max_error, 1e-14);
}

TEST(ChapmanKolmogorov, GaussianHalves) {
  const TransitionKernel k(LevyTriplet::gaussian(1.0));
  EXPECT_LT(chapman_kolmogorov_check(k, 0.5, 0.5).max_error, 1e-5);
}

TEST(ChapmanKolmogorov, PoissonSplit) {
  const TransitionKernel k(poisson_one());
  EXPECT_LT(chapman_kolmogorov_check(k, 0.3, 0.7).max_error, 1e-5);
}

TEST(Semilattice, SingleNeighbourhood) {
  const TransitionKernel k(LevyTriplet::gaussian(1.0));
  const auto law = semilattice_fdd(k, {RectSet::minimal(2), R(0.5, 1)});
  ASSERT_EQ(law.volumes.size(), 2u);
  EXPECT_EQ(law.volumes[0], 0.0);
  EXPECT_DOUBLE_EQ(law.volumes[1], 0.5);
  ASSERT_EQ(law.active.size(), 1u);
  const auto& e = law.edges[0];
  const auto marginal = k.law(0.5);
  double prev = 0.0;
  for (std::size_t b = 0; b < law.product.size(); ++b) {
    const double hi = b + 1 < law.product.size() ? marginal->cdf(e[b]) : 1.0;
    EXPECT_NEAR(law.product[b], hi - prev, 1e-12);
    prev = hi;
  }
  EXPECT_LT(law.total_variation(), 1e-12);
}

TEST(Semilattice, NestedPairIsIndependent) {
  const TransitionKernel k(poisson_one());
  const auto law = semilattice_fdd(k, {RectSet::minimal(2), R(0.5, 0.5), R(1, 1)});
  EXPECT_DOUBLE_EQ(law.volumes[1], 0.25);
  EXPECT_DOUBLE_EQ(law.volumes[2], 0.75);
  EXPECT_LT(law.total_variation(), 1e-5);
}

TEST(Semilattice, CrossingPairProductCollapse) {
  for (const auto& t : {LevyTriplet::gaussian(1.0), poisson_one()}) {
    const TransitionKernel k(t);
    const auto law = semilattice_fdd(k, {RectSet::minimal(2), R(0.5, 0.5), R(1, 0.5), R(0.5, 1)});
    EXPECT_EQ(law.active.size(), 3u);
    EXPECT_LT(law.total_variation(), 1e-5);
  }
}

TEST(Semilattice, OrderingIndependence) {
  const TransitionKernel k(LevyTriplet::compound_poisson(1.0, MarkDistribution::normal(0.0, 1.0), 0.0, 0.5));
  const auto a = semilattice_fdd(k, {RectSet::minimal(2), R(0.5, 0.5), R(1, 0.5), R(0.5, 1), R(1, 1)});
  const auto b = semilattice_fdd(k, {RectSet::minimal(2), R(0.5, 0.5), R(0.5, 1), R(1, 0.5), R(1, 1)});
  // Swap the two middle coordinates of b to compare tables on the same axes.
  ASSERT_EQ(a.active.size(), 4u);
  ASSERT_EQ(a.chain.size(), b.chain.size());
  const std::size_t k4 = a.edges[0].size();
  double tv = 0.0;
  for (std::size_t i0 = 0; i0 < k4; ++i0)
    for (std::size_t i1 = 0; i1 < k4; ++i1)
      for (std::size_t i2 = 0; i2 < k4; ++i2)
        for (std::size_t i3 = 0; i3 < k4; ++i3) {
          const std::size_t ia = ((i0 * k4 + i1) * k4 + i2) * k4 + i3;
          const std::size_t ib = ((i0 * k4 + i2) * k4 + i1) * k4 + i3;
          tv += std::abs(a.chain[ia] - b.chain[ib]);
        }
  EXPECT_LT(0.5 * tv, 1e-6);
}

TEST(Semilattice, ConsistencyErrorsNameThePair) {
  const TransitionKernel k(LevyTriplet::gaussian(1.0));
  try {
    semilattice_fdd(k, {RectSet::minimal(2), R(1, 1), R(0.5, 0.5)});
    FAIL();
  } catch (const ConsistencyError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("0.5"), std::string::npos) << msg;
  }
  EXPECT_THROW(semilattice_fdd(k, {RectSet::minimal(2), R(1, 0.5), R(0.5, 1)}), ConsistencyError);
  EXPECT_THROW(semilattice_fdd(k, {R(0.5, 0.5), R(1, 1)}), ConsistencyError);
  EXPECT_THROW(semilattice_fdd(k, {}), ConsistencyError);
}

TEST(QMarkov, ConditionalLawMatchesKernel) {
  // U = [0, 1/2] inside V = [0, 1] in N = 1; dX_V given dX_U = x is x + mu^{1/2}.
  const auto t = LevyTriplet::compound_poisson(1.0, MarkDistribution::normal(0.0, 1.0), 0.0, 0.5);
  const auto s = testing_support::spec(t, 1, 1, 91);
  const std::vector<IncrementRegion> r = {IncrementRegion(RectSet{0.5}), IncrementRegion(RectSet{1.0})};
  const auto rows = simulate_increments(s, r, 100000);
  const TransitionKernel k(t);
  const std::vector<double> xedges = {-0.5, 0.0, 0.5};
  const std::vector<double> yedges = {-1.0, 0.0, 1.0};
  for (std::size_t bx = 0; bx <= xedges.size(); ++bx) {
    const double lo = bx == 0 ? -INFINITY : xedges[bx - 1];
    const double hi = bx == xedges.size() ? INFINITY : xedges[bx];
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& row : rows) {
      if (row[0] > lo && row[0] <= hi) {
        xs.push_back(row[0]);
        ys.push_back(row[1]);
      }
    }
    ASSERT_GT(xs.size(), 1000u);
    for (std::size_t by = 0; by <= yedges.size(); ++by) {
      const double ylo = by == 0 ? -INFINITY : yedges[by - 1];
      const double yhi = by == yedges.size() ? INFINITY : yedges[by];
      double empirical = 0.0;
      double predicted = 0.0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        empirical += (ys[i] > ylo && ys[i] <= yhi) ? 1.0 : 0.0;
        predicted += kernel_eval(k, 0.5, xs[i], Interval::left_open(ylo, yhi));
      }
      const double n = static_cast<double>(xs.size());
      EXPECT_NEAR(empirical / n, predicted / n, 5.0 / std::sqrt(n));
    }
  }
}

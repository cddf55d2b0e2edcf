#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"
#include "silevy/error.hpp"
#include "silevy/jumps.hpp"
#include "silevy/stats.hpp"
#include "silevy/verify.hpp"

using namespace silevy;
using testing_support::spec;

namespace {

const double kInf = INFINITY;

SamplePath planted(std::vector<JumpAtom> atoms, double rate = 1.0, double sigma = 0.0, int level = 3) {
  auto t = LevyTriplet::compound_poisson(rate, MarkDistribution::two_point(-0.5, 2.0, 0.5), 0.0, sigma);
  auto s = spec(t, 2, level, 1);
  std::vector<double> g;
  if (sigma > 0.0) g.assign(DissectionLevel(level, 2).cell_count(), 0.0);
  return SamplePath(s, 0, g, std::move(atoms));
}

}  // namespace

TEST(PointMassJump, GaussianRmsDecay) {
  const auto s = spec(LevyTriplet::gaussian(1.0), 2, 4, 5);
  std::vector<double> sq;
  rng::Philox g(2, 2);
  for (std::uint64_t p = 0; p < 4000; ++p) {
    const Point t{g.uniform01(), g.uniform01(), 0.0};
    const double j = point_mass_jump(sample_path(s, p), t, 8);
    sq.push_back(j * j);
  }
  const double oracle = std::pow(4.0, -8.0);
  EXPECT_NEAR(stats::mean(sq), oracle, 3.0 * std::sqrt(stats::variance(sq) / sq.size()));
  EXPECT_NEAR(std::sqrt(oracle), 1.0 / 256.0, 1e-18);
}

TEST(PointMassJump, AtomInsideShrinkingCells) {
  const auto path = planted({{Point{0.25, 0.25, 0}, 2.0}}, 1.0);
  const double comp = path.spec().triplet.net_drift();
  for (int n : {3, 6, 10}) {
    EXPECT_NEAR(point_mass_jump(path, Point{0.25, 0.25, 0}, n), 2.0 + comp * std::pow(4.0, -n), 1e-15);
  }
}

TEST(PointMassJump, AwayFromAtomsOnlyDrift) {
  const auto path = planted({{Point{0.25, 0.25, 0}, 2.0}}, 1.0);
  const double rate = 1.0;
  for (int n : {3, 8}) EXPECT_LE(std::abs(point_mass_jump(path, Point{0.9, 0.1, 0}, n)), rate * std::pow(4.0, -n));
}

TEST(CellIncrement, RefinementIsConsistent) {
  const auto s = spec(verify::shipped_triplet("jump-diffusion"), 2, 3, 14);
  const auto path = sample_path(s, 3);
  for (int level = 3; level <= 6; ++level) {
    const auto fine = level_increments(path, level + 1);
    const auto coarse = level_increments(path, level);
    const DissectionLevel g(level, 2);
    const DissectionLevel h(level + 1, 2);
    std::vector<double> sums(coarse.size(), 0.0);
    for (std::size_t i = 0; i < fine.size(); ++i) {
      Point c = h.cell_lower(i);
      sums[g.cell_index(c)] += fine[i];
    }
    for (std::size_t i = 0; i < coarse.size(); ++i) EXPECT_NEAR(sums[i], coarse[i], 1e-12);
    EXPECT_EQ(cell_increment(path, level + 1, 5), fine[5]);
  }
  double total = 0.0;
  for (double v : level_increments(path, 2)) total += v;
  EXPECT_NEAR(total, evaluate(path, RectSet{1, 1}), 1e-12);
}

TEST(CountJumps, NoAtoms) {
  const auto path = planted({});
  EXPECT_EQ(count_jumps(path, RectSet{1, 1}, {Interval::open(0.1, kInf)}), 0u);
  EXPECT_EQ(partial_sum(path, RectSet{1, 1}, {Interval::open(0.1, kInf)}), 0.0);
}

TEST(CountJumps, Enumeration) {
  const auto path = planted({{Point{0.2, 0.3, 0}, 2.0}, {Point{0.7, 0.9, 0}, -0.5}});
  const MarkSet b = {Interval::open(1.0, kInf)};
  EXPECT_EQ(count_jumps(path, RectSet{0.5, 0.5}, b), 1u);
  EXPECT_EQ(partial_sum(path, RectSet{0.5, 0.5}, b), 2.0);
  const MarkSet both = {Interval::open(-kInf, -0.25), Interval::open(0.25, kInf)};
  EXPECT_EQ(count_jumps(path, RectSet{1, 1}, both), 2u);
  EXPECT_EQ(partial_sum(path, RectSet{1, 1}, both), 1.5);
  const auto scan = scan_jumps(path, RectSet{1, 1}, both, 3);
  EXPECT_EQ(scan.count, 2u);
  EXPECT_NEAR(scan.sum, 1.5, 1e-12);
}

TEST(CountJumps, SetTouchingZeroIsUnsupported) {
  const auto path = planted({});
  EXPECT_THROW(count_jumps(path, RectSet{1, 1}, {Interval::open(0.0, 1.0)}), UnsupportedError);
  EXPECT_THROW(partial_sum(path, RectSet{1, 1}, {Interval::closed(-1.0, 1.0)}), UnsupportedError);
}

TEST(CountJumps, MeanMeasure) {
  const auto s = spec(LevyTriplet::compound_poisson(2.0, MarkDistribution::point(1.0)), 2, 1, 41);
  std::vector<double> n;
  for (std::uint64_t p = 0; p < 10000; ++p) {
    n.push_back(static_cast<double>(count_jumps(sample_path(s, p), RectSet{0.5, 0.5}, {Interval::open(0.5, kInf)})));
  }
  EXPECT_NEAR(stats::mean(n), 0.5, 3.0 * std::sqrt(stats::variance(n) / n.size()));
}

TEST(CountJumps, CompoundPoissonLawOfPartialSum) {
  const auto t = verify::shipped_triplet("compound-normal");
  const auto s = spec(t, 2, 1, 42);
  const MarkSet b = {Interval::open(0.5, kInf)};
  const RectSet u{1, 0.5};
  std::vector<double> x;
  for (std::uint64_t p = 0; p < 10000; ++p) x.push_back(partial_sum(sample_path(s, p), u, b));
  std::vector<double> z;
  for (int k = 1; k <= 16; ++k) z.push_back(0.25 * k);
  const auto e = stats::ecf(x, z);
  const double dev = e.max_deviation([&](double zz) { return std::exp(u.measure() * t.nu.restricted_integral(zz, b)); });
  EXPECT_LT(dev, e.radius());
}

TEST(ExtractJumps, RecoversPlantedAtoms) {
  const auto t = verify::shipped_triplet("jump-diffusion");
  const auto s = spec(t, 2, 8, 7);
  const DissectionLevel grid(8, 2);
  for (std::uint64_t p = 0; p < 20; ++p) {
    const auto path = sample_path(s, p);
    const auto found = extract_jumps(path, 8, 0.5 * t.nu.min_abs_jump());
    ASSERT_EQ(found.size(), path.jumps().size());
    for (const auto& r : found) {
      bool matched = false;
      for (const auto& j : path.jumps()) {
        if (grid.cell_index(j.location) == grid.cell_index(r.location)) {
          matched = std::abs(j.mark - r.mark) <= 4.0 * t.sigma / 256.0;
        }
      }
      EXPECT_TRUE(matched);
      EXPECT_EQ(r.detection_level, 8);
    }
  }
}

TEST(LevyIto, NoJumpMeasure) {
  const auto path = sample_path(spec(LevyTriplet::gaussian(1.0, 0.4), 2, 3, 2), 0);
  const LevyItoDecomposition d(path);
  EXPECT_EQ(d.jump_part(RectSet{1, 1}, 0.1), 0.0);
  EXPECT_NEAR(d.gaussian_part(RectSet{0.5, 1}), evaluate(path, RectSet{0.5, 1}), 1e-12);
  EXPECT_LT(levy_ito_decompose(path, {0.1, 0.01}).reconstruction_error, 1e-12);
}

TEST(LevyIto, LargeMarksNeedNoCompensation) {
  const auto t = LevyTriplet::compound_poisson(3.0, MarkDistribution::two_point(-1.5, 2.0, 0.5));
  const auto path = sample_path(spec(t, 2, 3, 3), 1);
  const LevyItoDecomposition d(path);
  const MarkSet big = {Interval::open(-kInf, -1.0), Interval::open(1.0, kInf)};
  for (const auto& u : {RectSet{1, 1}, RectSet{0.5, 0.75}}) {
    EXPECT_NEAR(d.jump_part(u, 0.5), partial_sum(path, u, big), 1e-12);
  }
}

TEST(LevyIto, ReconstructionOnFiniteActivity) {
  for (const char* name : {"poisson", "compound-normal", "jump-diffusion"}) {
    const auto s = spec(verify::shipped_triplet(name), 2, 4, 5);
    for (std::uint64_t p = 0; p < 5; ++p) {
      const auto r = levy_ito_decompose(sample_path(s, p), {0.1, 0.01, 0.001});
      EXPECT_LE(r.reconstruction_error, 1e-12) << name;
    }
  }
}

TEST(LevyIto, TailCurveDecreases) {
  TruncatedStable ts;
  ts.alpha = 1.5;
  ts.scale = 0.1;
  ts.epsilon = 1e-3;
  ts.cutoff = 10.0;
  const auto s = spec(LevyTriplet::truncated_stable(ts), 2, 4, 6);
  std::vector<double> mean(3, 0.0);
  for (std::uint64_t p = 0; p < 32; ++p) {
    const auto r = levy_ito_decompose(sample_path(s, p), {0.1, 0.01, 0.001});
    EXPECT_LE(r.reconstruction_error, 1e-12);
    for (int i = 0; i < 3; ++i) mean[i] += r.tail_curve[i];
  }
  EXPECT_GT(mean[0], mean[1]);
  EXPECT_GT(mean[1], mean[2]);
}

TEST(LevyIto, BelowTruncationIsUnsupported) {
  TruncatedStable ts;
  ts.epsilon = 0.01;
  const auto path = sample_path(spec(LevyTriplet::truncated_stable(ts), 2, 2, 1), 0);
  EXPECT_THROW(LevyItoDecomposition(path).jump_part(RectSet{1, 1}, 0.001), UnsupportedError);
  EXPECT_THROW(levy_ito_decompose(path, {0.1, 0.001}), UnsupportedError);
}

TEST(GaussianSup, NullAndDrift) {
  const auto null = sample_path(spec(LevyTriplet::deterministic(0.0), 2, 3, 1), 0);
  for (double v : gaussian_sup_diagnostic(null, {3, 5, 7})) EXPECT_EQ(v, 0.0);
  const auto drift = sample_path(spec(LevyTriplet::deterministic(1.0), 2, 3, 1), 0);
  const auto s = gaussian_sup_diagnostic(drift, {3, 5, 7});
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(s[i], std::pow(4.0, -(3 + 2 * i)), 1e-17);
}

TEST(GaussianSup, MedianDecreasesAndTracksMaxOracle) {
  const auto s = spec(LevyTriplet::gaussian(1.0), 2, 8, 12);
  const std::vector<int> levels = {3, 4, 5, 6, 7, 8};
  std::vector<std::vector<double>> rows;
  for (std::uint64_t p = 0; p < 200; ++p) rows.push_back(gaussian_sup_diagnostic(sample_path(s, p), levels));
  double prev = INFINITY;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const double med = stats::median(stats::column(rows, k));
    const double n = levels[k];
    const double oracle = std::sqrt(2.0 * std::pow(4.0, -n) * std::log(std::pow(4.0, n)));
    EXPECT_LT(med, prev);
    EXPECT_NEAR(med / oracle, 1.0, 0.35);
    prev = med;
  }
}

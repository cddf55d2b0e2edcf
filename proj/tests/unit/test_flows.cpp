#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"
#include "silevy/error.hpp"
#include "silevy/flows.hpp"
#include "silevy/stats.hpp"
#include "silevy/verify.hpp"

using namespace silevy;
using testing_support::spec;

TEST(Theta, DiagonalIsSquare) {
  const SimpleFlow f(ElementaryFlow::diagonal(2));
  EXPECT_NEAR(theta(f, 0.3), 0.09, 1e-15);
  EXPECT_NEAR(theta_inverse(f, 0.25), 0.5, 1e-12);
}

TEST(Theta, LineIsIdentity) {
  const SimpleFlow f(ElementaryFlow::diagonal(1));
  for (double t : {0.0, 0.2, 0.77, 1.0}) {
    EXPECT_NEAR(theta(f, t), t, 1e-15);
    EXPECT_NEAR(theta_inverse(f, t), t, 1e-12);
  }
}

TEST(Theta, PolylineAgainstPiecewiseAreas) {
  // (0,0) -> (0.5,1) -> (1,1) on knots 0, 1/2, 1: corner (t, 2t) then (t, 1).
  const SimpleFlow f(ElementaryFlow::polyline(2, {Point{0, 0}, Point{0.5, 1}, Point{1, 1}}));
  auto oracle_inverse = [](double s) { return s <= 0.5 ? std::sqrt(s / 2.0) : s; };
  for (double s : {0.02, 0.18, 0.5, 0.6, 0.93}) {
    EXPECT_NEAR(theta_inverse(f, s), oracle_inverse(s), 1e-10);
    EXPECT_NEAR(theta(f, theta_inverse(f, s)), s, 1e-10);
  }
}

TEST(Theta, FlatStretchUsesLeftmostParameter) {
  // Grows along the measure-zero axis first, then fills the square.
  const SimpleFlow f(ElementaryFlow::polyline(2, {Point{0, 0}, Point{1, 0}, Point{1, 1}}));
  EXPECT_EQ(theta(f, 0.4), 0.0);
  EXPECT_NEAR(theta_inverse(f, 0.0), 0.0, 1e-12);
  EXPECT_NEAR(theta_inverse(f, 0.5), 0.75, 1e-10);
}

TEST(Theta, OutOfRangeThrows) {
  const SimpleFlow f(ElementaryFlow::diagonal(2));
  EXPECT_THROW(theta_inverse(f, 1.5), RangeError);
  EXPECT_THROW(theta_inverse(f, -0.1), RangeError);
}

TEST(Flows, MonotoneAndContinuous) {
  for (const auto& sf : shipped_flows()) {
    EXPECT_LE(max_backward_step(sf.flow), 1e-12) << sf.name;
    double prev = -1.0;
    for (int k = 0; k <= 100; ++k) {
      const double t = sf.flow.start() + (sf.flow.end() - sf.flow.start()) * k / 100.0;
      const double th = theta(sf.flow, t);
      EXPECT_GE(th, prev - 1e-15);
      prev = th;
    }
  }
}

TEST(Flows, InvalidFlowsRejected) {
  EXPECT_THROW(ElementaryFlow(2, {Point{0.5, 0.5}, Point{0.2, 1}}, {0, 1}), std::invalid_argument);
  EXPECT_THROW(ElementaryFlow(2, {Point{0, 0}, Point{1, 1}}, {1, 0}), std::invalid_argument);
  EXPECT_THROW(ElementaryFlow(2, {Point{0, 0}}, {0}), std::invalid_argument);
  const ElementaryFlow a = ElementaryFlow::polyline(2, {Point{0, 0}, Point{0.5, 0.5}});
  ElementaryFlow far(2, {Point{0.9, 0.9}, Point{1, 1}}, {1, 2});
  EXPECT_THROW(SimpleFlow({a, far}), std::invalid_argument);
}

TEST(Project, StartsAtZeroWhenFlowStartsAtMinimalSet) {
  const auto path = sample_path(spec(verify::shipped_triplet("jump-diffusion"), 2, 3, 1), 0);
  const auto tr = project(path, shipped_flows()[0].flow, {0.0, 0.5, 1.0});
  EXPECT_EQ(tr.values[0], 0.0);
}

TEST(Project, DeterministicProcessIsLinear) {
  const auto path = sample_path(spec(LevyTriplet::deterministic(1.7), 2, 3, 1), 0);
  for (const auto& sf : shipped_flows()) {
    const auto tr = project(path, sf.flow, sf.mesh);
    for (std::size_t k = 0; k < sf.mesh.size(); ++k) EXPECT_NEAR(tr.values[k], 1.7 * sf.mesh[k], 1e-12) << sf.name;
    EXPECT_EQ(tr.max_gap, 0.0);
  }
}

TEST(Project, ReparametrizationInvariance) {
  const ElementaryFlow f = ElementaryFlow::polyline(2, {Point{0, 0}, Point{0.5, 1}, Point{1, 1}});
  const ElementaryFlow g = f.reparametrized({0.0, 0.1, 3.0});
  const auto path = sample_path(spec(verify::shipped_triplet("jump-diffusion"), 2, 3, 4), 5);
  const std::vector<double> mesh = {0.0, 0.25, 0.5, 0.75, 1.0};
  const auto a = project(path, SimpleFlow(f), mesh);
  const auto b = project(path, SimpleFlow(g), mesh);
  for (std::size_t k = 0; k < mesh.size(); ++k) EXPECT_NEAR(a.values[k], b.values[k], 1e-12);
}

TEST(Project, BrownianDiagonalIncrementVariance) {
  const auto flows = shipped_flows();
  const auto& diag = flows[2];
  ASSERT_EQ(diag.name, "diagonal");
  const auto inc = projected_increments(spec(LevyTriplet::gaussian(1.0), 2, 3, 17), diag.flow, diag.mesh, 10000);
  for (std::size_t k = 0; k + 1 < diag.mesh.size(); ++k) {
    const auto col = stats::column(inc, k);
    const double ds = diag.mesh[k + 1] - diag.mesh[k];
    std::vector<double> sq;
    for (double x : col) sq.push_back(x * x);
    EXPECT_NEAR(stats::mean(sq), ds, 3.0 * std::sqrt(stats::variance(sq) / sq.size()));
  }
}

TEST(Project, NonAlignedFlowReportsGap) {
  const auto path = sample_path(spec(LevyTriplet::gaussian(1.0), 2, 2, 4), 0);
  const SimpleFlow f(ElementaryFlow::diagonal(2));
  const auto tr = project(path, f, {0.0, 0.1});
  EXPECT_GT(tr.max_gap, 0.0);
}

TEST(UniformMesh, Spacing) {
  const SimpleFlow f(ElementaryFlow::diagonal(2));
  const auto m = uniform_mesh(f, 4);
  ASSERT_EQ(m.size(), 5u);
  EXPECT_DOUBLE_EQ(m[2], 0.5);
}

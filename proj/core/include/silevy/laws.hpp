#pragma once

#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "silevy/rng.hpp"

namespace silevy {

/// Interval of the real line with independently open or closed ends.
/// Infinite endpoints are allowed (and are always open).
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_closed = false;
  bool hi_closed = false;

  static Interval closed(double lo, double hi) { return {lo, hi, true, true}; }
  static Interval open(double lo, double hi) { return {lo, hi, false, false}; }
  /// (lo, hi]
  static Interval left_open(double lo, double hi) { return {lo, hi, false, true}; }

  bool contains(double x) const;
  /// True when 0 lies in the closure.
  bool touches_zero() const;
};

/// A finite union of intervals.
using MarkSet = std::vector<Interval>;
bool contains(const MarkSet& set, double x);

/// Jump-size distribution of a finite-activity Levy measure.
class MarkDistribution {
 public:
  enum class Kind { point, uniform, normal, two_point };

  static MarkDistribution point(double at);
  static MarkDistribution uniform(double lo, double hi);
  static MarkDistribution normal(double mean, double sd);
  /// `a` with probability p, `b` with probability 1 - p.
  static MarkDistribution two_point(double a, double b, double p);

  Kind kind() const { return kind_; }
  double a() const { return a_; }
  double b() const { return b_; }
  double p() const { return p_; }

  std::complex<double> char_fn(double z) const;
  double cdf(double x) const;       ///< P(X <= x)
  double cdf_left(double x) const;  ///< P(X < x)
  double probability(const Interval& iv) const;
  /// E[X 1{X in iv}]
  double partial_mean(const Interval& iv) const;
  double mean() const;
  double second_moment() const;
  /// Support bound: max |x| over the support (mean + 12 sd for normals).
  double extent() const;
  /// Point masses, if any.
  std::vector<double> atoms() const;

  double sample(rng::Philox& gen) const;

 private:
  MarkDistribution(Kind kind, double a, double b, double p) : kind_(kind), a_(a), b_(b), p_(p) {}
  Kind kind_;
  double a_;
  double b_;
  double p_;
};

struct FiniteActivity {
  double rate = 0.0;  ///< total mass of the Levy measure
  MarkDistribution marks = MarkDistribution::point(1.0);
};

/// Symmetric density scale * |x|^(-1-alpha) on epsilon <= |x| <= cutoff.
struct TruncatedStable {
  double alpha = 1.5;
  double scale = 1.0;
  double epsilon = 1e-3;
  double cutoff = 10.0;
};

/// Levy measure: none, finite activity, or an epsilon-truncated stable-like
/// measure (finite because of the cutoff at epsilon).
class JumpSpec {
 public:
  using Variant = std::variant<std::monostate, FiniteActivity, TruncatedStable>;

  JumpSpec() = default;
  JumpSpec(FiniteActivity f);
  JumpSpec(TruncatedStable t);

  bool is_none() const { return std::holds_alternative<std::monostate>(v_); }
  const Variant& variant() const { return v_; }

  /// nu(R)
  double total_mass() const;
  /// nu(B)
  double mass(const Interval& iv) const;
  double mass(const MarkSet& set) const;
  /// Integral of x over B against nu.
  double first_moment(const Interval& iv) const;
  double first_moment(const MarkSet& set) const;
  /// Integral of x^2 against nu.
  double second_moment() const;
  /// Integral of (e^{izx} - 1 - izx 1{|x| <= 1}) against nu.
  std::complex<double> integral(double z) const;
  /// Integral of (e^{izx} - 1) against nu restricted to B.
  std::complex<double> restricted_integral(double z, const MarkSet& set) const;
  /// Smallest |jump| that can occur (0 when marks can be arbitrarily small).
  double min_abs_jump() const;
  /// Largest |jump| of the support (mean + 12 sd for normal marks).
  double extent() const;
  /// Variance of the discarded jumps below the truncation (0 unless truncated).
  double discarded_variance() const;
  /// Truncation level epsilon_0 of the spec (0 for finite activity).
  double truncation() const;

  /// P(mark <= x) for the normalized measure.
  double mark_cdf(double x) const;
  double mark_cdf_left(double x) const;
  std::vector<double> mark_atoms() const;
  double sample_mark(rng::Philox& gen) const;

 private:
  Variant v_;
};

/// Generating triplet (sigma, gamma, nu) with truncation 1{|x| <= 1}.
struct LevyTriplet {
  double sigma = 0.0;
  double gamma = 0.0;
  JumpSpec nu;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  static LevyTriplet gaussian(double sigma, double gamma = 0.0);
  static LevyTriplet deterministic(double rate);
  /// Uncompensated compound Poisson plus drift: the process is
  /// drift * m(U) + sum of marks. Sets gamma = drift + rate E[X 1{|X|<=1}].
  static LevyTriplet compound_poisson(double rate, MarkDistribution marks, double drift = 0.0,
                                      double sigma = 0.0);
  static LevyTriplet truncated_stable(TruncatedStable t, double sigma = 0.0, double gamma = 0.0);

  /// Integral of x 1{|x| <= 1} against nu; subtracted per unit measure.
  double compensation_rate() const;
  /// gamma minus the compensation: deterministic slope of the sampled process.
  double net_drift() const;
  /// gamma + integral of x 1{|x| > 1} against nu.
  double mean_rate() const;
  double variance_rate() const;

  std::string describe() const;
};

/// Per-unit-measure Levy-Khintchine exponent psi(z). Throws NumericError
/// when quadrature cannot reach 1e-10 absolute error.
std::complex<double> char_exponent(const LevyTriplet& triplet, double z);

/// Uniform lattice x_j = first + j * step.
struct GridParams {
  std::size_t nodes = std::size_t{1} << 14;
  double step = 0.0;

  double half_width() const { return 0.5 * static_cast<double>(nodes) * step; }
  bool operator==(const GridParams&) const = default;
};

/// Default grid: 2^14 nodes and half-width |mean| + 10 sd at `horizon`
/// (widened to cover the jump support). Point-mass marks are put on nodes
/// when the step can be chosen commensurate with them.
GridParams default_grid(const LevyTriplet& triplet, double horizon = 1.0,
                        std::size_t nodes = std::size_t{1} << 14);

/// Probability masses on a uniform lattice. Each mass is treated as spread
/// uniformly over its cell [x_j - step/2, x_j + step/2) when measuring sets.
class GridLaw {
 public:
  GridLaw() = default;
  GridLaw(double first, double step, std::vector<double> masses);

  static GridLaw point_mass(double at, const GridParams& grid);

  double first() const { return first_; }
  double step() const { return step_; }
  std::size_t size() const { return masses_.size(); }
  const std::vector<double>& masses() const { return masses_; }
  double position(std::size_t j) const { return first_ + static_cast<double>(j) * step_; }

  double total_mass() const;
  double mean() const;
  double variance() const;
  /// P(X <= x) under the cell-spreading convention.
  double cdf(double x) const;
  double probability(const Interval& iv) const;
  double probability(const MarkSet& set) const;

  GridLaw shifted(double by) const;

 private:
  double first_ = 0.0;
  double step_ = 1.0;
  std::vector<double> masses_;
};

/// Masses below this are inversion failures; above it they are clamped to 0.
inline constexpr double kNegativeMassTolerance = 1e-8;
inline constexpr double kMassSumTolerance = 1e-6;

/// Law with characteristic function exp(t psi(z)) on the lattice, obtained by
/// discrete Fourier inversion. Marks are discretized to cell masses, the
/// drift goes into the lattice offset. t = 0 gives the point mass at 0.
GridLaw mu_power_t(const LevyTriplet& triplet, double t, const GridParams& grid);
GridLaw mu_power_t(const LevyTriplet& triplet, double t);

/// Exact discrete convolution; the result spans the sum of the supports.
GridLaw convolve(const GridLaw& a, const GridLaw& b);

/// Total variation distance; lattices must share the step and be offset by
/// a whole number of steps.
double total_variation(const GridLaw& a, const GridLaw& b);

}  // namespace silevy

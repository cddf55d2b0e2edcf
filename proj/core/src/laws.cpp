#include "silevy/laws.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "fft.hpp"
#include "silevy/error.hpp"

namespace silevy {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kQuadratureTolerance = 1e-10;

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
double norm_pdf(double x) {
  if (!std::isfinite(x)) return 0.0;
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

// sin(x)/x with a series near 0.
double sinc(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

// Integral over (lo, hi) split at the given breakpoints and into pieces no
// longer than `max_piece`; the absolute error estimates are summed.
template <class F>
double integrate(F&& f, std::vector<double> breaks, double max_piece, double& error) {
  using boost::math::quadrature::gauss_kronrod;
  std::sort(breaks.begin(), breaks.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i];
    const double b = breaks[i + 1];
    if (!(b > a)) continue;
    const int pieces = std::isfinite(max_piece)
                           ? std::max(1, static_cast<int>(std::ceil((b - a) / max_piece)))
                           : 1;
    const double width = (b - a) / pieces;
    for (int k = 0; k < pieces; ++k) {
      const double lo = a + k * width;
      const double hi = k + 1 == pieces ? b : lo + width;
      double err = 0.0;
      total += gauss_kronrod<double, 31>::integrate(f, lo, hi, 12, 1e-14, &err);
      error += err;
    }
  }
  return total;
}

// Geometric breakpoints between a > 0 and b: resolves power-law integrands.
std::vector<double> geometric_breaks(double a, double b) {
  std::vector<double> out{a};
  for (double x = 2.0 * a; x < b; x *= 2.0) out.push_back(x);
  out.push_back(b);
  return out;
}

// Positive half (lo, hi) ∩ [eps, cutoff] of an interval, as [a, b].
bool positive_part(const Interval& iv, double eps, double cutoff, double& a, double& b) {
  a = std::max(iv.lo, eps);
  b = std::min(iv.hi, cutoff);
  return b > a;
}

Interval mirror(const Interval& iv) { return {-iv.hi, -iv.lo, iv.hi_closed, iv.lo_closed}; }

double power_mass(double k, double alpha, double a, double b) {
  return k * (std::pow(a, -alpha) - std::pow(b, -alpha)) / alpha;
}

double power_first_moment(double k, double alpha, double a, double b) {
  if (std::abs(alpha - 1.0) < 1e-12) return k * std::log(b / a);
  return k * (std::pow(b, 1.0 - alpha) - std::pow(a, 1.0 - alpha)) / (1.0 - alpha);
}

}  // namespace

// ---------------------------------------------------------------------------
// Interval

bool Interval::contains(double x) const {
  const bool above = lo_closed ? x >= lo : x > lo;
  const bool below = hi_closed ? x <= hi : x < hi;
  return above && below;
}

bool Interval::touches_zero() const { return lo <= 0.0 && hi >= 0.0; }

bool contains(const MarkSet& set, double x) {
  return std::any_of(set.begin(), set.end(), [x](const Interval& iv) { return iv.contains(x); });
}

// ---------------------------------------------------------------------------
// MarkDistribution

MarkDistribution MarkDistribution::point(double at) { return {Kind::point, at, at, 1.0}; }
MarkDistribution MarkDistribution::uniform(double lo, double hi) { return {Kind::uniform, lo, hi, 1.0}; }
MarkDistribution MarkDistribution::normal(double mean, double sd) { return {Kind::normal, mean, sd, 1.0}; }
MarkDistribution MarkDistribution::two_point(double a, double b, double p) { return {Kind::two_point, a, b, p}; }

std::complex<double> MarkDistribution::char_fn(double z) const {
  using namespace std::complex_literals;
  switch (kind_) {
    case Kind::point:
      return std::exp(1i * z * a_);
    case Kind::uniform: {
      const double mid = 0.5 * (a_ + b_);
      return std::exp(1i * z * mid) * sinc(0.5 * z * (b_ - a_));
    }
    case Kind::normal:
      return std::exp(1i * z * a_ - 0.5 * b_ * b_ * z * z);
    case Kind::two_point:
      return p_ * std::exp(1i * z * a_) + (1.0 - p_) * std::exp(1i * z * b_);
  }
  return 1.0;
}

double MarkDistribution::cdf(double x) const {
  switch (kind_) {
    case Kind::point:
      return x >= a_ ? 1.0 : 0.0;
    case Kind::uniform:
      return std::clamp((x - a_) / (b_ - a_), 0.0, 1.0);
    case Kind::normal:
      return norm_cdf((x - a_) / b_);
    case Kind::two_point:
      return (x >= a_ ? p_ : 0.0) + (x >= b_ ? 1.0 - p_ : 0.0);
  }
  return 0.0;
}

double MarkDistribution::cdf_left(double x) const {
  switch (kind_) {
    case Kind::point:
      return x > a_ ? 1.0 : 0.0;
    case Kind::two_point:
      return (x > a_ ? p_ : 0.0) + (x > b_ ? 1.0 - p_ : 0.0);
    default:
      return cdf(x);
  }
}

double MarkDistribution::probability(const Interval& iv) const {
  if (!(iv.hi >= iv.lo)) return 0.0;
  const double upper = iv.hi_closed ? cdf(iv.hi) : cdf_left(iv.hi);
  const double lower = iv.lo_closed ? cdf_left(iv.lo) : cdf(iv.lo);
  return std::max(0.0, upper - lower);
}

double MarkDistribution::partial_mean(const Interval& iv) const {
  switch (kind_) {
    case Kind::point:
      return iv.contains(a_) ? a_ : 0.0;
    case Kind::two_point:
      return (iv.contains(a_) ? p_ * a_ : 0.0) + (iv.contains(b_) ? (1.0 - p_) * b_ : 0.0);
    case Kind::uniform: {
      const double lo = std::max(iv.lo, a_);
      const double hi = std::min(iv.hi, b_);
      if (!(hi > lo)) return 0.0;
      return (hi * hi - lo * lo) / (2.0 * (b_ - a_));
    }
    case Kind::normal: {
      const double alpha = (iv.lo - a_) / b_;
      const double beta = (iv.hi - a_) / b_;
      if (!(beta > alpha)) return 0.0;
      return a_ * (norm_cdf(beta) - norm_cdf(alpha)) + b_ * (norm_pdf(alpha) - norm_pdf(beta));
    }
  }
  return 0.0;
}

double MarkDistribution::mean() const { return partial_mean(Interval{}); }

double MarkDistribution::second_moment() const {
  switch (kind_) {
    case Kind::point:
      return a_ * a_;
    case Kind::two_point:
      return p_ * a_ * a_ + (1.0 - p_) * b_ * b_;
    case Kind::uniform:
      return (a_ * a_ + a_ * b_ + b_ * b_) / 3.0;
    case Kind::normal:
      return a_ * a_ + b_ * b_;
  }
  return 0.0;
}

double MarkDistribution::extent() const {
  switch (kind_) {
    case Kind::point:
      return std::abs(a_);
    case Kind::normal:
      return std::abs(a_) + 12.0 * b_;
    default:
      return std::max(std::abs(a_), std::abs(b_));
  }
}

std::vector<double> MarkDistribution::atoms() const {
  switch (kind_) {
    case Kind::point:
      return {a_};
    case Kind::two_point:
      return {a_, b_};
    default:
      return {};
  }
}

double MarkDistribution::sample(rng::Philox& gen) const {
  switch (kind_) {
    case Kind::point:
      return a_;
    case Kind::uniform:
      return a_ + (b_ - a_) * gen.uniform01();
    case Kind::normal:
      return a_ + b_ * rng::normal(gen);
    case Kind::two_point:
      return gen.uniform01() < p_ ? a_ : b_;
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// JumpSpec

JumpSpec::JumpSpec(FiniteActivity f) : v_(std::move(f)) {}
JumpSpec::JumpSpec(TruncatedStable t) : v_(t) {}

double JumpSpec::total_mass() const {
  if (const auto* f = std::get_if<FiniteActivity>(&v_)) return f->rate;
  if (const auto* t = std::get_if<TruncatedStable>(&v_)) {
    return 2.0 * power_mass(t->scale, t->alpha, t->epsilon, t->cutoff);
  }
  return 0.0;
}

double JumpSpec::mass(const Interval& iv) const {
  if (const auto* f = std::get_if<FiniteActivity>(&v_)) return f->rate * f->marks.probability(iv);
  if (const auto* t = std::get_if<TruncatedStable>(&v_)) {
    double total = 0.0;
    double a, b;
    if (positive_part(iv, t->epsilon, t->cutoff, a, b)) total += power_mass(t->scale, t->alpha, a, b);
    if (positive_part(mirror(iv), t->epsilon, t->cutoff, a, b)) total += power_mass(t->scale, t->alpha, a, b);
    return total;
  }
  return 0.0;
}

double JumpSpec::mass(const MarkSet& set) const {
  double total = 0.0;
  for (const auto& iv : set) total += mass(iv);
  return total;
}

double JumpSpec::first_moment(const Interval& iv) const {
  if (const auto* f = std::get_if<FiniteActivity>(&v_)) return f->rate * f->marks.partial_mean(iv);
  if (const auto* t = std::get_if<TruncatedStable>(&v_)) {
    double total = 0.0;
    double a, b;
    if (positive_part(iv, t->epsilon, t->cutoff, a, b)) total += power_first_moment(t->scale, t->alpha, a, b);
    if (positive_part(mirror(iv), t->epsilon, t->cutoff, a, b)) total -= power_first_moment(t->scale, t->alpha, a, b);
    return total;
  }
  return 0.0;
}

double JumpSpec::first_moment(const MarkSet& set) const {
  double total = 0.0;
  for (const auto& iv : set) total += first_moment(iv);
  return total;
}

double JumpSpec::second_moment() const {
  if (const auto* f = std::get_if<FiniteActivity>(&v_)) return f->rate * f->marks.second_moment();
  if (const auto* t = std::get_if<TruncatedStable>(&v_)) {
    const double e = 2.0 - t->alpha;
    return 2.0 * t->scale * (std::pow(t->cutoff, e) - std::pow(t->epsilon, e)) / e;
  }
  return 0.0;
}

std::complex<double> JumpSpec::integral(double z) const {
  using namespace std::complex_literals;
  if (const auto* f = std::get_if<FiniteActivity>(&v_)) {
    const double small = f->marks.partial_mean(Interval::closed(-1.0, 1.0));
    return f->rate * (f->marks.char_fn(z) - 1.0) - 1i * z * f->rate * small;
  }
  if (const auto* t = std::get_if<TruncatedStable>(&v_)) {
    if (z == 0.0) return 0.0;
    // Symmetric measure: the sine part and the compensator cancel.
    auto integrand = [&](double x) {
      return (std::cos(z * x) - 1.0) * std::pow(x, -1.0 - t->alpha);
    };
    double err = 0.0;
    const double value = integrate(integrand, geometric_breaks(t->epsilon, t->cutoff),
                                   std::numbers::pi / std::abs(z), err);
    err *= 2.0 * t->scale;
    if (err > kQuadratureTolerance) {
      throw NumericError("Levy-Khintchine quadrature did not converge", err);
    }
    return 2.0 * t->scale * value;
  }
  return 0.0;
}

std::complex<double> JumpSpec::restricted_integral(double z, const MarkSet& set) const {
  using namespace std::complex_literals;
  std::complex<double> total = 0.0;
  if (const auto* f = std::get_if<FiniteActivity>(&v_)) {
    const auto& m = f->marks;
    for (const auto& iv : set) {
      switch (m.kind()) {
        case MarkDistribution::Kind::point:
        case MarkDistribution::Kind::two_point: {
          const auto at = m.atoms();
          const double w0 = m.kind() == MarkDistribution::Kind::point ? 1.0 : m.p();
          if (iv.contains(at[0])) total += w0 * (std::exp(1i * z * at[0]) - 1.0);
          if (at.size() > 1 && iv.contains(at[1])) total += (1.0 - w0) * (std::exp(1i * z * at[1]) - 1.0);
          break;
        }
        case MarkDistribution::Kind::uniform: {
          const double lo = std::max(iv.lo, m.a());
          const double hi = std::min(iv.hi, m.b());
          if (!(hi > lo)) break;
          const double w = hi - lo;
          total += (w * std::exp(1i * z * 0.5 * (lo + hi)) * sinc(0.5 * z * w) - w) / (m.b() - m.a());
          break;
        }
        case MarkDistribution::Kind::normal: {
          const double lo = std::max(iv.lo, m.a() - 12.0 * m.b());
          const double hi = std::min(iv.hi, m.a() + 12.0 * m.b());
          if (!(hi > lo)) break;
          const double piece = z == 0.0 ? kInf : std::numbers::pi / std::abs(z);
          double err = 0.0;
          auto dens = [&](double x) { return norm_pdf((x - m.a()) / m.b()) / m.b(); };
          const std::vector<double> breaks =
              lo < m.a() && m.a() < hi ? std::vector<double>{lo, m.a(), hi} : std::vector<double>{lo, hi};
          const double re = integrate([&](double x) { return (std::cos(z * x) - 1.0) * dens(x); },
                                      breaks, piece, err);
          const double im = integrate([&](double x) { return std::sin(z * x) * dens(x); },
                                      breaks, piece, err);
          if (err > kQuadratureTolerance) throw NumericError("restricted integral did not converge", err);
          total += std::complex<double>(re, im);
          break;
        }
      }
    }
    return f->rate * total;
  }
  if (const auto* t = std::get_if<TruncatedStable>(&v_)) {
    const double piece = z == 0.0 ? kInf : std::numbers::pi / std::abs(z);
    for (const auto& iv : set) {
      double err = 0.0;
      double a, b;
      auto dens = [&](double x) { return t->scale * std::pow(x, -1.0 - t->alpha); };
      if (positive_part(iv, t->epsilon, t->cutoff, a, b)) {
        total += std::complex<double>(
            integrate([&](double x) { return (std::cos(z * x) - 1.0) * dens(x); }, geometric_breaks(a, b), piece, err),
            integrate([&](double x) { return std::sin(z * x) * dens(x); }, geometric_breaks(a, b), piece, err));
      }
      if (positive_part(mirror(iv), t->epsilon, t->cutoff, a, b)) {
        total += std::complex<double>(
            integrate([&](double x) { return (std::cos(z * x) - 1.0) * dens(x); }, geometric_breaks(a, b), piece, err),
            -integrate([&](double x) { return std::sin(z * x) * dens(x); }, geometric_breaks(a, b), piece, err));
      }
      if (err > kQuadratureTolerance) throw NumericError("restricted integral did not converge", err);
    }
  }
  return total;
}

double JumpSpec::min_abs_jump() const {
  if (const auto* f = std::get_if<FiniteActivity>(&v_)) {
    const auto& m = f->marks;
    switch (m.kind()) {
      case MarkDistribution::Kind::point:
        return std::abs(m.a());
      case MarkDistribution::Kind::two_point:
        return std::min(std::abs(m.a()), std::abs(m.b()));
      case MarkDistribution::Kind::uniform:
        return (m.a() <= 0.0 && m.b() >= 0.0) ? 0.0 : std::min(std::abs(m.a()), std::abs(m.b()));
      case MarkDistribution::Kind::normal:
        return 0.0;
    }
  }
  if (const auto* t = std::get_if<TruncatedStable>(&v_)) return t->epsilon;
  return 0.0;
}

double JumpSpec::extent() const {
  if (const auto* f = std::get_if<FiniteActivity>(&v_)) return f->marks.extent();
  if (const auto* t = std::get_if<TruncatedStable>(&v_)) return t->cutoff;
  return 0.0;
}

double JumpSpec::discarded_variance() const {
  if (const auto* t = std::get_if<TruncatedStable>(&v_)) {
    return 2.0 * t->scale * std::pow(t->epsilon, 2.0 - t->alpha) / (2.0 - t->alpha);
  }
  return 0.0;
}

double JumpSpec::truncation() const {
  if (const auto* t = std::get_if<TruncatedStable>(&v_)) return t->epsilon;
  return 0.0;
}

double JumpSpec::mark_cdf(double x) const {
  if (const auto* f = std::get_if<FiniteActivity>(&v_)) return f->marks.cdf(x);
  if (const auto* t = std::get_if<TruncatedStable>(&v_)) {
    const double half = power_mass(t->scale, t->alpha, t->epsilon, t->cutoff);
    if (x < -t->cutoff) return 0.0;
    if (x < -t->epsilon) return 0.5 * power_mass(t->scale, t->alpha, -x, t->cutoff) / half;
    if (x < t->epsilon) return 0.5;
    if (x < t->cutoff) return 0.5 + 0.5 * power_mass(t->scale, t->alpha, t->epsilon, x) / half;
    return 1.0;
  }
  return x >= 0.0 ? 1.0 : 0.0;
}

double JumpSpec::mark_cdf_left(double x) const {
  if (const auto* f = std::get_if<FiniteActivity>(&v_)) return f->marks.cdf_left(x);
  return mark_cdf(x);
}

std::vector<double> JumpSpec::mark_atoms() const {
  if (const auto* f = std::get_if<FiniteActivity>(&v_)) return f->marks.atoms();
  return {};
}

double JumpSpec::sample_mark(rng::Philox& gen) const {
  if (const auto* f = std::get_if<FiniteActivity>(&v_)) return f->marks.sample(gen);
  if (const auto* t = std::get_if<TruncatedStable>(&v_)) {
    const double lo = std::pow(t->epsilon, -t->alpha);
    const double hi = std::pow(t->cutoff, -t->alpha);
    const double u = gen.uniform01();
    const double magnitude = std::pow(lo - u * (lo - hi), -1.0 / t->alpha);
    return gen.uniform01() < 0.5 ? -magnitude : magnitude;
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// LevyTriplet

void LevyTriplet::validate() const {
  auto fail = [](const char* field, const std::string& msg) { throw ConfigError(field, msg); };
  if (!std::isfinite(sigma) || sigma < 0.0) fail("sigma", "must be finite and >= 0, got " + std::to_string(sigma));
  if (!std::isfinite(gamma)) fail("gamma", "must be finite");
  if (const auto* f = std::get_if<FiniteActivity>(&nu.variant())) {
    if (!std::isfinite(f->rate) || f->rate <= 0.0) fail("nu.rate", "must be finite and > 0");
    const auto& m = f->marks;
    switch (m.kind()) {
      case MarkDistribution::Kind::point:
        if (!std::isfinite(m.a()) || m.a() == 0.0) fail("nu.marks.value", "point mark must be finite and nonzero");
        break;
      case MarkDistribution::Kind::uniform:
        if (!std::isfinite(m.a()) || !std::isfinite(m.b()) || !(m.b() > m.a()))
          fail("nu.marks", "uniform marks need low < high");
        break;
      case MarkDistribution::Kind::normal:
        if (!std::isfinite(m.a()) || !std::isfinite(m.b()) || !(m.b() > 0.0))
          fail("nu.marks.sd", "normal marks need sd > 0");
        break;
      case MarkDistribution::Kind::two_point:
        if (!(m.p() >= 0.0 && m.p() <= 1.0)) fail("nu.marks.p", "probability outside [0, 1]");
        if (!std::isfinite(m.a()) || !std::isfinite(m.b())) fail("nu.marks", "values must be finite");
        if ((m.a() == 0.0 && m.p() > 0.0) || (m.b() == 0.0 && m.p() < 1.0))
          fail("nu.marks", "a Levy measure puts no mass at 0");
        break;
    }
  }
  if (const auto* t = std::get_if<TruncatedStable>(&nu.variant())) {
    if (!(t->alpha > 0.0 && t->alpha < 2.0)) fail("nu.alpha", "must lie in (0, 2)");
    if (!(t->scale > 0.0) || !std::isfinite(t->scale)) fail("nu.scale", "must be finite and > 0");
    if (!(t->epsilon > 0.0)) fail("nu.epsilon", "must be > 0");
    if (!(t->cutoff > t->epsilon) || !std::isfinite(t->cutoff)) fail("nu.cutoff", "must be finite and > epsilon");
  }
}

LevyTriplet LevyTriplet::gaussian(double sigma, double gamma) { return {sigma, gamma, {}}; }

LevyTriplet LevyTriplet::deterministic(double rate) { return {0.0, rate, {}}; }

LevyTriplet LevyTriplet::compound_poisson(double rate, MarkDistribution marks, double drift,
                                          double sigma) {
  LevyTriplet t{sigma, 0.0, JumpSpec(FiniteActivity{rate, marks})};
  t.gamma = drift + t.compensation_rate();
  return t;
}

LevyTriplet LevyTriplet::truncated_stable(TruncatedStable spec, double sigma, double gamma) {
  return {sigma, gamma, JumpSpec(spec)};
}

double LevyTriplet::compensation_rate() const { return nu.first_moment(Interval::closed(-1.0, 1.0)); }

double LevyTriplet::net_drift() const { return gamma - compensation_rate(); }

double LevyTriplet::mean_rate() const {
  return gamma + nu.first_moment(Interval::open(1.0, kInf)) + nu.first_moment(Interval::open(-kInf, -1.0));
}

double LevyTriplet::variance_rate() const { return sigma * sigma + nu.second_moment(); }

std::string LevyTriplet::describe() const {
  std::ostringstream os;
  os << "sigma=" << sigma << " gamma=" << gamma;
  if (const auto* f = std::get_if<FiniteActivity>(&nu.variant())) {
    os << " nu=compound(rate=" << f->rate << ")";
  } else if (const auto* t = std::get_if<TruncatedStable>(&nu.variant())) {
    os << " nu=truncated_stable(alpha=" << t->alpha << ", eps=" << t->epsilon << ")";
  } else {
    os << " nu=none";
  }
  return os.str();
}

std::complex<double> char_exponent(const LevyTriplet& triplet, double z) {
  using namespace std::complex_literals;
  if (!std::isfinite(z)) throw std::invalid_argument("char_exponent needs finite z");
  if (z == 0.0) return 0.0;
  return -0.5 * triplet.sigma * triplet.sigma * z * z + 1i * triplet.gamma * z + triplet.nu.integral(z);
}

// ---------------------------------------------------------------------------
// Grids

GridParams default_grid(const LevyTriplet& triplet, double horizon, std::size_t nodes) {
  if (nodes < 16) throw std::invalid_argument("grid needs at least 16 nodes");
  const double jump_mean = triplet.nu.first_moment(Interval{});
  const double sd = std::sqrt(horizon * triplet.variance_rate());
  double half = std::abs(horizon * jump_mean) + 10.0 * sd;
  if (!triplet.nu.is_none()) half = std::max(half, 3.0 * triplet.nu.extent());
  if (!(half > 0.0)) half = 1.0;
  double step = 2.0 * half / static_cast<double>(nodes);

  const auto atoms = triplet.nu.mark_atoms();
  if (!atoms.empty()) {
    double smallest = kInf;
    for (double a : atoms) {
      if (a != 0.0) smallest = std::min(smallest, std::abs(a));
    }
    for (int r = 1; r <= 64 && std::isfinite(smallest); ++r) {
      const double unit = smallest / r;
      const bool lattice = std::all_of(atoms.begin(), atoms.end(), [&](double a) {
        const double q = a / unit;
        return std::abs(q - std::round(q)) < 1e-9;
      });
      if (!lattice) continue;
      step = unit >= step ? unit / std::floor(unit / step) : unit * std::ceil(step / unit);
      break;
    }
  }
  return {nodes, step};
}

GridLaw::GridLaw(double first, double step, std::vector<double> masses)
    : first_(first), step_(step), masses_(std::move(masses)) {
  if (!(step > 0.0)) throw GridError("grid step must be positive");
}

GridLaw GridLaw::point_mass(double at, const GridParams& grid) {
  std::vector<double> m(grid.nodes, 0.0);
  const std::size_t centre = grid.nodes / 2;
  m[centre] = 1.0;
  return GridLaw(at - static_cast<double>(centre) * grid.step, grid.step, std::move(m));
}

double GridLaw::total_mass() const {
  double s = 0.0;
  for (double p : masses_) s += p;
  return s;
}

double GridLaw::mean() const {
  double s = 0.0;
  for (std::size_t j = 0; j < masses_.size(); ++j) s += masses_[j] * position(j);
  return s / total_mass();
}

double GridLaw::variance() const {
  const double mu = mean();
  double s = 0.0;
  for (std::size_t j = 0; j < masses_.size(); ++j) {
    const double d = position(j) - mu;
    s += masses_[j] * d * d;
  }
  return s / total_mass();
}

double GridLaw::cdf(double x) const { return probability(Interval{-kInf, x, false, true}); }

double GridLaw::probability(const Interval& iv) const {
  if (!(iv.hi >= iv.lo)) return 0.0;
  double total = 0.0;
  const double half = 0.5 * step_;
  for (std::size_t j = 0; j < masses_.size(); ++j) {
    if (masses_[j] == 0.0) continue;
    const double lo = position(j) - half;
    const double hi = position(j) + half;
    const double overlap = std::min(hi, iv.hi) - std::max(lo, iv.lo);
    if (overlap <= 0.0) continue;
    total += masses_[j] * std::min(1.0, overlap / step_);
  }
  return total;
}

double GridLaw::probability(const MarkSet& set) const {
  double total = 0.0;
  for (const auto& iv : set) total += probability(iv);
  return total;
}

GridLaw GridLaw::shifted(double by) const {
  GridLaw out = *this;
  out.first_ += by;
  return out;
}

// ---------------------------------------------------------------------------
// Convolution powers

GridLaw mu_power_t(const LevyTriplet& triplet, double t, const GridParams& grid) {
  triplet.validate();
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("mu_power_t needs t >= 0");
  if (!(grid.step > 0.0) || grid.nodes < 16) throw GridError("invalid grid parameters");
  const std::size_t n = grid.nodes;
  const double h = grid.step;
  const double offset = t * triplet.net_drift();
  if (t == 0.0) return GridLaw::point_mass(0.0, grid);

  // FFT ordering: slot k holds lattice displacement d = k (k < n/2) or k - n.
  auto displacement = [n](std::size_t k) {
    return k < n / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(n);
  };
  auto slot = [n](long d) {
    const long m = static_cast<long>(n);
    return static_cast<std::size_t>(((d % m) + m) % m);
  };
  const double two_pi_over = 2.0 * std::numbers::pi / (static_cast<double>(n) * h);

  detail::cvec phi(n, 1.0);
  std::vector<std::complex<double>> log_phi(n, 0.0);

  const double rate = triplet.nu.total_mass();
  if (rate > 0.0) {
    detail::cvec q(n, 0.0);
    const auto atoms = triplet.nu.mark_atoms();
    if (!atoms.empty()) {
      const auto& fa = std::get<FiniteActivity>(triplet.nu.variant());
      const double w0 = fa.marks.kind() == MarkDistribution::Kind::point ? 1.0 : fa.marks.p();
      const double weights[2] = {w0, 1.0 - w0};
      for (std::size_t i = 0; i < atoms.size(); ++i) {
        const double u = atoms[i] / h;
        double base = std::floor(u);
        double frac = u - base;
        if (frac > 1.0 - 1e-9) {
          base += 1.0;
          frac = 0.0;
        } else if (frac < 1e-9) {
          frac = 0.0;
        }
        const long d = static_cast<long>(base);
        q[slot(d)] += weights[i] * (1.0 - frac);
        if (frac > 0.0) q[slot(d + 1)] += weights[i] * frac;
      }
    } else {
      for (std::size_t k = 0; k < n; ++k) {
        const double x = displacement(k) * h;
        q[k] = triplet.nu.mark_cdf(x + 0.5 * h) - triplet.nu.mark_cdf(x - 0.5 * h);
      }
    }
    detail::dft(q, +1);
    for (std::size_t k = 0; k < n; ++k) log_phi[k] += t * rate * (q[k] - 1.0);
  }

  const double s = triplet.sigma * std::sqrt(t);
  if (s > 0.0) {
    if (s >= 8.0 * h) {
      for (std::size_t k = 0; k < n; ++k) {
        const double w = displacement(k) * two_pi_over;
        log_phi[k] += -0.5 * s * s * w * w;
      }
    } else {
      // Too narrow to point-sample: use exact cell masses of N(0, s^2).
      detail::cvec g(n, 0.0);
      for (std::size_t k = 0; k < n; ++k) {
        const double x = displacement(k) * h;
        g[k] = norm_cdf((x + 0.5 * h) / s) - norm_cdf((x - 0.5 * h) / s);
      }
      detail::dft(g, +1);
      for (std::size_t k = 0; k < n; ++k) phi[k] = g[k];
    }
  }
  for (std::size_t k = 0; k < n; ++k) phi[k] *= std::exp(log_phi[k]);

  detail::dft(phi, -1);
  std::vector<double> masses(n);
  const double scale = 1.0 / static_cast<double>(n);
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double p = phi[k].real() * scale;
    if (p < -kNegativeMassTolerance) {
      std::ostringstream os;
      os << "Fourier inversion produced mass " << p << " at x = " << displacement(k) * h
         << "; the grid is too coarse";
      throw GridError(os.str());
    }
    p = std::max(p, 0.0);
    const long d = static_cast<long>(displacement(k));
    masses[static_cast<std::size_t>(d + static_cast<long>(n / 2))] = p;
    total += p;
  }
  if (std::abs(total - 1.0) > kMassSumTolerance) {
    std::ostringstream os;
    os << "grid law has total mass " << total << "; half-width " << grid.half_width()
       << " is too small for t = " << t;
    throw GridError(os.str());
  }
  const double first = offset - static_cast<double>(n / 2) * h;
  return GridLaw(first, h, std::move(masses));
}

GridLaw mu_power_t(const LevyTriplet& triplet, double t) {
  return mu_power_t(triplet, t, default_grid(triplet, std::max(t, 1.0)));
}

GridLaw convolve(const GridLaw& a, const GridLaw& b) {
  if (std::abs(a.step() - b.step()) > 1e-12 * a.step()) {
    throw GridError("convolution needs identical grid steps");
  }
  auto masses = detail::convolve_masses(a.masses(), b.masses());
  for (double& p : masses) {
    if (p < -kNegativeMassTolerance) throw GridError("convolution produced a negative mass");
    p = std::max(p, 0.0);
  }
  return GridLaw(a.first() + b.first(), a.step(), std::move(masses));
}

double total_variation(const GridLaw& a, const GridLaw& b) {
  if (std::abs(a.step() - b.step()) > 1e-12 * a.step()) {
    throw GridError("total variation needs identical grid steps");
  }
  const double h = a.step();
  const double shift = (b.first() - a.first()) / h;
  const double rounded = std::round(shift);
  if (std::abs(shift - rounded) > 1e-6) throw GridError("lattices are not commensurate");
  const long offset = static_cast<long>(rounded);
  const long lo = std::min(0L, offset);
  const long hi = std::max(static_cast<long>(a.size()), offset + static_cast<long>(b.size()));
  double tv = 0.0;
  for (long j = lo; j < hi; ++j) {
    const double pa = (j >= 0 && j < static_cast<long>(a.size())) ? a.masses()[static_cast<std::size_t>(j)] : 0.0;
    const long jb = j - offset;
    const double pb = (jb >= 0 && jb < static_cast<long>(b.size())) ? b.masses()[static_cast<std::size_t>(jb)] : 0.0;
    tv += std::abs(pa - pb);
  }
  return 0.5 * tv;
}

}  // namespace silevy

#include "silevy/markov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>

#include "fft.hpp"
#include "silevy/error.hpp"

namespace silevy {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Share of the cell [x - h/2, x + h/2) inside (lo, hi].
double cell_share(double x, double h, double lo, double hi) {
  const double overlap = std::min(x + 0.5 * h, hi) - std::max(x - 0.5 * h, lo);
  if (overlap <= 0.0) return 0.0;
  return std::min(1.0, overlap / h);
}

struct Lattice {
  double first = 0.0;
  std::vector<double> masses;
};

// Drops exact zeros at both ends.
Lattice trimmed(double first, double step, std::vector<double> masses) {
  std::size_t lo = 0;
  while (lo < masses.size() && masses[lo] == 0.0) ++lo;
  std::size_t hi = masses.size();
  while (hi > lo && masses[hi - 1] == 0.0) --hi;
  Lattice out;
  out.first = first + static_cast<double>(lo) * step;
  out.masses.assign(masses.begin() + static_cast<long>(lo), masses.begin() + static_cast<long>(hi));
  return out;
}

std::vector<double> quantile_edges(const CumulativeLaw& law, std::size_t bins) {
  const GridLaw& g = law.law();
  std::vector<double> edges;
  double cum = 0.0;
  std::size_t k = 1;
  for (std::size_t j = 0; j < g.size() && k < bins; ++j) {
    cum += g.masses()[j];
    while (k < bins && cum >= static_cast<double>(k) / static_cast<double>(bins)) {
      const double edge = g.position(j) + 0.5 * g.step();
      if (edges.empty() || edge > edges.back()) edges.push_back(edge);
      ++k;
    }
  }
  edges.push_back(kInf);
  return edges;
}

}  // namespace

// ---------------------------------------------------------------------------

CumulativeLaw::CumulativeLaw(GridLaw law) : law_(std::move(law)) {
  cumulative_.resize(law_.size() + 1, 0.0);
  for (std::size_t j = 0; j < law_.size(); ++j) cumulative_[j + 1] = cumulative_[j] + law_.masses()[j];
}

double CumulativeLaw::cdf(double x) const {
  if (x == kInf) return cumulative_.back();
  if (x == -kInf) return 0.0;
  const double u = (x - law_.first()) / law_.step() + 0.5;
  if (u <= 0.0) return 0.0;
  if (u >= static_cast<double>(law_.size())) return cumulative_.back();
  const auto j = static_cast<std::size_t>(std::floor(u));
  const double frac = u - static_cast<double>(j);
  return cumulative_[j] + law_.masses()[j] * frac;
}

double CumulativeLaw::probability(const Interval& iv) const {
  if (!(iv.hi >= iv.lo)) return 0.0;
  return std::max(0.0, cdf(iv.hi) - cdf(iv.lo));
}

double CumulativeLaw::probability(const MarkSet& set) const {
  double total = 0.0;
  for (const auto& iv : set) total += probability(iv);
  return total;
}

LawCache::LawCache(LevyTriplet triplet, GridParams grid) : triplet_(std::move(triplet)), grid_(grid) {}

std::shared_ptr<const CumulativeLaw> LawCache::get(double volume) const {
  {
    std::shared_lock lock(mutex_);
    auto it = laws_.find(volume);
    if (it != laws_.end()) return it->second;
  }
  auto law = std::make_shared<const CumulativeLaw>(mu_power_t(triplet_, volume, grid_));
  std::unique_lock lock(mutex_);
  return laws_.emplace(volume, std::move(law)).first->second;
}

std::size_t LawCache::size() const {
  std::shared_lock lock(mutex_);
  return laws_.size();
}

TransitionKernel::TransitionKernel(LevyTriplet triplet, std::optional<GridParams> grid)
    : triplet_(std::move(triplet)) {
  triplet_.validate();
  grid_ = grid ? *grid : default_grid(triplet_, 1.0);
  cache_ = std::make_shared<LawCache>(triplet_, grid_);
}

std::shared_ptr<const CumulativeLaw> TransitionKernel::law(double volume) const {
  if (!(volume >= 0.0) || !std::isfinite(volume)) {
    throw std::invalid_argument("kernel volume must be finite and >= 0");
  }
  return cache_->get(volume);
}

double kernel_eval(const TransitionKernel& kernel, double v, double x, const MarkSet& b) {
  if (v == 0.0) return contains(b, x) ? 1.0 : 0.0;
  MarkSet shifted = b;
  for (auto& iv : shifted) {
    iv.lo -= x;
    iv.hi -= x;
  }
  return kernel.law(v)->probability(shifted);
}

double kernel_eval(const TransitionKernel& kernel, double v, double x, const Interval& b) {
  return kernel_eval(kernel, v, x, MarkSet{b});
}

ChapmanKolmogorovResult chapman_kolmogorov_check(const TransitionKernel& kernel, double v1, double v2) {
  const GridLaw composed = convolve(kernel.law(v1)->law(), kernel.law(v2)->law());
  const GridLaw& direct = kernel.law(v1 + v2)->law();
  const double h = direct.step();
  const double shift = (direct.first() - composed.first()) / h;
  const long offset = std::lround(shift);
  if (std::abs(shift - static_cast<double>(offset)) > 1e-6) {
    throw GridError("composed and direct kernels are on incommensurate lattices");
  }
  // Index j runs over the composed lattice; direct node i sits at j = i + offset.
  const long lo = std::min(0L, offset);
  const long hi = std::max(static_cast<long>(composed.size()), offset + static_cast<long>(direct.size()));
  ChapmanKolmogorovResult out;
  double cum_a = 0.0;
  double cum_b = 0.0;
  double tv = 0.0;
  for (long j = lo; j < hi; ++j) {
    const double pa = (j >= 0 && j < static_cast<long>(composed.size()))
                          ? composed.masses()[static_cast<std::size_t>(j)]
                          : 0.0;
    const long i = j - offset;
    const double pb =
        (i >= 0 && i < static_cast<long>(direct.size())) ? direct.masses()[static_cast<std::size_t>(i)] : 0.0;
    cum_a += pa;
    cum_b += pb;
    tv += std::abs(pa - pb);
    out.max_error = std::max({out.max_error, std::abs(pa - pb), std::abs(cum_a - cum_b)});
  }
  out.total_variation = 0.5 * tv;
  return out;
}

// ---------------------------------------------------------------------------
// Semilattices

double SemilatticeLaw::total_variation() const {
  double tv = 0.0;
  for (std::size_t k = 0; k < chain.size(); ++k) tv += std::abs(chain[k] - product[k]);
  return 0.5 * tv;
}

void check_semilattice(const std::vector<RectSet>& elements) {
  if (elements.empty()) throw ConsistencyError("semilattice is empty");
  const std::size_t dim = elements.front().dim();
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (elements[i].is_empty()) throw ConsistencyError("element " + std::to_string(i) + " is empty");
    if (elements[i].dim() != dim) throw ConsistencyError("element " + std::to_string(i) + " has another dimension");
  }
  if (!(elements.front() == RectSet::minimal(dim))) {
    throw ConsistencyError("element 0 must be the minimal set {0}, got " + elements.front().to_string());
  }
  for (std::size_t i = 0; i < elements.size(); ++i) {
    for (std::size_t j = 0; j < elements.size(); ++j) {
      if (i == j) continue;
      const auto pair = "elements " + std::to_string(i) + " " + elements[i].to_string() + " and " +
                        std::to_string(j) + " " + elements[j].to_string();
      if (elements[i] == elements[j]) throw ConsistencyError(pair + " are equal");
      if (i > j && elements[j].contains(elements[i])) {
        throw ConsistencyError(pair + ": the subset comes after its superset");
      }
      if (i < j) {
        const RectSet meet = elements[i].intersect(elements[j]);
        const bool closed = std::any_of(elements.begin(), elements.end(),
                                        [&](const RectSet& e) { return e == meet; });
        if (!closed) throw ConsistencyError(pair + ": intersection " + meet.to_string() + " is missing");
      }
    }
  }
}

SemilatticeLaw semilattice_fdd(const TransitionKernel& kernel, const std::vector<RectSet>& elements,
                               std::size_t bins) {
  check_semilattice(elements);
  if (bins < 1) throw std::invalid_argument("semilattice_fdd needs at least one bin");
  SemilatticeLaw out;
  out.elements = elements;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    std::vector<RectSet> earlier(elements.begin(), elements.begin() + static_cast<long>(i));
    for (auto& e : earlier) e = e.intersect(elements[i]);
    IncrementRegion li(elements[i], std::move(earlier));
    out.volumes.push_back(measure(li));
    out.neighbourhoods.push_back(std::move(li));
    if (out.volumes.back() > 0.0) out.active.push_back(i);
  }
  if (out.active.size() > 6) throw std::invalid_argument("semilattice_fdd supports at most 6 nonnull neighbourhoods");

  std::vector<std::shared_ptr<const CumulativeLaw>> laws;
  for (std::size_t i : out.active) {
    laws.push_back(kernel.law(out.volumes[i]));
    out.edges.push_back(quantile_edges(*laws.back(), bins));
  }

  std::size_t cells = 1;
  for (const auto& e : out.edges) cells *= e.size();
  out.chain.assign(cells, 0.0);
  out.product.assign(cells, 0.0);
  const double h = kernel.grid().step;

  // Product form.
  for (std::size_t flat = 0; flat < cells; ++flat) {
    double p = 1.0;
    std::size_t rest = flat;
    for (std::size_t a = out.active.size(); a-- > 0;) {
      const auto& e = out.edges[a];
      const std::size_t k = rest % e.size();
      rest /= e.size();
      const double lo = k == 0 ? -kInf : e[k - 1];
      p *= laws[a]->probability(Interval::left_open(lo, e[k]));
    }
    out.product[flat] = p;
  }

  // Chain form: walk the accumulated unions, convolving the running law of
  // X_{U_i} with the kernel restricted to the bin of the new increment.
  auto restricted = [&](std::size_t a, double lo, double hi) {
    const GridLaw& g = laws[a]->law();
    std::vector<double> m(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) {
      m[j] = g.masses()[j] == 0.0 ? 0.0 : g.masses()[j] * cell_share(g.position(j), h, lo, hi);
    }
    return trimmed(g.first(), h, std::move(m));
  };
  auto descend = [&](auto&& self, std::size_t a, const Lattice& running, std::size_t prefix) -> void {
    if (a == out.active.size()) {
      double total = 0.0;
      for (double p : running.masses) total += p;
      out.chain[prefix] = total;
      return;
    }
    const auto& e = out.edges[a];
    for (std::size_t k = 0; k < e.size(); ++k) {
      const Lattice step = restricted(a, k == 0 ? -kInf : e[k - 1], e[k]);
      Lattice next;
      if (!step.masses.empty() && !running.masses.empty()) {
        next = trimmed(running.first + step.first, h, detail::convolve_masses(running.masses, step.masses));
      }
      self(self, a + 1, next, prefix * e.size() + k);
    }
  };
  descend(descend, 0, Lattice{0.0, {1.0}}, 0);
  return out;
}

}  // namespace silevy

#include "silevy/simulate.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "silevy/batch.hpp"
#include "silevy/error.hpp"
#include "silevy/rng.hpp"

namespace silevy {
namespace {

constexpr std::uint32_t kNoiseStream = 0;
constexpr std::uint32_t kJumpStream = 1;

std::array<std::size_t, kMaxDim> corner_units(const RectSet& set, const DissectionLevel& grid) {
  std::array<std::size_t, kMaxDim> k{};
  for (std::size_t d = 0; d < set.dim(); ++d) {
    const long g = grid.grid_index(set.corner(d));
    if (g < 0) {
      throw AlignmentError("corner[" + std::to_string(d) + "] = " + std::to_string(set.corner(d)) +
                           " is not a multiple of 2^-" + std::to_string(grid.level()));
    }
    k[d] = static_cast<std::size_t>(g);
  }
  return k;
}

// Alternating sum over intersections of sets[start..] with `running`.
double alternating_sum(const SamplePath& path, std::span<const RectSet> sets, std::size_t start,
                       const RectSet& running, bool first_level) {
  double total = 0.0;
  for (std::size_t i = start; i < sets.size(); ++i) {
    const RectSet next = first_level ? sets[i] : running.intersect(sets[i]);
    if (next.is_empty() || next.measure() <= 0.0) continue;
    total += evaluate(path, next) - alternating_sum(path, sets, i + 1, next, false);
  }
  return total;
}

}  // namespace

void ProcessSpec::validate() const {
  triplet.validate();
  if (dimension < 1 || dimension > kMaxDim) {
    throw ConfigError("dimension", "must be 1, 2 or 3, got " + std::to_string(dimension));
  }
  if (level < 1 || static_cast<std::size_t>(level) * dimension > 24) {
    throw ConfigError("level", "must satisfy 1 <= level and level * dimension <= 24, got " +
                                   std::to_string(level));
  }
}

// ---------------------------------------------------------------------------
// SamplePath

SamplePath::SamplePath(ProcessSpec spec, std::uint64_t path_id, std::vector<double> gaussian_cells,
                       std::vector<JumpAtom> jumps)
    : spec_(std::move(spec)),
      path_id_(path_id),
      grid_(spec_.level, spec_.dimension),
      gaussian_(std::move(gaussian_cells)),
      jumps_(std::move(jumps)),
      compensation_(spec_.triplet.compensation_rate()) {
  if (!gaussian_.empty() && gaussian_.size() != grid_.cell_count()) {
    throw std::invalid_argument("gaussian cell count does not match the dissection level");
  }
  for (const auto& j : jumps_) {
    for (std::size_t d = 0; d < spec_.dimension; ++d) {
      if (!(j.location[d] >= 0.0 && j.location[d] <= 1.0)) {
        throw std::invalid_argument("jump location outside [0, 1]^N");
      }
    }
  }
  build_tables();
}

void SamplePath::build_tables() {
  const std::size_t cells = grid_.cell_count();
  cell_total_.assign(cells, 0.0);
  if (!gaussian_.empty()) cell_total_ = gaussian_;
  for (const auto& j : jumps_) cell_total_[grid_.cell_index(j.location)] += j.mark;

  const std::size_t dim = spec_.dimension;
  const std::size_t side = grid_.side();
  const std::size_t stride_side = side + 1;
  std::size_t table = 1;
  for (std::size_t d = 0; d < dim; ++d) table *= stride_side;
  prefix_.assign(table, 0.0);

  for (std::size_t c = 0; c < cells; ++c) {
    const auto k = grid_.cell_coords(c);
    std::size_t idx = 0;
    for (std::size_t d = 0; d < dim; ++d) idx = idx * stride_side + (k[d] + 1);
    prefix_[idx] = cell_total_[c];
  }
  // Cumulative sums along each axis in turn.
  std::size_t stride = 1;
  for (std::size_t d = dim; d-- > 0;) {
    for (std::size_t idx = 0; idx < table; ++idx) {
      const std::size_t coord = (idx / stride) % stride_side;
      if (coord > 0) prefix_[idx] += prefix_[idx - stride];
    }
    stride *= stride_side;
  }
}

double SamplePath::gaussian_cell(std::size_t index) const {
  return gaussian_.empty() ? 0.0 : gaussian_.at(index);
}

double SamplePath::random_sum(std::span<const std::size_t> corner_units) const {
  const std::size_t stride_side = grid_.side() + 1;
  std::size_t idx = 0;
  for (std::size_t d = 0; d < spec_.dimension; ++d) idx = idx * stride_side + corner_units[d];
  return prefix_[idx];
}

SamplePath sample_path(const ProcessSpec& spec, std::uint64_t path_id) {
  spec.validate();
  const DissectionLevel grid(spec.level, spec.dimension);
  const auto& triplet = spec.triplet;

  std::vector<double> noise;
  if (triplet.sigma > 0.0) {
    rng::Philox gen(spec.seed, path_id, kNoiseStream);
    const double sd = triplet.sigma * std::sqrt(grid.cell_measure());
    noise.resize(grid.cell_count());
    for (double& v : noise) v = sd * rng::normal(gen);
  }

  std::vector<JumpAtom> jumps;
  const double rate = triplet.nu.total_mass();
  if (rate > 0.0) {
    rng::Philox gen(spec.seed, path_id, kJumpStream);
    // m([0,1]^N) = 1, so the count is Poisson(nu(R)).
    const std::uint64_t count = rng::poisson(gen, rate);
    jumps.resize(count);
    for (auto& j : jumps) {
      for (std::size_t d = 0; d < spec.dimension; ++d) j.location[d] = gen.uniform01();
      j.mark = triplet.nu.sample_mark(gen);
    }
  }
  return SamplePath(spec, path_id, std::move(noise), std::move(jumps));
}

// ---------------------------------------------------------------------------
// Evaluation

double evaluate(const SamplePath& path, const RectSet& set) {
  if (set.is_empty()) return 0.0;
  const auto k = corner_units(set, path.grid());
  const double m = set.measure();
  return path.drift_rate() * m + path.random_sum(k) - path.compensation_rate() * m;
}

double evaluate(const SamplePath& path, const IncrementRegion& region) {
  require_aligned(region, path.level());
  if (region.u0().is_empty()) return 0.0;
  const auto& grid = path.grid();
  const std::size_t dim = path.dim();
  const auto top = corner_units(region.u0(), grid);
  std::vector<std::array<std::size_t, kMaxDim>> holes;
  holes.reserve(region.subtracted().size());
  for (const auto& s : region.subtracted()) {
    if (!s.is_empty()) holes.push_back(corner_units(s, grid));
  }

  std::size_t box = 1;
  for (std::size_t d = 0; d < dim; ++d) box *= top[d];
  double random = 0.0;
  std::size_t inside = 0;
  std::array<std::size_t, kMaxDim> c{};
  for (std::size_t n = 0; n < box; ++n) {
    std::size_t rest = n;
    for (std::size_t d = dim; d-- > 0;) {
      c[d] = rest % top[d];
      rest /= top[d];
    }
    bool removed = false;
    for (const auto& h : holes) {
      bool covered = true;
      for (std::size_t d = 0; d < dim && covered; ++d) covered = c[d] + 1 <= h[d];
      if (covered) {
        removed = true;
        break;
      }
    }
    if (removed) continue;
    random += path.cell_random(grid.cell_index(std::span<const std::size_t>(c.data(), dim)));
    ++inside;
  }
  const double m = static_cast<double>(inside) * grid.cell_measure();
  return path.drift_rate() * m + random - path.compensation_rate() * m;
}

double evaluate_inclusion_exclusion(const SamplePath& path, const IncrementRegion& region) {
  require_aligned(region, path.level());
  if (region.u0().is_empty()) return 0.0;
  return evaluate(path, region.u0()) -
         alternating_sum(path, region.subtracted(), 0, region.u0(), true);
}

double evaluate_union(const SamplePath& path, std::span<const RectSet> sets) {
  if (sets.empty()) return 0.0;
  return alternating_sum(path, sets, 0, sets.front(), true);
}

ApproximateValue evaluate_approx(const SamplePath& path, const IncrementRegion& region) {
  const AlignedRegion aligned = align(region, path.level());
  return {evaluate_inclusion_exclusion(path, aligned.region), aligned.measure_gap};
}

std::complex<double> fdd_char(const ProcessSpec& spec, std::span<const IncrementRegion> regions,
                              std::span<const double> lambdas) {
  if (regions.size() != lambdas.size()) {
    throw std::invalid_argument("fdd_char needs one lambda per region");
  }
  std::complex<double> exponent = 0.0;
  for (const auto& atom : atoms(regions, spec.level)) {
    double lambda = 0.0;
    for (std::size_t j : atom.members()) lambda += lambdas[j];
    exponent += atom.measure * char_exponent(spec.triplet, lambda);
  }
  return std::exp(exponent);
}

std::vector<std::vector<double>> simulate_increments(const ProcessSpec& spec,
                                                     std::span<const IncrementRegion> regions,
                                                     std::size_t paths, unsigned threads,
                                                     std::uint64_t first_path) {
  spec.validate();
  for (const auto& r : regions) require_aligned(r, spec.level);
  return run_batch<std::vector<double>>(paths, threads, [&](std::size_t i) {
    const SamplePath path = sample_path(spec, first_path + i);
    std::vector<double> row;
    row.reserve(regions.size());
    for (const auto& r : regions) row.push_back(evaluate_inclusion_exclusion(path, r));
    return row;
  });
}

}  // namespace silevy

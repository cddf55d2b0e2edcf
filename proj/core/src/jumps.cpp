#include "silevy/jumps.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "silevy/error.hpp"
#include "silevy/rng.hpp"

namespace silevy {
namespace {

constexpr std::uint32_t kRefineStream = 2;
constexpr std::size_t kMaxScanCells = std::size_t{1} << 24;

using Coords = std::array<std::size_t, kMaxDim>;

void require_bounded_away(const MarkSet& b) {
  for (const auto& iv : b) {
    if (iv.touches_zero()) {
      throw UnsupportedError("mark set must be bounded away from 0; an interval reaches 0");
    }
  }
}

// Half-open membership, matching the cell convention used by evaluate().
bool atom_in(const RectSet& u, const Point& loc) {
  if (u.is_empty()) return false;
  for (std::size_t d = 0; d < u.dim(); ++d) {
    if (!(loc[d] < u.corner(d) || u.corner(d) >= 1.0)) return false;
  }
  return true;
}

double deterministic_rate(const SamplePath& path) { return path.drift_rate() - path.compensation_rate(); }

// Children of cell p at level L, ordered by their offset bits (last axis
// fastest). They sum to g and each has variance sd^2 (1 - 1/K) around g/K.
void split(const SamplePath& path, int level, std::size_t p, double g, double sd, std::vector<double>& out) {
  const std::size_t k = out.size();
  rng::Philox gen(path.spec().seed,
                  rng::combine(path.path_id(), rng::combine(static_cast<std::uint64_t>(level), p)),
                  kRefineStream);
  double zbar = 0.0;
  for (auto& z : out) {
    z = rng::normal(gen);
    zbar += z;
  }
  zbar /= static_cast<double>(k);
  for (auto& z : out) z = g / static_cast<double>(k) + sd * (z - zbar);
}

Coords child_coords(const Coords& parent, std::size_t bits, std::size_t dim) {
  Coords c{};
  for (std::size_t d = 0; d < dim; ++d) c[d] = 2 * parent[d] + ((bits >> (dim - 1 - d)) & 1U);
  return c;
}

// Gaussian part of every cell at `level`.
std::vector<double> gaussian_level(const SamplePath& path, int level) {
  const std::size_t dim = path.dim();
  const DissectionLevel target(level, dim);
  std::vector<double> out(target.cell_count(), 0.0);
  if (!path.has_gaussian()) return out;
  const int stored = path.level();
  const auto& base = path.grid();
  if (level <= stored) {
    const unsigned shift = static_cast<unsigned>(stored - level);
    for (std::size_t c = 0; c < base.cell_count(); ++c) {
      auto k = base.cell_coords(c);
      for (std::size_t d = 0; d < dim; ++d) k[d] >>= shift;
      out[target.cell_index(std::span<const std::size_t>(k.data(), dim))] += path.gaussian_cell(c);
    }
    return out;
  }
  std::vector<double> current(base.cell_count());
  for (std::size_t c = 0; c < current.size(); ++c) current[c] = path.gaussian_cell(c);
  const double sigma = path.spec().triplet.sigma;
  const std::size_t fan = std::size_t{1} << dim;
  std::vector<double> kids(fan);
  for (int l = stored; l < level; ++l) {
    const DissectionLevel parent(l, dim);
    const DissectionLevel child(l + 1, dim);
    const double sd = sigma * std::sqrt(child.cell_measure());
    std::vector<double> next(child.cell_count());
    for (std::size_t p = 0; p < current.size(); ++p) {
      split(path, l, p, current[p], sd, kids);
      const auto k = parent.cell_coords(p);
      for (std::size_t b = 0; b < fan; ++b) {
        const auto c = child_coords(k, b, dim);
        next[child.cell_index(std::span<const std::size_t>(c.data(), dim))] = kids[b];
      }
    }
    current.swap(next);
  }
  return current;
}

}  // namespace

double cell_increment(const SamplePath& path, int level, std::size_t cell) {
  const std::size_t dim = path.dim();
  const DissectionLevel target(level, dim);
  if (cell >= target.cell_count()) throw std::out_of_range("cell index out of range");
  const int stored = path.level();
  const auto k = target.cell_coords(cell);
  double random = 0.0;

  if (level <= stored) {
    // Block of stored cells below the coarse cell.
    const std::size_t span = std::size_t{1} << (stored - level);
    std::size_t count = 1;
    for (std::size_t d = 0; d < dim; ++d) count *= span;
    Coords c{};
    for (std::size_t n = 0; n < count; ++n) {
      std::size_t rest = n;
      for (std::size_t d = dim; d-- > 0;) {
        c[d] = k[d] * span + rest % span;
        rest /= span;
      }
      random += path.cell_random(path.grid().cell_index(std::span<const std::size_t>(c.data(), dim)));
    }
  } else {
    if (path.has_gaussian()) {
      const unsigned drop = static_cast<unsigned>(level - stored);
      Coords a{};
      for (std::size_t d = 0; d < dim; ++d) a[d] = k[d] >> drop;
      double g = path.gaussian_cell(path.grid().cell_index(std::span<const std::size_t>(a.data(), dim)));
      const double sigma = path.spec().triplet.sigma;
      std::vector<double> kids(std::size_t{1} << dim);
      for (int l = stored; l < level; ++l) {
        const DissectionLevel parent(l, dim);
        const double sd = sigma * std::sqrt(DissectionLevel(l + 1, dim).cell_measure());
        Coords pc{};
        std::size_t bits = 0;
        for (std::size_t d = 0; d < dim; ++d) {
          const unsigned up = static_cast<unsigned>(level - l);
          pc[d] = k[d] >> up;
          bits = (bits << 1) | ((k[d] >> (up - 1)) & 1U);
        }
        split(path, l, parent.cell_index(std::span<const std::size_t>(pc.data(), dim)), g, sd, kids);
        g = kids[bits];
      }
      random += g;
    }
    for (const auto& j : path.jumps()) {
      if (target.cell_index(j.location) == cell) random += j.mark;
    }
  }
  return random + deterministic_rate(path) * target.cell_measure();
}

std::vector<double> level_increments(const SamplePath& path, int level) {
  const DissectionLevel target(level, path.dim());
  if (target.cell_count() > kMaxScanCells) throw std::invalid_argument("scan level too fine");
  std::vector<double> out = gaussian_level(path, level);
  if (level <= path.level()) {
    // Marks were already binned at the stored level; aggregate them the same way.
    const unsigned shift = static_cast<unsigned>(path.level() - level);
    const auto& base = path.grid();
    for (std::size_t c = 0; c < base.cell_count(); ++c) {
      const double marks = path.cell_random(c) - path.gaussian_cell(c);
      if (marks == 0.0) continue;
      auto k = base.cell_coords(c);
      for (std::size_t d = 0; d < path.dim(); ++d) k[d] >>= shift;
      out[target.cell_index(std::span<const std::size_t>(k.data(), path.dim()))] += marks;
    }
  } else {
    for (const auto& j : path.jumps()) out[target.cell_index(j.location)] += j.mark;
  }
  const double drift = deterministic_rate(path) * target.cell_measure();
  for (double& v : out) v += drift;
  return out;
}

double point_mass_jump(const SamplePath& path, const Point& t, int nmax) {
  for (std::size_t d = 0; d < path.dim(); ++d) {
    if (!(t[d] >= 0.0 && t[d] <= 1.0)) throw std::invalid_argument("point outside [0, 1]^N");
  }
  const DissectionLevel grid(nmax, path.dim());
  return cell_increment(path, nmax, grid.cell_index(t));
}

std::size_t count_jumps(const SamplePath& path, const RectSet& u, const MarkSet& b) {
  require_bounded_away(b);
  std::size_t n = 0;
  for (const auto& j : path.jumps()) {
    if (atom_in(u, j.location) && contains(b, j.mark)) ++n;
  }
  return n;
}

double partial_sum(const SamplePath& path, const RectSet& u, const MarkSet& b) {
  require_bounded_away(b);
  double s = 0.0;
  for (const auto& j : path.jumps()) {
    if (atom_in(u, j.location) && contains(b, j.mark)) s += j.mark;
  }
  return s;
}

ScanEstimate scan_jumps(const SamplePath& path, const RectSet& u, const MarkSet& b, int level) {
  require_bounded_away(b);
  if (!is_aligned(u, level)) throw AlignmentError("scan set " + u.to_string() + " is not aligned at level " +
                                                  std::to_string(level));
  ScanEstimate out;
  if (u.is_empty()) return out;
  const DissectionLevel grid(level, path.dim());
  const auto values = level_increments(path, level);
  const double drift = deterministic_rate(path) * grid.cell_measure();
  Coords top{};
  for (std::size_t d = 0; d < path.dim(); ++d) top[d] = static_cast<std::size_t>(grid.grid_index(u.corner(d)));
  for (std::size_t c = 0; c < values.size(); ++c) {
    const auto k = grid.cell_coords(c);
    bool inside = true;
    for (std::size_t d = 0; d < path.dim() && inside; ++d) inside = k[d] < top[d];
    if (!inside) continue;
    const double x = values[c] - drift;
    if (contains(b, x)) {
      ++out.count;
      out.sum += x;
    }
  }
  return out;
}

std::vector<JumpRecord> extract_jumps(const SamplePath& path, int level, double threshold) {
  const DissectionLevel grid(level, path.dim());
  const auto values = level_increments(path, level);
  const double drift = deterministic_rate(path) * grid.cell_measure();
  std::vector<JumpRecord> out;
  for (std::size_t c = 0; c < values.size(); ++c) {
    const double x = values[c] - drift;
    if (std::abs(x) <= threshold) continue;
    JumpRecord r;
    r.location = grid.cell_lower(c);
    for (std::size_t d = 0; d < path.dim(); ++d) r.location[d] += 0.5 * grid.cell_width();
    r.mark = x;
    r.detection_level = level;
    out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Levy-Ito

LevyItoDecomposition::LevyItoDecomposition(const SamplePath& path) : path_(path) {}

double LevyItoDecomposition::gaussian_part(const RectSet& u) const {
  if (u.is_empty()) return 0.0;
  const auto& grid = path_.grid();
  if (!is_aligned(u, path_.level())) {
    throw AlignmentError("set " + u.to_string() + " is not aligned at the path level");
  }
  double g = 0.0;
  if (path_.has_gaussian()) {
    Coords top{};
    for (std::size_t d = 0; d < path_.dim(); ++d) top[d] = static_cast<std::size_t>(grid.grid_index(u.corner(d)));
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
      const auto k = grid.cell_coords(c);
      bool inside = true;
      for (std::size_t d = 0; d < path_.dim() && inside; ++d) inside = k[d] < top[d];
      if (inside) g += path_.gaussian_cell(c);
    }
  }
  return path_.drift_rate() * u.measure() + g;
}

double LevyItoDecomposition::jump_part(const RectSet& u, double eps) const {
  const double floor = path_.spec().triplet.nu.truncation();
  if (!(eps >= 0.0) || eps < floor * (1.0 - 1e-12)) {
    throw UnsupportedError("epsilon " + std::to_string(eps) + " is below the truncation " + std::to_string(floor) +
                           " of the spec");
  }
  if (u.is_empty()) return 0.0;
  const double cut = std::min(eps, 1.0);
  double s = 0.0;
  for (const auto& j : path_.jumps()) {
    if (std::abs(j.mark) > cut && atom_in(u, j.location)) s += j.mark;
  }
  double compensator = 0.0;
  if (cut < 1.0) {
    const auto& nu = path_.spec().triplet.nu;
    compensator = nu.first_moment(Interval::left_open(cut, 1.0)) + nu.first_moment(Interval{-1.0, -cut, true, false});
  }
  return s - u.measure() * compensator;
}

LevyItoReport levy_ito_decompose(const SamplePath& path, const std::vector<double>& epsilons, int family_level) {
  for (std::size_t i = 1; i < epsilons.size(); ++i) {
    if (!(epsilons[i] < epsilons[i - 1])) throw std::invalid_argument("epsilons must be decreasing");
  }
  const LevyItoDecomposition parts(path);
  const double eps0 = path.spec().triplet.nu.truncation();
  for (double e : epsilons) (void)parts.jump_part(RectSet::minimal(path.dim()), e);

  const int level = std::min(family_level, path.level());
  const DissectionLevel grid(level, path.dim());
  std::vector<RectSet> family;
  for (std::size_t c = 0; c < grid.cell_count(); ++c) family.push_back(grid.cell_rectangle(c));

  LevyItoReport out;
  out.epsilons = epsilons;
  out.tail_curve.assign(epsilons.size(), 0.0);
  out.jump_count = path.jumps().size();
  for (const auto& u : family) {
    const double final_part = parts.jump_part(u, eps0);
    const double rebuilt = parts.gaussian_part(u) + final_part;
    out.reconstruction_error = std::max(out.reconstruction_error, std::abs(rebuilt - evaluate(path, u)));
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
      out.tail_curve[i] = std::max(out.tail_curve[i], std::abs(parts.jump_part(u, epsilons[i]) - final_part));
    }
  }
  return out;
}

std::vector<double> gaussian_sup_diagnostic(const SamplePath& path, const std::vector<int>& levels) {
  std::vector<double> out;
  out.reserve(levels.size());
  for (int n : levels) {
    double s = 0.0;
    for (double v : level_increments(path, n)) s = std::max(s, std::abs(v));
    out.push_back(s);
  }
  return out;
}

}  // namespace silevy

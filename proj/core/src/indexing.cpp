#include "silevy/indexing.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "bisect.hpp"
#include "silevy/error.hpp"

namespace silevy {
namespace {

constexpr double kSnapUnits = 1e-9;
// Above this many subtracted sets inclusion-exclusion is replaced by a
// coordinate-compressed sweep (same exact value, polynomial cost).
constexpr std::size_t kInclusionExclusionLimit = 18;

void check_dim(std::size_t dim) {
  if (dim < 1 || dim > kMaxDim) {
    throw std::invalid_argument("dimension must be 1, 2 or 3, got " + std::to_string(dim));
  }
}

// Depth-first inclusion-exclusion; branches whose running intersection has
// zero measure contribute nothing and are pruned.
double inclusion_exclusion(std::span<const RectSet> sets, std::size_t start,
                           const RectSet& running, int depth) {
  double total = 0.0;
  for (std::size_t i = start; i < sets.size(); ++i) {
    const RectSet next = depth == 0 ? sets[i] : running.intersect(sets[i]);
    const double m = next.measure();
    if (m <= 0.0) continue;
    const double sign = (depth % 2 == 0) ? 1.0 : -1.0;
    total += sign * m + inclusion_exclusion(sets, i + 1, next, depth + 1);
  }
  return total;
}

double sweep_union(std::span<const RectSet> sets) {
  const std::size_t dim = sets.front().dim();
  std::array<std::vector<double>, kMaxDim> axes;
  for (std::size_t d = 0; d < dim; ++d) {
    axes[d].push_back(0.0);
    for (const auto& s : sets) {
      if (!s.is_empty()) axes[d].push_back(s.corner(d));
    }
    std::sort(axes[d].begin(), axes[d].end());
    axes[d].erase(std::unique(axes[d].begin(), axes[d].end()), axes[d].end());
  }
  std::array<std::size_t, kMaxDim> extent{1, 1, 1};
  std::size_t total_cells = 1;
  for (std::size_t d = 0; d < dim; ++d) {
    extent[d] = axes[d].size() - 1;
    total_cells *= extent[d];
  }
  double total = 0.0;
  for (std::size_t c = 0; c < total_cells; ++c) {
    std::size_t rest = c;
    Point upper{};
    double vol = 1.0;
    for (std::size_t d = dim; d-- > 0;) {
      const std::size_t k = rest % extent[d];
      rest /= extent[d];
      upper[d] = axes[d][k + 1];
      vol *= axes[d][k + 1] - axes[d][k];
    }
    for (const auto& s : sets) {
      if (!s.is_empty() && s.contains(upper)) {
        total += vol;
        break;
      }
    }
  }
  return total;
}

}  // namespace

// ---------------------------------------------------------------------------
// RectSet

RectSet::RectSet(std::span<const double> corner) : dim_(corner.size()), empty_(false) {
  check_dim(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    const double c = corner[i];
    if (!(c >= 0.0 && c <= 1.0)) {
      throw std::invalid_argument("corner[" + std::to_string(i) + "] = " + std::to_string(c) +
                                  " outside [0, 1]");
    }
    corner_[i] = c;
  }
}

RectSet::RectSet(std::initializer_list<double> corner)
    : RectSet(std::span<const double>(corner.begin(), corner.size())) {}

RectSet RectSet::empty(std::size_t dim) {
  check_dim(dim);
  RectSet s;
  s.dim_ = dim;
  s.empty_ = true;
  return s;
}

RectSet RectSet::minimal(std::size_t dim) {
  check_dim(dim);
  RectSet s;
  s.dim_ = dim;
  s.empty_ = false;
  return s;
}

RectSet RectSet::full(std::size_t dim) {
  RectSet s = minimal(dim);
  for (std::size_t i = 0; i < dim; ++i) s.corner_[i] = 1.0;
  return s;
}

double RectSet::measure() const {
  if (empty_) return 0.0;
  double m = 1.0;
  for (std::size_t i = 0; i < dim_; ++i) m *= corner_[i];
  return m;
}

RectSet RectSet::intersect(const RectSet& other) const {
  if (dim_ != other.dim_) throw std::invalid_argument("dimension mismatch in intersect");
  if (empty_ || other.empty_) return empty(dim_);
  RectSet s = *this;
  for (std::size_t i = 0; i < dim_; ++i) s.corner_[i] = std::min(corner_[i], other.corner_[i]);
  return s;
}

bool RectSet::contains(const RectSet& other) const {
  if (other.empty_) return true;
  if (empty_) return false;
  for (std::size_t i = 0; i < dim_; ++i) {
    if (other.corner_[i] > corner_[i]) return false;
  }
  return true;
}

bool RectSet::contains(const Point& p) const {
  if (empty_) return false;
  for (std::size_t i = 0; i < dim_; ++i) {
    if (p[i] < 0.0 || p[i] > corner_[i]) return false;
  }
  return true;
}

bool RectSet::operator==(const RectSet& other) const {
  if (dim_ != other.dim_ || empty_ != other.empty_) return false;
  if (empty_) return true;
  return std::equal(corner_.begin(), corner_.begin() + dim_, other.corner_.begin());
}

bool RectSet::operator<(const RectSet& other) const {
  if (empty_ != other.empty_) return empty_;
  return std::lexicographical_compare(corner_.begin(), corner_.begin() + dim_,
                                      other.corner_.begin(), other.corner_.begin() + other.dim_);
}

std::string RectSet::to_string() const {
  if (empty_) return "{}";
  std::ostringstream os;
  os << "[0,(";
  for (std::size_t i = 0; i < dim_; ++i) os << (i ? "," : "") << corner_[i];
  os << ")]";
  return os.str();
}

double union_measure(std::span<const RectSet> sets) {
  if (sets.empty()) return 0.0;
  if (sets.size() > kInclusionExclusionLimit) return sweep_union(sets);
  return inclusion_exclusion(sets, 0, sets.front(), 0);
}

// ---------------------------------------------------------------------------
// IncrementRegion

IncrementRegion::IncrementRegion(RectSet u0, std::vector<RectSet> subtracted)
    : u0_(std::move(u0)), subtracted_(std::move(subtracted)) {
  for (auto& s : subtracted_) {
    if (s.dim() != u0_.dim()) throw std::invalid_argument("dimension mismatch in region");
    s = s.intersect(u0_);
  }
}

IncrementRegion IncrementRegion::empty(std::size_t dim) {
  return IncrementRegion(RectSet::empty(dim));
}

bool IncrementRegion::contains(const Point& p) const {
  if (!u0_.contains(p)) return false;
  return std::none_of(subtracted_.begin(), subtracted_.end(),
                      [&](const RectSet& s) { return s.contains(p); });
}

double measure(const IncrementRegion& region) {
  if (region.u0().is_empty()) return 0.0;
  const double m = region.u0().measure() - union_measure(region.subtracted());
  return std::max(m, 0.0);
}

IncrementRegion canonical_form(const IncrementRegion& region) {
  const std::size_t dim = region.dim();
  const RectSet& u = region.u0();
  if (u.is_empty()) return IncrementRegion::empty(dim);

  std::vector<RectSet> v;
  for (const auto& s : region.subtracted()) {
    if (s.is_empty()) continue;
    // A subtracted set holding the top corner of u0 swallows the region.
    if (s.contains(u)) return IncrementRegion::empty(dim);
    v.push_back(s);
  }
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());

  std::vector<RectSet> kept;
  for (std::size_t i = 0; i < v.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < v.size() && !dominated; ++j) {
      dominated = j != i && v[j].contains(v[i]);
    }
    if (!dominated) kept.push_back(v[i]);
  }
  return IncrementRegion(u, std::move(kept));
}

// ---------------------------------------------------------------------------
// DissectionLevel

DissectionLevel::DissectionLevel(int level, std::size_t dim) : level_(level), dim_(dim) {
  check_dim(dim);
  if (level < 0 || static_cast<std::size_t>(level) * dim > 60) {
    throw std::invalid_argument("dissection level out of range: " + std::to_string(level));
  }
  side_ = std::size_t{1} << level;
  width_ = std::ldexp(1.0, -level);
}

double DissectionLevel::cell_measure() const {
  return std::pow(width_, static_cast<double>(dim_));
}

std::size_t DissectionLevel::cell_count() const {
  std::size_t k = 1;
  for (std::size_t d = 0; d < dim_; ++d) k *= side_;
  return k;
}

std::size_t DissectionLevel::cell_index(const Point& p) const {
  std::size_t index = 0;
  for (std::size_t d = 0; d < dim_; ++d) {
    const double scaled = std::floor(p[d] * static_cast<double>(side_));
    std::size_t k = scaled <= 0.0 ? 0 : static_cast<std::size_t>(scaled);
    k = std::min(k, side_ - 1);
    index = index * side_ + k;
  }
  return index;
}

std::size_t DissectionLevel::cell_index(std::span<const std::size_t> coords) const {
  std::size_t index = 0;
  for (std::size_t d = 0; d < dim_; ++d) index = index * side_ + coords[d];
  return index;
}

std::array<std::size_t, kMaxDim> DissectionLevel::cell_coords(std::size_t index) const {
  std::array<std::size_t, kMaxDim> c{};
  for (std::size_t d = dim_; d-- > 0;) {
    c[d] = index % side_;
    index /= side_;
  }
  return c;
}

Point DissectionLevel::cell_lower(std::size_t index) const {
  const auto c = cell_coords(index);
  Point p{};
  for (std::size_t d = 0; d < dim_; ++d) p[d] = static_cast<double>(c[d]) * width_;
  return p;
}

RectSet DissectionLevel::cell_rectangle(std::size_t index) const {
  const auto c = cell_coords(index);
  std::array<double, kMaxDim> upper{};
  for (std::size_t d = 0; d < dim_; ++d) upper[d] = static_cast<double>(c[d] + 1) * width_;
  return RectSet(std::span<const double>(upper.data(), dim_));
}

IncrementRegion DissectionLevel::left_neighbourhood(std::size_t index) const {
  const RectSet a = cell_rectangle(index);
  std::vector<RectSet> earlier;
  for (std::size_t d = 0; d < dim_; ++d) {
    std::array<double, kMaxDim> corner{};
    for (std::size_t e = 0; e < dim_; ++e) corner[e] = a.corner(e);
    corner[d] -= width_;
    earlier.emplace_back(std::span<const double>(corner.data(), dim_));
  }
  return IncrementRegion(a, std::move(earlier));
}

long DissectionLevel::grid_index(double coord) const {
  const double scaled = coord * static_cast<double>(side_);
  const double r = std::round(scaled);
  if (std::abs(scaled - r) > kSnapUnits) return -1;
  return static_cast<long>(r);
}

// ---------------------------------------------------------------------------
// Alignment

bool is_aligned(const RectSet& set, int level) {
  if (set.is_empty()) return true;
  const DissectionLevel grid(level, set.dim());
  for (std::size_t d = 0; d < set.dim(); ++d) {
    if (grid.grid_index(set.corner(d)) < 0) return false;
  }
  return true;
}

bool is_aligned(const IncrementRegion& region, int level) {
  if (!is_aligned(region.u0(), level)) return false;
  return std::all_of(region.subtracted().begin(), region.subtracted().end(),
                     [&](const RectSet& s) { return is_aligned(s, level); });
}

void require_aligned(const IncrementRegion& region, int level) {
  auto check = [&](const RectSet& s, const std::string& where) {
    if (s.is_empty()) return;
    const DissectionLevel grid(level, s.dim());
    for (std::size_t d = 0; d < s.dim(); ++d) {
      if (grid.grid_index(s.corner(d)) < 0) {
        std::ostringstream os;
        os << where << " corner[" << d << "] = " << s.corner(d)
           << " is not a multiple of 2^-" << level;
        throw AlignmentError(os.str());
      }
    }
  };
  check(region.u0(), "u0");
  for (std::size_t i = 0; i < region.subtracted().size(); ++i) {
    check(region.subtracted()[i], "subtracted[" + std::to_string(i) + "]");
  }
}

RectSet snap_to_grid(const RectSet& set, int level) {
  if (set.is_empty()) return set;
  const DissectionLevel grid(level, set.dim());
  std::array<double, kMaxDim> corner{};
  for (std::size_t d = 0; d < set.dim(); ++d) {
    const long k = grid.grid_index(set.corner(d));
    corner[d] = k >= 0 ? static_cast<double>(k) * grid.cell_width() : set.corner(d);
  }
  return RectSet(std::span<const double>(corner.data(), set.dim()));
}

RectSet outer_approximation(const RectSet& set, int level) {
  if (set.is_empty()) return set;
  const DissectionLevel grid(level, set.dim());
  const double side = static_cast<double>(grid.side());
  std::array<double, kMaxDim> corner{};
  for (std::size_t d = 0; d < set.dim(); ++d) {
    corner[d] = std::min(1.0, (std::floor(set.corner(d) * side) + 1.0) / side);
  }
  return RectSet(std::span<const double>(corner.data(), set.dim()));
}

AlignedRegion align(const IncrementRegion& region, int level) {
  auto round_up = [&](const RectSet& s) {
    const RectSet snapped = snap_to_grid(s, level);
    return is_aligned(snapped, level) ? snapped : outer_approximation(snapped, level);
  };
  std::vector<RectSet> sub;
  sub.reserve(region.subtracted().size());
  for (const auto& s : region.subtracted()) sub.push_back(round_up(s));
  AlignedRegion out{IncrementRegion(round_up(region.u0()), std::move(sub)), 0.0};
  out.measure_gap = std::abs(measure(out.region) - measure(region));
  return out;
}

// ---------------------------------------------------------------------------
// Atoms

double Box::measure(std::size_t dim) const {
  double m = 1.0;
  for (std::size_t d = 0; d < dim; ++d) m *= upper[d] - lower[d];
  return m;
}

std::vector<std::size_t> Atom::members() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < 64; ++i) {
    if (mask >> i & 1u) out.push_back(i);
  }
  return out;
}

std::vector<Atom> atoms(std::span<const IncrementRegion> regions, int level) {
  if (regions.empty()) return {};
  if (regions.size() > 64) throw std::invalid_argument("atoms supports at most 64 regions");
  const std::size_t dim = regions.front().dim();
  for (const auto& r : regions) {
    if (r.dim() != dim) throw std::invalid_argument("dimension mismatch in atoms");
    require_aligned(r, level);
  }

  // Compressed grid from every corner coordinate; each compressed box lies
  // inside or outside each region as a whole.
  std::array<std::vector<double>, kMaxDim> axes;
  for (std::size_t d = 0; d < dim; ++d) {
    axes[d].push_back(0.0);
    for (const auto& r : regions) {
      if (r.u0().is_empty()) continue;
      axes[d].push_back(snap_to_grid(r.u0(), level).corner(d));
      for (const auto& s : r.subtracted()) {
        if (!s.is_empty()) axes[d].push_back(snap_to_grid(s, level).corner(d));
      }
    }
    std::sort(axes[d].begin(), axes[d].end());
    axes[d].erase(std::unique(axes[d].begin(), axes[d].end()), axes[d].end());
  }
  std::array<std::size_t, kMaxDim> extent{1, 1, 1};
  std::size_t total = 1;
  for (std::size_t d = 0; d < dim; ++d) {
    extent[d] = axes[d].size() - 1;
    total *= extent[d];
  }

  std::map<std::uint64_t, Atom> by_mask;
  for (std::size_t c = 0; c < total; ++c) {
    std::size_t rest = c;
    Box box;
    Point mid{};
    for (std::size_t d = dim; d-- > 0;) {
      const std::size_t k = rest % extent[d];
      rest /= extent[d];
      box.lower[d] = axes[d][k];
      box.upper[d] = axes[d][k + 1];
      mid[d] = 0.5 * (box.lower[d] + box.upper[d]);
    }
    std::uint64_t mask = 0;
    for (std::size_t i = 0; i < regions.size(); ++i) {
      if (regions[i].contains(mid)) mask |= std::uint64_t{1} << i;
    }
    if (mask == 0) continue;
    Atom& atom = by_mask[mask];
    atom.mask = mask;
    atom.measure += box.measure(dim);
    atom.boxes.push_back(box);
  }

  std::vector<Atom> out;
  out.reserve(by_mask.size());
  for (auto& [mask, atom] : by_mask) out.push_back(std::move(atom));
  return out;
}

int common_level(std::span<const IncrementRegion> regions, int max_level) {
  for (int level = 0; level <= max_level; ++level) {
    const bool ok = std::all_of(regions.begin(), regions.end(),
                                [&](const IncrementRegion& r) { return is_aligned(r, level); });
    if (ok) return level;
  }
  throw AlignmentError("regions are not aligned at any level up to " + std::to_string(max_level));
}

// ---------------------------------------------------------------------------
// m-partition

std::vector<IncrementRegion> m_partition(const RectSet& u, int n) {
  if (n < 1) throw std::invalid_argument("m_partition needs n >= 1");
  const double total = u.measure();
  if (!(total > 0.0)) throw DegenerateSetError("m_partition of a set with zero measure " + u.to_string());
  if (n == 1) return {IncrementRegion(u)};

  const std::size_t dim = u.dim();
  auto along = [&](double t) {
    std::array<double, kMaxDim> corner{};
    for (std::size_t d = 0; d < dim; ++d) corner[d] = std::min(u.corner(d), t * u.corner(d));
    return RectSet(std::span<const double>(corner.data(), dim));
  };
  auto theta = [&](double t) { return along(t).measure(); };

  std::vector<RectSet> levels;
  levels.reserve(static_cast<std::size_t>(n) + 1);
  levels.push_back(RectSet::minimal(dim));
  for (int i = 1; i < n; ++i) {
    const double target = total * i / n;
    const double t = detail::leftmost_crossing(theta, target, 0.0, 1.0);
    const double residual = std::abs(theta(t) - target);
    if (residual > kPartitionTolerance) {
      throw NumericError("m_partition bisection did not reach tolerance", residual);
    }
    levels.push_back(along(t));
  }
  levels.push_back(u);

  std::vector<IncrementRegion> parts;
  parts.reserve(static_cast<std::size_t>(n));
  parts.emplace_back(levels[1]);
  for (int i = 2; i <= n; ++i) {
    parts.emplace_back(levels[static_cast<std::size_t>(i)],
                       std::vector<RectSet>{levels[static_cast<std::size_t>(i) - 1]});
  }
  return parts;
}

}  // namespace silevy

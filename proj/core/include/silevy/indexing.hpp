#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace silevy {

inline constexpr std::size_t kMaxDim = 3;

/// A point of [0,1]^N. Coordinates past the dimension are zero.
using Point = std::array<double, kMaxDim>;

/// Element [0, corner] of the indexing collection of rectangles in [0,1]^N.
///
/// The empty set is a distinguished value. The minimal nonempty set is the
/// single point {0} (corner all zeros) and has measure zero.
class RectSet {
 public:
  RectSet() = default;
  /// Throws std::invalid_argument unless 1 <= corner.size() <= 3 and every
  /// coordinate is in [0, 1].
  explicit RectSet(std::span<const double> corner);
  RectSet(std::initializer_list<double> corner);

  static RectSet empty(std::size_t dim);
  static RectSet minimal(std::size_t dim);
  static RectSet full(std::size_t dim);

  std::size_t dim() const { return dim_; }
  bool is_empty() const { return empty_; }
  double corner(std::size_t i) const { return corner_[i]; }
  std::span<const double> corner() const { return {corner_.data(), dim_}; }

  double measure() const;
  RectSet intersect(const RectSet& other) const;
  bool contains(const RectSet& other) const;
  /// Closed-rectangle membership.
  bool contains(const Point& p) const;

  bool operator==(const RectSet& other) const;
  bool operator<(const RectSet& other) const;

  std::string to_string() const;

 private:
  std::array<double, kMaxDim> corner_{};
  std::size_t dim_ = 0;
  bool empty_ = true;
};

/// Lebesgue measure of a finite union of rectangles (inclusion-exclusion).
double union_measure(std::span<const RectSet> sets);

/// Element u0 \ (U1 u ... u Uk) of the class C. Subtracted sets are stored
/// already intersected with u0.
class IncrementRegion {
 public:
  IncrementRegion() = default;
  explicit IncrementRegion(RectSet u0, std::vector<RectSet> subtracted = {});

  static IncrementRegion empty(std::size_t dim);

  const RectSet& u0() const { return u0_; }
  const std::vector<RectSet>& subtracted() const { return subtracted_; }
  std::size_t dim() const { return u0_.dim(); }

  /// Closed u0 minus closed subtracted sets.
  bool contains(const Point& p) const;

 private:
  RectSet u0_;
  std::vector<RectSet> subtracted_;
};

/// Exact Lebesgue measure by inclusion-exclusion.
double measure(const IncrementRegion& region);

/// Canonical U \ V form. U is the minimal rectangle containing the region;
/// V drops empty, duplicate and dominated subtracted sets and is sorted.
/// An empty region comes back as IncrementRegion::empty.
IncrementRegion canonical_form(const IncrementRegion& region);

/// Dyadic dissection of [0,1]^N at level n into 2^(nN) half-open cells.
class DissectionLevel {
 public:
  DissectionLevel(int level, std::size_t dim);

  int level() const { return level_; }
  std::size_t dim() const { return dim_; }
  std::size_t side() const { return side_; }
  double cell_width() const { return width_; }
  double cell_measure() const;
  std::size_t cell_count() const;

  /// Row-major cell index; the last coordinate varies fastest.
  std::size_t cell_index(const Point& p) const;
  std::size_t cell_index(std::span<const std::size_t> coords) const;
  std::array<std::size_t, kMaxDim> cell_coords(std::size_t index) const;
  /// Lower corner of a cell (the cell is [lower, lower + width)).
  Point cell_lower(std::size_t index) const;

  /// The dyadic rectangle [0, upper corner of cell]; the cell is its left
  /// neighbourhood under row-major ordering of the level's rectangles.
  RectSet cell_rectangle(std::size_t index) const;
  /// The cell written as A \ (union of earlier rectangles of the level).
  IncrementRegion left_neighbourhood(std::size_t index) const;

  /// Grid-unit index of a coordinate, or -1 when it is off the grid.
  long grid_index(double coord) const;

 private:
  int level_;
  std::size_t dim_;
  std::size_t side_;
  double width_;
};

/// True when every corner coordinate lies on the 2^-level grid.
bool is_aligned(const RectSet& set, int level);
bool is_aligned(const IncrementRegion& region, int level);
/// Throws AlignmentError naming the first offending coordinate.
void require_aligned(const IncrementRegion& region, int level);

/// Snaps coordinates within 1e-9 grid units of a node onto the node.
RectSet snap_to_grid(const RectSet& set, int level);

/// Smallest level-n dyadic rectangle whose interior contains the set.
RectSet outer_approximation(const RectSet& set, int level);

struct AlignedRegion {
  IncrementRegion region;
  /// |m(aligned) - m(original)|.
  double measure_gap = 0.0;
};

/// Grid-aligned stand-in for an arbitrary region: exact when already aligned,
/// otherwise every rectangle is rounded up to the level-n grid.
AlignedRegion align(const IncrementRegion& region, int level);

/// Axis-aligned half-open box [lower, upper).
struct Box {
  Point lower{};
  Point upper{};
  double measure(std::size_t dim) const;
};

struct Atom {
  std::uint64_t mask = 0;  ///< bit i set iff the atom lies in region i
  std::vector<Box> boxes;  ///< disjoint boxes with grid-aligned faces
  double measure = 0.0;

  std::vector<std::size_t> members() const;
};

/// Disjoint nonempty overlap atoms of the regions and their membership
/// masks, ordered by mask. Atoms partition the union of the regions.
///
/// Every region must be aligned at `level`; at most 64 regions.
std::vector<Atom> atoms(std::span<const IncrementRegion> regions, int level);

/// Smallest level at which all regions are aligned, up to `max_level`;
/// throws AlignmentError when none is.
int common_level(std::span<const IncrementRegion> regions, int max_level = 30);

/// Splits u into n disjoint regions of measure m(u)/n along the diagonal
/// flow t -> [0, t * corner(u)].
std::vector<IncrementRegion> m_partition(const RectSet& u, int n);

/// Root-finding tolerance on the measure for m_partition.
inline constexpr double kPartitionTolerance = 1e-12;

}  // namespace silevy

#pragma once

#include <cmath>
#include <vector>

#include "silevy/indexing.hpp"
#include "silevy/simulate.hpp"

namespace testing_support {

inline silevy::ProcessSpec spec(const silevy::LevyTriplet& t, std::size_t dim, int level, std::uint64_t seed) {
  silevy::ProcessSpec s;
  s.triplet = t;
  s.dimension = dim;
  s.level = level;
  s.seed = seed;
  return s;
}

// Centres of all level-n cells, for set-equality and measure oracles.
inline std::vector<silevy::Point> cell_centres(int level, std::size_t dim) {
  const silevy::DissectionLevel grid(level, dim);
  std::vector<silevy::Point> out;
  for (std::size_t i = 0; i < grid.cell_count(); ++i) {
    silevy::Point p = grid.cell_lower(i);
    for (std::size_t d = 0; d < dim; ++d) p[d] += 0.5 * grid.cell_width();
    out.push_back(p);
  }
  return out;
}

// Membership of a cell centre in u0 minus the subtracted rectangles.
inline bool centre_in(const silevy::IncrementRegion& r, const silevy::Point& p) {
  auto inside = [&](const silevy::RectSet& s) {
    if (s.is_empty()) return false;
    for (std::size_t d = 0; d < s.dim(); ++d) {
      if (p[d] > s.corner(d)) return false;
    }
    return true;
  };
  if (!inside(r.u0())) return false;
  for (const auto& s : r.subtracted()) {
    if (inside(s)) return false;
  }
  return true;
}

inline double cell_count_measure(const silevy::IncrementRegion& r, int level) {
  const silevy::DissectionLevel grid(level, r.dim());
  double m = 0.0;
  for (const auto& p : cell_centres(level, r.dim())) m += centre_in(r, p) ? grid.cell_measure() : 0.0;
  return m;
}

}  // namespace testing_support

#include "silevy/flows.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bisect.hpp"
#include "silevy/batch.hpp"
#include "silevy/error.hpp"

namespace silevy {

ElementaryFlow::ElementaryFlow(std::size_t dim, std::vector<Point> vertices, std::vector<double> knots)
    : dim_(dim), vertices_(std::move(vertices)), knots_(std::move(knots)) {
  if (dim_ < 1 || dim_ > kMaxDim) throw std::invalid_argument("flow dimension must be 1, 2 or 3");
  if (vertices_.size() < 2) throw std::invalid_argument("a flow polyline needs at least two vertices");
  if (knots_.size() != vertices_.size()) throw std::invalid_argument("one knot per flow vertex");
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    for (std::size_t d = 0; d < dim_; ++d) {
      const double c = vertices_[i][d];
      if (!(c >= 0.0 && c <= 1.0)) throw std::invalid_argument("flow vertex outside [0, 1]^N");
      if (i > 0 && c < vertices_[i - 1][d]) {
        throw std::invalid_argument("flow vertices must be coordinatewise nondecreasing (vertex " +
                                    std::to_string(i) + ")");
      }
    }
    for (std::size_t d = dim_; d < kMaxDim; ++d) vertices_[i][d] = 0.0;
    if (i > 0 && !(knots_[i] > knots_[i - 1])) {
      throw std::invalid_argument("flow knots must be strictly increasing");
    }
  }
}

ElementaryFlow ElementaryFlow::polyline(std::size_t dim, std::vector<Point> vertices) {
  std::vector<double> knots(vertices.size());
  for (std::size_t i = 0; i < knots.size(); ++i) {
    knots[i] = static_cast<double>(i) / static_cast<double>(knots.size() - 1);
  }
  return ElementaryFlow(dim, std::move(vertices), std::move(knots));
}

ElementaryFlow ElementaryFlow::diagonal(std::size_t dim) {
  Point one{};
  for (std::size_t d = 0; d < dim; ++d) one[d] = 1.0;
  return ElementaryFlow(dim, {Point{}, one}, {0.0, 1.0});
}

Point ElementaryFlow::corner_at(double t) const {
  t = std::clamp(t, start(), end());
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  std::size_t seg = it == knots_.begin() ? 0 : static_cast<std::size_t>(it - knots_.begin()) - 1;
  if (seg + 1 >= knots_.size()) return vertices_.back();
  const double w = (t - knots_[seg]) / (knots_[seg + 1] - knots_[seg]);
  Point p{};
  for (std::size_t d = 0; d < dim_; ++d) {
    const double a = vertices_[seg][d];
    const double b = vertices_[seg + 1][d];
    p[d] = std::clamp(a + w * (b - a), a, b);
  }
  return p;
}

RectSet ElementaryFlow::at(double t) const {
  const Point p = corner_at(t);
  return RectSet(std::span<const double>(p.data(), dim_));
}

ElementaryFlow ElementaryFlow::reparametrized(std::vector<double> knots) const {
  return ElementaryFlow(dim_, vertices_, std::move(knots));
}

SimpleFlow::SimpleFlow(ElementaryFlow flow) : segments_{std::move(flow)} {}

SimpleFlow::SimpleFlow(std::vector<ElementaryFlow> segments) : segments_(std::move(segments)) {
  if (segments_.empty()) throw std::invalid_argument("a simple flow needs at least one segment");
  std::vector<RectSet> accumulated{segments_.front().at(segments_.front().end())};
  for (std::size_t i = 1; i < segments_.size(); ++i) {
    const auto& prev = segments_[i - 1];
    const auto& seg = segments_[i];
    if (seg.dim() != prev.dim()) throw std::invalid_argument("flow segments differ in dimension");
    if (std::abs(seg.start() - prev.end()) > 1e-12) {
      throw std::invalid_argument("flow segment " + std::to_string(i) + " does not start where the previous ends");
    }
    // Continuity: the new segment starts inside what has been swept so far.
    const RectSet first = seg.at(seg.start());
    const bool inside = std::any_of(accumulated.begin(), accumulated.end(),
                                    [&](const RectSet& r) { return r.contains(first); });
    if (!inside) {
      throw std::invalid_argument("flow segment " + std::to_string(i) + " is not continuous with the previous ones");
    }
    accumulated.push_back(seg.at(seg.end()));
  }
}

std::vector<RectSet> SimpleFlow::at(double t) const {
  t = std::clamp(t, start(), end());
  std::vector<RectSet> out;
  for (const auto& seg : segments_) {
    if (t >= seg.end() && &seg != &segments_.back()) {
      out.push_back(seg.at(seg.end()));
      continue;
    }
    out.push_back(seg.at(t));
    break;
  }
  return out;
}

double theta(const SimpleFlow& flow, double t) {
  const auto sets = flow.at(t);
  return union_measure(sets);
}

double theta_inverse(const SimpleFlow& flow, double s) {
  const double lo = theta(flow, flow.start());
  const double hi = theta(flow, flow.end());
  if (s < lo - 1e-12 || s > hi + 1e-12) {
    throw RangeError("s = " + std::to_string(s) + " outside [" + std::to_string(lo) + ", " +
                     std::to_string(hi) + "]");
  }
  return detail::leftmost_crossing([&](double t) { return theta(flow, t); }, std::clamp(s, lo, hi),
                                   flow.start(), flow.end());
}

double max_backward_step(const SimpleFlow& flow, std::size_t points) {
  double worst = 0.0;
  double prev = theta(flow, flow.start());
  for (std::size_t i = 1; i < points; ++i) {
    const double t = flow.start() + (flow.end() - flow.start()) * static_cast<double>(i) /
                                        static_cast<double>(points - 1);
    const double cur = theta(flow, t);
    worst = std::max(worst, prev - cur);
    prev = cur;
  }
  return worst;
}

ProjectedTrajectory project(const SamplePath& path, const SimpleFlow& flow,
                            const std::vector<double>& mesh) {
  if (flow.dim() != path.dim()) throw std::invalid_argument("flow and path differ in dimension");
  ProjectedTrajectory out;
  out.s = mesh;
  out.values.reserve(mesh.size());
  const int level = path.level();
  for (double s : mesh) {
    const double t = theta_inverse(flow, s);
    std::vector<RectSet> sets = flow.at(t);
    bool aligned = true;
    for (auto& r : sets) {
      r = snap_to_grid(r, level);
      aligned = aligned && is_aligned(r, level);
    }
    if (!aligned) {
      const double exact = union_measure(sets);
      for (auto& r : sets) {
        if (!is_aligned(r, level)) r = outer_approximation(r, level);
      }
      out.max_gap = std::max(out.max_gap, std::abs(union_measure(sets) - exact));
    }
    out.values.push_back(evaluate_union(path, sets));
  }
  return out;
}

std::vector<std::vector<double>> projected_increments(const ProcessSpec& spec, const SimpleFlow& flow,
                                                      const std::vector<double>& mesh,
                                                      std::size_t paths, unsigned threads,
                                                      std::uint64_t first_path) {
  return run_batch<std::vector<double>>(paths, threads, [&](std::size_t i) {
    const auto traj = project(sample_path(spec, first_path + i), flow, mesh);
    std::vector<double> inc(mesh.size() > 0 ? mesh.size() - 1 : 0);
    for (std::size_t k = 0; k < inc.size(); ++k) inc[k] = traj.values[k + 1] - traj.values[k];
    return inc;
  });
}

std::vector<double> uniform_mesh(const SimpleFlow& flow, std::size_t count) {
  const double lo = theta(flow, flow.start());
  const double hi = theta(flow, flow.end());
  std::vector<double> mesh(count + 1);
  for (std::size_t i = 0; i <= count; ++i) {
    mesh[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count);
  }
  return mesh;
}

std::vector<ShippedFlow> shipped_flows() {
  std::vector<ShippedFlow> out;
  out.push_back({"top-edge", ElementaryFlow::polyline(2, {Point{0.0, 1.0}, Point{1.0, 1.0}}),
                 {0.0, 0.25, 0.5, 0.75, 1.0}});
  out.push_back({"staircase",
                 ElementaryFlow::polyline(2, {Point{0.0, 0.5}, Point{1.0, 0.5}, Point{1.0, 1.0}}),
                 {0.0, 0.25, 0.5, 0.75, 1.0}});
  out.push_back({"diagonal", ElementaryFlow::diagonal(2), {0.0, 1.0 / 64, 25.0 / 64, 49.0 / 64}});
  return out;
}

}  // namespace silevy

#pragma once

#include <string>
#include <vector>

#include "silevy/indexing.hpp"
#include "silevy/simulate.hpp"

namespace silevy {

/// t -> [0, path(t)] where path is a coordinatewise nondecreasing polyline.
/// Vertex i is reached at parameter knots[i].
class ElementaryFlow {
 public:
  ElementaryFlow(std::size_t dim, std::vector<Point> vertices, std::vector<double> knots);

  /// Polyline with knots evenly spread over [0, 1].
  static ElementaryFlow polyline(std::size_t dim, std::vector<Point> vertices);
  /// f(t) = [0, (t, ..., t)] on [0, 1].
  static ElementaryFlow diagonal(std::size_t dim);

  std::size_t dim() const { return dim_; }
  double start() const { return knots_.front(); }
  double end() const { return knots_.back(); }
  const std::vector<Point>& vertices() const { return vertices_; }
  const std::vector<double>& knots() const { return knots_; }

  Point corner_at(double t) const;
  RectSet at(double t) const;

  /// Same geometric path traversed with new knot parameters.
  ElementaryFlow reparametrized(std::vector<double> knots) const;

 private:
  std::size_t dim_;
  std::vector<Point> vertices_;
  std::vector<double> knots_;
};

/// Finite composition of elementary flows with values in A(u): on segment i,
/// f(t) = f_0(t_1) ∪ ... ∪ f_{i-1}(t_i) ∪ f_i(t).
class SimpleFlow {
 public:
  SimpleFlow(ElementaryFlow flow);  // NOLINT: an elementary flow is a one-segment simple flow
  explicit SimpleFlow(std::vector<ElementaryFlow> segments);

  std::size_t dim() const { return segments_.front().dim(); }
  double start() const { return segments_.front().start(); }
  double end() const { return segments_.back().end(); }
  const std::vector<ElementaryFlow>& segments() const { return segments_; }

  /// Rectangles whose union is f(t).
  std::vector<RectSet> at(double t) const;

 private:
  std::vector<ElementaryFlow> segments_;
};

/// theta(t) = m[f(t)].
double theta(const SimpleFlow& flow, double t);

/// Leftmost t with theta(t) = s, to 1e-12 in t. Throws RangeError when s is
/// outside [theta(start), theta(end)].
double theta_inverse(const SimpleFlow& flow, double s);

/// Largest decrease of theta between consecutive points of a uniform mesh.
double max_backward_step(const SimpleFlow& flow, std::size_t points = 1000);

struct ProjectedTrajectory {
  std::vector<double> s;
  std::vector<double> values;
  /// Largest measure gap introduced by aligning non-grid flow sets.
  double max_gap = 0.0;
};

/// m-standard projection s -> X_{f(theta^{-1}(s))} on the mesh.
ProjectedTrajectory project(const SamplePath& path, const SimpleFlow& flow,
                            const std::vector<double>& mesh);

/// Increments of the projection between consecutive mesh points, one row per
/// path.
std::vector<std::vector<double>> projected_increments(const ProcessSpec& spec, const SimpleFlow& flow,
                                                      const std::vector<double>& mesh,
                                                      std::size_t paths, unsigned threads = 1,
                                                      std::uint64_t first_path = 0);

/// `count + 1` evenly spaced s-values over [theta(start), theta(end)].
std::vector<double> uniform_mesh(const SimpleFlow& flow, std::size_t count);

struct ShippedFlow {
  std::string name;
  SimpleFlow flow;
  /// s-mesh whose flow sets all lie on the level-3 grid.
  std::vector<double> mesh;
};

/// Flows of the verification suites in dimension 2: "top-edge",
/// "staircase" and "diagonal".
std::vector<ShippedFlow> shipped_flows();

}  // namespace silevy

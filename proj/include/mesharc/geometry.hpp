#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mesharc/point.hpp"

namespace mesharc {

/// Axis-aligned rectangle [xmin, xmax] x [ymin, ymax].
class RectDomain {
 public:
  RectDomain(double xmin, double xmax, double ymin, double ymax);
  static RectDomain square(double half_width = 1.0) {
    return {-half_width, half_width, -half_width, half_width};
  }

  double xmin() const noexcept { return xmin_; }
  double xmax() const noexcept { return xmax_; }
  double ymin() const noexcept { return ymin_; }
  double ymax() const noexcept { return ymax_; }
  double width() const noexcept { return xmax_ - xmin_; }
  double height() const noexcept { return ymax_ - ymin_; }
  double area() const noexcept { return width() * height(); }
  double diagonal() const noexcept { return std::hypot(width(), height()); }

  bool contains(const Point& p, double tol = 0.0) const noexcept;
  /// Distance from an interior point to the boundary.
  double distance_to_boundary(const Point& p) const noexcept;

 private:
  double xmin_, xmax_, ymin_, ymax_;
};

/// Ordered centre set with optional uniform-grid provenance.
struct PointSet {
  std::vector<Point> points;
  std::optional<int> grid_m;  ///< m for an m x m uniform grid

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }
  const Point& operator[](std::size_t i) const { return points[i]; }
};

PointSet uniform_grid(const RectDomain& domain, int m);

/// Analytic for uniform grids, otherwise a 512 x 512 probe grid estimate.
double fill_distance(const PointSet& X, const RectDomain& domain);
double fill_distance_probe(const PointSet& X, const RectDomain& domain,
                           int probe_n = 512);

/// Half the minimum pairwise distance.
double separation_radius(const PointSet& X);

/// All (i, j) with |x_i - y_j| < cutoff, sorted by (i, j).
std::vector<std::pair<std::size_t, std::size_t>> neighbor_pairs(
    const PointSet& X, const PointSet& Y, double cutoff);

/// For each x_i, the indices j with |x_i - y_j| < cutoff (ascending).
std::vector<std::vector<std::size_t>> neighbor_lists(const PointSet& X,
                                                     const PointSet& Y,
                                                     double cutoff);

/// Fixed-radius bucket grid over a point cloud, cell size = radius.
class BucketGrid {
 public:
  BucketGrid(const std::vector<Point>& points, double cell);
  /// Appends indices j with |points[j] - p| < radius, ascending.
  void query(const Point& p, double radius, std::vector<std::size_t>& out) const;

 private:
  const std::vector<Point>* points_;
  double cell_;
  double x0_ = 0.0, y0_ = 0.0;
  long nx_ = 1, ny_ = 1;
  bool unbounded_ = false;
  std::vector<std::size_t> cell_start_;
  std::vector<std::size_t> entries_;
};

/// One level of the multiscale hierarchy.
struct Level {
  PointSet centres;
  double h = 0.0;      ///< fill distance
  double q = 0.0;      ///< separation radius
  double delta = 0.0;  ///< kernel support radius
};

struct LevelSchedule {
  std::vector<Level> levels;
  double mu = 0.5;
  double c = 1.0;
  std::optional<double> nu;

  std::size_t size() const noexcept { return levels.size(); }
  const Level& operator[](std::size_t i) const { return levels[i]; }

  /// Messages for consecutive levels violating c*mu*h_i <= h_{i+1} <= mu*h_i.
  std::vector<std::string> ratio_warnings(double rel_tol = 1e-9) const;
};

/// Levels on uniform grids with explicit support radii.
LevelSchedule schedule_from_grids(const RectDomain& domain,
                                  const std::vector<int>& grid_m,
                                  const std::vector<double>& deltas,
                                  double mu = 0.5, double c = 1.0);

/// Grids m0, 2(m0-1)+1, ... (h halves per level) with delta_i = nu * h_i.
LevelSchedule schedule_generated(const RectDomain& domain, int m0,
                                 int n_levels, double nu);

/// Levels from arbitrary point sets with explicit support radii.
LevelSchedule schedule_from_sets(const RectDomain& domain,
                                 std::vector<PointSet> sets,
                                 const std::vector<double>& deltas,
                                 double mu = 0.5, double c = 1.0);

/// Points of `X` that coincide (within snap) with any point of `earlier`.
std::vector<bool> coincident_mask(const PointSet& X,
                                  const std::vector<const PointSet*>& earlier,
                                  double snap = 1e-12);

PointSet read_points_csv(std::istream& in);
PointSet read_points_csv(const std::string& path);
void write_points_csv(std::ostream& out, const PointSet& X);

}  // namespace mesharc

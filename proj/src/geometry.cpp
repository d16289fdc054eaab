#include "mesharc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace mesharc {

RectDomain::RectDomain(double xmin, double xmax, double ymin, double ymax)
    : xmin_(xmin), xmax_(xmax), ymin_(ymin), ymax_(ymax) {
  if (!(xmin_ < xmax_) || !(ymin_ < ymax_))
    throw std::invalid_argument("degenerate rectangle domain");
}

bool RectDomain::contains(const Point& p, double tol) const noexcept {
  return p.x >= xmin_ - tol && p.x <= xmax_ + tol && p.y >= ymin_ - tol &&
         p.y <= ymax_ + tol;
}

double RectDomain::distance_to_boundary(const Point& p) const noexcept {
  return std::min({p.x - xmin_, xmax_ - p.x, p.y - ymin_, ymax_ - p.y});
}

PointSet uniform_grid(const RectDomain& domain, int m) {
  if (m < 2) throw std::invalid_argument("uniform grid needs m >= 2");
  PointSet X;
  X.grid_m = m;
  X.points.reserve(static_cast<std::size_t>(m) * m);
  const double denom = m - 1;
  for (int j = 0; j < m; ++j) {
    const double y = j == m - 1 ? domain.ymax()
                                : domain.ymin() + domain.height() * j / denom;
    for (int i = 0; i < m; ++i) {
      const double x = i == m - 1 ? domain.xmax()
                                  : domain.xmin() + domain.width() * i / denom;
      X.points.push_back({x, y});
    }
  }
  return X;
}

double fill_distance_probe(const PointSet& X, const RectDomain& domain,
                           int probe_n) {
  if (X.empty()) throw std::invalid_argument("fill distance of empty point set");
  if (probe_n < 2) throw std::invalid_argument("probe grid needs n >= 2");
  const PointSet probe = uniform_grid(domain, probe_n);
  // Nearest-centre search through the bucket grid, growing the radius until hit.
  const double cell = std::max(domain.diagonal() / std::sqrt(double(X.size())),
                               1e-12 * domain.diagonal());
  const BucketGrid grid(X.points, cell);
  double worst = 0.0;
  std::vector<std::size_t> hits;
  for (const Point& p : probe.points) {
    double radius = cell;
    double best = std::numeric_limits<double>::infinity();
    while (true) {
      hits.clear();
      grid.query(p, radius, hits);
      for (std::size_t j : hits) best = std::min(best, distance(p, X[j]));
      if (!hits.empty()) break;
      radius *= 2.0;
    }
    worst = std::max(worst, best);
  }
  return worst;
}

double fill_distance(const PointSet& X, const RectDomain& domain) {
  if (X.empty()) throw std::invalid_argument("fill distance of empty point set");
  if (X.grid_m) {
    const double sx = domain.width() / (*X.grid_m - 1);
    const double sy = domain.height() / (*X.grid_m - 1);
    return 0.5 * std::hypot(sx, sy);
  }
  return fill_distance_probe(X, domain);
}

double separation_radius(const PointSet& X) {
  if (X.size() < 2)
    throw std::invalid_argument("separation radius needs at least two points");
  double lo = 0.0, hi = 0.0;
  for (const Point& p : X.points) {
    lo = std::min({lo, p.x, p.y});
    hi = std::max({hi, p.x, p.y});
  }
  // Any pair closer than the search radius is found, so the first radius
  // that yields a pair gives the exact minimum.
  double radius = std::max((hi - lo) / std::sqrt(double(X.size())), 1e-300);
  while (true) {
    const BucketGrid grid(X.points, radius);
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> hits;
    for (std::size_t i = 0; i < X.size(); ++i) {
      hits.clear();
      grid.query(X[i], radius, hits);
      for (std::size_t j : hits)
        if (j != i) best = std::min(best, distance(X[i], X[j]));
    }
    if (std::isfinite(best)) return 0.5 * best;
    radius *= 2.0;
  }
}

BucketGrid::BucketGrid(const std::vector<Point>& points, double cell)
    : points_(&points), cell_(cell) {
  if (!(cell > 0.0)) throw std::invalid_argument("bucket cell size must be positive");
  if (points.empty() || !std::isfinite(cell)) {
    unbounded_ = true;
    return;
  }
  double xmax = points[0].x, ymax = points[0].y;
  x0_ = points[0].x;
  y0_ = points[0].y;
  for (const Point& p : points) {
    x0_ = std::min(x0_, p.x);
    y0_ = std::min(y0_, p.y);
    xmax = std::max(xmax, p.x);
    ymax = std::max(ymax, p.y);
  }
  // Keep the table size proportional to the point count.
  const double max_cells = 4.0 * points.size() + 16.0;
  while (((xmax - x0_) / cell_ + 1.0) * ((ymax - y0_) / cell_ + 1.0) > max_cells)
    cell_ *= 2.0;
  nx_ = static_cast<long>((xmax - x0_) / cell_) + 1;
  ny_ = static_cast<long>((ymax - y0_) / cell_) + 1;
  std::vector<std::size_t> counts(static_cast<std::size_t>(nx_ * ny_) + 1, 0);
  auto cell_of = [&](const Point& p) {
    const long cx = std::min(nx_ - 1, static_cast<long>((p.x - x0_) / cell_));
    const long cy = std::min(ny_ - 1, static_cast<long>((p.y - y0_) / cell_));
    return static_cast<std::size_t>(cy * nx_ + cx);
  };
  for (const Point& p : points) ++counts[cell_of(p) + 1];
  for (std::size_t k = 1; k < counts.size(); ++k) counts[k] += counts[k - 1];
  cell_start_ = counts;
  entries_.resize(points.size());
  for (std::size_t j = 0; j < points.size(); ++j)
    entries_[counts[cell_of(points[j])]++] = j;
}

void BucketGrid::query(const Point& p, double radius,
                       std::vector<std::size_t>& out) const {
  const auto& pts = *points_;
  const std::size_t first = out.size();
  if (unbounded_ || !std::isfinite(radius)) {
    for (std::size_t j = 0; j < pts.size(); ++j)
      if (distance(p, pts[j]) < radius) out.push_back(j);
    return;
  }
  const long reach = static_cast<long>(std::ceil(radius / cell_));
  const long cx = static_cast<long>(std::floor((p.x - x0_) / cell_));
  const long cy = static_cast<long>(std::floor((p.y - y0_) / cell_));
  const long ix0 = std::max(0L, cx - reach), ix1 = std::min(nx_ - 1, cx + reach);
  const long iy0 = std::max(0L, cy - reach), iy1 = std::min(ny_ - 1, cy + reach);
  for (long iy = iy0; iy <= iy1; ++iy) {
    for (long ix = ix0; ix <= ix1; ++ix) {
      const auto c = static_cast<std::size_t>(iy * nx_ + ix);
      for (std::size_t k = cell_start_[c]; k < cell_start_[c + 1]; ++k) {
        const std::size_t j = entries_[k];
        if (distance(p, pts[j]) < radius) out.push_back(j);
      }
    }
  }
  std::sort(out.begin() + static_cast<std::ptrdiff_t>(first), out.end());
}

std::vector<std::vector<std::size_t>> neighbor_lists(const PointSet& X,
                                                     const PointSet& Y,
                                                     double cutoff) {
  if (!(cutoff > 0.0)) throw std::invalid_argument("neighbour cutoff must be positive");
  const BucketGrid grid(Y.points, cutoff);
  std::vector<std::vector<std::size_t>> lists(X.size());
  for (std::size_t i = 0; i < X.size(); ++i) grid.query(X[i], cutoff, lists[i]);
  return lists;
}

std::vector<std::pair<std::size_t, std::size_t>> neighbor_pairs(
    const PointSet& X, const PointSet& Y, double cutoff) {
  const auto lists = neighbor_lists(X, Y, cutoff);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < lists.size(); ++i)
    for (std::size_t j : lists[i]) pairs.emplace_back(i, j);
  return pairs;
}

std::vector<std::string> LevelSchedule::ratio_warnings(double rel_tol) const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
    const double h0 = levels[i].h, h1 = levels[i + 1].h;
    if (h1 > mu * h0 * (1.0 + rel_tol) || h1 < c * mu * h0 * (1.0 - rel_tol)) {
      std::ostringstream msg;
      msg << "levels " << i + 1 << "->" << i + 2 << ": h ratio " << h1 / h0
          << " outside [" << c * mu << ", " << mu << "]";
      out.push_back(msg.str());
    }
  }
  return out;
}

namespace {

Level make_level(const RectDomain& domain, PointSet X, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("level delta must be positive");
  Level level;
  level.h = fill_distance(X, domain);
  level.q = X.size() >= 2 ? separation_radius(X)
                          : std::numeric_limits<double>::infinity();
  level.delta = delta;
  level.centres = std::move(X);
  return level;
}

}  // namespace

LevelSchedule schedule_from_grids(const RectDomain& domain,
                                  const std::vector<int>& grid_m,
                                  const std::vector<double>& deltas, double mu,
                                  double c) {
  if (grid_m.size() != deltas.size())
    throw std::invalid_argument("grid and delta lists differ in length");
  std::vector<PointSet> sets;
  for (int m : grid_m) sets.push_back(uniform_grid(domain, m));
  return schedule_from_sets(domain, std::move(sets), deltas, mu, c);
}

LevelSchedule schedule_from_sets(const RectDomain& domain,
                                 std::vector<PointSet> sets,
                                 const std::vector<double>& deltas, double mu,
                                 double c) {
  if (sets.size() != deltas.size())
    throw std::invalid_argument("point-set and delta lists differ in length");
  if (!(mu > 0.0 && mu < 1.0)) throw std::invalid_argument("mu must lie in (0,1)");
  if (!(c > 0.0 && c <= 1.0)) throw std::invalid_argument("c must lie in (0,1]");
  LevelSchedule schedule;
  schedule.mu = mu;
  schedule.c = c;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (sets[i].empty()) throw std::invalid_argument("level with no centres");
    schedule.levels.push_back(make_level(domain, std::move(sets[i]), deltas[i]));
  }
  return schedule;
}

LevelSchedule schedule_generated(const RectDomain& domain, int m0, int n_levels,
                                 double nu) {
  if (n_levels < 1) throw std::invalid_argument("need at least one level");
  if (!(nu > 0.0)) throw std::invalid_argument("nu must be positive");
  LevelSchedule schedule;
  schedule.mu = 0.5;
  schedule.c = 1.0;
  schedule.nu = nu;
  int m = m0;
  for (int i = 0; i < n_levels; ++i) {
    PointSet X = uniform_grid(domain, m);
    const double h = fill_distance(X, domain);
    schedule.levels.push_back(make_level(domain, std::move(X), nu * h));
    m = 2 * (m - 1) + 1;
  }
  return schedule;
}

std::vector<bool> coincident_mask(const PointSet& X,
                                  const std::vector<const PointSet*>& earlier,
                                  double snap) {
  std::vector<bool> mask(X.size(), false);
  const double radius = snap + 1e-300;
  for (const PointSet* E : earlier) {
    if (E == nullptr || E->empty()) continue;
    const BucketGrid grid(E->points, std::max(snap, 1e-6));
    std::vector<std::size_t> hits;
    for (std::size_t i = 0; i < X.size(); ++i) {
      if (mask[i]) continue;
      hits.clear();
      grid.query(X[i], radius, hits);
      mask[i] = !hits.empty();
    }
  }
  return mask;
}

PointSet read_points_csv(std::istream& in) {
  PointSet X;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    Point p;
    char comma = 0;
    if (!(row >> p.x >> comma >> p.y) || comma != ',')
      throw std::runtime_error("point CSV line " + std::to_string(lineno) +
                               ": expected 'x,y'");
    X.points.push_back(p);
  }
  return X;
}

PointSet read_points_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open point file " + path);
  return read_points_csv(in);
}

void write_points_csv(std::ostream& out, const PointSet& X) {
  out << std::setprecision(17);
  for (const Point& p : X.points) out << p.x << ',' << p.y << '\n';
}

}  // namespace mesharc

#include "mesharc/quadrature.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace mesharc {

void QuadratureSpec::validate() const {
  if (order < 2) throw std::invalid_argument("quadrature order must be >= 2");
  if (subdiv < 1) throw std::invalid_argument("quadrature subdivision must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("quadrature tolerance must be > 0");
  if (max_refinements < 0)
    throw std::invalid_argument("refinement cap must be non-negative");
}

namespace {

// Legendre P_n and P_{n-1} at x by the three-term recurrence.
std::pair<double, double> legendre_pair(int n, double x) {
  double p0 = 1.0, p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, p0};
}

Rule1D compute_gauss_legendre(int n) {
  Rule1D rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      const auto [p, pm1] = legendre_pair(n, x);
      dp = n * (x * p - pm1) / (x * x - 1.0);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const auto [p, pm1] = legendre_pair(n, x);
    dp = n * (x * p - pm1) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

constexpr int kCachedRules = 32;

const std::array<Rule1D, kCachedRules + 1>& cached_rules() {
  static const auto rules = [] {
    std::array<Rule1D, kCachedRules + 1> r;
    for (int n = 1; n <= kCachedRules; ++n) r[n] = compute_gauss_legendre(n);
    return r;
  }();
  return rules;
}

}  // namespace

const Rule1D& gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("Gauss-Legendre rule needs n >= 1");
  if (n <= kCachedRules) return cached_rules()[n];
  static std::mutex mutex;
  static std::map<int, Rule1D> extra;
  const std::lock_guard lock(mutex);
  auto it = extra.find(n);
  if (it == extra.end()) it = extra.emplace(n, compute_gauss_legendre(n)).first;
  return it->second;
}

Rule1D gauss_lobatto(int n) {
  if (n < 2) throw std::invalid_argument("Gauss-Lobatto rule needs n >= 2");
  const int N = n - 1;
  Rule1D rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Chebyshev-Gauss-Lobatto start, Newton on (1 - x^2) P_N'(x).
    double x = std::cos(std::numbers::pi * i / N);
    if (i != 0 && i != N) {
      for (int it = 0; it < 100; ++it) {
        const auto [p, pm1] = legendre_pair(N, x);
        const double dx = (x * p - pm1) / (n * p);
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
    }
    const double p = legendre_pair(N, x).first;
    rule.nodes[N - i] = x;
    rule.weights[N - i] = 2.0 / (N * n * p * p);
  }
  rule.nodes.front() = -1.0;
  rule.nodes.back() = 1.0;
  return rule;
}

std::optional<Box> lens_box(const Point& c1, double r1, const Point& c2,
                            double r2, const RectDomain& domain) {
  const double d = distance(c1, c2);
  if (d >= r1 + r2) return std::nullopt;
  Box box{};
  auto disk_box = [](const Point& c, double r) {
    return Box{c.x - r, c.x + r, c.y - r, c.y + r};
  };
  if (d + std::min(r1, r2) <= std::max(r1, r2)) {
    box = r1 <= r2 ? disk_box(c1, r1) : disk_box(c2, r2);
  } else {
    // Extremes of the lens are circle intersection points or axis extremes of
    // one circle lying inside the other disk.
    std::vector<Point> candidates;
    const Point u = (1.0 / d) * (c2 - c1);
    const double a = (d * d + r1 * r1 - r2 * r2) / (2.0 * d);
    const double hh = std::sqrt(std::max(0.0, r1 * r1 - a * a));
    const Point base = c1 + a * u;
    const Point perp{-u.y, u.x};
    candidates.push_back(base + hh * perp);
    candidates.push_back(base - hh * perp);
    auto add_extremes = [&](const Point& c, double r, const Point& other,
                            double r_other) {
      for (const Point e : {Point{r, 0}, Point{-r, 0}, Point{0, r}, Point{0, -r}}) {
        const Point p = c + e;
        if (distance(p, other) <= r_other) candidates.push_back(p);
      }
    };
    add_extremes(c1, r1, c2, r2);
    add_extremes(c2, r2, c1, r1);
    box = {candidates[0].x, candidates[0].x, candidates[0].y, candidates[0].y};
    for (const Point& p : candidates) {
      box.x0 = std::min(box.x0, p.x);
      box.x1 = std::max(box.x1, p.x);
      box.y0 = std::min(box.y0, p.y);
      box.y1 = std::max(box.y1, p.y);
    }
  }
  box.x0 = std::max(box.x0, domain.xmin());
  box.x1 = std::min(box.x1, domain.xmax());
  box.y0 = std::max(box.y0, domain.ymin());
  box.y1 = std::min(box.y1, domain.ymax());
  if (!(box.x0 < box.x1) || !(box.y0 < box.y1)) return std::nullopt;
  return box;
}

namespace {

struct Edge {
  Point a, b, normal;
};

std::array<Edge, 4> edges_of(const RectDomain& D) {
  return {{
      {{D.xmin(), D.ymin()}, {D.xmax(), D.ymin()}, {0.0, -1.0}},
      {{D.xmax(), D.ymin()}, {D.xmax(), D.ymax()}, {1.0, 0.0}},
      {{D.xmin(), D.ymax()}, {D.xmax(), D.ymax()}, {0.0, 1.0}},
      {{D.xmin(), D.ymin()}, {D.xmin(), D.ymax()}, {-1.0, 0.0}},
  }};
}

// Parameter interval [t0, t1] (arc length from edge.a) inside disk(c, r).
std::optional<std::pair<double, double>> chord(const Edge& e, const Point& c,
                                               double r) {
  const double len = distance(e.a, e.b);
  const Point t = (1.0 / len) * (e.b - e.a);
  const Point rel = c - e.a;
  const double along = dot(rel, t);
  const double perp = std::abs(rel.x * t.y - rel.y * t.x);
  if (perp >= r) return std::nullopt;
  const double half = std::sqrt(r * r - perp * perp);
  const double t0 = std::max(0.0, along - half);
  const double t1 = std::min(len, along + half);
  if (!(t0 < t1)) return std::nullopt;
  return std::make_pair(t0, t1);
}

}  // namespace

std::vector<BoundaryPiece> boundary_pieces(const RectDomain& domain,
                                           const Point& center, double radius) {
  std::vector<BoundaryPiece> out;
  for (const Edge& e : edges_of(domain)) {
    const auto iv = chord(e, center, radius);
    if (!iv) continue;
    const Point t = (1.0 / distance(e.a, e.b)) * (e.b - e.a);
    out.push_back({e.a + iv->first * t, e.a + iv->second * t, e.normal});
  }
  return out;
}

std::vector<BoundaryPiece> boundary_pieces(const RectDomain& domain,
                                           const Point& c1, double r1,
                                           const Point& c2, double r2) {
  std::vector<BoundaryPiece> out;
  if (distance(c1, c2) >= r1 + r2) return out;
  for (const Edge& e : edges_of(domain)) {
    const auto i1 = chord(e, c1, r1);
    if (!i1) continue;
    const auto i2 = chord(e, c2, r2);
    if (!i2) continue;
    const double t0 = std::max(i1->first, i2->first);
    const double t1 = std::min(i1->second, i2->second);
    if (!(t0 < t1)) continue;
    const Point t = (1.0 / distance(e.a, e.b)) * (e.b - e.a);
    out.push_back({e.a + t0 * t, e.a + t1 * t, e.normal});
  }
  return out;
}

LobattoGrid LobattoGrid::on(const RectDomain& domain, int n) {
  const Rule1D rule = gauss_lobatto(n);
  LobattoGrid grid;
  grid.nodes.reserve(static_cast<std::size_t>(n) * n);
  grid.weights.reserve(static_cast<std::size_t>(n) * n);
  const double hx = 0.5 * domain.width(), hy = 0.5 * domain.height();
  const double mx = 0.5 * (domain.xmin() + domain.xmax());
  const double my = 0.5 * (domain.ymin() + domain.ymax());
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      grid.nodes.push_back({mx + hx * rule.nodes[i], my + hy * rule.nodes[j]});
      grid.weights.push_back(hx * hy * rule.weights[i] * rule.weights[j]);
    }
  }
  return grid;
}

ErrorNorms error_norms(std::span<const double> approx,
                       std::span<const double> exact, const LobattoGrid& grid) {
  if (approx.size() != grid.size() || exact.size() != grid.size())
    throw std::invalid_argument("error_norms: value arrays do not match grid");
  ErrorNorms e;
  double sum = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double diff = approx[k] - exact[k];
    sum += grid.weights[k] * diff * diff;
    e.linf = std::max(e.linf, std::abs(diff));
  }
  e.l2 = std::sqrt(sum);
  return e;
}

ErrorNorms error_norms(const std::function<double(const Point&)>& approx,
                       const std::function<double(const Point&)>& exact,
                       const LobattoGrid& grid) {
  std::vector<double> a(grid.size()), x(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    a[k] = approx(grid.nodes[k]);
    x[k] = exact(grid.nodes[k]);
  }
  return error_norms(a, x, grid);
}

}  // namespace mesharc

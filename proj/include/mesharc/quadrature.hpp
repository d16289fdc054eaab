#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "mesharc/geometry.hpp"
#include "mesharc/point.hpp"

namespace mesharc {

/// Composite Gauss-Legendre settings: `order` points per axis per cell,
/// `subdiv` x `subdiv` cells, doubled until successive estimates agree to `tol`.
struct QuadratureSpec {
  int order = 5;
  int subdiv = 4;
  double tol = 1e-10;
  int max_refinements = 4;

  void validate() const;
};

struct QuadResult {
  double value = 0.0;
  bool converged = true;
  int refinements = 0;  ///< subdivision doublings performed
  long evaluations = 0;
};

struct Box {
  double x0, x1, y0, y1;
  double area() const noexcept { return (x1 - x0) * (y1 - y0); }
};

/// Nodes and weights on [-1, 1].
struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const Rule1D& gauss_legendre(int n);
Rule1D gauss_lobatto(int n);

namespace detail {

template <class F>
double tensor_sum(F& f, const Box& box, const Rule1D& rule, int cells) {
  const double hx = (box.x1 - box.x0) / cells;
  const double hy = (box.y1 - box.y0) / cells;
  const std::size_t p = rule.nodes.size();
  double total = 0.0;
  for (int cy = 0; cy < cells; ++cy) {
    const double ymid = box.y0 + (cy + 0.5) * hy;
    for (int cx = 0; cx < cells; ++cx) {
      const double xmid = box.x0 + (cx + 0.5) * hx;
      double cell = 0.0;
      for (std::size_t j = 0; j < p; ++j) {
        const double y = ymid + 0.5 * hy * rule.nodes[j];
        double row = 0.0;
        for (std::size_t i = 0; i < p; ++i)
          row += rule.weights[i] * f(Point{xmid + 0.5 * hx * rule.nodes[i], y});
        cell += rule.weights[j] * row;
      }
      total += cell;
    }
  }
  return 0.25 * hx * hy * total;
}

template <class F>
double line_sum(F& f, const Point& a, const Point& b, const Rule1D& rule,
                int panels) {
  const Point step = (1.0 / panels) * (b - a);
  double total = 0.0;
  for (int k = 0; k < panels; ++k) {
    const Point mid = a + (k + 0.5) * step;
    double panel = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      panel += rule.weights[i] * f(mid + (0.5 * rule.nodes[i]) * step);
    total += panel;
  }
  return 0.5 * norm(step) * total;
}

}  // namespace detail

/// Composite tensor Gauss-Legendre over `box`, refined s -> 2s until the
/// change is within tolerance or the refinement cap is hit.
template <class F>
QuadResult integrate_box(F&& f, const Box& box, const QuadratureSpec& spec) {
  const Rule1D& rule = gauss_legendre(spec.order);
  const long per_cell = static_cast<long>(spec.order) * spec.order;
  QuadResult r;
  int cells = spec.subdiv;
  double prev = detail::tensor_sum(f, box, rule, cells);
  r.evaluations = per_cell * cells * cells;
  for (int k = 0; k < spec.max_refinements; ++k) {
    cells *= 2;
    const double next = detail::tensor_sum(f, box, rule, cells);
    r.evaluations += per_cell * cells * cells;
    r.refinements = k + 1;
    const bool ok = std::abs(next - prev) <= spec.tol;
    prev = next;
    if (ok) {
      r.value = next;
      r.converged = true;
      return r;
    }
  }
  r.value = prev;
  r.converged = spec.max_refinements == 0;
  return r;
}

/// Composite Gauss-Legendre along the segment a -> b (arc-length measure).
template <class F>
QuadResult integrate_segment(F&& f, const Point& a, const Point& b,
                             const QuadratureSpec& spec) {
  const Rule1D& rule = gauss_legendre(spec.order);
  QuadResult r;
  int panels = spec.subdiv;
  double prev = detail::line_sum(f, a, b, rule, panels);
  r.evaluations = static_cast<long>(spec.order) * panels;
  for (int k = 0; k < spec.max_refinements; ++k) {
    panels *= 2;
    const double next = detail::line_sum(f, a, b, rule, panels);
    r.evaluations += static_cast<long>(spec.order) * panels;
    r.refinements = k + 1;
    const bool ok = std::abs(next - prev) <= spec.tol;
    prev = next;
    if (ok) {
      r.value = next;
      r.converged = true;
      return r;
    }
  }
  r.value = prev;
  r.converged = spec.max_refinements == 0;
  return r;
}

/// Bounding box of disk(c1, r1) ∩ disk(c2, r2) ∩ domain, if nonempty.
std::optional<Box> lens_box(const Point& c1, double r1, const Point& c2,
                            double r2, const RectDomain& domain);

/// Integrates g over the lens bounding box; g must vanish outside the lens.
template <class F>
QuadResult integrate_support_pair(F&& g, const Point& c1, double r1,
                                  const Point& c2, double r2,
                                  const RectDomain& domain,
                                  const QuadratureSpec& spec) {
  const auto box = lens_box(c1, r1, c2, r2, domain);
  if (!box) return {};
  return integrate_box(g, *box, spec);
}

/// A straight piece of the domain boundary with its outward unit normal.
struct BoundaryPiece {
  Point a, b;
  Point normal;
};

/// Portions of the four edges within `radius` of `center` (and, if given,
/// within `radius2` of `center2`).
std::vector<BoundaryPiece> boundary_pieces(const RectDomain& domain,
                                           const Point& center, double radius);
std::vector<BoundaryPiece> boundary_pieces(const RectDomain& domain,
                                           const Point& c1, double r1,
                                           const Point& c2, double r2);

/// Sum of segment integrals of g(point, outward normal) over the boundary
/// portions inside the support. Corners are skipped (measure zero).
template <class G>
QuadResult integrate_boundary_pieces(G&& g,
                                     const std::vector<BoundaryPiece>& pieces,
                                     const QuadratureSpec& spec) {
  QuadResult total;
  for (const BoundaryPiece& piece : pieces) {
    const Point n = piece.normal;
    auto along = [&](const Point& x) { return g(x, n); };
    const QuadResult r = integrate_segment(along, piece.a, piece.b, spec);
    total.value += r.value;
    total.converged = total.converged && r.converged;
    total.refinements = std::max(total.refinements, r.refinements);
    total.evaluations += r.evaluations;
  }
  return total;
}

template <class G>
QuadResult integrate_boundary(G&& g, const RectDomain& domain,
                              const Point& center, double radius,
                              const QuadratureSpec& spec) {
  if (!(radius > 0.0)) return {};
  return integrate_boundary_pieces(g, boundary_pieces(domain, center, radius),
                                   spec);
}

/// n x n tensor Gauss-Lobatto nodes over the domain.
struct LobattoGrid {
  std::vector<Point> nodes;
  std::vector<double> weights;

  static LobattoGrid on(const RectDomain& domain, int n);
  std::size_t size() const noexcept { return nodes.size(); }
};

struct ErrorNorms {
  double l2 = 0.0;
  double linf = 0.0;
};

ErrorNorms error_norms(std::span<const double> approx,
                       std::span<const double> exact, const LobattoGrid& grid);
ErrorNorms error_norms(const std::function<double(const Point&)>& approx,
                       const std::function<double(const Point&)>& exact,
                       const LobattoGrid& grid);

}  // namespace mesharc

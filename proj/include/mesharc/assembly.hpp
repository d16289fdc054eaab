#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <utility>
#include <optional>
#include <vector>

#include "mesharc/geometry.hpp"
#include "mesharc/kernels.hpp"
#include "mesharc/problem.hpp"
#include "mesharc/quadrature.hpp"
#include "mesharc/sparse.hpp"

namespace mesharc {

/// Span of scaled kernels centred at one level's points.
struct KernelSpace {
  PointSet centres;
  ScaledKernel kernel;

  std::size_t size() const noexcept { return centres.size(); }
  double delta() const noexcept { return kernel.delta(); }
};

enum class FormKind {
  h1,       ///< ∫ ∇u·∇v + uv   (Helmholtz with natural boundary conditions)
  nitsche,  ///< ∫ ∇u·∇v - ∫_∂Ω v ∂ₙu - ∫_∂Ω u ∂ₙv + β ∫_∂Ω uv
  l2,       ///< ∫ uv
};

FormKind form_for(Variant v);

/// Quadrature bookkeeping shared by assembly calls.
struct AssemblyStats {
  long entries = 0;
  long nonconverged = 0;
  long evaluations = 0;
  int max_refinements = 0;
};

/// Value and x-gradient of a plain-convention scaled kernel at a point.
struct KernelSample {
  double value;
  Point grad;
};

inline KernelSample sample_plain(const WendlandKernel& k, const Point& centre,
                                 double delta, const Point& x) noexcept {
  const Point d = x - centre;
  const double dist = norm(d);
  const double r = dist / delta;
  if (r >= 1.0) return {0.0, {0.0, 0.0}};
  const double v = k.value_unchecked(r);
  if (dist == 0.0) return {v, {0.0, 0.0}};
  const double s = k.deriv_unchecked(r) / (delta * dist);
  return {v, s * d};
}

/// a(·,·) evaluated between scaled kernels (or a kernel and a field) by
/// quadrature over support intersections.
class BilinearForm {
 public:
  BilinearForm(FormKind kind, RectDomain domain, QuadratureSpec spec,
               std::optional<double> beta = std::nullopt);

  FormKind kind() const noexcept { return kind_; }
  const RectDomain& domain() const noexcept { return domain_; }
  const QuadratureSpec& spec() const noexcept { return spec_; }
  std::optional<double> beta() const noexcept { return beta_; }

  /// a(Φ_a(·, ca), Φ_b(·, cb)) in the plain convention.
  QuadResult plain_pair(const WendlandKernel& ka, const Point& ca, double da,
                        const WendlandKernel& kb, const Point& cb,
                        double db) const;
  /// As plain_pair with the integration region clipped to `region` instead.
  QuadResult plain_pair_on(const RectDomain& region, const WendlandKernel& ka,
                           const Point& ca, double da, const WendlandKernel& kb,
                           const Point& cb, double db) const;

  /// a(Φ_a(·, ca), Φ_b(·, cb)) honouring each kernel's normalization.
  double pair(const ScaledKernel& a, const Point& ca, const ScaledKernel& b,
              const Point& cb, AssemblyStats* stats = nullptr) const;

  /// a(u, Φ(·, c)) for a smooth field u with gradient.
  double with_field(const ScalarField& u, const VectorField& grad_u,
                    const ScaledKernel& k, const Point& c) const;

 private:
  FormKind kind_;
  RectDomain domain_;
  QuadratureSpec spec_;
  std::optional<double> beta_;
};

/// Integral over disk(ca, ra) ∩ disk(cb, rb) ∩ region.
using PairIntegral =
    std::function<QuadResult(const Point& ca, const Point& cb, const RectDomain& region)>;

/// Evaluates `f` for many centre pairs of fixed radii. Pairs related by a
/// translation, axis reflection or diagonal swap, relative to every domain
/// edge that can cut their supports, share one evaluation made at a
/// canonical position (ca at the origin, offsets rounded to 1e-12 (ra + rb)),
/// so each result depends only on the pair geometry and not on evaluation
/// order. `f` must be invariant under those motions.
std::vector<QuadResult> shared_pair_integrals(
    const std::vector<std::pair<Point, Point>>& pairs, double ra, double rb,
    const RectDomain& domain, const PairIntegral& f,
    AssemblyStats* stats = nullptr);

/// Builds stiffness, cross-level and load arrays for one problem.
class Assembler {
 public:
  Assembler(ProblemSpec problem, QuadratureSpec spec,
            std::optional<double> beta = std::nullopt);
  /// Uses `form` for matrices; loads still follow `problem`.
  Assembler(ProblemSpec problem, BilinearForm form);

  const BilinearForm& form() const noexcept { return form_; }
  const ProblemSpec& problem() const noexcept { return problem_; }

  SymSparseMatrix stiffness(const KernelSpace& level) const;
  /// C(k, l) = a(Φ_source(·, x_l), Φ_target(·, x_k)).
  SparseMatrix cross(const KernelSpace& target, const KernelSpace& source) const;
  std::vector<double> load(const KernelSpace& level) const;

  AssemblyStats stats() const;
  void reset_stats();

 private:
  void record(const QuadResult& r) const;
  void merge(const AssemblyStats& st) const;

  ProblemSpec problem_;
  BilinearForm form_;
  mutable std::atomic<long> entries_{0};
  mutable std::atomic<long> nonconverged_{0};
  mutable std::atomic<long> evaluations_{0};
  mutable std::atomic<int> max_refinements_{0};
};

// Free-function forms.
SymSparseMatrix assemble_stiffness(const KernelSpace& level,
                                   const ProblemSpec& problem,
                                   std::optional<double> beta,
                                   const QuadratureSpec& spec);
std::vector<double> assemble_load(const KernelSpace& level,
                                  const ProblemSpec& problem,
                                  std::optional<double> beta,
                                  const QuadratureSpec& spec);
SparseMatrix assemble_cross(const KernelSpace& target, const KernelSpace& source,
                            const ProblemSpec& problem,
                            std::optional<double> beta,
                            const QuadratureSpec& spec);

}  // namespace mesharc

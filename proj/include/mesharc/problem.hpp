#pragma once

#include <functional>
#include <string>

#include "mesharc/geometry.hpp"
#include "mesharc/point.hpp"

namespace mesharc {

using ScalarField = std::function<double(const Point&)>;
using VectorField = std::function<Point(const Point&)>;

enum class Variant {
  helmholtz_neumann,  ///< -Δu + u = f, ∂u/∂n = 0
  poisson_dirichlet,  ///< -Δu = f, u = g (Nitsche)
};

std::string to_string(Variant v);
Variant variant_from_string(const std::string& s);

struct ProblemSpec {
  std::string name;
  Variant variant = Variant::helmholtz_neumann;
  RectDomain domain = RectDomain::square();
  ScalarField f;
  ScalarField g;               ///< Dirichlet data; empty for the Neumann variant
  ScalarField exact;           ///< optional
  VectorField exact_gradient;  ///< optional

  /// Throws std::invalid_argument when fields are inconsistent with the variant.
  void validate() const;
  bool has_exact() const noexcept { return static_cast<bool>(exact); }
};

/// -Δu + u = cos(πx)cos(πy) on [-1,1]^2 with natural boundary conditions.
ProblemSpec helmholtz_cosine_problem();
/// -Δu = sin(πx)cos(πy/2) on [-1,1]^2 with u = 0 on the boundary.
ProblemSpec poisson_sine_problem();
/// Lookup of the bundled problems by name.
ProblemSpec problem_by_name(const std::string& name);

}  // namespace mesharc

#include "mesharc/problem.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mesharc {

std::string to_string(Variant v) {
  return v == Variant::helmholtz_neumann ? "helmholtz_neumann" : "poisson_dirichlet";
}

Variant variant_from_string(const std::string& s) {
  if (s == "helmholtz_neumann") return Variant::helmholtz_neumann;
  if (s == "poisson_dirichlet") return Variant::poisson_dirichlet;
  throw std::invalid_argument("unknown problem variant '" + s + "'");
}

void ProblemSpec::validate() const {
  if (!f) throw std::invalid_argument("problem '" + name + "' has no source term");
  const bool dirichlet = variant == Variant::poisson_dirichlet;
  if (dirichlet && !g)
    throw std::invalid_argument("Dirichlet problem '" + name + "' needs boundary data g");
  if (!dirichlet && g)
    throw std::invalid_argument("Neumann problem '" + name + "' must not carry g");
}

ProblemSpec helmholtz_cosine_problem() {
  using std::numbers::pi;
  ProblemSpec p;
  p.name = "helmholtz_cosine";
  p.variant = Variant::helmholtz_neumann;
  p.f = [](const Point& x) { return std::cos(pi * x.x) * std::cos(pi * x.y); };
  const double scale = 1.0 / (2.0 * pi * pi + 1.0);
  p.exact = [scale](const Point& x) {
    return scale * std::cos(pi * x.x) * std::cos(pi * x.y);
  };
  p.exact_gradient = [scale](const Point& x) {
    return Point{-scale * pi * std::sin(pi * x.x) * std::cos(pi * x.y),
                 -scale * pi * std::cos(pi * x.x) * std::sin(pi * x.y)};
  };
  return p;
}

ProblemSpec poisson_sine_problem() {
  using std::numbers::pi;
  ProblemSpec p;
  p.name = "poisson_sine";
  p.variant = Variant::poisson_dirichlet;
  p.f = [](const Point& x) { return std::sin(pi * x.x) * std::cos(0.5 * pi * x.y); };
  p.g = [](const Point&) { return 0.0; };
  const double scale = 1.0 / (1.25 * pi * pi);
  p.exact = [scale](const Point& x) {
    return scale * std::sin(pi * x.x) * std::cos(0.5 * pi * x.y);
  };
  p.exact_gradient = [scale](const Point& x) {
    return Point{scale * pi * std::cos(pi * x.x) * std::cos(0.5 * pi * x.y),
                 -scale * 0.5 * pi * std::sin(pi * x.x) * std::sin(0.5 * pi * x.y)};
  };
  return p;
}

ProblemSpec problem_by_name(const std::string& name) {
  if (name == "helmholtz_cosine") return helmholtz_cosine_problem();
  if (name == "poisson_sine") return poisson_sine_problem();
  throw std::invalid_argument("unknown problem '" + name +
                              "' (expected helmholtz_cosine or poisson_sine)");
}

}  // namespace mesharc

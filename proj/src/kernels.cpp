#include "mesharc/kernels.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace mesharc {

namespace {

double horner(std::span<const double> coeffs, double r) noexcept {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * r + *it;
  return acc;
}

double ipow(double base, int e) noexcept {
  double result = 1.0;
  while (e > 0) {
    if (e & 1) result *= base;
    base *= base;
    e >>= 1;
  }
  return result;
}

}  // namespace

WendlandKernel::WendlandKernel(int dimension, int smoothness, int power,
                               std::vector<double> value_coeffs,
                               std::vector<double> deriv_coeffs)
    : dimension_(dimension),
      smoothness_(smoothness),
      power_(power),
      value_coeffs_(std::move(value_coeffs)),
      deriv_coeffs_(std::move(deriv_coeffs)) {
  if (dimension_ < 1) throw std::invalid_argument("kernel dimension must be positive");
  if (power_ < 1) throw std::invalid_argument("kernel power must be positive");
  if (value_coeffs_.empty()) throw std::invalid_argument("empty kernel polynomial");
}

WendlandKernel WendlandKernel::c2(int dimension) {
  // d/dr (1-r)^4 (4r+1) = -20 r (1-r)^3
  return WendlandKernel(dimension, 1, 4, {1.0, 4.0}, {0.0, -20.0});
}

WendlandKernel WendlandKernel::c6(int dimension) {
  // d/dr = -22 r (16r^2 + 7r + 1) (1-r)^7
  return WendlandKernel(dimension, 3, 8, {1.0, 8.0, 25.0, 32.0},
                        {0.0, -22.0, -154.0, -352.0});
}

WendlandKernel WendlandKernel::from_smoothness(int k, int dimension) {
  switch (k) {
    case 1:
      return c2(dimension);
    case 3:
      return c6(dimension);
    default:
      throw std::invalid_argument("unsupported Wendland smoothness k=" +
                                  std::to_string(k) + " (expected 1 or 3)");
  }
}

double WendlandKernel::value_unchecked(double r) const noexcept {
  if (r >= 1.0) return 0.0;
  return ipow(1.0 - r, power_) * horner(value_coeffs_, r);
}

double WendlandKernel::deriv_unchecked(double r) const noexcept {
  if (r >= 1.0) return 0.0;
  return ipow(1.0 - r, power_ - 1) * horner(deriv_coeffs_, r);
}

double WendlandKernel::eval(double r) const {
  if (!(r >= 0.0)) throw std::domain_error("kernel evaluated at negative radius");
  return value_unchecked(r);
}

double WendlandKernel::eval_deriv(double r) const {
  if (!(r >= 0.0)) throw std::domain_error("kernel derivative at negative radius");
  return deriv_unchecked(r);
}

std::string WendlandKernel::name() const {
  return "wendland-C" + std::to_string(2 * smoothness_) + "-d" +
         std::to_string(dimension_);
}

ScaledKernel::ScaledKernel(WendlandKernel base, double delta,
                           Normalization normalization)
    : base_(std::move(base)), delta_(delta), normalization_(normalization) {
  if (!(delta_ > 0.0) || !std::isfinite(delta_))
    throw std::invalid_argument("kernel scale delta must be positive");
  prefactor_ = normalization_ == Normalization::native
                   ? std::pow(delta_, -base_.dimension())
                   : 1.0;
}

double ScaledKernel::value(const Point& x, const Point& y) const noexcept {
  const double r = distance(x, y) / delta_;
  if (r >= 1.0) return 0.0;
  return prefactor_ * base_.value_unchecked(r);
}

Point ScaledKernel::gradient(const Point& x, const Point& y) const noexcept {
  const Point d = x - y;
  const double dist = norm(d);
  if (dist == 0.0 || dist >= delta_) return {0.0, 0.0};
  const double s = prefactor_ * base_.deriv_unchecked(dist / delta_) / (delta_ * dist);
  return s * d;
}

double eval(const WendlandKernel& kernel, double r) { return kernel.eval(r); }
double eval_deriv(const WendlandKernel& kernel, double r) {
  return kernel.eval_deriv(r);
}
double kernel_value(const ScaledKernel& sk, const Point& x, const Point& y) {
  return sk.value(x, y);
}
Point kernel_gradient(const ScaledKernel& sk, const Point& x, const Point& y) {
  return sk.gradient(x, y);
}

std::string to_string(Normalization n) {
  return n == Normalization::native ? "native" : "plain";
}

Normalization normalization_from_string(const std::string& s) {
  if (s == "native") return Normalization::native;
  if (s == "plain") return Normalization::plain;
  throw std::invalid_argument("unknown kernel normalization '" + s + "'");
}

}  // namespace mesharc

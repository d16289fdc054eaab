#pragma once

#include <span>
#include <string>
#include <vector>

#include "mesharc/point.hpp"

namespace mesharc {

/// Compactly supported Wendland function phi(r) = (1-r)_+^p * P(r).
///
/// The radial derivative is stored independently as
/// phi'(r) = (1-r)_+^(p-1) * Q(r) rather than derived from P, so the two can
/// be checked against each other (finite differences, see the verify suite).
class WendlandKernel {
 public:
  /// C^2 member for d <= 3: (1-r)^4 (4r+1).
  static WendlandKernel c2(int dimension = 2);
  /// C^6 member for d = 2: (1-r)^8 (32r^3 + 25r^2 + 8r + 1).
  static WendlandKernel c6(int dimension = 2);
  /// Lookup by smoothness index k in {1, 3}.
  static WendlandKernel from_smoothness(int k, int dimension = 2);

  /// Custom member. Coefficients are in ascending powers of r.
  WendlandKernel(int dimension, int smoothness, int power,
                 std::vector<double> value_coeffs,
                 std::vector<double> deriv_coeffs);

  [[nodiscard]] double eval(double r) const;
  [[nodiscard]] double eval_deriv(double r) const;

  /// Same as eval/eval_deriv without the domain check; r must be >= 0.
  [[nodiscard]] double value_unchecked(double r) const noexcept;
  [[nodiscard]] double deriv_unchecked(double r) const noexcept;

  [[nodiscard]] int dimension() const noexcept { return dimension_; }
  [[nodiscard]] int smoothness() const noexcept { return smoothness_; }
  [[nodiscard]] int power() const noexcept { return power_; }
  [[nodiscard]] std::span<const double> value_coeffs() const noexcept {
    return value_coeffs_;
  }
  /// tau = (d + 2k + 1) / 2.
  [[nodiscard]] double sobolev_order() const noexcept {
    return 0.5 * (dimension_ + 2 * smoothness_ + 1);
  }
  [[nodiscard]] std::string name() const;

 private:
  int dimension_;
  int smoothness_;
  int power_;
  std::vector<double> value_coeffs_;
  std::vector<double> deriv_coeffs_;
};

enum class Normalization {
  native,  ///< delta^-d prefactor
  plain,   ///< no prefactor
};

/// Phi_delta(x, y) = prefactor * phi(|x - y| / delta).
class ScaledKernel {
 public:
  ScaledKernel(WendlandKernel base, double delta,
               Normalization normalization = Normalization::native);

  [[nodiscard]] double value(const Point& x, const Point& y) const noexcept;
  /// Gradient with respect to x. Zero at x == y.
  [[nodiscard]] Point gradient(const Point& x, const Point& y) const noexcept;

  [[nodiscard]] const WendlandKernel& base() const noexcept { return base_; }
  [[nodiscard]] double delta() const noexcept { return delta_; }
  [[nodiscard]] Normalization normalization() const noexcept {
    return normalization_;
  }
  /// delta^-d under native, 1 under plain.
  [[nodiscard]] double prefactor() const noexcept { return prefactor_; }

 private:
  WendlandKernel base_;
  double delta_;
  Normalization normalization_;
  double prefactor_;
};

// Free-function forms.
double eval(const WendlandKernel& kernel, double r);
double eval_deriv(const WendlandKernel& kernel, double r);
double kernel_value(const ScaledKernel& sk, const Point& x, const Point& y);
Point kernel_gradient(const ScaledKernel& sk, const Point& x, const Point& y);

std::string to_string(Normalization n);
Normalization normalization_from_string(const std::string& s);

}  // namespace mesharc

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mesharc/kernels.hpp"

namespace mesharc::cli {

enum class Injection {
  none,
  kernel_typo,          ///< perturbs one value coefficient of the C6 kernel
  asymmetric_assembly,  ///< perturbs one off-diagonal stiffness entry
};

Injection injection_from_string(const std::string& s);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Composite Simpson rule with `panels` (even) panels.
double simpson(const std::function<double(double)>& f, double a, double b, int panels = 10000);

/// Outcome of checking two printed closed forms for the C6 kernel against
/// independent 1-D oracles.
struct ClosedFormVerdict {
  double interior_oracle;   ///< ∫_0^1 s φ'(s)^2 ds
  double interior_printed;  ///< 2453/4845
  bool interior_confirmed;
  double boundary_oracle;   ///< ∫_{-1}^{1} φ'(|s|)^2 ds (δ = 1)
  double boundary_printed;  ///< 603969552384/11305
  bool boundary_confirmed;
  double boundary_corrected;  ///< 141328/33915
  double boundary_without_abs;  ///< same integrand with s in place of |s|
  std::string summary;
};

ClosedFormVerdict closed_form_oracle();

/// Oracle checks over kernels, quadrature, assembly and neighbour search.
std::vector<CheckResult> run_oracle_suite(Injection injection = Injection::none);

/// C6 kernel with its r^1 value coefficient changed from 8 to 8.001.
WendlandKernel c6_with_typo();

}  // namespace mesharc::cli

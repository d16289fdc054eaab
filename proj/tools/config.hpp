#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mesharc/analysis.hpp"
#include "mesharc/multiscale.hpp"
#include "mesharc/nitsche.hpp"

namespace mesharc::cli {

/// Bad or inconsistent configuration; `where` is a field path or "line N".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

struct LevelEntry {
  int grid_m = 0;
  double delta = 0.0;
};

struct GeneratedLevels {
  int m0 = 0;
  int n_levels = 0;
  double nu = 0.0;
};

struct RunConfig {
  std::string problem = "helmholtz_cosine";
  int kernel_k = 3;
  Normalization normalization = Normalization::native;

  std::vector<LevelEntry> levels;
  std::optional<GeneratedLevels> generated;
  double mu = 0.5;
  double c = 1.0;

  std::optional<NestedConfig> nested;

  double nitsche_safety = 1.25;
  BetaMode nitsche_mode = BetaMode::sqrt_lambda;
  std::optional<double> nitsche_beta;  ///< fixed penalty, skips estimation

  QuadratureSpec quadrature{};
  int lobatto_n = 300;
  bool condition_numbers = true;

  InnerProduct inner_product = InnerProduct::problem;

  std::string output = "out";
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

/// Checks that need to know the command: strictly shrinking supports and
/// growing grids for solves, at least one level everywhere.
void validate_levels(const RunConfig& cfg, bool require_monotone);

LevelSchedule build_schedule(const RunConfig& cfg, const RectDomain& domain);
SolverOptions build_options(const RunConfig& cfg);

}  // namespace mesharc::cli

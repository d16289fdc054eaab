#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mesharc/analysis.hpp"
#include "mesharc/multiscale.hpp"

namespace mesharc::cli {

/// `level,N,delta,l2_error,linf_error,kappa`; level is the global step.
void write_levels_csv(std::ostream& out, const std::vector<LevelDiagnostics>& diags);

/// L2 column of a levels CSV. Throws std::runtime_error on a missing column
/// or malformed number.
std::vector<double> read_l2_column(std::istream& in);

/// `transition,ratio,class` rows and a closing `sigma,<value>,derived` row.
void write_rates_csv(std::ostream& out, const RateReport& report);

/// `i,sin_alpha`; degenerate entries are written as nan.
void write_angles_csv(std::ostream& out, const AngleAnalysis& angles);

/// Errors against step on a log axis. Returns false (and writes nothing
/// useful) when there is nothing positive to plot.
bool write_errors_svg(std::ostream& out, const std::vector<LevelDiagnostics>& diags,
                      const std::string& title);

std::string format_number(double v);

}  // namespace mesharc::cli

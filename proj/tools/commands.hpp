#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "verify.hpp"

namespace mesharc::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_numerical = 1,
  exit_usage = 2,
};

struct CommandOptions {
  std::string config;
  std::optional<std::string> out;  ///< overrides the config's output directory

  // rates
  std::string csv;
  std::size_t n = 1;
  bool nested = false;
  double mu = 0.5;

  // verify
  Injection injection = Injection::none;
};

int cmd_solve(const CommandOptions& opt, std::ostream& msg);
int cmd_nested(const CommandOptions& opt, std::ostream& msg);
int cmd_rates(const CommandOptions& opt, std::ostream& msg);
int cmd_angles(const CommandOptions& opt, std::ostream& msg);
int cmd_verify(const CommandOptions& opt, std::ostream& msg);

}  // namespace mesharc::cli

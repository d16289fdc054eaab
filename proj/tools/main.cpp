#include <iostream>

#include <omp.h>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace mesharc::cli;
  CLI::App app{"Multiscale meshfree Galerkin solver with compactly supported kernels"};
  app.require_subcommand(1);

  CommandOptions opt;
  int threads = 0;
  std::string out, inject = "none";

  auto common = [&](CLI::App* sub, bool config) {
    if (config) sub->add_option("--config", opt.config, "JSON run configuration")->required();
    sub->add_option("--threads", threads, "worker threads (default: all cores)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", out, "output directory (overrides the config)");
  };

  auto* solve = app.add_subcommand("solve", "multiscale Galerkin run");
  common(solve, true);
  auto* nested = app.add_subcommand("nested", "nested multiscale run");
  common(nested, true);
  auto* rates = app.add_subcommand("rates", "rate estimates from a levels CSV");
  common(rates, false);
  rates->add_option("--csv", opt.csv, "levels CSV written by solve or nested")->required();
  rates->add_option("--n", opt.n, "inner levels per pass")->check(CLI::PositiveNumber);
  rates->add_flag("--nested", opt.nested, "classify restarts as alpha2");
  rates->add_option("--mu", opt.mu, "level ratio mu");
  auto* angles = app.add_subcommand("angles", "subspace angles between levels");
  common(angles, true);
  auto* verify = app.add_subcommand("verify", "oracle self-checks");
  common(verify, false);
  verify->add_option("--inject", inject, "fault to inject: kernel-typo, asymmetric-assembly");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_usage;
  }

  if (threads > 0) omp_set_num_threads(threads);
  if (!out.empty()) opt.out = out;
  try {
    opt.injection = injection_from_string(inject);
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << '\n';
    return exit_usage;
  }

  if (*solve) return cmd_solve(opt, std::cout);
  if (*nested) return cmd_nested(opt, std::cout);
  if (*rates) return cmd_rates(opt, std::cout);
  if (*angles) return cmd_angles(opt, std::cout);
  return cmd_verify(opt, std::cout);
}

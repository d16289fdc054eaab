#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <omp.h>

#include "config.hpp"
#include "report.hpp"
#include "mesharc/nitsche.hpp"

namespace fs = std::filesystem;

namespace mesharc::cli {

namespace {

struct Prepared {
  RunConfig cfg;
  ProblemSpec problem;
  LevelSchedule schedule;
  SolverOptions options;
  fs::path out;
  std::ostringstream log;
};

/// Loads the config and builds everything a run needs. Config problems throw
/// ConfigError; the Nitsche penalty is estimated here for Dirichlet problems.
void prepare(const CommandOptions& opt, bool require_monotone, Prepared& p) {
  if (opt.config.empty()) throw ConfigError("--config", "a config file is required");
  p.cfg = load_config(opt.config);
  validate_levels(p.cfg, require_monotone);
  p.problem = problem_by_name(p.cfg.problem);
  try {
    p.schedule = build_schedule(p.cfg, p.problem.domain);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("levels", e.what());
  }
  p.options = build_options(p.cfg);
  p.out = opt.out ? fs::path(*opt.out) : fs::path(p.cfg.output);

  p.log << "config: " << opt.config << '\n';
  p.log << "problem: " << p.problem.name << " (" << to_string(p.problem.variant) << ")\n";
  p.log << "kernel: " << p.options.kernel.name() << ", normalization "
        << to_string(p.options.normalization) << '\n';
  p.log << "quadrature: order " << p.cfg.quadrature.order << ", subdiv "
        << p.cfg.quadrature.subdiv << ", tol " << p.cfg.quadrature.tol << ", max refinements "
        << p.cfg.quadrature.max_refinements << ", lobatto_n " << p.cfg.lobatto_n << '\n';
  p.log << "threads: " << omp_get_max_threads() << '\n';
  p.log << "levels:\n";
  for (std::size_t i = 0; i < p.schedule.size(); ++i) {
    const Level& L = p.schedule[i];
    p.log << "  " << i + 1 << ": N=" << L.centres.size() << " h=" << L.h << " q=" << L.q
          << " delta=" << L.delta << '\n';
  }
  for (const std::string& w : p.schedule.ratio_warnings()) p.log << "warning: " << w << '\n';

  if (p.problem.variant == Variant::poisson_dirichlet) {
    if (p.cfg.nitsche_beta) {
      p.options.beta = *p.cfg.nitsche_beta;
      p.log << "nitsche: beta " << *p.options.beta << " (fixed in config)\n";
    } else {
      const NitscheParams np =
          beta_schedule(p.schedule, p.options.kernel, p.problem.domain, p.cfg.nitsche_safety,
                        p.cfg.quadrature, p.cfg.nitsche_mode);
      p.options.beta = np.beta;
      p.log << "nitsche: mode " << to_string(np.mode) << ", safety " << np.safety
            << ", lambda_max " << std::setprecision(10) << np.lambda_max << ", beta " << np.beta
            << std::setprecision(6) << " from " << np.boundary_centres
            << " boundary centres of the finest level";
      if (np.shifted) p.log << " (trace matrix shifted)";
      if (np.fallback) p.log << " (minimum penalty fallback)";
      p.log << '\n';
    }
  }
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError(dir.string(), "cannot create output directory: " + ec.message());
}

void log_assembly(std::ostream& log, const AssemblyStats& st) {
  log << "assembly: " << st.entries << " entries, " << st.evaluations
      << " integrand evaluations, max refinements " << st.max_refinements << ", "
      << st.nonconverged << " entries above tolerance after the refinement cap\n";
}

void log_diagnostics(std::ostream& log, const std::vector<LevelDiagnostics>& diags) {
  for (const auto& d : diags) {
    log << "step " << d.step << " (level " << d.level << "): N=" << d.n << " L2="
        << (d.l2_error ? format_number(*d.l2_error) : "n/a")
        << " Linf=" << (d.linf_error ? format_number(*d.linf_error) : "n/a")
        << " kappa=" << format_number(d.condition.kappa)
        << (d.condition.approximate ? " (iterative estimate)" : "")
        << " galerkin_residual=" << format_number(d.galerkin_residual) << '\n';
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

int write_run(Prepared& p, const RunResult& r, const std::string& title, std::ostream& msg) {
  ensure_dir(p.out);
  std::ostringstream csv;
  write_levels_csv(csv, r.diagnostics);
  write_text(p.out / "levels.csv", csv.str());

  log_diagnostics(p.log, r.diagnostics);
  log_assembly(p.log, r.assembly);

  try {
    std::ostringstream svg;
    if (write_errors_svg(svg, r.diagnostics, title))
      write_text(p.out / "errors.svg", svg.str());
    else
      p.log << "warning: no positive errors to plot\n";
  } catch (const std::exception& e) {
    p.log << "warning: plot not written: " << e.what() << '\n';
    msg << "warning: plot not written: " << e.what() << '\n';
  }
  write_text(p.out / "run.log", p.log.str());
  msg << csv.str();
  return exit_ok;
}

template <class F>
int guarded(F&& body, std::ostream& msg) {
  try {
    return body();
  } catch (const ConfigError& e) {
    msg << "config error: " << e.what() << '\n';
    return exit_usage;
  } catch (const FactorizationError& e) {
    msg << "numerical failure: " << e.what() << '\n';
    return exit_numerical;
  } catch (const std::invalid_argument& e) {
    msg << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const std::exception& e) {
    msg << "numerical failure: " << e.what() << '\n';
    return exit_numerical;
  }
}

}  // namespace

int cmd_solve(const CommandOptions& opt, std::ostream& msg) {
  return guarded([&] {
    Prepared p;
    prepare(opt, true, p);
    if (p.cfg.nested) p.log << "note: nested block ignored by solve\n";
    const auto t0 = std::chrono::steady_clock::now();
    const RunResult r = run_multiscale(p.schedule, p.problem, p.options);
    p.log << "time: "
          << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()
          << " s\n";
    return write_run(p, r, "multiscale " + p.problem.name, msg);
  }, msg);
}

int cmd_nested(const CommandOptions& opt, std::ostream& msg) {
  return guarded([&] {
    Prepared p;
    prepare(opt, true, p);
    if (!p.cfg.nested) throw ConfigError("nested", "missing (nested runs need {K, n})");
    if (static_cast<std::size_t>(p.cfg.nested->n) != p.schedule.size())
      throw ConfigError("nested.n", "must equal the number of levels (" +
                                        std::to_string(p.schedule.size()) + ")");
    p.log << "nested: K=" << p.cfg.nested->K << " n=" << p.cfg.nested->n << '\n';
    const auto t0 = std::chrono::steady_clock::now();
    const RunResult r = run_nested(p.schedule, *p.cfg.nested, p.problem, p.options);
    p.log << "time: "
          << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()
          << " s\n";
    return write_run(p, r, "nested multiscale " + p.problem.name, msg);
  }, msg);
}

int cmd_rates(const CommandOptions& opt, std::ostream& msg) {
  return guarded([&] {
    if (opt.csv.empty()) throw ConfigError("--csv", "a run CSV is required");
    std::ifstream in(opt.csv);
    if (!in) throw ConfigError(opt.csv, "cannot open run CSV");
    std::vector<double> e;
    try {
      e = read_l2_column(in);
    } catch (const std::runtime_error& err) {
      throw ConfigError(opt.csv, err.what());
    }
    if (e.size() < 2) throw ConfigError(opt.csv, "need at least two L2 errors");
    if (opt.n < 1) throw ConfigError("--n", "must be >= 1");
    if (!(opt.mu > 0.0 && opt.mu < 1.0)) throw ConfigError("--mu", "must lie in (0, 1)");
    const RateReport report = rate_estimates(e, opt.n, opt.nested, opt.mu);

    const fs::path dir = opt.out ? fs::path(*opt.out) : fs::path(opt.csv).parent_path();
    if (!dir.empty()) ensure_dir(dir);
    std::ostringstream csv;
    write_rates_csv(csv, report);
    write_text(dir / "rates.csv", csv.str());
    for (const auto& r : report.entries)
      if (r.undefined) msg << "warning: transition " << r.transition << " divides by a zero error\n";
    msg << csv.str();
    return exit_ok;
  }, msg);
}

int cmd_angles(const CommandOptions& opt, std::ostream& msg) {
  return guarded([&] {
    Prepared p;
    prepare(opt, false, p);
    p.log << "inner product: " << to_string(p.cfg.inner_product) << '\n';
    ensure_dir(p.out);

    AngleAnalysis a;
    if (p.schedule.size() < 2) {
      msg << "warning: a single level has no subspace angles\n";
      p.log << "warning: a single level has no subspace angles\n";
    } else {
      a = subspace_angles(p.schedule, p.problem, p.options, p.cfg.inner_product);
    }
    std::ostringstream csv;
    write_angles_csv(csv, a);
    write_text(p.out / "angles.csv", csv.str());

    p.log << "sin_alpha is the largest singular value of M, the cosine of the smallest "
             "principal angle; sqrt(1 - sin_alpha^2) is listed as its complement\n";
    for (const auto& e : a.entries) {
      p.log << "i=" << e.i << " |X~_i|=" << e.first_size << " |later|=" << e.second_size;
      if (e.sin_alpha) {
        const double s = *e.sin_alpha;
        p.log << " sin_alpha=" << format_number(s)
              << " complement=" << format_number(std::sqrt(std::max(0.0, 1.0 - s * s)));
      } else {
        p.log << " degenerate";
      }
      if (!e.note.empty()) p.log << " (" << e.note << ')';
      p.log << '\n';
      for (const Point& x : e.dropped) p.log << "  dropped centre (" << x.x << ", " << x.y << ")\n";
      if (e.degenerate) msg << "warning: i=" << e.i << " degenerate: " << e.note << '\n';
    }
    if (!a.entries.empty())
      p.log << "nested rate bound sqrt(1 - prod sin^2) = " << format_number(nested_rate_bound(a))
            << '\n';
    write_text(p.out / "run.log", p.log.str());
    msg << csv.str();
    return exit_ok;
  }, msg);
}

int cmd_verify(const CommandOptions& opt, std::ostream& msg) {
  return guarded([&] {
    const std::vector<CheckResult> checks = run_oracle_suite(opt.injection);
    bool ok = true;
    for (const CheckResult& c : checks) {
      msg << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
      ok = ok && c.passed;
    }
    return ok ? exit_ok : exit_numerical;
  }, msg);
}

}  // namespace mesharc::cli

#include "mesharc/multiscale.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <lapacke.h>

extern "C" void openblas_set_num_threads(int num_threads);

namespace mesharc {

namespace {

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double dot_product(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void normalize(std::vector<double>& v) {
  const double n = std::sqrt(dot_product(v, v));
  for (double& x : v) x /= n;
}

// Rayleigh quotient of the dominant eigenpair of x -> op(x).
template <class Op>
double power_iteration(std::size_t n, Op op, int max_iter = 5000, double tol = 1e-12) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = 1.0 + 0.5 * std::sin(1.0 + 0.37 * static_cast<double>(i));
  normalize(v);
  double lambda = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    std::vector<double> w = op(v);
    const double next = dot_product(v, w);
    normalize(w);
    v.swap(w);
    if (it > 0 && std::abs(next - lambda) <= tol * std::abs(next)) return next;
    lambda = next;
  }
  return lambda;
}

}  // namespace

ConditionReport condition_number(const SymSparseMatrix& A, std::size_t dense_limit) {
  const std::size_t n = A.size();
  if (n == 0) throw std::invalid_argument("condition number of an empty matrix");
  ConditionReport rep;
  if (n <= dense_limit) {
    openblas_set_num_threads(1);
    Eigen::MatrixXd dense = A.to_dense();
    std::vector<double> w(n);
    std::vector<lapack_int> isuppz(2 * n);
    lapack_int found = 0;
    const auto ln = static_cast<lapack_int>(n);
    const lapack_int info =
        LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'N', 'A', 'L', ln, dense.data(), ln, 0.0, 0.0,
                       0, 0, 0.0, &found, w.data(), nullptr, 1, isuppz.data());
    if (info != 0)
      throw std::runtime_error("symmetric eigensolver failed (info " +
                               std::to_string(info) + ")");
    rep.lambda_min = w.front();
    rep.lambda_max = w[static_cast<std::size_t>(found) - 1];
  } else {
    rep.approximate = true;
    rep.lambda_max = power_iteration(n, [&](const std::vector<double>& v) {
      return A.multiply(v);
    });
    const SparseCholesky chol(A);
    const double inv = power_iteration(n, [&](const std::vector<double>& v) {
      return chol.solve(v);
    });
    rep.lambda_min = 1.0 / inv;
  }
  rep.kappa = rep.lambda_min > 0.0 ? rep.lambda_max / rep.lambda_min
                                   : std::numeric_limits<double>::infinity();
  return rep;
}

const SparseCholesky& StiffnessSystem::factor() const {
  if (!factorization) factorization = std::make_shared<const SparseCholesky>(matrix);
  return *factorization;
}

std::vector<double> solve_level(const StiffnessSystem& system,
                                std::span<const double> rhs) {
  if (rhs.size() != system.matrix.size())
    throw std::invalid_argument("right-hand side length does not match the system");
  return system.factor().solve(rhs);
}

void accumulate_expansion(const LevelRecord& record, const std::vector<Point>& points,
                          std::span<double> out) {
  if (out.size() != points.size())
    throw std::invalid_argument("output length does not match point count");
  const auto& X = record.centres.points;
  const auto& c = record.coeffs;
  if (X.empty()) return;
  const double delta = record.kernel.delta();
  const BucketGrid grid(X, delta);
  const long np = static_cast<long>(points.size());

#pragma omp parallel
  {
    std::vector<std::size_t> near;
#pragma omp for schedule(static)
    for (long p = 0; p < np; ++p) {
      const Point& x = points[static_cast<std::size_t>(p)];
      near.clear();
      grid.query(x, delta, near);
      double s = 0.0;
      for (std::size_t j : near) s += c[j] * record.kernel.value(x, X[j]);
      out[static_cast<std::size_t>(p)] += s;
    }
  }
}

double MultiscaleSolution::evaluate(const Point& x) const {
  double s = 0.0;
  for (const auto& r : records_)
    for (std::size_t j = 0; j < r.centres.size(); ++j)
      s += r.coeffs[j] * r.kernel.value(x, r.centres[j]);
  return s;
}

std::vector<double> MultiscaleSolution::evaluate_prefix(const std::vector<Point>& points,
                                                        std::size_t steps) const {
  std::vector<double> out(points.size(), 0.0);
  steps = std::min(steps, records_.size());
  for (std::size_t i = 0; i < steps; ++i) accumulate_expansion(records_[i], points, out);
  return out;
}

std::vector<double> MultiscaleSolution::evaluate(const std::vector<Point>& points) const {
  return evaluate_prefix(points, records_.size());
}

std::vector<double> MultiscaleSolution::evaluate(const PointSet& points) const {
  return evaluate(points.points);
}

void NestedConfig::validate() const {
  if (K < 0) throw std::invalid_argument("nested K must be >= 0");
  if (n < 1) throw std::invalid_argument("nested n must be >= 1");
}

std::vector<std::size_t> nested_sequence(const NestedConfig& cfg) {
  cfg.validate();
  std::vector<std::size_t> seq;
  for (int k = 0; k <= cfg.K; ++k)
    for (int l = 0; l < cfg.n; ++l) seq.push_back(static_cast<std::size_t>(l));
  return seq;
}

namespace {

std::vector<KernelSpace> make_spaces(const LevelSchedule& schedule,
                                     const SolverOptions& options) {
  if (schedule.levels.empty()) throw std::invalid_argument("empty level schedule");
  std::vector<KernelSpace> out;
  for (const Level& L : schedule.levels)
    out.push_back({L.centres, ScaledKernel(options.kernel, L.delta, options.normalization)});
  return out;
}

}  // namespace

MultiscaleSolver::MultiscaleSolver(LevelSchedule schedule, ProblemSpec problem,
                                   SolverOptions options)
    : schedule_(std::move(schedule)),
      problem_(std::move(problem)),
      options_(std::move(options)),
      assembler_(problem_, options_.quadrature,
                 problem_.variant == Variant::poisson_dirichlet ? options_.beta
                                                                : std::nullopt),
      spaces_(make_spaces(schedule_, options_)) {}

MultiscaleSolver::MultiscaleSolver(LevelSchedule schedule, ProblemSpec problem,
                                   SolverOptions options, BilinearForm form)
    : schedule_(std::move(schedule)),
      problem_(std::move(problem)),
      options_(std::move(options)),
      assembler_(problem_, std::move(form)),
      spaces_(make_spaces(schedule_, options_)) {}

const StiffnessSystem& MultiscaleSolver::system(std::size_t i) {
  auto it = systems_.find(i);
  if (it != systems_.end()) return it->second;
  const KernelSpace& sp = spaces_.at(i);
  StiffnessSystem s{assembler_.stiffness(sp), assembler_.load(sp), nullptr};
  return systems_.emplace(i, std::move(s)).first->second;
}

const SparseMatrix& MultiscaleSolver::coupling(std::size_t target, std::size_t source) {
  if (target == source) return system(target).matrix.matrix();
  const auto key = std::make_pair(target, source);
  auto it = couplings_.find(key);
  if (it != couplings_.end()) return it->second;
  return couplings_
      .emplace(key, assembler_.cross(spaces_.at(target), spaces_.at(source)))
      .first->second;
}

const ConditionReport& MultiscaleSolver::condition(std::size_t i) {
  auto it = conditions_.find(i);
  if (it != conditions_.end()) return it->second;
  return conditions_
      .emplace(i, condition_number(system(i).matrix, options_.dense_eigen_limit))
      .first->second;
}

RunResult MultiscaleSolver::run(const std::vector<std::size_t>& sequence) {
  return run_with_loads(sequence, {});
}

RunResult MultiscaleSolver::run_with_loads(
    const std::vector<std::size_t>& sequence,
    const std::vector<std::vector<double>>& loads) {
  if (sequence.empty()) throw std::invalid_argument("empty level sequence");
  for (std::size_t l : sequence)
    if (l >= spaces_.size()) throw std::out_of_range("level index out of range");
  if (!loads.empty() && loads.size() != spaces_.size())
    throw std::invalid_argument("one injected load per level is required");

  const bool track = problem_.has_exact();
  if (track && !grid_) {
    grid_ = LobattoGrid::on(problem_.domain, options_.lobatto_n);
    exact_on_grid_.resize(grid_->size());
    for (std::size_t p = 0; p < grid_->size(); ++p)
      exact_on_grid_[p] = problem_.exact(grid_->nodes[p]);
  }
  std::vector<double> approx(track ? grid_->size() : 0, 0.0);

  // Accumulated coefficients per level over all earlier steps.
  std::vector<std::vector<double>> past(spaces_.size());
  RunResult result;
  assembler_.reset_stats();

  for (std::size_t step = 0; step < sequence.size(); ++step) {
    const std::size_t L = sequence[step];
    const StiffnessSystem& sys = system(L);
    const std::vector<double>& load = loads.empty() ? sys.load : loads[L];
    if (load.size() != spaces_[L].size())
      throw std::invalid_argument("injected load has the wrong length");

    std::vector<double> rhs = load;
    for (std::size_t j = 0; j < spaces_.size(); ++j)
      if (!past[j].empty()) coupling(L, j).multiply_add(past[j], rhs, -1.0);

    std::vector<double> c = solve_level(sys, rhs);

    LevelDiagnostics d;
    d.step = step + 1;
    d.level = L + 1;
    d.n = spaces_[L].size();
    d.delta = spaces_[L].delta();
    {
      std::vector<double> r = rhs;
      sys.matrix.matrix().multiply_add(c, r, -1.0);
      const double denom = inf_norm(load);
      d.galerkin_residual = denom > 0.0 ? inf_norm(r) / denom : inf_norm(r);
    }
    if (options_.compute_condition) d.condition = condition(L);

    if (past[L].empty()) past[L].assign(c.size(), 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) past[L][k] += c[k];

    LevelRecord rec{L, spaces_[L].centres, spaces_[L].kernel, std::move(c)};
    if (track) {
      accumulate_expansion(rec, grid_->nodes, approx);
      const ErrorNorms e = error_norms(approx, exact_on_grid_, *grid_);
      d.l2_error = e.l2;
      d.linf_error = e.linf;
    }
    result.solution.append(std::move(rec));
    result.diagnostics.push_back(d);
  }
  result.assembly = assembler_.stats();
  return result;
}

RunResult run_multiscale(const LevelSchedule& schedule, const ProblemSpec& problem,
                         const SolverOptions& options) {
  MultiscaleSolver solver(schedule, problem, options);
  std::vector<std::size_t> seq(schedule.size());
  for (std::size_t i = 0; i < seq.size(); ++i) seq[i] = i;
  return solver.run(seq);
}

RunResult run_nested(const LevelSchedule& inner, const NestedConfig& cfg,
                     const ProblemSpec& problem, const SolverOptions& options) {
  cfg.validate();
  if (static_cast<std::size_t>(cfg.n) != inner.size())
    throw std::invalid_argument("nested n must equal the number of inner levels");
  MultiscaleSolver solver(inner, problem, options);
  return solver.run(nested_sequence(cfg));
}

}  // namespace mesharc

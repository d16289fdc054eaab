#include "mesharc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mesharc {

std::string to_string(RateClass c) { return c == RateClass::alpha1 ? "alpha1" : "alpha2"; }

std::string to_string(InnerProduct p) {
  switch (p) {
    case InnerProduct::problem: return "problem";
    case InnerProduct::h1: return "h1";
    case InnerProduct::l2: return "l2";
  }
  return "problem";
}

InnerProduct inner_product_from_string(const std::string& s) {
  if (s == "problem") return InnerProduct::problem;
  if (s == "h1") return InnerProduct::h1;
  if (s == "l2") return InnerProduct::l2;
  throw std::invalid_argument("unknown inner product '" + s + "' (expected problem, h1 or l2)");
}

RateReport rate_estimates(std::span<const double> e, std::size_t n, bool nested,
                          double mu) {
  if (e.size() < 2) throw std::invalid_argument("rate estimates need at least two errors");
  if (nested && n == 0) throw std::invalid_argument("nested run needs n >= 1");
  if (!(mu > 0.0 && mu < 1.0)) throw std::invalid_argument("mu must lie in (0, 1)");
  RateReport rep;
  rep.mu = mu;
  for (std::size_t i = 2; i <= e.size(); ++i) {
    RateEntry r;
    r.transition = i;
    if (e[i - 2] == 0.0) {
      r.ratio = std::numeric_limits<double>::quiet_NaN();
      r.undefined = true;
    } else {
      r.ratio = e[i - 1] / e[i - 2];
    }
    r.cls = nested && (i - 1) % n == 0 ? RateClass::alpha2 : RateClass::alpha1;
    rep.entries.push_back(r);
  }
  for (auto it = rep.entries.rbegin(); it != rep.entries.rend(); ++it) {
    if (it->cls != RateClass::alpha1 || it->undefined) continue;
    rep.c3 = it->ratio / mu;
    if (*rep.c3 > 0.0) rep.sigma = -std::log(*rep.c3) / std::log(mu);
    break;
  }
  return rep;
}

RateReport rate_estimates(const std::vector<LevelDiagnostics>& diagnostics,
                          std::size_t n, bool nested, double mu) {
  std::vector<double> e;
  for (const auto& d : diagnostics) {
    if (!d.l2_error) throw std::invalid_argument("diagnostics carry no L2 errors");
    e.push_back(*d.l2_error);
  }
  return rate_estimates(e, n, nested, mu);
}

DroppingCholesky dropping_cholesky(const Eigen::MatrixXd& K, double rel_tol) {
  const Eigen::Index n = K.rows();
  if (K.cols() != n) throw std::invalid_argument("Gram block must be square");
  DroppingCholesky out;
  Eigen::LLT<Eigen::MatrixXd> llt(K);
  if (llt.info() == Eigen::Success) {
    out.L = llt.matrixL();
    for (Eigen::Index i = 0; i < n; ++i) out.kept.push_back(static_cast<std::size_t>(i));
    return out;
  }
  // Left-looking elimination; column p of W belongs to the p-th kept index.
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
  Eigen::Index p = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double pivot = K(k, k) - W.row(k).head(p).squaredNorm();
    if (!(pivot > rel_tol * std::abs(K(k, k))) || !(pivot > 0.0)) {
      out.dropped.push_back(static_cast<std::size_t>(k));
      continue;
    }
    const double lkk = std::sqrt(pivot);
    W(k, p) = lkk;
    const Eigen::Index rest = n - k - 1;
    if (rest > 0) {
      W.col(p).tail(rest) =
          (K.col(k).tail(rest) - W.bottomLeftCorner(rest, p) * W.row(k).head(p).transpose()) /
          lkk;
    }
    out.kept.push_back(static_cast<std::size_t>(k));
    ++p;
  }
  out.L.resize(p, p);
  for (Eigen::Index a = 0; a < p; ++a)
    out.L.row(a) = W.row(static_cast<Eigen::Index>(out.kept[static_cast<std::size_t>(a)])).head(p);
  return out;
}

GramAngle gram_angle(const Eigen::MatrixXd& K1, const Eigen::MatrixXd& K2,
                     const Eigen::MatrixXd& K12) {
  if (K12.rows() != K1.rows() || K12.cols() != K2.rows())
    throw std::invalid_argument("Gram block sizes do not match");
  GramAngle g;
  if (K1.rows() == 0 || K2.rows() == 0) return g;
  const DroppingCholesky c1 = dropping_cholesky(K1);
  const DroppingCholesky c2 = dropping_cholesky(K2);
  g.dropped_first = c1.dropped;
  g.dropped_second = c2.dropped;
  if (c1.kept.empty() || c2.kept.empty()) return g;

  const auto n1 = static_cast<Eigen::Index>(c1.kept.size());
  const auto n2 = static_cast<Eigen::Index>(c2.kept.size());
  Eigen::MatrixXd C(n1, n2);
  for (Eigen::Index a = 0; a < n1; ++a)
    for (Eigen::Index b = 0; b < n2; ++b)
      C(a, b) = K12(static_cast<Eigen::Index>(c1.kept[static_cast<std::size_t>(a)]),
                    static_cast<Eigen::Index>(c2.kept[static_cast<std::size_t>(b)]));

  const Eigen::MatrixXd W = c1.L.triangularView<Eigen::Lower>().solve(C);
  const Eigen::MatrixXd Mt = c2.L.triangularView<Eigen::Lower>().solve(W.transpose());
  // σ_max(M)² = λ_max of the smaller Gram product.
  Eigen::MatrixXd G = n1 <= n2 ? Eigen::MatrixXd(Mt.transpose() * Mt)
                               : Eigen::MatrixXd(Mt * Mt.transpose());
  G = 0.5 * (G + G.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
  g.sigma_max = std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
  return g;
}

namespace {

struct Member {
  std::size_t level;
  std::size_t index;
};

// Dense block a(Φ_row, Φ_col) for two member lists.
Eigen::MatrixXd gram_block(MultiscaleSolver& solver, const std::vector<Member>& rows,
                           const std::vector<Member>& cols) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()),
                                              static_cast<Eigen::Index>(cols.size()));
  std::vector<std::size_t> row_levels, col_levels;
  for (const auto& m : rows) row_levels.push_back(m.level);
  for (const auto& m : cols) col_levels.push_back(m.level);
  std::sort(row_levels.begin(), row_levels.end());
  row_levels.erase(std::unique(row_levels.begin(), row_levels.end()), row_levels.end());
  std::sort(col_levels.begin(), col_levels.end());
  col_levels.erase(std::unique(col_levels.begin(), col_levels.end()), col_levels.end());

  for (std::size_t lr : row_levels) {
    for (std::size_t lc : col_levels) {
      // Stored with the finer level as target so the solver cache is shared.
      const bool row_is_target = lr >= lc;
      const SparseMatrix& C =
          row_is_target ? solver.coupling(lr, lc) : solver.coupling(lc, lr);
      std::vector<long> col_pos(solver.space(lc).size(), -1);
      for (std::size_t b = 0; b < cols.size(); ++b)
        if (cols[b].level == lc) col_pos[cols[b].index] = static_cast<long>(b);
      std::vector<long> row_pos(solver.space(lr).size(), -1);
      for (std::size_t a = 0; a < rows.size(); ++a)
        if (rows[a].level == lr) row_pos[rows[a].index] = static_cast<long>(a);

      const std::vector<long>& target_pos = row_is_target ? row_pos : col_pos;
      const std::vector<long>& source_pos = row_is_target ? col_pos : row_pos;
      for (std::size_t t = 0; t < C.rows(); ++t) {
        if (target_pos[t] < 0) continue;
        const auto cs = C.row_columns(t);
        const auto vs = C.row_values(t);
        for (std::size_t q = 0; q < cs.size(); ++q) {
          const long s = source_pos[cs[q]];
          if (s < 0) continue;
          if (row_is_target)
            out(target_pos[t], s) = vs[q];
          else
            out(s, target_pos[t]) = vs[q];
        }
      }
    }
  }
  return out;
}

}  // namespace

AngleAnalysis subspace_angles(MultiscaleSolver& solver) {
  const std::size_t n = solver.levels();
  AngleAnalysis out;
  if (n < 2) return out;

  std::vector<std::vector<Member>> fresh(n);
  std::vector<const PointSet*> earlier;
  for (std::size_t j = 0; j < n; ++j) {
    const PointSet& X = solver.space(j).centres;
    const std::vector<bool> seen = coincident_mask(X, earlier);
    for (std::size_t k = 0; k < X.size(); ++k)
      if (!seen[k]) fresh[j].push_back({j, k});
    earlier.push_back(&X);
  }

  for (std::size_t i = 0; i + 1 < n; ++i) {
    AngleEntry e;
    e.i = i + 1;
    const std::vector<Member>& first = fresh[i];
    std::vector<Member> second;
    for (std::size_t j = i + 1; j < n; ++j)
      second.insert(second.end(), fresh[j].begin(), fresh[j].end());
    e.first_size = first.size();
    e.second_size = second.size();
    if (first.empty() || second.empty()) {
      e.degenerate = true;
      e.note = first.empty() ? "level adds no new centres" : "no new centres on later levels";
      out.entries.push_back(e);
      continue;
    }
    const Eigen::MatrixXd K1 = gram_block(solver, first, first);
    const Eigen::MatrixXd K2 = gram_block(solver, second, second);
    const Eigen::MatrixXd K12 = gram_block(solver, first, second);
    const GramAngle g = gram_angle(K1, K2, K12);
    for (std::size_t k : g.dropped_first)
      e.dropped.push_back(solver.space(first[k].level).centres[first[k].index]);
    for (std::size_t k : g.dropped_second)
      e.dropped.push_back(solver.space(second[k].level).centres[second[k].index]);
    if (!e.dropped.empty())
      e.note = std::to_string(e.dropped.size()) + " centre(s) dropped from singular Gram blocks";
    if (!g.sigma_max) {
      e.degenerate = true;
      if (e.note.empty()) e.note = "Gram block not positive definite";
    } else {
      e.sin_alpha = g.sigma_max;
    }
    out.entries.push_back(e);
  }
  return out;
}

AngleAnalysis subspace_angles(const LevelSchedule& levels, const ProblemSpec& problem,
                              const SolverOptions& options, InnerProduct inner) {
  if (inner == InnerProduct::problem) {
    MultiscaleSolver solver(levels, problem, options);
    return subspace_angles(solver);
  }
  BilinearForm form(inner == InnerProduct::h1 ? FormKind::h1 : FormKind::l2, problem.domain,
                   options.quadrature);
  MultiscaleSolver solver(levels, problem, options, form);
  return subspace_angles(solver);
}

double nested_rate_bound(std::span<const double> sin_alpha) {
  double prod = 1.0;
  for (double s : sin_alpha) prod *= s * s;
  return std::sqrt(std::max(0.0, 1.0 - prod));
}

double nested_rate_bound(const AngleAnalysis& angles) {
  std::vector<double> s;
  for (const auto& e : angles.entries)
    if (e.sin_alpha) s.push_back(*e.sin_alpha);
  return nested_rate_bound(s);
}

}  // namespace mesharc

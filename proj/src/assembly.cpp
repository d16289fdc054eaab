#include "mesharc/assembly.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <map>
#include <cmath>
#include <stdexcept>

namespace mesharc {

FormKind form_for(Variant v) {
  return v == Variant::poisson_dirichlet ? FormKind::nitsche : FormKind::h1;
}

BilinearForm::BilinearForm(FormKind kind, RectDomain domain, QuadratureSpec spec,
                           std::optional<double> beta)
    : kind_(kind), domain_(domain), spec_(spec), beta_(beta) {
  spec_.validate();
  if (kind_ == FormKind::nitsche) {
    if (!beta_) throw std::invalid_argument("Nitsche form requires a penalty beta");
    if (!(*beta_ > 0.0) || !std::isfinite(*beta_))
      throw std::invalid_argument("Nitsche penalty beta must be finite and positive");
  }
}

QuadResult BilinearForm::plain_pair(const WendlandKernel& ka, const Point& ca,
                                    double da, const WendlandKernel& kb,
                                    const Point& cb, double db) const {
  return plain_pair_on(domain_, ka, ca, da, kb, cb, db);
}

QuadResult BilinearForm::plain_pair_on(const RectDomain& region,
                                       const WendlandKernel& ka, const Point& ca,
                                       double da, const WendlandKernel& kb,
                                       const Point& cb, double db) const {
  const bool mass = kind_ != FormKind::nitsche;
  const bool grad = kind_ != FormKind::l2;
  auto interior = [&](const Point& x) {
    const KernelSample a = sample_plain(ka, ca, da, x);
    const KernelSample b = sample_plain(kb, cb, db, x);
    const double v = grad ? dot(a.grad, b.grad) : 0.0;
    return mass ? v + a.value * b.value : v;
  };
  QuadResult r = integrate_support_pair(interior, ca, da, cb, db, region, spec_);
  if (kind_ == FormKind::nitsche) {
    const double beta = *beta_;
    auto boundary = [&](const Point& x, const Point& n) {
      const KernelSample a = sample_plain(ka, ca, da, x);
      const KernelSample b = sample_plain(kb, cb, db, x);
      return -b.value * dot(a.grad, n) - a.value * dot(b.grad, n) +
             beta * a.value * b.value;
    };
    const QuadResult rb = integrate_boundary_pieces(
        boundary, boundary_pieces(region, ca, da, cb, db), spec_);
    r.value += rb.value;
    r.converged = r.converged && rb.converged;
    r.refinements = std::max(r.refinements, rb.refinements);
    r.evaluations += rb.evaluations;
  }
  return r;
}

double BilinearForm::pair(const ScaledKernel& a, const Point& ca,
                          const ScaledKernel& b, const Point& cb,
                          AssemblyStats* stats) const {
  const QuadResult r =
      plain_pair(a.base(), ca, a.delta(), b.base(), cb, b.delta());
  if (stats) {
    ++stats->entries;
    stats->nonconverged += r.converged ? 0 : 1;
    stats->evaluations += r.evaluations;
    stats->max_refinements = std::max(stats->max_refinements, r.refinements);
  }
  return a.prefactor() * b.prefactor() * r.value;
}

double BilinearForm::with_field(const ScalarField& u, const VectorField& grad_u,
                                const ScaledKernel& k, const Point& c) const {
  const double delta = k.delta();
  const bool mass = kind_ != FormKind::nitsche;
  const bool grad = kind_ != FormKind::l2;
  auto interior = [&](const Point& x) {
    const KernelSample s = sample_plain(k.base(), c, delta, x);
    if (s.value == 0.0 && s.grad.x == 0.0 && s.grad.y == 0.0) return 0.0;
    const double v = grad ? dot(grad_u(x), s.grad) : 0.0;
    return mass ? v + u(x) * s.value : v;
  };
  double total = integrate_support_pair(interior, c, delta, c, delta, domain_, spec_).value;
  if (kind_ == FormKind::nitsche) {
    const double beta = *beta_;
    auto boundary = [&](const Point& x, const Point& n) {
      const KernelSample s = sample_plain(k.base(), c, delta, x);
      const double ux = u(x);
      return -s.value * dot(grad_u(x), n) - ux * dot(s.grad, n) + beta * ux * s.value;
    };
    total += integrate_boundary(boundary, domain_, c, delta, spec_).value;
  }
  return k.prefactor() * total;
}

namespace {

constexpr long kNoEdge = std::numeric_limits<long>::min();
using PairKey = std::array<long, 6>;

// Smallest image of a key under the symmetries of the square: the forms are
// built from radial kernels, so mirrored configurations integrate alike.
PairKey canonical(PairKey k) {
  auto mirror_x = [](PairKey a) {
    a[0] = -a[0];
    std::swap(a[2], a[3]);
    return a;
  };
  auto mirror_y = [](PairKey a) {
    a[1] = -a[1];
    std::swap(a[4], a[5]);
    return a;
  };
  auto transpose = [](PairKey a) {
    std::swap(a[0], a[1]);
    std::swap(a[2], a[4]);
    std::swap(a[3], a[5]);
    return a;
  };
  PairKey best = k;
  for (int t = 0; t < 2; ++t) {
    const PairKey base = t == 0 ? k : transpose(k);
    for (const PairKey& c : {base, mirror_x(base), mirror_y(base), mirror_x(mirror_y(base))})
      best = std::min(best, c);
  }
  return best;
}

}  // namespace

std::vector<QuadResult> shared_pair_integrals(
    const std::vector<std::pair<Point, Point>>& pairs, double ra, double rb,
    const RectDomain& domain, const PairIntegral& f, AssemblyStats* stats) {
  const double quantum = 1e-12 * (ra + rb);
  const double far = 2.0 * (ra + rb);
  auto q = [&](double v) { return std::llround(v / quantum); };

  std::map<PairKey, std::size_t> index;
  std::vector<PairKey> keys;
  std::vector<std::size_t> slot(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const Point ca = pairs[i].first;
    const Point cb = pairs[i].second;
    // Box containing both supports' intersection; edges it misses cannot
    // influence the integral.
    const double x0 = std::max(ca.x - ra, cb.x - rb);
    const double x1 = std::min(ca.x + ra, cb.x + rb);
    const double y0 = std::max(ca.y - ra, cb.y - rb);
    const double y1 = std::min(ca.y + ra, cb.y + rb);
    const PairKey key{
        q(cb.x - ca.x),
        q(cb.y - ca.y),
        x0 <= domain.xmin() ? q(ca.x - domain.xmin()) : kNoEdge,
        x1 >= domain.xmax() ? q(domain.xmax() - ca.x) : kNoEdge,
        y0 <= domain.ymin() ? q(ca.y - domain.ymin()) : kNoEdge,
        y1 >= domain.ymax() ? q(domain.ymax() - ca.y) : kNoEdge};
    const auto [it, inserted] = index.emplace(canonical(key), keys.size());
    if (inserted) keys.push_back(it->first);
    slot[i] = it->second;
  }

  std::vector<QuadResult> computed(keys.size());
  const long nk = static_cast<long>(keys.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long u = 0; u < nk; ++u) {
    const PairKey& k = keys[static_cast<std::size_t>(u)];
    auto edge = [&](long v) { return v == kNoEdge ? far : static_cast<double>(v) * quantum; };
    const RectDomain region(-edge(k[2]), edge(k[3]), -edge(k[4]), edge(k[5]));
    const Point cb{static_cast<double>(k[0]) * quantum, static_cast<double>(k[1]) * quantum};
    computed[static_cast<std::size_t>(u)] = f(Point{0.0, 0.0}, cb, region);
  }
  if (stats) {
    stats->entries += static_cast<long>(pairs.size());
    for (const QuadResult& r : computed) {
      stats->evaluations += r.evaluations;
      stats->max_refinements = std::max(stats->max_refinements, r.refinements);
    }
    for (std::size_t i = 0; i < pairs.size(); ++i)
      if (!computed[slot[i]].converged) ++stats->nonconverged;
  }

  std::vector<QuadResult> out(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) out[i] = computed[slot[i]];
  return out;
}

Assembler::Assembler(ProblemSpec problem, QuadratureSpec spec,
                     std::optional<double> beta)
    : problem_(std::move(problem)),
      form_(form_for(problem_.variant), problem_.domain, spec, beta) {
  problem_.validate();
  if (problem_.variant != Variant::poisson_dirichlet && beta)
    throw std::invalid_argument("beta given for a problem without Dirichlet data");
}

Assembler::Assembler(ProblemSpec problem, BilinearForm form)
    : problem_(std::move(problem)), form_(std::move(form)) {
  problem_.validate();
}

void Assembler::merge(const AssemblyStats& st) const {
  entries_.fetch_add(st.entries, std::memory_order_relaxed);
  nonconverged_.fetch_add(st.nonconverged, std::memory_order_relaxed);
  evaluations_.fetch_add(st.evaluations, std::memory_order_relaxed);
  int prev = max_refinements_.load(std::memory_order_relaxed);
  while (st.max_refinements > prev &&
         !max_refinements_.compare_exchange_weak(prev, st.max_refinements)) {
  }
}

void Assembler::record(const QuadResult& r) const {
  entries_.fetch_add(1, std::memory_order_relaxed);
  if (!r.converged) nonconverged_.fetch_add(1, std::memory_order_relaxed);
  evaluations_.fetch_add(r.evaluations, std::memory_order_relaxed);
  int prev = max_refinements_.load(std::memory_order_relaxed);
  while (r.refinements > prev &&
         !max_refinements_.compare_exchange_weak(prev, r.refinements)) {
  }
}

AssemblyStats Assembler::stats() const {
  return {entries_.load(), nonconverged_.load(), evaluations_.load(),
          max_refinements_.load()};
}

void Assembler::reset_stats() {
  entries_ = 0;
  nonconverged_ = 0;
  evaluations_ = 0;
  max_refinements_ = 0;
}

SymSparseMatrix Assembler::stiffness(const KernelSpace& level) const {
  const auto& X = level.centres;
  const auto& k = level.kernel;
  const double delta = k.delta();
  const auto lists = neighbor_lists(X, X, 2.0 * delta);
  const std::size_t n = X.size();

  // Upper triangle only; mirrored below.
  std::vector<std::pair<Point, Point>> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j : lists[i])
      if (j >= i) pairs.emplace_back(X[i], X[j]);
  AssemblyStats st;
  const auto results = shared_pair_integrals(
      pairs, delta, delta, form_.domain(),
      [&](const Point& a, const Point& b, const RectDomain& region) {
        return form_.plain_pair_on(region, k.base(), a, delta, k.base(), b, delta);
      },
      &st);
  merge(st);

  const double scale = k.prefactor() * k.prefactor();
  std::vector<std::vector<double>> values(n);
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    values[i].resize(lists[i].size());
    for (std::size_t t = 0; t < lists[i].size(); ++t)
      if (lists[i][t] >= i) values[i][t] = scale * results[next++].value;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = lists[i];
    for (std::size_t t = 0; t < row.size(); ++t) {
      const std::size_t j = row[t];
      if (j >= i) continue;
      const auto& other = lists[j];
      const auto pos = std::lower_bound(other.begin(), other.end(), i) - other.begin();
      values[i][t] = values[j][static_cast<std::size_t>(pos)];
    }
  }
  return SymSparseMatrix(SparseMatrix::from_rows(n, lists, values));
}

SparseMatrix Assembler::cross(const KernelSpace& target,
                              const KernelSpace& source) const {
  const auto& kt = target.kernel;
  const auto& ks = source.kernel;
  // A level against itself is its stiffness matrix, bit for bit.
  if (target.centres.points == source.centres.points && kt.delta() == ks.delta() &&
      kt.prefactor() == ks.prefactor() && kt.base().power() == ks.base().power() &&
      std::ranges::equal(kt.base().value_coeffs(), ks.base().value_coeffs()))
    return stiffness(target).matrix();
  const auto lists =
      neighbor_lists(target.centres, source.centres, kt.delta() + ks.delta());
  const std::size_t n = target.size();

  std::vector<std::pair<Point, Point>> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j : lists[i]) pairs.emplace_back(source.centres[j], target.centres[i]);
  AssemblyStats st;
  const auto results = shared_pair_integrals(
      pairs, ks.delta(), kt.delta(), form_.domain(),
      [&](const Point& a, const Point& b, const RectDomain& region) {
        return form_.plain_pair_on(region, ks.base(), a, ks.delta(), kt.base(), b,
                                   kt.delta());
      },
      &st);
  merge(st);

  const double scale = kt.prefactor() * ks.prefactor();
  std::vector<std::vector<double>> values(n);
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    values[i].resize(lists[i].size());
    for (double& v : values[i]) v = scale * results[next++].value;
  }
  return SparseMatrix::from_rows(source.size(), lists, values);
}

std::vector<double> Assembler::load(const KernelSpace& level) const {
  const auto& X = level.centres;
  const auto& k = level.kernel;
  const double delta = k.delta();
  const auto& f = problem_.f;
  const auto& g = problem_.g;
  const auto& domain = form_.domain();
  const auto& spec = form_.spec();
  const bool nitsche = form_.kind() == FormKind::nitsche && static_cast<bool>(g);
  std::vector<double> out(X.size());

#pragma omp parallel for schedule(dynamic, 4)
  for (std::size_t i = 0; i < X.size(); ++i) {
    const Point c = X[i];
    auto interior = [&](const Point& x) {
      const KernelSample s = sample_plain(k.base(), c, delta, x);
      return s.value == 0.0 ? 0.0 : f(x) * s.value;
    };
    QuadResult r = integrate_support_pair(interior, c, delta, c, delta, domain, spec);
    if (nitsche) {
      const double beta = *form_.beta();
      auto boundary = [&](const Point& x, const Point& n) {
        const KernelSample s = sample_plain(k.base(), c, delta, x);
        const double gx = g(x);
        return -gx * dot(s.grad, n) + beta * s.value * gx;
      };
      const QuadResult rb = integrate_boundary(boundary, domain, c, delta, spec);
      r.value += rb.value;
      r.converged = r.converged && rb.converged;
    }
    record(r);
    out[i] = k.prefactor() * r.value;
  }
  return out;
}

SymSparseMatrix assemble_stiffness(const KernelSpace& level,
                                   const ProblemSpec& problem,
                                   std::optional<double> beta,
                                   const QuadratureSpec& spec) {
  return Assembler(problem, spec, beta).stiffness(level);
}

std::vector<double> assemble_load(const KernelSpace& level,
                                  const ProblemSpec& problem,
                                  std::optional<double> beta,
                                  const QuadratureSpec& spec) {
  return Assembler(problem, spec, beta).load(level);
}

SparseMatrix assemble_cross(const KernelSpace& target, const KernelSpace& source,
                            const ProblemSpec& problem,
                            std::optional<double> beta,
                            const QuadratureSpec& spec) {
  return Assembler(problem, spec, beta).cross(target, source);
}

}  // namespace mesharc

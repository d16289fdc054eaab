#include "mesharc/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

namespace mesharc {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols,
                           std::vector<std::size_t> row_ptr,
                           std::vector<std::size_t> col_idx,
                           std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  if (row_ptr_.size() != rows_ + 1 || col_idx_.size() != values_.size() ||
      row_ptr_.back() != values_.size())
    throw std::invalid_argument("inconsistent CSR arrays");
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      if (col_idx_[k] >= cols_) throw std::invalid_argument("CSR column out of range");
      if (k > row_ptr_[i] && col_idx_[k] <= col_idx_[k - 1])
        throw std::invalid_argument("CSR columns must be strictly ascending");
    }
}

SparseMatrix SparseMatrix::from_rows(
    std::size_t cols, const std::vector<std::vector<std::size_t>>& columns,
    const std::vector<std::vector<double>>& values) {
  if (columns.size() != values.size())
    throw std::invalid_argument("row column/value lists differ in length");
  std::vector<std::size_t> ptr{0}, idx;
  std::vector<double> val;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].size() != values[i].size())
      throw std::invalid_argument("row column/value lists differ in length");
    idx.insert(idx.end(), columns[i].begin(), columns[i].end());
    val.insert(val.end(), values[i].begin(), values[i].end());
    ptr.push_back(idx.size());
  }
  return {columns.size(), cols, std::move(ptr), std::move(idx), std::move(val)};
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<std::size_t> ptr(n + 1), idx(n);
  for (std::size_t i = 0; i <= n; ++i) ptr[i] = i;
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  return {n, n, std::move(ptr), std::move(idx), std::vector<double>(n, 1.0)};
}

SparseMatrix SparseMatrix::from_dense(const Eigen::MatrixXd& dense, double drop) {
  std::vector<std::size_t> ptr{0}, idx;
  std::vector<double> val;
  for (Eigen::Index i = 0; i < dense.rows(); ++i) {
    for (Eigen::Index j = 0; j < dense.cols(); ++j) {
      if (std::abs(dense(i, j)) > drop || (drop == 0.0 && dense(i, j) != 0.0)) {
        idx.push_back(static_cast<std::size_t>(j));
        val.push_back(dense(i, j));
      }
    }
    ptr.push_back(idx.size());
  }
  return {static_cast<std::size_t>(dense.rows()),
          static_cast<std::size_t>(dense.cols()), std::move(ptr), std::move(idx),
          std::move(val)};
}

double SparseMatrix::at(std::size_t i, std::size_t j) const {
  const auto cols = row_columns(i);
  const auto it = std::lower_bound(cols.begin(), cols.end(), j);
  if (it == cols.end() || *it != j) return 0.0;
  return values_[row_ptr_[i] + static_cast<std::size_t>(it - cols.begin())];
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(rows_, 0.0);
  multiply_add(x, y);
  return y;
}

void SparseMatrix::multiply_add(std::span<const double> x, std::span<double> y,
                                double alpha) const {
  if (x.size() != cols_ || y.size() != rows_)
    throw std::invalid_argument("sparse multiply: dimension mismatch");
  for (std::size_t i = 0; i < rows_; ++i) {
    double acc = 0.0;
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      acc += values_[k] * x[col_idx_[k]];
    y[i] += alpha * acc;
  }
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<std::size_t> ptr(cols_ + 1, 0);
  for (std::size_t c : col_idx_) ++ptr[c + 1];
  for (std::size_t j = 0; j < cols_; ++j) ptr[j + 1] += ptr[j];
  std::vector<std::size_t> idx(nnz()), next(ptr.begin(), ptr.end() - 1);
  std::vector<double> val(nnz());
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      const std::size_t dst = next[col_idx_[k]]++;
      idx[dst] = i;
      val[dst] = values_[k];
    }
  return {cols_, rows_, std::move(ptr), std::move(idx), std::move(val)};
}

SparseMatrix SparseMatrix::scaled(double factor) const {
  SparseMatrix out = *this;
  for (double& v : out.values_) v *= factor;
  return out;
}

Eigen::MatrixXd SparseMatrix::to_dense() const {
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows_),
                                                static_cast<Eigen::Index>(cols_));
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      dense(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col_idx_[k])) =
          values_[k];
  return dense;
}

void SparseMatrix::write_coordinate(std::ostream& out) const {
  std::ostringstream buf;
  buf << std::setprecision(17);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      buf << i << ' ' << col_idx_[k] << ' ' << values_[k] << '\n';
  out << buf.str();
}

SymSparseMatrix::SymSparseMatrix(SparseMatrix full) : full_(std::move(full)) {
  if (full_.rows() != full_.cols())
    throw std::invalid_argument("symmetric matrix must be square");
  if (max_asymmetry() != 0.0)
    throw std::invalid_argument("matrix is not exactly symmetric");
}

double SymSparseMatrix::max_asymmetry() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < full_.rows(); ++i) {
    const auto cols = full_.row_columns(i);
    const auto vals = full_.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const auto tcols = full_.row_columns(cols[k]);
      if (!std::binary_search(tcols.begin(), tcols.end(), i))
        return std::numeric_limits<double>::infinity();
      worst = std::max(worst, std::abs(vals[k] - full_.at(cols[k], i)));
    }
  }
  return worst;
}

std::vector<std::size_t> reverse_cuthill_mckee(const SparseMatrix& pattern) {
  const std::size_t n = pattern.rows();
  std::vector<std::size_t> degree(n);
  for (std::size_t i = 0; i < n; ++i) degree[i] = pattern.row_columns(i).size();
  std::vector<std::size_t> order;
  order.reserve(n);
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> nbrs;

  // Pseudo-peripheral start per component: repeat BFS from the farthest
  // minimum-degree vertex of the last level while eccentricity grows.
  auto bfs_last_level = [&](std::size_t root, std::size_t& depth) {
    std::vector<long> dist(n, -1);
    std::vector<std::size_t> frontier{root}, last{root};
    dist[root] = 0;
    depth = 0;
    while (!frontier.empty()) {
      std::vector<std::size_t> next;
      for (std::size_t v : frontier)
        for (std::size_t w : pattern.row_columns(v))
          if (dist[w] < 0) {
            dist[w] = dist[v] + 1;
            next.push_back(w);
          }
      if (next.empty()) break;
      last = next;
      frontier = std::move(next);
      ++depth;
    }
    return last;
  };

  for (std::size_t seed = 0; seed < n; ++seed) {
    if (seen[seed]) continue;
    std::size_t root = seed, depth = 0;
    auto last = bfs_last_level(root, depth);
    for (int sweep = 0; sweep < 8; ++sweep) {
      const std::size_t cand = *std::min_element(
          last.begin(), last.end(), [&](std::size_t a, std::size_t b) {
            return degree[a] < degree[b] || (degree[a] == degree[b] && a < b);
          });
      std::size_t cand_depth = 0;
      auto cand_last = bfs_last_level(cand, cand_depth);
      if (cand_depth <= depth) break;
      root = cand;
      depth = cand_depth;
      last = std::move(cand_last);
    }
    std::deque<std::size_t> queue{root};
    seen[root] = true;
    while (!queue.empty()) {
      const std::size_t v = queue.front();
      queue.pop_front();
      order.push_back(v);
      nbrs.clear();
      for (std::size_t w : pattern.row_columns(v))
        if (!seen[w]) {
          seen[w] = true;
          nbrs.push_back(w);
        }
      std::sort(nbrs.begin(), nbrs.end(), [&](std::size_t a, std::size_t b) {
        return degree[a] < degree[b] || (degree[a] == degree[b] && a < b);
      });
      queue.insert(queue.end(), nbrs.begin(), nbrs.end());
    }
  }
  std::reverse(order.begin(), order.end());
  return order;
}

std::size_t envelope_size(const SparseMatrix& pattern,
                          const std::vector<std::size_t>& perm) {
  const std::size_t n = pattern.rows();
  std::vector<std::size_t> inv(n);
  for (std::size_t k = 0; k < n; ++k) inv[perm[k]] = k;
  std::size_t total = 0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t first = k;
    for (std::size_t j : pattern.row_columns(perm[k])) first = std::min(first, inv[j]);
    total += k - first + 1;
  }
  return total;
}

namespace {

std::string pivot_message(std::size_t row, double value) {
  std::ostringstream msg;
  msg << "Cholesky factorization failed: non-positive pivot " << value
      << " at row " << row
      << " (matrix not positive definite; check quadrature accuracy or the "
         "Nitsche penalty)";
  return msg.str();
}

}  // namespace

FactorizationError::FactorizationError(std::size_t pivot_row, double pivot_value)
    : std::runtime_error(pivot_message(pivot_row, pivot_value)),
      row_(pivot_row),
      value_(pivot_value) {}

SparseCholesky::SparseCholesky(const SymSparseMatrix& A) : n_(A.size()) {
  const SparseMatrix& M = A.matrix();
  perm_ = reverse_cuthill_mckee(M);
  std::vector<std::size_t> inv(n_);
  for (std::size_t k = 0; k < n_; ++k) inv[perm_[k]] = k;

  first_.resize(n_);
  offset_.resize(n_ + 1);
  offset_[0] = 0;
  for (std::size_t k = 0; k < n_; ++k) {
    std::size_t first = k;
    for (std::size_t j : M.row_columns(perm_[k])) first = std::min(first, inv[j]);
    first_[k] = first;
    offset_[k + 1] = offset_[k] + (k - first + 1);
  }
  values_.assign(offset_[n_], 0.0);
  for (std::size_t k = 0; k < n_; ++k) {
    const auto cols = M.row_columns(perm_[k]);
    const auto vals = M.row_values(perm_[k]);
    for (std::size_t t = 0; t < cols.size(); ++t) {
      const std::size_t j = inv[cols[t]];
      if (j <= k) values_[offset_[k] + (j - first_[k])] = vals[t];
    }
  }

  // Row-oriented bordering: L(i, j) for first_i <= j < i, then the pivot.
  for (std::size_t i = 0; i < n_; ++i) {
    double* Li = values_.data() + offset_[i];
    const std::size_t fi = first_[i];
    for (std::size_t j = fi; j < i; ++j) {
      const double* Lj = values_.data() + offset_[j];
      const std::size_t fj = first_[j];
      const std::size_t k0 = std::max(fi, fj);
      double acc = Li[j - fi];
      for (std::size_t k = k0; k < j; ++k) acc -= Li[k - fi] * Lj[k - fj];
      Li[j - fi] = acc / Lj[j - fj];
    }
    double diag = Li[i - fi];
    for (std::size_t k = fi; k < i; ++k) diag -= Li[k - fi] * Li[k - fi];
    if (!(diag > 0.0) || !std::isfinite(diag)) throw FactorizationError(perm_[i], diag);
    Li[i - fi] = std::sqrt(diag);
  }
}

std::vector<double> SparseCholesky::solve(std::span<const double> rhs) const {
  if (rhs.size() != n_) throw std::invalid_argument("Cholesky solve: size mismatch");
  std::vector<double> z(n_);
  for (std::size_t k = 0; k < n_; ++k) z[k] = rhs[perm_[k]];
  for (std::size_t i = 0; i < n_; ++i) {
    const double* Li = values_.data() + offset_[i];
    double acc = z[i];
    for (std::size_t k = first_[i]; k < i; ++k) acc -= Li[k - first_[i]] * z[k];
    z[i] = acc / Li[i - first_[i]];
  }
  for (std::size_t i = n_; i-- > 0;) {
    const double* Li = values_.data() + offset_[i];
    z[i] /= Li[i - first_[i]];
    const double zi = z[i];
    for (std::size_t k = first_[i]; k < i; ++k) z[k] -= Li[k - first_[i]] * zi;
  }
  std::vector<double> x(n_);
  for (std::size_t k = 0; k < n_; ++k) x[perm_[k]] = z[k];
  return x;
}

}  // namespace mesharc

#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mesharc {

/// Compressed sparse row matrix with sorted column indices per row.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols,
               std::vector<std::size_t> row_ptr,
               std::vector<std::size_t> col_idx, std::vector<double> values);

  /// Builds from per-row (column, value) lists; columns must be ascending.
  static SparseMatrix from_rows(
      std::size_t cols, const std::vector<std::vector<std::size_t>>& columns,
      const std::vector<std::vector<double>>& values);
  static SparseMatrix identity(std::size_t n);
  static SparseMatrix from_dense(const Eigen::MatrixXd& dense, double drop = 0.0);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return values_.size(); }

  std::span<const std::size_t> row_columns(std::size_t i) const {
    return {col_idx_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }
  std::span<const double> row_values(std::size_t i) const {
    return {values_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }

  /// A(i, j), zero when structurally absent.
  double at(std::size_t i, std::size_t j) const;

  std::vector<double> multiply(std::span<const double> x) const;
  /// y += alpha * A x
  void multiply_add(std::span<const double> x, std::span<double> y,
                    double alpha = 1.0) const;

  SparseMatrix transpose() const;
  SparseMatrix scaled(double factor) const;
  Eigen::MatrixXd to_dense() const;

  /// "i j value" lines, 0-based, full precision.
  void write_coordinate(std::ostream& out) const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
};

/// Square sparse matrix whose stored pattern and values are symmetric.
/// Both triangles are stored.
class SymSparseMatrix {
 public:
  SymSparseMatrix() = default;
  /// Throws std::invalid_argument if `full` is not exactly symmetric.
  explicit SymSparseMatrix(SparseMatrix full);

  std::size_t size() const noexcept { return full_.rows(); }
  std::size_t nnz() const noexcept { return full_.nnz(); }
  const SparseMatrix& matrix() const noexcept { return full_; }
  double at(std::size_t i, std::size_t j) const { return full_.at(i, j); }
  std::vector<double> multiply(std::span<const double> x) const {
    return full_.multiply(x);
  }
  Eigen::MatrixXd to_dense() const { return full_.to_dense(); }
  double max_asymmetry() const;

 private:
  SparseMatrix full_;
};

/// Reverse Cuthill-McKee ordering of a symmetric pattern.
/// perm[k] = original index placed at position k.
std::vector<std::size_t> reverse_cuthill_mckee(const SparseMatrix& pattern);

/// Envelope (profile) bandwidth of a symmetric pattern under a permutation.
std::size_t envelope_size(const SparseMatrix& pattern,
                          const std::vector<std::size_t>& perm);

class FactorizationError : public std::runtime_error {
 public:
  FactorizationError(std::size_t pivot_row, double pivot_value);
  std::size_t pivot_row() const noexcept { return row_; }
  double pivot_value() const noexcept { return value_; }

 private:
  std::size_t row_;
  double value_;
};

/// Envelope Cholesky L L^T of P A P^T under a reverse Cuthill-McKee ordering.
class SparseCholesky {
 public:
  explicit SparseCholesky(const SymSparseMatrix& A);

  std::vector<double> solve(std::span<const double> rhs) const;
  std::size_t size() const noexcept { return n_; }
  std::size_t envelope() const noexcept { return values_.size(); }

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> perm_;
  std::vector<std::size_t> first_;   // first column of row i's envelope
  std::vector<std::size_t> offset_;  // start of row i in values_
  std::vector<double> values_;
};

}  // namespace mesharc

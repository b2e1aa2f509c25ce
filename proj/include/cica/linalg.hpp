#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cica {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles.
///
/// Data matrices follow the features x samples convention (one column per
/// sample). A matrix with zero columns is allowed and represents an empty
/// batch; every other shape must be at least 1x1. Entries are checked for
/// finiteness whenever a matrix is built from caller-supplied values.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> diag);
  static Matrix column_vector(std::span<const double> v);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }
  Vector col(std::size_t c) const;
  void set_col(std::size_t c, std::span<const double> v);

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }
  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }

  Matrix transpose() const;
  bool all_finite() const noexcept;
  double max_abs() const noexcept;
  double frobenius() const noexcept;
  double trace() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s) noexcept;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double s);
Matrix operator*(double s, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);

/// a * b^T without materializing the transpose.
Matrix matmul_nt(const Matrix& a, const Matrix& b);
/// a^T * b without materializing the transpose.
Matrix matmul_tn(const Matrix& a, const Matrix& b);
Vector matvec(const Matrix& a, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b) noexcept;

Matrix select_columns(const Matrix& m, std::span<const std::size_t> idx);
Matrix hstack(const Matrix& a, const Matrix& b);
Vector row_means(const Matrix& m);
/// Subtracts `mean[r]` from every entry of row r.
void center_rows(Matrix& m, std::span<const double> mean);

/// Thin singular value decomposition m = u diag(s) v^T with r = min(rows, cols),
/// u: rows x r, v: cols x r, s descending.
struct Svd {
  Matrix u;
  Vector s;
  Matrix v;
};

/// One-sided Jacobi SVD. Deterministic; throws ErrorKind::Numerical if the
/// sweep cap is reached.
Svd svd(const Matrix& m);

/// Moore-Penrose pseudo-inverse. Singular values at or below the threshold
/// are treated as zero. `rank_tolerance == 0` selects
/// max(rows, cols) * eps * sigma_max.
Matrix pinv(const Matrix& m, double rank_tolerance = 0.0);

struct SymEig {
  Vector values;   // descending
  Matrix vectors;  // column i pairs with values[i]
};

/// Symmetric eigendecomposition (Householder tridiagonalization + implicit QL).
SymEig sym_eig(const Matrix& s);

/// Lower-triangular L with L L^T = s + jitter * I. Throws DefinitenessError
/// naming the first failing pivot.
Matrix cholesky(const Matrix& s, double jitter = 0.0);

/// Solves (L L^T) x = b for lower-triangular L.
Vector cholesky_solve(const Matrix& lower, std::span<const double> b);

}  // namespace cica

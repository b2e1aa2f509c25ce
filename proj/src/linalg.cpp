#include "cica/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "cica/error.hpp"

namespace cica {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void check_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    fail(ErrorKind::Contract, std::string(op) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                                  std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                                  std::to_string(b.cols()));
}

bool is_symmetric(const Matrix& s, double rel_tol) {
  const double scale = std::max(1.0, s.max_abs());
  for (std::size_t i = 0; i < s.rows(); ++i)
    for (std::size_t j = i + 1; j < s.cols(); ++j)
      if (std::abs(s(i, j) - s(j, i)) > rel_tol * scale) return false;
  return true;
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
  if (!std::isfinite(fill)) fail(ErrorKind::Contract, "Matrix: non-finite fill value");
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
  if (data_.size() != rows * cols)
    fail(ErrorKind::Contract, "Matrix: expected " + std::to_string(rows * cols) + " entries, got " +
                                  std::to_string(data_.size()));
  if (!all_finite()) fail(ErrorKind::Contract, "Matrix: non-finite entry");
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> diag) {
  Matrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

Matrix Matrix::column_vector(std::span<const double> v) {
  return Matrix(v.size(), 1, std::vector<double>(v.begin(), v.end()));
}

Vector Matrix::col(std::size_t c) const {
  Vector out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

void Matrix::set_col(std::size_t c, std::span<const double> v) {
  require(v.size() == rows_, "Matrix::set_col: length mismatch");
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = v[r];
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

bool Matrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

double Matrix::max_abs() const noexcept {
  double m = 0.0;
  for (double x : data_) m = std::max(m, std::abs(x));
  return m;
}

double Matrix::frobenius() const noexcept { return std::sqrt(dot(data_, data_)); }

double Matrix::trace() const {
  require(rows_ == cols_, "trace: matrix must be square");
  double t = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
  return t;
}

Matrix& Matrix::operator+=(const Matrix& other) {
  check_same_shape(*this, other, "operator+");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  check_same_shape(*this, other, "operator-");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Matrix& Matrix::operator*=(double s) noexcept {
  for (double& x : data_) x *= s;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(Matrix a, double s) { return a *= s; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    fail(ErrorKind::Contract, "matmul: inner dimensions " + std::to_string(a.cols()) + " and " +
                                  std::to_string(b.rows()) + " differ");
  Matrix out(a.rows(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* orow = out.data() + i * n;
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* brow = b.data() + k * n;
      for (std::size_t j = 0; j < n; ++j) orow[j] += aik * brow[j];
    }
  }
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  // Four independent accumulators; the summation order is fixed, so results
  // are reproducible run to run.
  const std::size_t n = a.size();
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) fail(ErrorKind::Contract, "matmul_nt: column counts differ");
  Matrix out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.rows(); ++j) out(i, j) = dot(a.row(i), b.row(j));
  return out;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) fail(ErrorKind::Contract, "matmul_tn: row counts differ");
  Matrix out(a.cols(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t k = 0; k < a.rows(); ++k) {
    const double* brow = b.data() + k * n;
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double aki = a(k, i);
      if (aki == 0.0) continue;
      double* orow = out.data() + i * n;
      for (std::size_t j = 0; j < n; ++j) orow[j] += aki * brow[j];
    }
  }
  return out;
}

Vector matvec(const Matrix& a, std::span<const double> x) {
  require(a.cols() == x.size(), "matvec: dimension mismatch");
  Vector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
  return y;
}

Matrix select_columns(const Matrix& m, std::span<const std::size_t> idx) {
  Matrix out(m.rows(), idx.size());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto src = m.row(r);
    auto dst = out.row(r);
    for (std::size_t j = 0; j < idx.size(); ++j) dst[j] = src[idx[j]];
  }
  return out;
}

Matrix hstack(const Matrix& a, const Matrix& b) {
  if (a.empty() && a.rows() == 0) return b;
  require(a.rows() == b.rows(), "hstack: row counts differ");
  Matrix out(a.rows(), a.cols() + b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    std::copy(a.row(r).begin(), a.row(r).end(), out.row(r).begin());
    std::copy(b.row(r).begin(), b.row(r).end(), out.row(r).begin() + a.cols());
  }
  return out;
}

Vector row_means(const Matrix& m) {
  require(m.cols() > 0, "row_means: matrix has no columns");
  Vector mean(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double s = 0.0;
    for (double x : m.row(r)) s += x;
    mean[r] = s / static_cast<double>(m.cols());
  }
  return mean;
}

void center_rows(Matrix& m, std::span<const double> mean) {
  require(mean.size() == m.rows(), "center_rows: mean length mismatch");
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (double& x : m.row(r)) x -= mean[r];
}

// ---------------------------------------------------------------------------
// SVD

Svd svd(const Matrix& m) {
  require(m.rows() >= 1 && m.cols() >= 1, "svd: empty matrix");
  if (m.rows() < m.cols()) {
    Svd t = svd(m.transpose());
    return {std::move(t.v), std::move(t.s), std::move(t.u)};
  }
  const std::size_t rows = m.rows();
  const std::size_t n = m.cols();

  // Columns of m (and of v) are stored as rows so the rotations stream
  // through contiguous memory.
  Matrix a = m.transpose();
  Matrix v = Matrix::identity(n);

  constexpr int kMaxSweeps = 80;
  bool converged = false;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    converged = true;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        auto ai = a.row(i);
        auto aj = a.row(j);
        const double alpha = dot(ai, ai);
        const double beta = dot(aj, aj);
        const double gamma = dot(ai, aj);
        if (gamma == 0.0 || std::abs(gamma) <= kEps * std::sqrt(alpha * beta)) continue;
        converged = false;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t k = 0; k < rows; ++k) {
          const double x = ai[k];
          ai[k] = c * x - s * aj[k];
          aj[k] = s * x + c * aj[k];
        }
        auto vi = v.row(i);
        auto vj = v.row(j);
        for (std::size_t k = 0; k < n; ++k) {
          const double x = vi[k];
          vi[k] = c * x - s * vj[k];
          vj[k] = s * x + c * vj[k];
        }
      }
    }
  }
  if (!converged) fail(ErrorKind::Numerical, "svd: one-sided Jacobi did not converge within the sweep cap");

  Vector sigma(n);
  for (std::size_t i = 0; i < n; ++i) sigma[i] = std::sqrt(dot(a.row(i), a.row(i)));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  Svd out{Matrix(rows, n), Vector(n), Matrix(n, n)};
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t src = order[c];
    out.s[c] = sigma[src];
    const double inv = sigma[src] > 0.0 ? 1.0 / sigma[src] : 0.0;
    for (std::size_t r = 0; r < rows; ++r) out.u(r, c) = a(src, r) * inv;
    for (std::size_t r = 0; r < n; ++r) out.v(r, c) = v(src, r);
  }
  return out;
}

Matrix pinv(const Matrix& m, double rank_tolerance) {
  require(rank_tolerance >= 0.0, "pinv: rank_tolerance must be >= 0");
  require(m.all_finite(), "pinv: non-finite input");
  const Svd d = svd(m);
  const double smax = d.s.empty() ? 0.0 : d.s.front();
  const double tol = rank_tolerance > 0.0
                         ? rank_tolerance
                         : static_cast<double>(std::max(m.rows(), m.cols())) * kEps * smax;
  // m^+ = v diag(1/s) u^T
  Matrix vs = d.v;
  for (std::size_t c = 0; c < d.s.size(); ++c) {
    const double inv = d.s[c] > tol ? 1.0 / d.s[c] : 0.0;
    for (std::size_t r = 0; r < vs.rows(); ++r) vs(r, c) *= inv;
  }
  return matmul_nt(vs, d.u);
}

// ---------------------------------------------------------------------------
// Symmetric eigendecomposition: Householder reduction to tridiagonal form
// followed by the implicit QL algorithm (EISPACK tred2/tql2 lineage).

namespace {

void tridiagonalize(std::vector<std::vector<double>>& V, Vector& d, Vector& e) {
  const int n = static_cast<int>(d.size());
  for (int j = 0; j < n; ++j) d[j] = V[n - 1][j];

  for (int i = n - 1; i > 0; --i) {
    double scale = 0.0;
    double h = 0.0;
    for (int k = 0; k < i; ++k) scale += std::abs(d[k]);
    if (scale == 0.0) {
      e[i] = d[i - 1];
      for (int j = 0; j < i; ++j) {
        d[j] = V[i - 1][j];
        V[i][j] = 0.0;
        V[j][i] = 0.0;
      }
    } else {
      for (int k = 0; k < i; ++k) {
        d[k] /= scale;
        h += d[k] * d[k];
      }
      double f = d[i - 1];
      double g = std::sqrt(h);
      if (f > 0) g = -g;
      e[i] = scale * g;
      h -= f * g;
      d[i - 1] = f - g;
      for (int j = 0; j < i; ++j) e[j] = 0.0;

      for (int j = 0; j < i; ++j) {
        f = d[j];
        V[j][i] = f;
        g = e[j] + V[j][j] * f;
        for (int k = j + 1; k <= i - 1; ++k) {
          g += V[k][j] * d[k];
          e[k] += V[k][j] * f;
        }
        e[j] = g;
      }
      f = 0.0;
      for (int j = 0; j < i; ++j) {
        e[j] /= h;
        f += e[j] * d[j];
      }
      const double hh = f / (h + h);
      for (int j = 0; j < i; ++j) e[j] -= hh * d[j];
      for (int j = 0; j < i; ++j) {
        f = d[j];
        g = e[j];
        for (int k = j; k <= i - 1; ++k) V[k][j] -= (f * e[k] + g * d[k]);
        d[j] = V[i - 1][j];
        V[i][j] = 0.0;
      }
    }
    d[i] = h;
  }

  for (int i = 0; i < n - 1; ++i) {
    V[n - 1][i] = V[i][i];
    V[i][i] = 1.0;
    const double h = d[i + 1];
    if (h != 0.0) {
      for (int k = 0; k <= i; ++k) d[k] = V[k][i + 1] / h;
      for (int j = 0; j <= i; ++j) {
        double g = 0.0;
        for (int k = 0; k <= i; ++k) g += V[k][i + 1] * V[k][j];
        for (int k = 0; k <= i; ++k) V[k][j] -= g * d[k];
      }
    }
    for (int k = 0; k <= i; ++k) V[k][i + 1] = 0.0;
  }
  for (int j = 0; j < n; ++j) {
    d[j] = V[n - 1][j];
    V[n - 1][j] = 0.0;
  }
  V[n - 1][n - 1] = 1.0;
  e[0] = 0.0;
}

void implicit_ql(std::vector<std::vector<double>>& V, Vector& d, Vector& e) {
  const int n = static_cast<int>(d.size());
  for (int i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;

  double f = 0.0;
  double tst1 = 0.0;
  constexpr int kMaxIter = 60;
  for (int l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    int m = l;
    while (m < n) {
      if (std::abs(e[m]) <= kEps * tst1) break;
      ++m;
    }
    if (m > l) {
      int iter = 0;
      do {
        if (++iter > kMaxIter) fail(ErrorKind::Numerical, "sym_eig: QL iteration did not converge");
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (int i = l + 2; i < n; ++i) d[i] -= h;
        f += h;

        p = d[m];
        double c = 1.0, c2 = 1.0, c3 = 1.0;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (int i = m - 1; i >= l; --i) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[i];
          h = c * p;
          r = std::hypot(p, e[i]);
          e[i + 1] = s * r;
          s = e[i] / r;
          c = p / r;
          p = c * d[i] - s * g;
          d[i + 1] = h + s * (c * g + s * d[i]);
          for (int k = 0; k < n; ++k) {
            h = V[k][i + 1];
            V[k][i + 1] = s * V[k][i] + c * h;
            V[k][i] = c * V[k][i] - s * h;
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > kEps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }
}

}  // namespace

SymEig sym_eig(const Matrix& s) {
  require(s.rows() == s.cols() && s.rows() >= 1, "sym_eig: matrix must be square and non-empty");
  require(s.all_finite(), "sym_eig: non-finite input");
  if (!is_symmetric(s, 1e-10)) fail(ErrorKind::Contract, "sym_eig: input is not symmetric");

  const std::size_t n = s.rows();
  std::vector<std::vector<double>> V(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) V[i][j] = 0.5 * (s(i, j) + s(j, i));
  Vector d(n), e(n);
  if (n == 1) {
    return {Vector{s(0, 0)}, Matrix::identity(1)};
  }
  tridiagonalize(V, d, e);
  implicit_ql(V, d, e);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] > d[b]; });
  SymEig out{Vector(n), Matrix(n, n)};
  for (std::size_t c = 0; c < n; ++c) {
    out.values[c] = d[order[c]];
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, c) = V[r][order[c]];
  }
  return out;
}

Matrix cholesky(const Matrix& s, double jitter) {
  require(s.rows() == s.cols() && s.rows() >= 1, "cholesky: matrix must be square and non-empty");
  require(jitter >= 0.0, "cholesky: jitter must be >= 0");
  if (!is_symmetric(s, 1e-10)) fail(ErrorKind::Contract, "cholesky: input is not symmetric");
  const std::size_t n = s.rows();
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double diag = s(j, j) + jitter;
    for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    if (!(diag > 0.0) || !std::isfinite(diag))
      throw DefinitenessError(j, "cholesky: matrix is not positive definite (pivot " + std::to_string(j) + ")");
    const double ljj = std::sqrt(diag);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = s(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / ljj;
    }
  }
  return l;
}

Vector cholesky_solve(const Matrix& lower, std::span<const double> b) {
  const std::size_t n = lower.rows();
  require(b.size() == n, "cholesky_solve: dimension mismatch");
  Vector y(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    double v = y[i];
    for (std::size_t k = 0; k < i; ++k) v -= lower(i, k) * y[k];
    y[i] = v / lower(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    double v = y[i];
    for (std::size_t k = i + 1; k < n; ++k) v -= lower(k, i) * y[k];
    y[i] = v / lower(i, i);
  }
  return y;
}

}  // namespace cica

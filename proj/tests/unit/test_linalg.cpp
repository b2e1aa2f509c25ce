#include "doctest.h"

#include "cica/error.hpp"
#include "cica/linalg.hpp"
#include "oracles.hpp"

using namespace cica;

namespace {

void check_penrose(const Matrix& m, double tol) {
  const Matrix mp = pinv(m);
  const double scale = std::max(1.0, m.max_abs());
  const Matrix mmp = oracle::naive_mul(m, mp);
  const Matrix mpm = oracle::naive_mul(mp, m);
  CHECK(oracle::max_abs_diff(oracle::naive_mul(mmp, m), m) < tol * scale);
  CHECK(oracle::max_abs_diff(oracle::naive_mul(mpm, mp), mp) < tol * std::max(1.0, mp.max_abs()));
  CHECK(oracle::max_abs_diff(mmp, oracle::naive_transpose(mmp)) < tol);
  CHECK(oracle::max_abs_diff(mpm, oracle::naive_transpose(mpm)) < tol);
}

Matrix random_symmetric(std::size_t n, std::uint64_t seed) {
  const Matrix a = oracle::random_matrix(n, n, seed);
  return 0.5 * (a + a.transpose());
}

}  // namespace

TEST_SUITE("linalg") {
  TEST_CASE("matrix construction rejects non-finite entries and bad counts") {
    CHECK_THROWS_AS(Matrix(2, 2, std::vector<double>{1, 2, 3}), Error);
    CHECK_THROWS_AS(Matrix(1, 2, std::vector<double>{1, std::nan("")}), Error);
    CHECK_THROWS_AS(Matrix(1, 1, std::numeric_limits<double>::infinity()), Error);
    const Matrix m(2, 3, std::vector<double>{1, 2, 3, 4, 5, 6});
    CHECK(m.rows() == 2);
    CHECK(m.cols() == 3);
    CHECK(m(1, 0) == 4);
  }

  TEST_CASE("products agree with naive loops") {
    const Matrix a = oracle::random_matrix(7, 5, 1);
    const Matrix b = oracle::random_matrix(5, 4, 2);
    const Matrix c = oracle::random_matrix(4, 5, 3);
    CHECK(oracle::max_abs_diff(a * b, oracle::naive_mul(a, b)) < 1e-12);
    CHECK(oracle::max_abs_diff(matmul_nt(a, c), oracle::naive_mul(a, oracle::naive_transpose(c))) < 1e-12);
    CHECK(oracle::max_abs_diff(matmul_tn(a, a), oracle::naive_mul(oracle::naive_transpose(a), a)) < 1e-12);
    CHECK_THROWS_AS(a * a, Error);
  }

  TEST_CASE("pinv of the identity is the identity") {
    CHECK(oracle::max_abs_diff(pinv(Matrix::identity(3)), Matrix::identity(3)) < 1e-15);
  }

  TEST_CASE("pinv of orthonormal rows is the transpose") {
    const Svd s = svd(oracle::random_matrix(6, 3, 11));
    const Matrix w = s.u.transpose();  // 3 x 6, orthonormal rows
    CHECK(oracle::max_abs_diff(pinv(w), w.transpose()) < 1e-12);
  }

  TEST_CASE("pinv satisfies the Penrose conditions") {
    check_penrose(oracle::random_matrix(3, 2, 7), 1e-10);
    for (std::uint64_t seed = 100; seed < 110; ++seed) {
      check_penrose(oracle::random_matrix(4 + seed % 3, 6 - seed % 4, seed), 1e-8);
    }
    // Rank-deficient: third column is the sum of the first two.
    Matrix m = oracle::random_matrix(5, 3, 42);
    for (std::size_t i = 0; i < 5; ++i) m(i, 2) = m(i, 0) + m(i, 1);
    check_penrose(m, 1e-8);
  }

  TEST_CASE("pinv treats singular values below the tolerance as zero") {
    const std::vector<double> d{4.0, 1e-3};
    const Matrix p = pinv(Matrix::diagonal(d), 1e-2);
    CHECK(p(0, 0) == doctest::Approx(0.25));
    CHECK(p(1, 1) == 0.0);
    CHECK_THROWS_AS(pinv(Matrix::identity(2), -1.0), Error);
  }

  TEST_CASE("svd reconstructs with descending singular values") {
    const Matrix a = oracle::random_matrix(8, 5, 5);
    const Svd s = svd(a);
    for (std::size_t i = 1; i < s.s.size(); ++i) CHECK(s.s[i - 1] >= s.s[i]);
    Matrix us = s.u;
    for (std::size_t i = 0; i < us.rows(); ++i)
      for (std::size_t j = 0; j < us.cols(); ++j) us(i, j) *= s.s[j];
    CHECK(oracle::max_abs_diff(oracle::naive_mul(us, oracle::naive_transpose(s.v)), a) < 1e-12);
  }

  TEST_CASE("sym_eig of the identity and of a diagonal") {
    const SymEig e = sym_eig(Matrix::identity(2));
    CHECK(e.values[0] == doctest::Approx(1.0));
    CHECK(e.values[1] == doctest::Approx(1.0));
    CHECK(oracle::max_abs_diff(matmul_tn(e.vectors, e.vectors), Matrix::identity(2)) < 1e-12);

    const std::vector<double> d{1.0, 3.0};
    const SymEig f = sym_eig(Matrix::diagonal(d));
    CHECK(f.values[0] == doctest::Approx(3.0));
    CHECK(f.values[1] == doctest::Approx(1.0));
    CHECK(std::abs(f.vectors(1, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(f.vectors(0, 1)) == doctest::Approx(1.0));
  }

  TEST_CASE("sym_eig reconstructs random symmetric matrices") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const std::size_t n = 2 + seed % 6;
      const Matrix s = random_symmetric(n, seed);
      const SymEig e = sym_eig(s);
      for (std::size_t i = 1; i < n; ++i) CHECK(e.values[i - 1] >= e.values[i]);
      Matrix vl = e.vectors;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) vl(i, j) *= e.values[j];
      const Matrix rec = oracle::naive_mul(vl, oracle::naive_transpose(e.vectors));
      CHECK((rec - s).frobenius() / s.frobenius() < 1e-8);
      CHECK(oracle::max_abs_diff(matmul_tn(e.vectors, e.vectors), Matrix::identity(n)) < 1e-8);
    }
  }

  TEST_CASE("sym_eig rejects asymmetric input") {
    Matrix a = Matrix::identity(3);
    a(0, 2) = 0.5;
    try {
      sym_eig(a);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Contract);
    }
  }

  TEST_CASE("cholesky of identity and diagonal") {
    CHECK(cholesky(Matrix::identity(4), 0.0) == Matrix::identity(4));
    const std::vector<double> d{4.0, 9.0};
    const Matrix l = cholesky(Matrix::diagonal(d), 0.0);
    CHECK(l(0, 0) == doctest::Approx(2.0));
    CHECK(l(1, 1) == doctest::Approx(3.0));
    CHECK(l(0, 1) == 0.0);
    CHECK(l(1, 0) == 0.0);
  }

  TEST_CASE("cholesky reconstructs SPD matrices and is exactly lower triangular") {
    for (std::uint64_t seed = 20; seed < 30; ++seed) {
      const std::size_t n = 2 + seed % 7;
      const Matrix a = oracle::random_matrix(n, n, seed);
      const Matrix s = matmul_tn(a, a) + Matrix::identity(n);
      const Matrix l = cholesky(s, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) CHECK(l(i, j) == 0.0);
      const Matrix rec = oracle::naive_mul(l, oracle::naive_transpose(l));
      CHECK((rec - s).frobenius() / s.frobenius() < 1e-8);
    }
  }

  TEST_CASE("cholesky adds jitter to the diagonal") {
    const Matrix l = cholesky(Matrix(2, 2, 0.0), 0.25);
    CHECK(l(0, 0) == doctest::Approx(0.5));
    CHECK(l(1, 1) == doctest::Approx(0.5));
  }

  TEST_CASE("cholesky reports the failing pivot") {
    Matrix s = Matrix::identity(3);
    s(2, 2) = -1.0;
    try {
      cholesky(s, 0.0);
      FAIL("expected an error");
    } catch (const DefinitenessError& e) {
      CHECK(e.kind() == ErrorKind::Definiteness);
      CHECK(e.pivot() == 2);
    }
  }

  TEST_CASE("cholesky_solve inverts L L^T") {
    const Matrix a = oracle::random_matrix(4, 4, 9);
    const Matrix s = matmul_tn(a, a) + Matrix::identity(4);
    const std::vector<double> b{1.0, -2.0, 0.5, 3.0};
    const Vector x = cholesky_solve(cholesky(s), b);
    const Vector back = matvec(s, x);
    for (std::size_t i = 0; i < 4; ++i) CHECK(back[i] == doctest::Approx(b[i]).epsilon(1e-12));
  }
}

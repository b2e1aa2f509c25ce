#include "cica/ica.hpp"

#include <cmath>
#include <string>

#include "cica/error.hpp"
#include "cica/random.hpp"

namespace cica {

Whitening whiten(const Matrix& x, std::size_t k) {
  const std::size_t p = x.rows();
  const std::size_t n = x.cols();
  require(k >= 1, "whiten: k must be >= 1");
  if (k > p) fail(ErrorKind::Contract, "whiten: k = " + std::to_string(k) + " exceeds feature count " + std::to_string(p));
  if (n <= k) fail(ErrorKind::Contract, "whiten: need more samples than components (n = " + std::to_string(n) +
                                            ", k = " + std::to_string(k) + ")");

  Whitening out;
  out.mean = row_means(x);
  Matrix xc = x;
  center_rows(xc, out.mean);
  Matrix cov = matmul_nt(xc, xc);
  cov *= 1.0 / static_cast<double>(n);

  const SymEig eig = sym_eig(cov);
  const double top = eig.values.front();
  std::size_t positive = 0;
  if (top > 0.0)
    while (positive < p && eig.values[positive] > 1e-12 * top) ++positive;
  if (positive < k)
    throw RankError(positive, "whiten: covariance has only " + std::to_string(positive) +
                                  " positive eigenvalues; at most k = " + std::to_string(positive) + " is achievable");

  out.whitening = Matrix(k, p);
  for (std::size_t i = 0; i < k; ++i) {
    const double scale = 1.0 / std::sqrt(eig.values[i]);
    for (std::size_t j = 0; j < p; ++j) out.whitening(i, j) = eig.vectors(j, i) * scale;
  }
  out.whitened = out.whitening * xc;
  return out;
}

Matrix symmetric_decorrelation(const Matrix& w) {
  const SymEig eig = sym_eig(matmul_nt(w, w));
  Matrix scaled = eig.vectors;
  for (std::size_t c = 0; c < scaled.cols(); ++c) {
    const double d = eig.values[c];
    if (!(d > 0.0)) fail(ErrorKind::Numerical, "fastica: rotation estimate became singular");
    const double inv = 1.0 / std::sqrt(d);
    for (std::size_t r = 0; r < scaled.rows(); ++r) scaled(r, c) *= inv;
  }
  return matmul_nt(scaled, eig.vectors) * w;
}

UnmixingModel fastica_fit(const Matrix& x, std::size_t k, std::uint64_t seed, const FastIcaOptions& options) {
  require(k >= 2, "fastica_fit: k must be >= 2");
  require(options.tol > 0.0, "fastica_fit: tol must be positive");
  require(options.max_iter >= 1, "fastica_fit: max_iter must be >= 1");

  Whitening wh = whiten(x, k);
  const Matrix& xw = wh.whitened;
  const double inv_n = 1.0 / static_cast<double>(xw.cols());

  CounterRng rng(seed);
  Matrix w(k, k);
  for (double& v : w.values()) v = rng.normal();
  w = symmetric_decorrelation(w);

  UnmixingModel model;
  for (std::size_t it = 1; it <= options.max_iter; ++it) {
    Matrix g = w * xw;
    Vector gprime_mean(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      double acc = 0.0;
      for (double& v : g.row(i)) {
        v = std::tanh(v);
        acc += 1.0 - v * v;
      }
      gprime_mean[i] = acc * inv_n;
    }
    Matrix w_new = matmul_nt(g, xw);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) w_new(i, j) = w_new(i, j) * inv_n - gprime_mean[i] * w(i, j);
    if (!w_new.all_finite())
      fail(ErrorKind::Numerical, "fastica_fit: non-finite update at iteration " + std::to_string(it));
    w_new = symmetric_decorrelation(w_new);

    double lim = 0.0;
    for (std::size_t i = 0; i < k; ++i) lim = std::max(lim, std::abs(1.0 - std::abs(dot(w_new.row(i), w.row(i)))));
    w = std::move(w_new);
    model.iterations = it;
    if (lim < options.tol) {
      model.converged = true;
      break;
    }
  }

  model.rotation = w;
  model.unmixing = w * wh.whitening;
  model.unmixing_pinv = pinv(model.unmixing);
  model.mean = std::move(wh.mean);
  return model;
}

Matrix UnmixingModel::transform(const Matrix& x) const {
  if (x.rows() != features())
    fail(ErrorKind::Contract, "transform: expected " + std::to_string(features()) + " feature rows, got " +
                                  std::to_string(x.rows()));
  Matrix xc = x;
  center_rows(xc, mean);
  return unmixing * xc;
}

Matrix UnmixingModel::mix(const Matrix& s) const {
  if (s.rows() != components())
    fail(ErrorKind::Contract, "mix: expected " + std::to_string(components()) + " source rows, got " +
                                  std::to_string(s.rows()));
  Matrix x = unmixing_pinv * s;
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (double& v : x.row(r)) v += mean[r];
  return x;
}

}  // namespace cica

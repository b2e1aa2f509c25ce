#pragma once

#include <cstddef>
#include <cstdint>

#include "cica/linalg.hpp"

namespace cica {

struct Whitening {
  Matrix whitening;  // k x p
  Vector mean;       // p
  Matrix whitened;   // k x n, zero row means, identity sample covariance
};

/// PCA whitening of x (p x n) onto its top-k principal directions. The sample
/// covariance uses the 1/n normalization. Throws RankError when fewer than k
/// eigenvalues exceed 1e-12 times the largest one.
Whitening whiten(const Matrix& x, std::size_t k);

struct FastIcaOptions {
  double tol = 1e-4;
  std::size_t max_iter = 200;
};

/// Linear encoder s = W (x - mean) with cached pseudo-inverse for remixing.
struct UnmixingModel {
  Matrix unmixing;       // W, k x p: rotation * whitening
  Matrix unmixing_pinv;  // W^+, p x k
  Matrix rotation;       // k x k orthonormal part found by FastICA
  Vector mean;           // p
  bool converged = false;
  std::size_t iterations = 0;

  std::size_t components() const noexcept { return unmixing.rows(); }
  std::size_t features() const noexcept { return unmixing.cols(); }

  /// Sources for the columns of x (p x m) -> k x m.
  Matrix transform(const Matrix& x) const;
  /// Feature-space image W^+ s + mean of sources s (k x m) -> p x m.
  Matrix mix(const Matrix& s) const;
};

/// Symmetric FastICA with the logcosh contrast (g = tanh). The initial
/// rotation is a seeded Gaussian matrix, orthonormalized. Non-convergence is
/// reported through `converged`, not thrown.
UnmixingModel fastica_fit(const Matrix& x, std::size_t k, std::uint64_t seed, const FastIcaOptions& options = {});

/// (w w^T)^{-1/2} w: the closest matrix with orthonormal rows.
Matrix symmetric_decorrelation(const Matrix& w);

}  // namespace cica

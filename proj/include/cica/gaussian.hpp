#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cica/dataset.hpp"
#include "cica/linalg.hpp"

namespace cica {

struct ShrinkageResult {
  Matrix sigma_empirical;  // (1/n) Zc Zc^T
  Matrix sigma_shrunk;     // (1 - alpha) Sigma + alpha (tr(Sigma) / k) I
  double alpha = 0.0;
};

/// Ledoit-Wolf shrinkage toward the scaled identity (mean-eigenvalue target).
/// z is k x n with samples in columns; rows are centered internally.
/// A zero empirical covariance yields alpha = 1 and a zero estimate.
ShrinkageResult ledoit_wolf(const Matrix& z);

/// Per-class column means of z, ordered like `class_ids`.
std::vector<Vector> fit_class_means(const Matrix& z, std::span<const ClassId> labels,
                                    std::span<const ClassId> class_ids);

/// Columns mean + chol * g with g ~ N(0, I) drawn from CounterRng(seed).
Matrix sample_gaussian(std::span<const double> mean, const Matrix& chol, std::size_t n, std::uint64_t seed);

/// Cholesky factor used for sampling. An all-zero covariance factors to zero;
/// otherwise a failed factorization is retried once with jitter
/// 1e-10 * tr(cov) / k on the diagonal.
Matrix sampling_factor(const Matrix& cov);

/// Shared-covariance Gaussian with one mean per class.
struct LatentGaussian {
  std::vector<ClassId> class_ids;
  std::vector<Vector> class_means;
  Matrix covariance;
  Matrix chol;

  static LatentGaussian make(std::vector<ClassId> class_ids, std::vector<Vector> class_means, Matrix covariance);

  std::size_t dims() const noexcept { return covariance.rows(); }
  const Vector& mean_of(ClassId id) const;
  Matrix sample(ClassId id, std::size_t n, std::uint64_t seed) const;
};

}  // namespace cica

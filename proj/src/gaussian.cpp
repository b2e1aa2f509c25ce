#include "cica/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cica/error.hpp"
#include "cica/random.hpp"

namespace cica {

ShrinkageResult ledoit_wolf(const Matrix& z) {
  const std::size_t k = z.rows();
  const std::size_t n = z.cols();
  if (n < 2) fail(ErrorKind::Contract, "ledoit_wolf: need at least 2 samples, got " + std::to_string(n));
  require(k >= 1, "ledoit_wolf: empty dimension");

  Matrix zc = z;
  center_rows(zc, row_means(z));
  const double inv_n = 1.0 / static_cast<double>(n);

  ShrinkageResult out;
  out.sigma_empirical = matmul_nt(zc, zc) * inv_n;
  const Matrix& sigma = out.sigma_empirical;

  const double tr = sigma.trace();
  const double mu = tr / static_cast<double>(k);
  const double fro2 = dot(sigma.values(), sigma.values());
  const double delta = (fro2 - 2.0 * mu * tr + static_cast<double>(k) * mu * mu) / static_cast<double>(k);

  // sum over samples of ||z_t||^4
  Vector col_sq(n, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    const auto r = zc.row(i);
    for (std::size_t t = 0; t < n; ++t) col_sq[t] += r[t] * r[t];
  }
  const double sum_norm4 = dot(col_sq, col_sq);
  double beta = (sum_norm4 * inv_n - fro2) / (static_cast<double>(k) * static_cast<double>(n));
  beta = std::min(beta, delta);

  out.alpha = delta > 0.0 ? std::clamp(beta / delta, 0.0, 1.0) : 1.0;
  out.sigma_shrunk = sigma * (1.0 - out.alpha);
  for (std::size_t i = 0; i < k; ++i) out.sigma_shrunk(i, i) += out.alpha * mu;
  // Exact symmetry; the product above is symmetric up to summation order only.
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) out.sigma_shrunk(j, i) = out.sigma_shrunk(i, j);
  return out;
}

std::vector<Vector> fit_class_means(const Matrix& z, std::span<const ClassId> labels,
                                    std::span<const ClassId> class_ids) {
  require(labels.size() == z.cols(), "fit_class_means: one label per column required");
  const std::size_t k = z.rows();
  std::vector<Vector> means(class_ids.size(), Vector(k, 0.0));
  std::vector<std::size_t> counts(class_ids.size(), 0);
  for (std::size_t j = 0; j < labels.size(); ++j) {
    const auto it = std::find(class_ids.begin(), class_ids.end(), labels[j]);
    if (it == class_ids.end())
      fail(ErrorKind::MissingClass, "fit_class_means: label " + std::to_string(labels[j]) + " is not declared");
    const auto c = static_cast<std::size_t>(it - class_ids.begin());
    ++counts[c];
    for (std::size_t i = 0; i < k; ++i) means[c][i] += z(i, j);
  }
  for (std::size_t c = 0; c < class_ids.size(); ++c) {
    if (counts[c] == 0)
      fail(ErrorKind::MissingClass, "fit_class_means: class " + std::to_string(class_ids[c]) + " has no samples");
    for (double& v : means[c]) v /= static_cast<double>(counts[c]);
  }
  return means;
}

Matrix sample_gaussian(std::span<const double> mean, const Matrix& chol, std::size_t n, std::uint64_t seed) {
  const std::size_t k = mean.size();
  require(chol.rows() == k && chol.cols() == k, "sample_gaussian: factor must be k x k");
  CounterRng rng(seed);
  Matrix out(k, n);
  Vector g(k);
  for (std::size_t j = 0; j < n; ++j) {
    for (double& v : g) v = rng.normal();
    for (std::size_t i = 0; i < k; ++i) {
      double acc = mean[i];
      for (std::size_t l = 0; l <= i; ++l) acc += chol(i, l) * g[l];
      out(i, j) = acc;
    }
  }
  return out;
}

Matrix sampling_factor(const Matrix& cov) {
  const std::size_t k = cov.rows();
  if (cov.max_abs() == 0.0) return Matrix(k, k);
  try {
    return cholesky(cov, 0.0);
  } catch (const DefinitenessError&) {
  }
  const double jitter = 1e-10 * cov.trace() / static_cast<double>(k);
  if (!(jitter > 0.0))
    throw DefinitenessError(0, "sampling_factor: covariance has non-positive trace and cannot be regularized");
  return cholesky(cov, jitter);
}

LatentGaussian LatentGaussian::make(std::vector<ClassId> class_ids, std::vector<Vector> class_means,
                                    Matrix covariance) {
  require(class_ids.size() == class_means.size() && !class_ids.empty(),
          "LatentGaussian: one mean per declared class required");
  require(covariance.rows() == covariance.cols(), "LatentGaussian: covariance must be square");
  for (const Vector& m : class_means) {
    require(m.size() == covariance.rows(), "LatentGaussian: mean dimension mismatch");
    require(std::all_of(m.begin(), m.end(), [](double v) { return std::isfinite(v); }),
            "LatentGaussian: non-finite class mean");
  }
  LatentGaussian g;
  g.chol = sampling_factor(covariance);
  g.class_ids = std::move(class_ids);
  g.class_means = std::move(class_means);
  g.covariance = std::move(covariance);
  return g;
}

const Vector& LatentGaussian::mean_of(ClassId id) const {
  const auto it = std::find(class_ids.begin(), class_ids.end(), id);
  if (it == class_ids.end()) fail(ErrorKind::MissingClass, "unknown class " + std::to_string(id));
  return class_means[static_cast<std::size_t>(it - class_ids.begin())];
}

Matrix LatentGaussian::sample(ClassId id, std::size_t n, std::uint64_t seed) const {
  return sample_gaussian(mean_of(id), chol, n, seed);
}

}  // namespace cica

#include "cica/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cica/error.hpp"
#include "cica/quantile.hpp"
#include "cica/random.hpp"

namespace cica {

namespace {

constexpr double kBimodalCenter = 0.8;
constexpr double kBimodalSpread = 0.6;  // center^2 + spread^2 = 1

double bimodal_cdf(double x) {
  return 0.5 * normal_cdf((x - kBimodalCenter) / kBimodalSpread) +
         0.5 * normal_cdf((x + kBimodalCenter) / kBimodalSpread);
}

double bimodal_pdf(double x) {
  const double a = (x - kBimodalCenter) / kBimodalSpread;
  const double b = (x + kBimodalCenter) / kBimodalSpread;
  return 0.5 * (std::exp(-0.5 * a * a) + std::exp(-0.5 * b * b)) / (kBimodalSpread * std::sqrt(2.0 * std::numbers::pi));
}

// Root of bimodal_cdf(x) = Phi(z). The root lies in
// [spread * z - center, spread * z + center] because each mixture component
// bounds the CDF from one side.
double bimodal_from_latent(double z) {
  if (z > 0.0) return -bimodal_from_latent(-z);
  const double target = normal_cdf(z);
  double lo = kBimodalSpread * z - kBimodalCenter;
  double hi = kBimodalSpread * z + kBimodalCenter;
  double x = kBimodalSpread * z;
  for (int it = 0; it < 200; ++it) {
    const double f = bimodal_cdf(x) - target;
    if (f == 0.0) return x;
    (f > 0.0 ? hi : lo) = x;
    const double d = bimodal_pdf(x);
    double next = d > 0.0 ? x - f / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-15 * std::max(1.0, std::abs(x))) return next;
    x = next;
  }
  return x;
}

std::vector<SourceFamily> resolved_families(const SyntheticSpec& spec) {
  if (!spec.families.empty()) return spec.families;
  return {SourceFamily::Laplace, SourceFamily::Uniform, SourceFamily::Bimodal};
}

void validate(const SyntheticSpec& spec) {
  if (spec.p == 0 || spec.k_true == 0) fail(ErrorKind::Config, "synthetic: p and k_true must be positive");
  if (spec.k_true > spec.p) fail(ErrorKind::Config, "synthetic: k_true must not exceed p");
  if (!(spec.latent_correlation >= 0.0 && spec.latent_correlation < 1.0))
    fail(ErrorKind::Config, "synthetic: latent_correlation must lie in [0, 1)");
  if (!(spec.class_separation >= 0.0)) fail(ErrorKind::Config, "synthetic: class_separation must be >= 0");
  if (!(spec.noise >= 0.0)) fail(ErrorKind::Config, "synthetic: noise must be >= 0");
}

// Shared draw for rest and task data. `shifts` may be empty (no classes).
SyntheticSample draw(const SyntheticSpec& spec, const Matrix* shifts, const std::vector<ClassId>* labels) {
  validate(spec);
  const std::size_t k = spec.k_true;
  const std::vector<SourceFamily> families = resolved_families(spec);

  Matrix corr(k, k, spec.latent_correlation);
  for (std::size_t i = 0; i < k; ++i) corr(i, i) = 1.0;
  const Matrix chol = cholesky(corr, 0.0);

  SyntheticSample out;
  out.mixing = synthetic_mixing(spec);
  out.sources = Matrix(k, spec.n);
  CounterRng latent_rng(derive_seed(spec.seed, 0));
  Vector g(k);
  for (std::size_t j = 0; j < spec.n; ++j) {
    for (double& v : g) v = latent_rng.normal();
    for (std::size_t i = 0; i < k; ++i) {
      double u = 0.0;
      for (std::size_t l = 0; l <= i; ++l) u += chol(i, l) * g[l];
      if (shifts != nullptr) u += (*shifts)(i, static_cast<std::size_t>((*labels)[j]));
      out.sources(i, j) = source_from_latent(families[i % families.size()], u);
    }
  }
  out.x = out.mixing * out.sources;
  if (spec.noise > 0.0) {
    CounterRng noise_rng(derive_seed(spec.seed, 1));
    for (double& v : out.x.values()) v += spec.noise * noise_rng.normal();
  }
  return out;
}

}  // namespace

const char* to_string(SourceFamily family) noexcept {
  switch (family) {
    case SourceFamily::Laplace: return "laplace";
    case SourceFamily::Uniform: return "uniform";
    case SourceFamily::Bimodal: return "bimodal";
  }
  return "unknown";
}

SourceFamily parse_source_family(std::string_view name) {
  if (name == "laplace") return SourceFamily::Laplace;
  if (name == "uniform") return SourceFamily::Uniform;
  if (name == "bimodal") return SourceFamily::Bimodal;
  fail(ErrorKind::Config, "unknown source family '" + std::string(name) + "'");
}

double source_from_latent(SourceFamily family, double z) {
  switch (family) {
    case SourceFamily::Laplace: {
      const double tail = normal_cdf(-std::abs(z));
      const double magnitude = -std::log(2.0 * tail) / std::numbers::sqrt2;
      return z < 0.0 ? -magnitude : magnitude;
    }
    case SourceFamily::Uniform:
      return (normal_cdf(z) - 0.5) * std::sqrt(12.0);
    case SourceFamily::Bimodal:
      return bimodal_from_latent(z);
  }
  return 0.0;
}

Matrix synthetic_mixing(const SyntheticSpec& spec) {
  validate(spec);
  CounterRng rng(derive_seed(spec.world_seed, 0));
  Matrix g(spec.p, spec.k_true);
  for (double& v : g.values()) v = rng.normal();
  const Svd d = svd(g);
  return matmul_nt(d.u, d.v);
}

Matrix synthetic_class_shifts(const SyntheticSpec& spec) {
  validate(spec);
  CounterRng rng(derive_seed(spec.world_seed, 1));
  Matrix shifts(spec.k_true, spec.classes);
  for (std::size_t c = 0; c < spec.classes; ++c) {
    Vector dir(spec.k_true);
    for (double& v : dir) v = rng.normal();
    const double norm = std::sqrt(dot(dir, dir));
    for (std::size_t i = 0; i < spec.k_true; ++i) shifts(i, c) = spec.class_separation * dir[i] / norm;
  }
  return shifts;
}

SyntheticSample gen_synthetic_rest_full(const SyntheticSpec& spec) { return draw(spec, nullptr, nullptr); }

Matrix gen_synthetic_rest(const SyntheticSpec& spec) { return draw(spec, nullptr, nullptr).x; }

LabeledDataset gen_synthetic_task(const SyntheticSpec& spec) {
  if (spec.classes == 0) fail(ErrorKind::Config, "synthetic task: classes must be positive");
  std::vector<ClassId> labels(spec.n);
  for (std::size_t j = 0; j < spec.n; ++j) labels[j] = static_cast<ClassId>(j % spec.classes);
  const Matrix shifts = synthetic_class_shifts(spec);
  SyntheticSample s = draw(spec, &shifts, &labels);
  std::vector<ClassId> ids(spec.classes);
  for (std::size_t c = 0; c < spec.classes; ++c) ids[c] = static_cast<ClassId>(c);
  return LabeledDataset{std::move(s.x), std::move(labels), std::move(ids)};
}

double amari_index(const Matrix& p) {
  const std::size_t k = p.rows();
  require(k >= 2 && p.cols() == k, "amari_index: square matrix of size >= 2 required");
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double sum = 0.0, top = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      sum += std::abs(p(i, j));
      top = std::max(top, std::abs(p(i, j)));
    }
    if (!(top > 0.0)) fail(ErrorKind::Degenerate, "amari_index: zero row " + std::to_string(i));
    total += sum / top - 1.0;
  }
  for (std::size_t j = 0; j < k; ++j) {
    double sum = 0.0, top = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      sum += std::abs(p(i, j));
      top = std::max(top, std::abs(p(i, j)));
    }
    if (!(top > 0.0)) fail(ErrorKind::Degenerate, "amari_index: zero column " + std::to_string(j));
    total += sum / top - 1.0;
  }
  return total / (2.0 * static_cast<double>(k) * static_cast<double>(k - 1));
}

}  // namespace cica

#include "cica/augment.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "binary_io.hpp"
#include "cica/error.hpp"
#include "cica/random.hpp"

namespace cica {

namespace {

Matrix decode(const UnmixingModel& unmixing, const QuantileTransform& qt, const Matrix& latents) {
  return unmixing.mix(qt.inverse(latents));
}

void check_min_class_size(const LabeledDataset& ds, std::size_t min_size, const char* op) {
  const auto members = ds.class_members();
  for (std::size_t c = 0; c < members.size(); ++c)
    if (members[c].size() < min_size)
      fail(ErrorKind::InsufficientSamples, std::string(op) + ": class " + std::to_string(ds.class_ids[c]) + " has " +
                                               std::to_string(members[c].size()) + " samples, need at least " +
                                               std::to_string(min_size));
}

struct IcaResample {
  UnmixingModel unmixing;
  Matrix sources;
  LabeledDataset fakes;
};

// Shared by augment_ica and augment_ica_covariance so both consume identical
// random streams for the resampling step.
IcaResample ica_resample(const LabeledDataset& task, std::size_t k, std::size_t n_fakes_per_class,
                         std::uint64_t seed, const FastIcaOptions& options) {
  check_min_class_size(task, 2, "augment_ica");
  if (k > task.size())
    fail(ErrorKind::Contract, "augment_ica: k = " + std::to_string(k) + " exceeds the " +
                                  std::to_string(task.size()) + " task samples");

  IcaResample out;
  out.unmixing = fastica_fit(task.x, k, derive_seed(seed, 1), options);
  out.sources = out.unmixing.transform(task.x);

  const auto members = task.class_members();
  const std::size_t total = n_fakes_per_class * task.class_ids.size();
  Matrix fake_sources(k, total);
  std::vector<ClassId> labels;
  labels.reserve(total);
  CounterRng rng(derive_seed(seed, 2));
  std::size_t col = 0;
  for (std::size_t c = 0; c < members.size(); ++c) {
    const auto& idx = members[c];
    for (std::size_t f = 0; f < n_fakes_per_class; ++f, ++col) {
      for (std::size_t i = 0; i < k; ++i) fake_sources(i, col) = out.sources(i, idx[rng.below(idx.size())]);
      labels.push_back(task.class_ids[c]);
    }
  }
  Matrix x = total > 0 ? out.unmixing.mix(fake_sources) : Matrix(task.features(), 0);
  out.fakes = LabeledDataset{std::move(x), std::move(labels), task.class_ids};
  return out;
}

}  // namespace

UnconditionalModel fit_unconditional(const Matrix& x_rest, std::size_t k, std::uint64_t seed,
                                     const FitOptions& options) {
  if (x_rest.cols() < 2 * k)
    fail(ErrorKind::Contract, "fit_unconditional: need n >= 2k samples (n = " + std::to_string(x_rest.cols()) +
                                  ", k = " + std::to_string(k) + ")");
  UnconditionalModel model;
  model.unmixing = fastica_fit(x_rest, k, seed, options.ica);
  const Matrix sources = model.unmixing.transform(x_rest);
  model.qt = QuantileTransform::fit(sources, options.n_quantiles);
  const ShrinkageResult lw = ledoit_wolf(model.qt.forward(sources));
  model.latent = LatentGaussian::make({0}, {Vector(k, 0.0)}, lw.sigma_shrunk);
  return model;
}

Matrix generate_unconditional(const UnconditionalModel& model, std::size_t n_fakes, std::uint64_t seed) {
  require(n_fakes >= 1, "generate_unconditional: n_fakes must be >= 1");
  return decode(model.unmixing, model.qt, model.latent.sample(0, n_fakes, seed));
}

ConditionalIcaModel fit_conditional(const UnmixingModel& unmixing, const Matrix& x_task,
                                    std::span<const ClassId> labels, std::size_t n_quantiles) {
  const LabeledDataset task = LabeledDataset::make(x_task, {labels.begin(), labels.end()});
  if (task.size() < 2) fail(ErrorKind::InsufficientSamples, "fit_conditional: need at least 2 task samples");
  check_min_class_size(task, 2, "fit_conditional");

  ConditionalIcaModel model;
  model.unmixing = unmixing;
  const Matrix sources = unmixing.transform(task.x);
  model.qt = QuantileTransform::fit(sources, n_quantiles);
  Matrix z = model.qt.forward(sources);
  std::vector<Vector> means = fit_class_means(z, task.labels, task.class_ids);

  for (std::size_t j = 0; j < z.cols(); ++j) {
    const Vector& mu = means[task.class_index(task.labels[j])];
    for (std::size_t i = 0; i < z.rows(); ++i) z(i, j) -= mu[i];
  }
  const ShrinkageResult lw = ledoit_wolf(z);
  model.latent = LatentGaussian::make(task.class_ids, std::move(means), lw.sigma_shrunk);
  return model;
}

Matrix generate_conditional(const ConditionalIcaModel& model, ClassId cls, std::size_t n_fakes, std::uint64_t seed) {
  if (n_fakes == 0) {
    model.latent.mean_of(cls);
    return Matrix(model.unmixing.features(), 0);
  }
  return decode(model.unmixing, model.qt, model.latent.sample(cls, n_fakes, seed));
}

LabeledDataset generate_conditional_dataset(const ConditionalIcaModel& model, std::size_t n_fakes_per_class,
                                            std::uint64_t seed) {
  LabeledDataset out{Matrix(model.unmixing.features(), 0), {}, model.class_ids()};
  for (std::size_t c = 0; c < model.class_ids().size(); ++c) {
    const ClassId id = model.class_ids()[c];
    Matrix x = generate_conditional(model, id, n_fakes_per_class, derive_seed(seed, c));
    out.x = hstack(out.x, x);
    out.labels.insert(out.labels.end(), n_fakes_per_class, id);
  }
  return out;
}

LabeledDataset augment_ica(const LabeledDataset& task, std::size_t k, std::size_t n_fakes_per_class,
                           std::uint64_t seed, const FastIcaOptions& options) {
  return ica_resample(task, k, n_fakes_per_class, seed, options).fakes;
}

LabeledDataset augment_covariance(const LabeledDataset& task, std::size_t n_fakes_per_class, std::uint64_t seed) {
  if (task.size() < 2) fail(ErrorKind::InsufficientSamples, "augment_covariance: need at least 2 task samples");
  const std::vector<Vector> means = fit_class_means(task.x, task.labels, task.class_ids);
  Matrix centered = task.x;
  for (std::size_t j = 0; j < centered.cols(); ++j) {
    const Vector& mu = means[task.class_index(task.labels[j])];
    for (std::size_t i = 0; i < centered.rows(); ++i) centered(i, j) -= mu[i];
  }
  const Matrix chol = sampling_factor(ledoit_wolf(centered).sigma_shrunk);

  LabeledDataset out{Matrix(task.features(), 0), {}, task.class_ids};
  for (std::size_t c = 0; c < task.class_ids.size(); ++c) {
    out.x = hstack(out.x, sample_gaussian(means[c], chol, n_fakes_per_class, derive_seed(seed, 10, c)));
    out.labels.insert(out.labels.end(), n_fakes_per_class, task.class_ids[c]);
  }
  return out;
}

LabeledDataset augment_ica_covariance(const LabeledDataset& task, std::size_t k, std::size_t n_fakes_per_class,
                                      std::uint64_t seed, const FastIcaOptions& options) {
  IcaResample base = ica_resample(task, k, n_fakes_per_class, seed, options);
  if (base.fakes.size() == 0) return std::move(base.fakes);

  const Matrix residual = task.x - base.unmixing.mix(base.sources);
  const Matrix chol = sampling_factor(ledoit_wolf(residual).sigma_shrunk);
  const Matrix noise = sample_gaussian(Vector(task.features(), 0.0), chol, base.fakes.size(), derive_seed(seed, 3));
  base.fakes.x += noise;
  return std::move(base.fakes);
}

// ---------------------------------------------------------------------------
// CICA1 container

namespace {

constexpr std::string_view kModelMagic = "CICA1";

void write_common(detail::BinaryWriter& w, std::uint8_t kind, const UnmixingModel& u, const QuantileTransform& qt,
                  const LatentGaussian& latent) {
  w.bytes(kModelMagic.data(), kModelMagic.size());
  w.u8(kind);
  w.u64(u.features());
  w.u64(u.components());
  w.u64(qt.n_quantiles());
  w.u8(u.converged ? 1 : 0);
  w.u64(u.iterations);
  w.f64(qt.clip_epsilon());
  w.f64s(u.unmixing.values());
  w.f64s(u.unmixing_pinv.values());
  w.f64s(u.rotation.values());
  w.f64s(u.mean);
  w.f64s(qt.landmarks().values());
  w.f64s(latent.covariance.values());
  w.f64s(latent.chol.values());
  w.u64(latent.class_ids.size());
  for (std::size_t c = 0; c < latent.class_ids.size(); ++c) {
    w.i64(latent.class_ids[c]);
    w.f64s(latent.class_means[c]);
  }
}

template <class Model>
void save_impl(const std::filesystem::path& path, std::uint8_t kind, const Model& m) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) fail(ErrorKind::Parse, "save_model: cannot open " + path.string() + " for writing");
  detail::BinaryWriter w(os);
  write_common(w, kind, m.unmixing, m.qt, m.latent);
  if (!os) fail(ErrorKind::Parse, "save_model: write failed for " + path.string());
}

Matrix read_matrix(detail::BinaryReader& r, std::size_t rows, std::size_t cols) {
  std::vector<double> v = r.f64s(rows * cols);
  for (double x : v)
    if (!std::isfinite(x)) r.error("non-finite value in model payload");
  return Matrix(rows, cols, std::move(v));
}

}  // namespace

void save_model(const std::filesystem::path& path, const UnconditionalModel& model) { save_impl(path, 0, model); }
void save_model(const std::filesystem::path& path, const ConditionalIcaModel& model) { save_impl(path, 1, model); }

AnyModel load_model(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorKind::Parse, "load_model: cannot open " + path.string());
  const auto file_size = std::filesystem::file_size(path);
  detail::BinaryReader r(is, "load_model(" + path.string() + ")");
  r.expect_magic(kModelMagic);
  const std::uint8_t kind = r.u8();
  if (kind > 1) r.error("unknown model kind " + std::to_string(kind));
  const std::uint64_t p = r.u64();
  const std::uint64_t k = r.u64();
  const std::uint64_t nq = r.u64();
  if (p == 0 || k == 0 || k > p || nq < 2 || p > (1u << 20) || nq > (1u << 20))
    r.error("implausible dimensions p=" + std::to_string(p) + " k=" + std::to_string(k) + " nq=" + std::to_string(nq));
  const std::uint64_t payload = 8 * (2 * k * p + 3 * k * k + p + k * nq);
  if (file_size < payload) r.error("file too short for declared dimensions");

  UnmixingModel u;
  u.converged = r.u8() != 0;
  u.iterations = r.u64();
  const double clip = r.f64();
  u.unmixing = read_matrix(r, k, p);
  u.unmixing_pinv = read_matrix(r, p, k);
  u.rotation = read_matrix(r, k, k);
  const Matrix mean = read_matrix(r, p, 1);
  u.mean.assign(mean.values().begin(), mean.values().end());
  QuantileTransform qt(read_matrix(r, k, nq), clip);

  LatentGaussian latent;
  latent.covariance = read_matrix(r, k, k);
  latent.chol = read_matrix(r, k, k);
  const std::uint64_t n_classes = r.u64();
  if (n_classes == 0 || n_classes > (1u << 20)) r.error("implausible class count");
  for (std::uint64_t c = 0; c < n_classes; ++c) {
    latent.class_ids.push_back(r.i64());
    const Matrix mu = read_matrix(r, k, 1);
    latent.class_means.emplace_back(mu.values().begin(), mu.values().end());
  }
  if (is.peek() != std::char_traits<char>::eof()) r.error("trailing bytes after model payload");

  if (kind == 0) return UnconditionalModel{std::move(u), std::move(qt), std::move(latent)};
  return ConditionalIcaModel{std::move(u), std::move(qt), std::move(latent)};
}

}  // namespace cica

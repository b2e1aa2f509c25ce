#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <variant>
#include <vector>

#include "cica/dataset.hpp"
#include "cica/gaussian.hpp"
#include "cica/ica.hpp"
#include "cica/quantile.hpp"

namespace cica {

struct FitOptions {
  FastIcaOptions ica;
  std::size_t n_quantiles = 0;  // 0: min(n, 1000)
};

/// Rest-data generator: x = W^+ q^{-1}(eps) + mean, eps ~ N(0, Lambda).
/// The latent Gaussian carries a single class (id 0) whose mean is 0_k.
struct UnconditionalModel {
  UnmixingModel unmixing;
  QuantileTransform qt;
  LatentGaussian latent;
};

/// Class-conditional generator: eps ~ N(mu_c, Lambda) with Lambda and q
/// shared across classes, unmixing borrowed from a rest-data fit.
struct ConditionalIcaModel {
  UnmixingModel unmixing;
  QuantileTransform qt;
  LatentGaussian latent;

  const std::vector<ClassId>& class_ids() const noexcept { return latent.class_ids; }
};

/// fastica_fit -> sources -> qt_fit -> Gaussianize -> Ledoit-Wolf.
/// Requires n >= 2k.
UnconditionalModel fit_unconditional(const Matrix& x_rest, std::size_t k, std::uint64_t seed,
                                     const FitOptions& options = {});

Matrix generate_unconditional(const UnconditionalModel& model, std::size_t n_fakes, std::uint64_t seed);

/// Sources of the task data under the rest unmixing; q is re-fit on them
/// (pooled over classes), mu_c are per-class latent means and Lambda is the
/// Ledoit-Wolf estimate on class-centered latents. Every class needs >= 2
/// samples.
ConditionalIcaModel fit_conditional(const UnmixingModel& unmixing, const Matrix& x_task,
                                    std::span<const ClassId> labels, std::size_t n_quantiles = 0);

Matrix generate_conditional(const ConditionalIcaModel& model, ClassId cls, std::size_t n_fakes, std::uint64_t seed);

/// n_fakes_per_class fakes for every class of the model, labeled accordingly.
LabeledDataset generate_conditional_dataset(const ConditionalIcaModel& model, std::size_t n_fakes_per_class,
                                            std::uint64_t seed);

// Baselines. Each returns only the synthetic samples.

/// ICA on the task data; every source coordinate of a fake is resampled
/// independently (with replacement) from that class's observed values, then
/// remixed through the task unmixing pseudo-inverse.
LabeledDataset augment_ica(const LabeledDataset& task, std::size_t k, std::size_t n_fakes_per_class,
                           std::uint64_t seed, const FastIcaOptions& options = {});

/// Per-class means with a shared Ledoit-Wolf covariance of the class-centered
/// task data, all in feature space.
LabeledDataset augment_covariance(const LabeledDataset& task, std::size_t n_fakes_per_class, std::uint64_t seed);

/// augment_ica samples plus Gaussian noise with the Ledoit-Wolf covariance of
/// the residual R = X - (W^+ S + mean).
LabeledDataset augment_ica_covariance(const LabeledDataset& task, std::size_t k, std::size_t n_fakes_per_class,
                                      std::uint64_t seed, const FastIcaOptions& options = {});

// Model files: "CICA1" container, little-endian, float64 payloads.

using AnyModel = std::variant<UnconditionalModel, ConditionalIcaModel>;

void save_model(const std::filesystem::path& path, const UnconditionalModel& model);
void save_model(const std::filesystem::path& path, const ConditionalIcaModel& model);
AnyModel load_model(const std::filesystem::path& path);

}  // namespace cica

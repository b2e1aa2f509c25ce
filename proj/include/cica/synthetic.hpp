#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "cica/dataset.hpp"
#include "cica/linalg.hpp"

namespace cica {

enum class SourceFamily { Laplace, Uniform, Bimodal };

const char* to_string(SourceFamily family) noexcept;
SourceFamily parse_source_family(std::string_view name);

/// Unit-variance source marginal evaluated at the quantile Phi(z) of a
/// standard normal latent z. Computed from z directly so tails stay accurate.
double source_from_latent(SourceFamily family, double z);

/// Ground-truth generator. The "world" (mixing matrix, class directions) is
/// drawn from `world_seed`; samples are drawn from `seed`.
struct SyntheticSpec {
  std::size_t p = 64;
  std::size_t k_true = 32;
  std::size_t n = 50000;
  std::vector<SourceFamily> families;  // cycled over sources; empty: laplace, uniform, bimodal
  double latent_correlation = 0.3;
  std::size_t classes = 10;
  double class_separation = 2.0;
  double noise = 0.01;
  std::uint64_t world_seed = 0;
  std::uint64_t seed = 0;
};

/// p x k_true mixing with orthonormal columns, so its pseudo-inverse is its
/// transpose.
Matrix synthetic_mixing(const SyntheticSpec& spec);

/// Latent class shifts (k_true x classes), columns of norm class_separation.
Matrix synthetic_class_shifts(const SyntheticSpec& spec);

struct SyntheticSample {
  Matrix x;        // p x n
  Matrix sources;  // k_true x n
  Matrix mixing;   // p x k_true
};

/// Unlabeled draw: u ~ N(0, Lambda_true), sources through the family
/// marginals, x = A s + noise.
SyntheticSample gen_synthetic_rest_full(const SyntheticSpec& spec);
Matrix gen_synthetic_rest(const SyntheticSpec& spec);

/// Labeled draw with labels j % classes and latent means shifted per class.
LabeledDataset gen_synthetic_task(const SyntheticSpec& spec);

/// Normalized Amari error of a square matrix: 0 exactly for scaled
/// permutations, 1 for the all-ones 2x2 matrix.
double amari_index(const Matrix& p);

}  // namespace cica

#pragma once

#include <cstddef>
#include <vector>

#include "cica/linalg.hpp"

namespace cica {

/// Standard normal CDF.
double normal_cdf(double x);

/// Standard normal quantile (Wichura AS241, ~1e-16 relative accuracy).
/// Throws ErrorKind::Domain unless 0 < p < 1.
double normal_ppf(double p);

/// Per-dimension monotone map from an empirical marginal to N(0, 1).
///
/// Each dimension keeps `n_quantiles` landmarks: empirical quantiles of the
/// training sample at the equispaced levels i / (n_quantiles - 1). Values are
/// mapped to a CDF level by piecewise-linear interpolation between landmarks,
/// clamped to [clip_epsilon, 1 - clip_epsilon], then sent through normal_ppf.
/// The inverse runs the same chain backwards and saturates at the extreme
/// landmarks.
class QuantileTransform {
 public:
  static constexpr double kDefaultClipEpsilon = 1e-7;
  static constexpr std::size_t kMaxQuantiles = 1000;

  QuantileTransform() = default;
  /// landmarks: dims x n_quantiles, each row nondecreasing.
  QuantileTransform(Matrix landmarks, double clip_epsilon = kDefaultClipEpsilon);

  /// Fits on s (dims x n). n_quantiles == 0 selects min(n, 1000).
  static QuantileTransform fit(const Matrix& s, std::size_t n_quantiles = 0);

  Matrix forward(const Matrix& s) const;
  Matrix inverse(const Matrix& z) const;

  double forward_value(std::size_t dim, double v) const;
  double inverse_value(std::size_t dim, double z) const;

  std::size_t dims() const noexcept { return landmarks_.rows(); }
  std::size_t n_quantiles() const noexcept { return landmarks_.cols(); }
  double clip_epsilon() const noexcept { return clip_epsilon_; }
  const Matrix& landmarks() const noexcept { return landmarks_; }
  double level(std::size_t i) const noexcept {
    return static_cast<double>(i) / static_cast<double>(n_quantiles() - 1);
  }

 private:
  Matrix landmarks_;
  double clip_epsilon_ = kDefaultClipEpsilon;
};

}  // namespace cica

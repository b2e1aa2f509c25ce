#include "cica/quantile.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "cica/error.hpp"
#include "cica/random.hpp"

namespace cica {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_ppf(double p) {
  if (!(p > 0.0 && p < 1.0))
    fail(ErrorKind::Domain, "normal_ppf: probability must lie strictly inside (0, 1), got " + std::to_string(p));

  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r + 6.7265770927008700853e+4) * r +
                4.5921953931549871457e+4) * r + 1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r + 3.9307895800092710610e+4) * r +
                2.1213794301586595867e+4) * r + 5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0);
  }

  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r + 2.41780725177450611770e-1) * r +
                 1.27045825245236838258e0) * r + 3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
              4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r + 1.51986665636164571966e-2) * r +
                 1.48103976427480074590e-1) * r + 6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
              2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 1.24266094738807843860e-3) * r +
                 2.65321895265761230930e-2) * r + 2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
              5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r + 1.84631831751005468180e-5) * r +
                 7.86869131145613259100e-4) * r + 1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0.0 ? -value : value;
}

double CounterRng::normal() { return normal_ppf(uniform()); }

std::size_t CounterRng::below(std::size_t n) noexcept {
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t x = next_u64();
    if (x >= threshold) return static_cast<std::size_t>(x % bound);
  }
}

// ---------------------------------------------------------------------------

QuantileTransform::QuantileTransform(Matrix landmarks, double clip_epsilon)
    : landmarks_(std::move(landmarks)), clip_epsilon_(clip_epsilon) {
  require(landmarks_.rows() >= 1, "QuantileTransform: at least one dimension required");
  require(landmarks_.cols() >= 2, "QuantileTransform: n_quantiles must be >= 2");
  require(clip_epsilon_ > 0.0 && clip_epsilon_ < 0.5, "QuantileTransform: clip_epsilon must lie in (0, 0.5)");
  for (std::size_t d = 0; d < landmarks_.rows(); ++d) {
    const auto row = landmarks_.row(d);
    if (!std::is_sorted(row.begin(), row.end()))
      fail(ErrorKind::Contract, "QuantileTransform: landmarks of dimension " + std::to_string(d) + " decrease");
  }
}

QuantileTransform QuantileTransform::fit(const Matrix& s, std::size_t n_quantiles) {
  const std::size_t n = s.cols();
  require(s.rows() >= 1 && n >= 2, "qt_fit: need at least one dimension and two samples");
  if (n_quantiles == 0) n_quantiles = std::min(n, kMaxQuantiles);
  require(n_quantiles >= 2, "qt_fit: n_quantiles must be >= 2");
  if (n < n_quantiles)
    fail(ErrorKind::Contract, "qt_fit: " + std::to_string(n) + " samples cannot support " +
                                  std::to_string(n_quantiles) + " quantiles");

  Matrix landmarks(s.rows(), n_quantiles);
  std::vector<double> sorted(n);
  const std::size_t den = n_quantiles - 1;
  for (std::size_t d = 0; d < s.rows(); ++d) {
    std::copy(s.row(d).begin(), s.row(d).end(), sorted.begin());
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() == sorted.back())
      fail(ErrorKind::Degenerate, "qt_fit: dimension " + std::to_string(d) + " is constant");
    for (std::size_t i = 0; i < n_quantiles; ++i) {
      // Position i * (n - 1) / (n_quantiles - 1) in exact integer arithmetic;
      // fractional positions take the midpoint of the two neighbours.
      const std::size_t num = i * (n - 1);
      const std::size_t lo = num / den;
      landmarks(d, i) = num % den == 0 ? sorted[lo] : 0.5 * (sorted[lo] + sorted[lo + 1]);
    }
  }
  return QuantileTransform(std::move(landmarks));
}

double QuantileTransform::forward_value(std::size_t dim, double v) const {
  const auto lm = landmarks_.row(dim);
  const std::size_t m = lm.size();
  double lev;
  if (v < lm.front()) {
    lev = 0.0;
  } else if (v > lm.back()) {
    lev = 1.0;
  } else {
    const auto first = std::lower_bound(lm.begin(), lm.end(), v);
    const auto last = std::upper_bound(first, lm.end(), v);
    if (first != last) {
      // v coincides with a run of equal landmarks: take the middle level.
      const auto a = static_cast<std::size_t>(first - lm.begin());
      const auto b = static_cast<std::size_t>(last - lm.begin()) - 1;
      lev = 0.5 * (level(a) + level(b));
    } else {
      const auto j = static_cast<std::size_t>(last - lm.begin()) - 1;
      const double t = (v - lm[j]) / (lm[j + 1] - lm[j]);
      lev = (static_cast<double>(j) + t) / static_cast<double>(m - 1);
    }
  }
  lev = std::clamp(lev, clip_epsilon_, 1.0 - clip_epsilon_);
  return normal_ppf(lev);
}

double QuantileTransform::inverse_value(std::size_t dim, double z) const {
  const auto lm = landmarks_.row(dim);
  const std::size_t m = lm.size();
  const double lev = normal_cdf(z);
  if (lev <= clip_epsilon_) return lm.front();
  if (lev >= 1.0 - clip_epsilon_) return lm.back();
  const double pos = lev * static_cast<double>(m - 1);
  const std::size_t j = std::min(static_cast<std::size_t>(pos), m - 2);
  const double t = pos - static_cast<double>(j);
  return lm[j] + t * (lm[j + 1] - lm[j]);
}

Matrix QuantileTransform::forward(const Matrix& s) const {
  if (s.rows() != dims())
    fail(ErrorKind::Contract, "qt_forward: expected " + std::to_string(dims()) + " rows, got " +
                                  std::to_string(s.rows()));
  Matrix z(s.rows(), s.cols());
  for (std::size_t d = 0; d < s.rows(); ++d)
    for (std::size_t j = 0; j < s.cols(); ++j) z(d, j) = forward_value(d, s(d, j));
  return z;
}

Matrix QuantileTransform::inverse(const Matrix& z) const {
  if (z.rows() != dims())
    fail(ErrorKind::Contract, "qt_inverse: expected " + std::to_string(dims()) + " rows, got " +
                                  std::to_string(z.rows()));
  Matrix s(z.rows(), z.cols());
  for (std::size_t d = 0; d < z.rows(); ++d)
    for (std::size_t j = 0; j < z.cols(); ++j) s(d, j) = inverse_value(d, z(d, j));
  return s;
}

}  // namespace cica

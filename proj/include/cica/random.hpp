#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>

namespace cica {

/// SplitMix64 output function.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Combines a root seed with stream identifiers. Distinct (a, b) pairs give
/// unrelated streams, so adding a new consumer never shifts existing ones.
constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b = 0) noexcept {
  std::uint64_t h = mix64(root + 0x9e3779b97f4a7c15ULL);
  h = mix64(h ^ (a + 0x632be59bd9b4e019ULL));
  h = mix64(h ^ (b + 0x2545f4914f6cdd1dULL));
  return h;
}

/// Stable hash for string identifiers (FNV-1a), used for method/experiment ids.
constexpr std::uint64_t hash_id(const char* s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (; *s; ++s) {
    h ^= static_cast<unsigned char>(*s);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Counter-based generator: draw i is mix64(key + (i + 1) * golden). The
/// stream depends only on the seed and the draw index, never on the platform.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) noexcept : key_(mix64(seed ^ 0xd1b54a32d192ed03ULL)) {}

  std::uint64_t next_u64() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * 0x9e3779b97f4a7c15ULL);
  }

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() noexcept { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  /// Standard normal by inversion of a uniform draw.
  double normal();

  /// Uniform integer in [0, n), n > 0. Rejection sampling, no modulo bias.
  std::size_t below(std::size_t n) noexcept;

  std::uint64_t draws() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Fisher-Yates shuffle driven by `rng`.
template <class T>
void shuffle(std::span<T> items, CounterRng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) std::swap(items[i - 1], items[rng.below(i)]);
}

}  // namespace cica

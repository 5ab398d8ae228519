#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace gaitmind {

/// xoshiro256** (Blackman & Vigna, 2018) seeded through SplitMix64.
///
/// Every random draw in the library goes through this type so that a seed
/// fully determines results on any platform. Distribution helpers are
/// implemented here rather than taken from <random>, whose distributions
/// are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64();

  /// Uniform double on [0, 1) with 53 bits of resolution.
  double next_double();

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi);

  /// Unbiased integer on [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  /// Standard normal via Box-Muller; the spare value is cached.
  double normal();

  /// Independent child generator for a named sub-stream.
  Rng fork(std::uint64_t stream) const;
  Rng fork(std::string_view stream) const;

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> s_{};
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t& state);

/// FNV-1a, used to turn string identifiers into stream ids.
std::uint64_t hash_string(std::string_view text);

/// Fisher-Yates over any random-access range, driven by Rng::below.
template <typename Range>
void shuffle(Range& range, Rng& rng) {
  const auto n = static_cast<std::uint64_t>(range.size());
  for (std::uint64_t i = n; i > 1; --i) {
    const auto j = rng.below(i);
    using std::swap;
    swap(range[i - 1], range[j]);
  }
}

}  // namespace gaitmind

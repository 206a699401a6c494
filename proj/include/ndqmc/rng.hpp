#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <utility>

namespace ndqmc {

/// splitmix64 finalizer; used to derive independent stream keys.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seeded pseudo-random stream.
///
/// A stream is identified by a 64-bit key. split(i) derives a child key from
/// the parent key only (not from the engine state), so the child obtained for
/// a given index is the same no matter how many numbers the parent has drawn.
/// Replication r of an experiment always uses root.split(r); this makes
/// results independent of how replications are distributed over threads.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed = 0) : RngStream(KeyTag{}, mix64(seed)) {}

  RngStream split(std::uint64_t child) const {
    return RngStream(KeyTag{}, mix64(key_ ^ mix64(child + 0x632be59bd9b4e019ULL)));
  }

  std::uint64_t key() const noexcept { return key_; }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform on [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n), n >= 1 (Lemire's nearly-divisionless method).
  std::uint64_t below(std::uint64_t n) {
    unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(engine_()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Fisher-Yates shuffle of [first, last).
  template <class RandomIt>
  void shuffle(RandomIt first, RandomIt last) {
    const auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
      const auto j = below(i);
      using std::swap;
      swap(first[i - 1], first[j]);
    }
  }

 private:
  struct KeyTag {};
  RngStream(KeyTag, std::uint64_t key) : key_(key), engine_(seed_from(key)) {}

  static std::mt19937_64 seed_from(std::uint64_t key) {
    std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32),
                      static_cast<std::uint32_t>(mix64(key)),
                      static_cast<std::uint32_t>(mix64(key) >> 32)};
    return std::mt19937_64(seq);
  }

  std::uint64_t key_;
  std::mt19937_64 engine_;
};

}  // namespace ndqmc

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace phc::sim {

/// SplitMix64 finalizer; used to decorrelate seeds.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// 64-bit FNV-1a of a stream label.
[[nodiscard]] constexpr std::uint64_t hash_label(std::string_view label) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Seed of replication `index` under a base seed.
[[nodiscard]] constexpr std::uint64_t replication_seed(std::uint64_t base_seed,
                                                       std::uint64_t index) noexcept {
  return mix64(mix64(base_seed) ^ mix64(index + 0x5851f42d4c957f2dULL));
}

/// Independent random stream for one stochastic process. The generator is
/// std::mt19937_64, whose output sequence is fixed by the standard; variates
/// are derived here rather than through <random> distributions, whose
/// algorithms differ between standard libraries.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::string_view stream_id)
      : id_(stream_id), engine_(mix64(seed ^ mix64(hash_label(stream_id)))) {}

  [[nodiscard]] const std::string& id() const noexcept { return id_; }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform01_open_low() noexcept { return 1.0 - uniform01(); }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) noexcept;

  bool bernoulli(double p) noexcept { return uniform01() < p; }

  /// Standard normal by the polar method. The spare value is cached.
  double standard_normal() noexcept;

 private:
  std::string id_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace phc::sim

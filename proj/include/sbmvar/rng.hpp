#pragma once

// Seedable, splittable random streams.
//
// Every stream is a std::mt19937_64 seeded from a 64-bit key derived by
// SplitMix64 mixing of (parent seed, stream tag, indices...). Uniform, normal
// and categorical draws are implemented here rather than through <random>
// distributions so that streams are bit-identical across standard libraries.
//
// Stream tags used by the library:
//   "labels"  community draws in generate_sbm
//   "edges"   Bernoulli edge draws in generate_sbm
//   "mask"    observation mask in generate_mask
//   "init"    spectral initialisation (k-means seeding)
//   "restart" per-restart perturbation in fit_varem (index = restart)
//   "cell"    per (grid cell, replicate) seeds in sweeps

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace sbmvar {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_tag(std::string_view tag) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Child seed for stream `tag` (and optional indices) of `parent`.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag,
                                    std::uint64_t i0 = 0, std::uint64_t i1 = 0) noexcept {
  std::uint64_t s = splitmix64(parent ^ splitmix64(hash_tag(tag)));
  s = splitmix64(s ^ splitmix64(i0 + 0x632be59bd9b4e019ULL));
  return splitmix64(s ^ splitmix64(i1 + 0x85157af5ULL));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t parent, std::string_view tag, std::uint64_t i0 = 0, std::uint64_t i1 = 0)
      : engine_(derive_seed(parent, tag, i0, i1)) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    // Lemire-style rejection keeps the draw unbiased.
    const std::uint64_t limit = (~std::uint64_t{0} / bound) * bound;
    std::uint64_t r;
    do {
      r = engine_();
    } while (r >= limit);
    return r % bound;
  }

  /// Standard normal by Box-Muller; caches the second variate.
  double normal();

  /// Index drawn with probability proportional to `weights` (non-negative, positive sum).
  std::size_t categorical(std::span<const double> weights);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace sbmvar

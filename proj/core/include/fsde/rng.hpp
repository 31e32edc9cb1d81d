#pragma once

#include <cstdint>
#include <random>

namespace fsde {

/// SplitMix64 finaliser; a bijection on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of item `index` in stream `stream` derived from `base`. Used to give
/// every Monte Carlo path its own generator independent of scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream,
                                    std::uint64_t index) noexcept {
  return splitmix64(splitmix64(splitmix64(base) ^ stream) + index);
}

/// Standard normal variates by the Box-Muller transform on 53-bit uniforms
/// drawn from mt19937_64. Every step of the pipeline is fixed by the C++
/// standard, so the stream is bit-reproducible across standard libraries.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

  double operator()();

  /// Uniform on (0, 1].
  double uniform();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace fsde

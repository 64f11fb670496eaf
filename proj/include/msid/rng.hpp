#pragma once

#include <cstdint>
#include <random>

namespace msid {

// splitmix64 finalizer. Deterministic across platforms.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed of sub-stream `index` of a master seed: splitmix64 evaluated at
// master + (index+1)*golden. Every run (and every purpose within a run)
// gets its own independent, individually reproducible stream.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(master + (index + 1) * 0x9e3779b97f4a7c15ULL);
}

// mt19937_64 with explicit value conversions. The standard distributions are
// implementation-defined, so uniform/normal/exponential are spelled out here
// to keep sampled streams identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // [0, 1)
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // standard Gaussian, Box-Muller with cached partner
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925287 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // mean 1/rate
  double exponential(double rate) {
    return -std::log(1.0 - uniform()) / rate;
  }

  std::uint64_t integer() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace msid

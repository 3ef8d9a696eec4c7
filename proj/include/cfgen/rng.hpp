#ifndef CFGEN_RNG_HPP
#define CFGEN_RNG_HPP

#include <cstdint>
#include <string>

namespace cfgen {

// Counter-based generator: output i is a fixed mix of (key, i), so streams
// are reproducible across platforms and independent of call history length.
// The mixing function is SplitMix64.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t next() {
    std::uint64_t z = key_ + (++counter_) * 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform draw in [0, n) via 64x64 -> high-64 multiply. Biased by at most
  // n/2^64, which is irrelevant at toy scale but fully deterministic.
  std::uint64_t uniform(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  // Uniform double in [0, 1).
  double uniform_real() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// FNV-1a, used to fold string ids into rng keys.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Per-instance seed: reproducible regardless of dataset order.
inline std::uint64_t instance_seed(std::uint64_t global_seed,
                                   const std::string& instance_id) {
  return global_seed ^ fnv1a(instance_id);
}

}  // namespace cfgen

#endif  // CFGEN_RNG_HPP

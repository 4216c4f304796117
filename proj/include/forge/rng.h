#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace forge {

// Seeded generator used by every stochastic stage. The raw engine is
// std::mt19937_64, whose output sequence is fixed by the standard; bounded
// draws use rejection sampling instead of std::uniform_int_distribution
// (whose algorithm is implementation-defined), so a seed yields the same game
// on every platform:
//
//   below(n): limit = 2^64 - (2^64 mod n); draw x until x < limit; return x mod n
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = n == 0 ? 0 : (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t x = engine_();
      if (x >= limit) return x % n;
    }
  }

  // Uniform real in [0, 1) from the top 53 bits.
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    // Fisher-Yates from the back.
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Independent stream per pipeline stage: splitmix64(seed ^ fnv1a64(stage)).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view stage) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (char c : stage) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ULL;
  }
  std::uint64_t z = seed ^ hash;
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace forge

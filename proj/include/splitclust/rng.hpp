#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace splitclust {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Splittable counter scheme: a master seed plus up to three stream indices
// (e.g. grid x, grid y, trial) map to an independent per-task seed. Mixing
// each index through splitmix64 keeps streams decorrelated and makes the
// derivation order-independent of scheduling.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a = 0, std::uint64_t b = 0,
                                 std::uint64_t c = 0) {
  std::uint64_t s = splitmix64(master);
  s = splitmix64(s ^ splitmix64(a + 0x100000001ULL));
  s = splitmix64(s ^ splitmix64(b + 0x200000003ULL));
  s = splitmix64(s ^ splitmix64(c + 0x300000005ULL));
  return s;
}

// mt19937_64 with hand-rolled draws. The engine itself is pinned by the
// standard, and avoiding std distributions keeps output identical across
// standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() < p; }

  // uniform over [lo, hi]; modulo bias is negligible at 64 bits
  int uniform_int(int lo, int hi) {
    if (lo > hi) throw std::invalid_argument("Rng::uniform_int: empty range");
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(engine_() % span);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(engine_() % i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace splitclust

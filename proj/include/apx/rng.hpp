#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

namespace apx {

// Seeded generator with self-contained bounded sampling.  std::mt19937_64 is
// bit-stable across platforms; the distribution helpers below avoid
// <random>'s implementation-defined distributions so that identical seeds
// give identical sweeps everywhere.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  // Uniform in [0, n), n > 0, by rejection.
  std::int64_t below(std::int64_t n) {
    const std::uint64_t un = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % un;
    std::uint64_t v;
    do {
      v = next();
    } while (v >= limit);
    return static_cast<std::int64_t>(v % un);
  }

  // Uniform in [lo, hi] inclusive.
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return lo + below(hi - lo + 1);
  }

  bool coin() { return (next() & 1) != 0; }

  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(below(static_cast<std::int64_t>(v.size())))];
  }

  // k distinct values from [0, n), in increasing order.
  std::vector<std::int64_t> sample_indices(std::int64_t n, std::int64_t k) {
    // Floyd's algorithm, then sort for determinism of the output order.
    std::vector<std::int64_t> out;
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    for (std::int64_t j = n - k; j < n; ++j) {
      std::int64_t t = below(j + 1);
      if (used[static_cast<std::size_t>(t)]) t = j;
      used[static_cast<std::size_t>(t)] = true;
      out.push_back(t);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

private:
  std::mt19937_64 eng_;
};

}  // namespace apx

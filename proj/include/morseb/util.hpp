#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace morseb {

/// Deterministic seed mixer so that independent trials get decorrelated but
/// reproducible streams.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::mt19937_64 rng_for(std::uint64_t seed, std::uint64_t salt = 0) {
  return std::mt19937_64(mix_seed(seed, salt));
}

/// Runs fn(i) for i in [0, n) on up to `workers` threads.  Results must be
/// written to disjoint slots; the caller merges deterministically afterwards.
inline void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const int t = std::min<std::size_t>(workers, n);
  std::vector<std::thread> pool;
  pool.reserve(t);
  std::atomic_size_t next{0};
  for (int k = 0; k < t; ++k) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

/// Shortest round-trip decimal form; deterministic across runs of one build.
inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  double back = 0;
  std::sscanf(buf, "%lf", &back);
  for (int prec = 1; prec <= 16; ++prec) {
    char shorter[64];
    std::snprintf(shorter, sizeof shorter, "%.*g", prec, v);
    std::sscanf(shorter, "%lf", &back);
    if (back == v) return shorter;
  }
  return buf;
}

}  // namespace morseb

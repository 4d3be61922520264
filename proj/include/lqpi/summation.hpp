#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace lqpi {

// Fixed pairwise summation tree. The result depends only on the array
// contents, never on how the entries were produced, which is what makes
// Monte Carlo estimates independent of the worker partition.
inline double pairwise_sum(const double* a, std::size_t len) {
  if (len <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < len; ++i) s += a[i];
    return s;
  }
  const std::size_t half = len / 2;
  return pairwise_sum(a, half) + pairwise_sum(a + half, len - half);
}

inline double pairwise_sum(const std::vector<double>& a) {
  return pairwise_sum(a.data(), a.size());
}

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
};

// Two-pass mean / standard error with pairwise reductions.
inline MeanStderr mean_stderr(const std::vector<double>& a) {
  MeanStderr r;
  const std::size_t k = a.size();
  if (k == 0) return r;
  r.mean = pairwise_sum(a) / static_cast<double>(k);
  if (k == 1) return r;
  std::vector<double> sq(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double d = a[i] - r.mean;
    sq[i] = d * d;
  }
  const double var = pairwise_sum(sq) / static_cast<double>(k - 1);
  r.stderr_ = std::sqrt(var / static_cast<double>(k));
  return r;
}

// Runs fn(i) for i in [0, count). Work is split into contiguous blocks, one
// per worker; fn must only touch state owned by index i.
inline void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(workers), count);
  std::vector<std::thread> pool;
  pool.reserve(w);
  const std::size_t chunk = (count + w - 1) / w;
  for (std::size_t b = 0; b < w; ++b) {
    const std::size_t lo = b * chunk;
    const std::size_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace lqpi

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace vidaug {

/// Round to nearest integer, ties to even. Spelled out instead of relying
/// on the floating-point environment so results are identical everywhere.
inline double round_half_even(double v) {
  double f = std::floor(v);
  double diff = v - f;
  if (diff > 0.5) return f + 1.0;
  if (diff < 0.5) return f;
  return (std::fmod(f, 2.0) == 0.0) ? f : f + 1.0;
}

/// Pixel write-back convention: round ties-to-even, clamp to [0, 255].
inline uint8_t to_u8(double v) {
  double r = round_half_even(v);
  if (r < 0.0) return 0;
  if (r > 255.0) return 255;
  return static_cast<uint8_t>(r);
}

/// Worker cap for batch fan-out. VIDAUG_THREADS=N overrides hardware
/// concurrency; values < 1 mean sequential.
inline unsigned worker_count() {
  if (const char* env = std::getenv("VIDAUG_THREADS")) {
    long n = std::strtol(env, nullptr, 10);
    if (n >= 1) return static_cast<unsigned>(n);
    return 1;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

/// Index-parallel loop with deterministic output: fn(i) must write only to
/// slot i of preallocated storage. Falls back to a plain loop for small n
/// or a single worker, so results never depend on the thread count. The
/// first exception raised by any worker is rethrown after the join.
inline void parallel_for(size_t n, const std::function<void(size_t)>& fn) {
  unsigned workers = std::min<size_t>(worker_count(), n);
  if (workers <= 1 || n < 16) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::mutex err_mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned wk = 0; wk < workers; ++wk) {
    pool.emplace_back([&, wk] {
      try {
        for (size_t i = wk; i < n; i += workers) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace vidaug

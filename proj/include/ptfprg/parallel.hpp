#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ptfprg {

/// Runs `work(unit)` for unit = 0..units-1 on up to `jobs` threads and
/// returns the per-unit results in unit order. Callers combine results in
/// that order, so the outcome does not depend on `jobs`.
template <typename Work>
auto run_units(std::size_t units, unsigned jobs, Work&& work) {
  using Result = decltype(work(std::size_t{0}));
  std::vector<Result> results(units);
  const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, jobs), units));
  if (threads <= 1) {
    for (std::size_t u = 0; u < units; ++u) results[u] = work(u);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t u = next++; u < units; u = next++) {
        try {
          results[u] = work(u);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

/// Splits `total` items into fixed-size units; returns {begin, end} of `unit`.
struct UnitRange {
  std::size_t begin;
  std::size_t end;
};

inline std::size_t unit_count(std::size_t total, std::size_t unit_size) {
  return (total + unit_size - 1) / unit_size;
}

inline UnitRange unit_range(std::size_t unit, std::size_t total, std::size_t unit_size) {
  const std::size_t begin = unit * unit_size;
  return {begin, std::min(total, begin + unit_size)};
}

}  // namespace ptfprg

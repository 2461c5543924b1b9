#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace trapdyn {

/// Worker count from TRAPDYN_JOBS, else the hardware concurrency.
inline unsigned default_jobs() {
  if (const char* env = std::getenv("TRAPDYN_JOBS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

inline unsigned resolve_jobs(unsigned jobs) { return jobs == 0 ? default_jobs() : jobs; }

/// Runs body(i) for i in [0, count) on up to `jobs` threads. Work items are
/// handed out dynamically; each index runs exactly once, so results written
/// to per-index slots are independent of scheduling. The first exception
/// thrown by any item is rethrown after all workers stop.
template <class Body>
void parallel_for(std::size_t count, unsigned jobs, Body&& body) {
  jobs = static_cast<unsigned>(std::min<std::size_t>(resolve_jobs(jobs), count));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count || failed.load(std::memory_order_relaxed)) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(jobs);
  for (unsigned t = 0; t < jobs; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace trapdyn

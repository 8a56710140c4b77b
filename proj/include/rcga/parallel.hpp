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

namespace rcga {

/// Parallelism width: `requested` (0 = hardware concurrency), capped by the
/// EDA_LAB_THREADS environment variable when set.
inline std::size_t thread_width(std::size_t requested = 0) {
  std::size_t width = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("EDA_LAB_THREADS")) {
    try {
      const long cap = std::stol(env);
      if (cap >= 1) width = std::min(width, static_cast<std::size_t>(cap));
    } catch (const std::exception&) {
      // unparsable cap is ignored
    }
  }
  return std::max<std::size_t>(width, 1);
}

/// Calls fn(i) for i in [0, count) on up to `width` threads. Jobs must
/// write only to their own slot; the first exception is rethrown.
template <class Fn>
void parallel_for(std::size_t count, std::size_t width, Fn&& fn) {
  width = std::min(width, count);
  if (width <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(width);
  for (std::size_t t = 0; t < width; ++t) pool.emplace_back(worker);
  pool.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace rcga

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace vmkl::harness {

/// Worker count for `threads`; zero means one per hardware thread.
inline std::size_t resolve_threads(std::size_t threads)
{
  if (threads == 0)
    threads = std::max(1u, std::thread::hardware_concurrency());
  return threads;
}

/// Calls fn(i) for i in [0, count) on up to `threads` workers. Results must be
/// written to per-index slots so the outcome does not depend on scheduling.
/// The first exception thrown by any call is rethrown after all workers stop.
template <class Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn)
{
  threads = std::min(resolve_threads(threads), std::max<std::size_t>(count, 1));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count || failed.load())
        return;
      try {
        fn(i);
      } catch (...) {
        const std::lock_guard lock(error_mutex);
        if (!error)
          error = std::current_exception();
        failed = true;
      }
    }
  };
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t)
      pool.emplace_back(work);
  }
  if (error)
    std::rethrow_exception(error);
}

} // namespace vmkl::harness

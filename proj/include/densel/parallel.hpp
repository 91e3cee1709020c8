#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace densel {

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Work is handed
/// out dynamically; callers write results by index, so output never depends
/// on scheduling. fn may also take (i, worker) to reuse per-worker buffers.
/// The first exception thrown by any fn is rethrown.
template <class Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  auto call = [&fn](std::size_t i, std::size_t worker) {
    if constexpr (std::is_invocable_v<Fn&, std::size_t, std::size_t>) {
      fn(i, worker);
    } else {
      (void)worker;
      fn(i);
    }
  };
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) call(i, 0);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&](std::size_t id) {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        call(i, id);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker, t);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace densel

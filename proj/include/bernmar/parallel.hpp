#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace bernmar {

//! Number of workers to use for a request; values <= 0 mean "all cores".
inline int
resolve_workers(int requested)
{
  if (requested > 0) {
    return requested;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

//! Calls fn(i) for i in [0, count) on up to `workers` threads. Work items are
//! claimed from a shared counter; callers write results into per-index slots
//! so the outcome is independent of scheduling. The first exception thrown
//! by fn is rethrown after all threads have joined.
template<class Fn>
void
parallel_for(std::size_t count, int workers, Fn&& fn)
{
  const std::size_t threads =
    std::min<std::size_t>(static_cast<std::size_t>(resolve_workers(workers)), count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      fn(i);
    }
    return;
  }

  std::atomic<std::size_t> next{ 0 };
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) {
        return;
      }
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) {
          error = std::current_exception();
        }
        next.store(count);
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(threads - 1);
  for (std::size_t t = 1; t < threads; ++t) {
    pool.emplace_back(body);
  }
  body();
  for (auto& t : pool) {
    t.join();
  }
  if (error) {
    std::rethrow_exception(error);
  }
}

} // namespace bernmar

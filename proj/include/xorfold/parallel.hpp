#ifndef XORFOLD_PARALLEL_HPP
#define XORFOLD_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace xorfold {

/// Calls fn(i) for i in [0, count) on up to `threads` workers.
///
/// Work items are claimed from a shared counter, so callers must write
/// results by index to stay independent of scheduling. The first exception
/// thrown by any item is rethrown after all workers join.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const auto width = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(width);
  for (unsigned w = 0; w < width; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next.store(count);
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace xorfold

#endif  // XORFOLD_PARALLEL_HPP

#ifndef MBSTS_PARALLEL_HPP_
#define MBSTS_PARALLEL_HPP_

#include <atomic>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace mbsts {

// Runs fn(0..count-1) across up to `threads` workers. Results must be written
// into caller-owned per-index slots so that the subsequent reduction is
// deterministic regardless of scheduling. The first exception is rethrown.
inline void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  if (count <= 0) return;
  if (threads <= 1 || count == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int n_workers = std::min(threads, count);
  pool.reserve(n_workers);
  for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace mbsts

#endif  // MBSTS_PARALLEL_HPP_

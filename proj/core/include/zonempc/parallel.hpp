#pragma once

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace zonempc {

// Runs fn(0..count-1), spreading indices over up to `jobs` threads. Results must be
// written to per-index slots so the outcome is identical for any job count.
template <typename F>
void parallel_for(int count, int jobs, F&& fn) {
  if (count <= 0) return;
  const int workers = std::min(jobs, count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto body = [&]() {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (int t = 0; t < workers; ++t) threads.emplace_back(body);
  for (auto& th : threads) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace zonempc

#include "beliefmap/parallel.hpp"

#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace beliefmap {

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, bool enabled) {
  std::size_t workers = std::thread::hardware_concurrency();
  if (!enabled || n < 2 || workers < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  if (workers > n) workers = n;

  std::mutex mu;
  std::exception_ptr first_error;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    std::size_t begin = n * w / workers;
    std::size_t end = n * (w + 1) / workers;
    threads.emplace_back([&, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace beliefmap

#include "curvelab/pool.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace curvelab {

WorkerPool::WorkerPool(int workers) : workers_(std::max(1, workers)) {}

std::vector<std::exception_ptr> WorkerPool::try_run(
    std::size_t n, const std::function<void(std::size_t)>& task) const {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t k = std::min<std::size_t>(workers_, n);
  if (k <= 1) {
    worker();
    return errors;
  }
  std::vector<std::thread> threads;
  threads.reserve(k);
  for (std::size_t t = 0; t < k; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  return errors;
}

void WorkerPool::run(std::size_t n, const std::function<void(std::size_t)>& task) const {
  for (const auto& e : try_run(n, task))
    if (e) std::rethrow_exception(e);
}

}  // namespace curvelab

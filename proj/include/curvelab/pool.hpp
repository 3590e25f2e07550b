#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <vector>

namespace curvelab {

/// Fixed-size pool of worker threads, owned by the front-end and handed to
/// the experiment drivers. Tasks write into their own index slot, so results
/// never depend on the worker count.
class WorkerPool {
 public:
  /// workers < 1 means one.
  explicit WorkerPool(int workers = 1);

  int workers() const { return workers_; }

  /// Runs task(i) for every i < n. The returned vector holds the exception
  /// thrown by each task, or null.
  std::vector<std::exception_ptr> try_run(std::size_t n,
                                          const std::function<void(std::size_t)>& task) const;
  /// As try_run, then rethrows the failure with the lowest index.
  void run(std::size_t n, const std::function<void(std::size_t)>& task) const;

 private:
  int workers_;
};

}  // namespace curvelab

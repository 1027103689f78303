#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace sfmg {

/// Runs fn(i) for i in [0, count) on up to `jobs` threads (strided). Each
/// index is written by exactly one thread, so results do not depend on jobs.
/// The first exception (by worker) is rethrown after all threads join.
template <class Fn>
void parallel_for(int count, int jobs, Fn&& fn) {
  jobs = std::max(1, std::min(jobs, count));
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&, w] {
      try {
        for (int i = w; i < count; i += jobs) fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace sfmg

#include "pecep/parallel.hpp"

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace pecep {

void parallel_for_tasks(int n_tasks, int jobs, const std::function<void(int)>& fn) {
  if (n_tasks <= 0) return;
  if (jobs <= 0) {
    jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (jobs <= 0) jobs = 1;
  }
  jobs = std::min(jobs, n_tasks);

  if (jobs == 1) {
    for (int t = 0; t < n_tasks; ++t) fn(t);
    return;
  }

  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_tasks));
  std::atomic<int> next{0};
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(jobs));
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&]() {
      while (true) {
        const int t = next.fetch_add(1);
        if (t >= n_tasks) break;
        try {
          fn(t);
        } catch (...) {
          errors[static_cast<std::size_t>(t)] = std::current_exception();
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace pecep

#pragma once

#include <functional>

namespace pecep {

// Runs fn(task) for task = 0..n_tasks-1 across up to `jobs` threads
// (jobs <= 0 selects hardware concurrency). Rethrows the exception of the
// lowest-indexed failed task after all tasks finish, so error reporting is
// independent of scheduling.
void parallel_for_tasks(int n_tasks, int jobs, const std::function<void(int)>& fn);

}  // namespace pecep

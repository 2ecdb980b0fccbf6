#pragma once

#include <cstddef>
#include <exception>
#include <optional>
#include <vector>

namespace fdpo {

/// Serial reference: results[i] = task(i) for i in [0, n).
template <typename Task>
auto map_trials_serial(std::size_t n, Task&& task) {
  using Result = decltype(task(std::size_t{0}));
  std::vector<Result> results;
  results.reserve(n);
  for (std::size_t i = 0; i < n; ++i) results.push_back(task(i));
  return results;
}

/// Same contract as map_trials_serial with tasks spread over `jobs` OpenMP
/// threads. Each result lands in its own slot, so the output does not depend
/// on scheduling. The first exception by index is rethrown after all tasks
/// finish.
template <typename Task>
auto map_trials_parallel(std::size_t n, int jobs, Task&& task) {
  using Result = decltype(task(std::size_t{0}));
  if (jobs <= 1) return map_trials_serial(n, task);
  std::vector<std::optional<Result>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs)
  for (long long i = 0; i < count; ++i) {
    const auto index = static_cast<std::size_t>(i);
    try {
      slots[index].emplace(task(index));
    } catch (...) {
      errors[index] = std::current_exception();
    }
  }
  for (const auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }
  std::vector<Result> results;
  results.reserve(n);
  for (auto& slot : slots) results.push_back(std::move(*slot));
  return results;
}

}  // namespace fdpo

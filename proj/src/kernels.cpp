#include "mplq/kernels.hpp"

#include <omp.h>

namespace mplq {

void evaluate_batch_serial(std::span<SearchState> states, const Problem& problem) {
  for (auto& s : states) s.reward = evaluate_reward(s, problem);
}

void evaluate_batch_omp(std::span<SearchState> states, const Problem& problem) {
  const auto n = static_cast<std::ptrdiff_t>(states.size());
  // Exceptions must not escape the parallel region; shape errors are
  // rethrown after the loop.
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      states[static_cast<std::size_t>(i)].reward =
          evaluate_reward(states[static_cast<std::size_t>(i)], problem);
    } catch (...) {
#pragma omp critical(mplq_batch_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

void evaluate_batch(std::span<SearchState> states, const Problem& problem, Execution exec) {
  if (exec == Execution::parallel && !omp_in_parallel()) {
    evaluate_batch_omp(states, problem);
  } else {
    evaluate_batch_serial(states, problem);
  }
}

void set_worker_count(int jobs) {
  if (jobs > 0) omp_set_num_threads(jobs);
}

}  // namespace mplq

#include "mplq/oracle.hpp"

#include <algorithm>
#include <numeric>

#include <omp.h>

#include "mplq/errors.hpp"

namespace mplq {

long double search_space_size(std::size_t num_tasks, int num_lockers) {
  long double size = 1.0L;
  for (std::size_t t = 1; t <= num_tasks; ++t) size *= static_cast<long double>(num_lockers) * t;
  return size;
}

namespace {

std::uint64_t checked_size(const Problem& problem, OracleLimit limit) {
  if (problem.pool.empty()) throw NothingToSolveError("task pool is empty");
  const long double size = search_space_size(problem.pool.size(), problem.num_lockers);
  if (size > static_cast<long double>(limit.max_enumerations)) {
    throw OracleRefused(size, limit.max_enumerations);
  }
  return static_cast<std::uint64_t>(size);
}

std::uint64_t allocation_count(const Problem& problem) {
  std::uint64_t count = 1;
  for (std::size_t t = 0; t < problem.pool.size(); ++t) {
    count *= static_cast<std::uint64_t>(problem.num_lockers);
  }
  return count;
}

// x1 for allocation index k; x1[0] is the most significant digit so that
// increasing k walks x1 in lexicographic order.
std::vector<int> decode_allocation(std::uint64_t k, std::size_t num_tasks, int num_lockers) {
  std::vector<int> x1(num_tasks);
  for (std::size_t t = num_tasks; t-- > 0;) {
    x1[t] = static_cast<int>(k % static_cast<std::uint64_t>(num_lockers));
    k /= static_cast<std::uint64_t>(num_lockers);
  }
  return x1;
}

// Best over every permutation for one allocation.
SearchState best_for_allocation(std::uint64_t k, const Problem& problem, std::uint64_t& counter) {
  const std::size_t n = problem.pool.size();
  SearchState cur;
  cur.x1 = decode_allocation(k, n, problem.num_lockers);
  cur.x2.resize(n);
  std::iota(cur.x2.begin(), cur.x2.end(), 0);

  SearchState best;
  bool have = false;
  do {
    cur.reward = evaluate_reward(cur, problem);
    ++counter;
    if (!have || better_state(cur, best)) {
      best = cur;
      have = true;
    }
  } while (std::next_permutation(cur.x2.begin(), cur.x2.end()));
  return best;
}

}  // namespace

OracleResult brute_force_serial(const Problem& problem, OracleLimit limit) {
  checked_size(problem, limit);
  OracleResult result;
  bool have = false;
  const std::uint64_t allocations = allocation_count(problem);
  for (std::uint64_t k = 0; k < allocations; ++k) {
    SearchState s = best_for_allocation(k, problem, result.enumerated);
    if (!have || better_state(s, result.best)) {
      result.best = std::move(s);
      have = true;
    }
  }
  return result;
}

OracleResult brute_force_omp(const Problem& problem, OracleLimit limit) {
  checked_size(problem, limit);
  const auto allocations = static_cast<std::int64_t>(allocation_count(problem));

  OracleResult result;
  bool have = false;
  std::uint64_t enumerated = 0;
  std::exception_ptr error;
#pragma omp parallel
  {
    SearchState local;
    bool local_have = false;
    std::uint64_t local_count = 0;
#pragma omp for schedule(dynamic, 1) nowait
    for (std::int64_t k = 0; k < allocations; ++k) {
      try {
        SearchState s = best_for_allocation(static_cast<std::uint64_t>(k), problem, local_count);
        if (!local_have || better_state(s, local)) {
          local = std::move(s);
          local_have = true;
        }
      } catch (...) {
#pragma omp critical(mplq_oracle_error)
        if (!error) error = std::current_exception();
      }
    }
#pragma omp critical(mplq_oracle_reduce)
    {
      enumerated += local_count;
      if (local_have && (!have || better_state(local, result.best))) {
        result.best = std::move(local);
        have = true;
      }
    }
  }
  if (error) std::rethrow_exception(error);
  result.enumerated = enumerated;
  return result;
}

OracleResult brute_force_best(const Problem& problem, OracleLimit limit, Execution exec) {
  if (exec == Execution::parallel && !omp_in_parallel()) return brute_force_omp(problem, limit);
  return brute_force_serial(problem, limit);
}

}  // namespace mplq

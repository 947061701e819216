#pragma once

#include <cstdint>

#include "mplq/kernels.hpp"
#include "mplq/routing.hpp"

namespace mplq {

struct OracleLimit {
  std::uint64_t max_enumerations = 10'000'000;
};

struct OracleResult {
  SearchState best;  // reward field holds the optimum
  std::uint64_t enumerated = 0;
};

// num_lockers^num_tasks * num_tasks!, as a floating value so it cannot overflow.
long double search_space_size(std::size_t num_tasks, int num_lockers);

// Exhaustive search over every (x1, x2) pair with the problem's evaluator.
// Ties go to the lexicographically smallest (x1, x2). Throws OracleRefused
// when the space exceeds the limit.
OracleResult brute_force_best(const Problem& problem, OracleLimit limit = {},
                              Execution exec = Execution::parallel);

OracleResult brute_force_serial(const Problem& problem, OracleLimit limit = {});
OracleResult brute_force_omp(const Problem& problem, OracleLimit limit = {});

}  // namespace mplq

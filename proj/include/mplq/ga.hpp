#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "mplq/kernels.hpp"
#include "mplq/solve.hpp"

namespace mplq {

struct GaParams {
  int population = 100;
  int generations = 1000;
  double elite_fraction = 0.05;
  double crossover = 0.5;
  double mutation = 0.05;
  std::uint64_t seed = 0;
  Execution exec = Execution::parallel;
};

void check_params(const GaParams& params);
int elite_count(const GaParams& params);

// Order crossover: keeps a slice of `a` in place and fills the remaining
// positions with the missing ids in the order they appear in `b`.
std::vector<int> order_crossover(const std::vector<int>& a, const std::vector<int>& b,
                                 std::size_t cut_lo, std::size_t cut_hi);

// Elites are carried over unchanged; the rest come from roulette selection,
// uniform (x1) / order (x2) crossover and per-gene mutation. The returned
// population is evaluated.
std::vector<SearchState> next_generation(std::vector<SearchState> population,
                                         const GaParams& params, std::mt19937_64& rng,
                                         const Problem& problem);

SolveResult run_ga(const Problem& problem, const GaParams& params);

}  // namespace mplq

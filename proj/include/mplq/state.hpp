#pragma once

#include <cstddef>
#include <random>
#include <vector>

namespace mplq {

// One candidate solution: x1[t] is the locker serving task t, x2 is the
// global task priority (a permutation of task ids).
struct SearchState {
  std::vector<int> x1;
  std::vector<int> x2;
  double reward = 0.0;

  bool operator==(const SearchState&) const = default;
};

// Throws ShapeError unless x1 has `num_tasks` entries in [0, num_lockers) and
// x2 is a permutation of 0..num_tasks-1.
void check_shape(const SearchState& state, std::size_t num_tasks, int num_lockers);
bool is_permutation_of_ids(const std::vector<int>& x2, std::size_t n);

// Uniform random allocation and uniform random permutation.
SearchState random_state(std::size_t num_tasks, int num_lockers, std::mt19937_64& rng);

// Reward descending, then lexicographically smallest (x1, x2).
bool better_state(const SearchState& a, const SearchState& b);

}  // namespace mplq

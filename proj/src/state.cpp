#include "mplq/state.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <tuple>

#include "mplq/errors.hpp"

namespace mplq {

bool is_permutation_of_ids(const std::vector<int>& x2, std::size_t n) {
  if (x2.size() != n) return false;
  std::vector<char> seen(n, 0);
  for (int v : x2) {
    if (v < 0 || static_cast<std::size_t>(v) >= n || seen[static_cast<std::size_t>(v)]) {
      return false;
    }
    seen[static_cast<std::size_t>(v)] = 1;
  }
  return true;
}

void check_shape(const SearchState& state, std::size_t num_tasks, int num_lockers) {
  if (state.x1.size() != num_tasks) {
    throw ShapeError("x1 has " + std::to_string(state.x1.size()) + " entries, expected " +
                     std::to_string(num_tasks));
  }
  for (std::size_t t = 0; t < num_tasks; ++t) {
    if (state.x1[t] < 0 || state.x1[t] >= num_lockers) {
      throw ShapeError("x1[" + std::to_string(t) + "] = " + std::to_string(state.x1[t]) +
                       " is not a locker in [0, " + std::to_string(num_lockers) + ")");
    }
  }
  if (!is_permutation_of_ids(state.x2, num_tasks)) {
    throw ShapeError("x2 is not a permutation of the task ids");
  }
}

SearchState random_state(std::size_t num_tasks, int num_lockers, std::mt19937_64& rng) {
  SearchState s;
  std::uniform_int_distribution<int> locker(0, num_lockers - 1);
  s.x1.resize(num_tasks);
  for (auto& v : s.x1) v = locker(rng);
  s.x2.resize(num_tasks);
  std::iota(s.x2.begin(), s.x2.end(), 0);
  std::shuffle(s.x2.begin(), s.x2.end(), rng);
  return s;
}

bool better_state(const SearchState& a, const SearchState& b) {
  if (a.reward != b.reward) return a.reward > b.reward;
  return std::tie(a.x1, a.x2) < std::tie(b.x1, b.x2);
}

}  // namespace mplq

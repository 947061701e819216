#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mplq/routing.hpp"
#include "mplq/state.hpp"

namespace mplq {

struct RunHistory {
  std::vector<double> best_reward;  // one entry per timestep / generation
  double initial = 0.0;             // best reward of the initial population
  double final = 0.0;
  std::optional<int> converged_at;  // timestep at which the Q-matrices settled

  bool operator==(const RunHistory&) const = default;
};

struct SolveResult {
  SearchState best;
  Evaluation evaluation;
  RunHistory history;
};

// CSV with columns timestep,best_reward.
std::string history_csv(const RunHistory& history);

}  // namespace mplq

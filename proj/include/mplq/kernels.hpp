#pragma once

#include <span>

#include "mplq/routing.hpp"
#include "mplq/state.hpp"

namespace mplq {

enum class Execution { serial, parallel };

// Scores every state in place (reward field). The serial loop is the
// reference; the OpenMP loop must produce identical rewards.
void evaluate_batch_serial(std::span<SearchState> states, const Problem& problem);
void evaluate_batch_omp(std::span<SearchState> states, const Problem& problem);
void evaluate_batch(std::span<SearchState> states, const Problem& problem, Execution exec);

// Number of OpenMP threads used by parallel kernels; 0 keeps the runtime default.
void set_worker_count(int jobs);

}  // namespace mplq

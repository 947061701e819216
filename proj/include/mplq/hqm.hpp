#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "mplq/kernels.hpp"
#include "mplq/solve.hpp"

namespace mplq {

// Dense row-major matrix of Q-values.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Allocation chain (q1: lockers) and sequence chain (q2: tasks). Each matrix
// has one extra trailing row that scores the first element of a chain.
struct QMatrices {
  Matrix q1;  // (M + 1) x M
  Matrix q2;  // (N + 1) x N

  static QMatrices zeros(int num_lockers, std::size_t num_tasks);
  std::size_t start_row_q1() const { return q1.rows() - 1; }
  std::size_t start_row_q2() const { return q2.rows() - 1; }

  bool operator==(const QMatrices&) const = default;
};

struct HqmParams {
  int agents = 100;
  int timesteps = 1000;
  double alpha0 = 0.9;  // learning rate alpha(t) = alpha0 * exp(-t / T)
  double gamma = 0.9;
  double tol = 1e-8;
  std::uint64_t seed = 0;
  // Fixed greedy factor; unset draws a fresh U(0,1) value per selection.
  std::optional<double> epsilon;
  Execution exec = Execution::parallel;
};

void check_params(const HqmParams& params);

double learning_rate(const HqmParams& params, int timestep);

struct Agent {
  SearchState best;
  std::mt19937_64 rng;
};

std::mt19937_64 agent_stream(std::uint64_t seed, std::size_t agent);

std::pair<std::vector<Agent>, QMatrices> init_agents(const Problem& problem,
                                                     const HqmParams& params);

// Row-wise min-max scaling; a constant row becomes uniform (1 / cols).
Matrix normalize_q(const Matrix& q);
QMatrices normalize_q(const QMatrices& q);

// Builds x1 and x2 left to right as first-order chains over the normalized
// matrices: greedy when sigma < epsilon, otherwise sampled proportionally to
// the row (used tasks masked out for x2).
SearchState global_construct(const QMatrices& normalized, std::optional<double> epsilon,
                             std::mt19937_64& rng);

// new = state + omega * (state - neighbor); x1 rounded and wrapped modulo
// num_lockers, x2 repaired by ranking the perturbed values.
SearchState local_move(const SearchState& state, const SearchState& neighbor, double omega,
                       int num_lockers);

// One tabular Q-learning step for a single entry.
double q_learning_step(double q, double reward, double max_next, double alpha, double gamma);

// Applies the Q-learning step to every adjacent pair of both chains of
// `state` with the state's reward.
void update_q(QMatrices& q, const SearchState& state, double reward, double alpha, double gamma);

bool has_converged(const QMatrices& prev, const QMatrices& cur, double tol);

SolveResult run_hqm(const Problem& problem, const HqmParams& params);

}  // namespace mplq

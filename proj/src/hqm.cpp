#include "mplq/hqm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <omp.h>

#include "mplq/errors.hpp"

namespace mplq {

QMatrices QMatrices::zeros(int num_lockers, std::size_t num_tasks) {
  const auto m = static_cast<std::size_t>(num_lockers);
  return {Matrix(m + 1, m), Matrix(num_tasks + 1, num_tasks)};
}

void check_params(const HqmParams& p) {
  if (p.agents < 1) throw ConfigError("hqm: agents must be >= 1");
  if (p.timesteps < 1) throw ConfigError("hqm: timesteps must be >= 1");
  if (!(p.tol > 0.0)) throw ConfigError("hqm: tol must be > 0");
  if (!(p.alpha0 >= 0.0 && p.alpha0 <= 1.0)) throw ConfigError("hqm: alpha0 must be in [0,1]");
  if (!(p.gamma >= 0.0 && p.gamma <= 1.0)) throw ConfigError("hqm: gamma must be in [0,1]");
  if (p.epsilon && !(*p.epsilon >= 0.0 && *p.epsilon <= 1.0))
    throw ConfigError("hqm: epsilon must be in [0,1]");
}

double learning_rate(const HqmParams& params, int timestep) {
  return params.alpha0 * std::exp(-static_cast<double>(timestep) / params.timesteps);
}

std::mt19937_64 agent_stream(std::uint64_t seed, std::size_t agent) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(agent), 0x51ed270bU};
  return std::mt19937_64(seq);
}

std::pair<std::vector<Agent>, QMatrices> init_agents(const Problem& problem,
                                                     const HqmParams& params) {
  check_params(params);
  if (problem.pool.empty()) throw NothingToSolveError("task pool is empty");
  if (problem.num_lockers < 1) throw ConfigError("hqm: at least one locker is required");

  std::vector<Agent> agents;
  std::vector<SearchState> states;
  for (int i = 0; i < params.agents; ++i) {
    Agent a{{}, agent_stream(params.seed, static_cast<std::size_t>(i))};
    states.push_back(random_state(problem.pool.size(), problem.num_lockers, a.rng));
    agents.push_back(std::move(a));
  }
  evaluate_batch(states, problem, params.exec);
  for (std::size_t i = 0; i < agents.size(); ++i) agents[i].best = std::move(states[i]);
  return {std::move(agents), QMatrices::zeros(problem.num_lockers, problem.pool.size())};
}

Matrix normalize_q(const Matrix& q) {
  Matrix out(q.rows(), q.cols());
  for (std::size_t r = 0; r < q.rows(); ++r) {
    const auto row = q.row(r);
    if (row.empty()) continue;
    const auto [lo, hi] = std::minmax_element(row.begin(), row.end());
    const double span = *hi - *lo;
    auto dst = out.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      dst[c] = span > 0.0 ? (row[c] - *lo) / span : 1.0 / static_cast<double>(row.size());
    }
  }
  return out;
}

QMatrices normalize_q(const QMatrices& q) { return {normalize_q(q.q1), normalize_q(q.q2)}; }

namespace {

double unit(std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

// Epsilon-greedy choice of a column; `used` masks columns out when non-empty.
std::size_t choose(std::span<const double> row, const std::vector<char>& used,
                   std::optional<double> epsilon, std::mt19937_64& rng) {
  const double eps = epsilon ? *epsilon : unit(rng);
  const double sigma = unit(rng);
  auto allowed = [&](std::size_t c) { return used.empty() || !used[c]; };

  std::vector<std::size_t> pool;
  if (sigma < eps) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (!allowed(c)) continue;
      if (row[c] > best) {
        best = row[c];
        pool.assign(1, c);
      } else if (row[c] == best) {
        pool.push_back(c);
      }
    }
  } else {
    double total = 0.0;
    for (std::size_t c = 0; c < row.size(); ++c) total += allowed(c) ? row[c] : 0.0;
    if (total > 0.0) {
      double target = unit(rng) * total;
      std::size_t last = row.size();
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (!allowed(c) || row[c] <= 0.0) continue;
        last = c;
        target -= row[c];
        if (target < 0.0) return c;
      }
      return last;
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (allowed(c)) pool.push_back(c);
    }
  }
  if (pool.size() == 1) return pool.front();
  return pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
}

}  // namespace

SearchState global_construct(const QMatrices& qn, std::optional<double> epsilon,
                             std::mt19937_64& rng) {
  const std::size_t num_tasks = qn.q2.cols();
  SearchState s;
  s.x1.resize(num_tasks);
  s.x2.resize(num_tasks);

  const std::vector<char> no_mask;
  std::size_t prev = qn.start_row_q1();
  for (std::size_t t = 0; t < num_tasks; ++t) {
    prev = choose(qn.q1.row(prev), no_mask, epsilon, rng);
    s.x1[t] = static_cast<int>(prev);
  }

  std::vector<char> used(num_tasks, 0);
  prev = qn.start_row_q2();
  for (std::size_t p = 0; p < num_tasks; ++p) {
    prev = choose(qn.q2.row(prev), used, epsilon, rng);
    used[prev] = 1;
    s.x2[p] = static_cast<int>(prev);
  }
  return s;
}

SearchState local_move(const SearchState& state, const SearchState& neighbor, double omega,
                       int num_lockers) {
  if (state.x1.size() != neighbor.x1.size() || state.x2.size() != neighbor.x2.size()) {
    throw ShapeError("local_move: states have different shapes");
  }
  if (omega == 0.0) return state;

  SearchState out;
  out.x1.resize(state.x1.size());
  for (std::size_t t = 0; t < state.x1.size(); ++t) {
    const double raw = state.x1[t] + omega * (state.x1[t] - neighbor.x1[t]);
    const auto r = static_cast<long long>(std::llround(raw)) % num_lockers;
    out.x1[t] = static_cast<int>(r < 0 ? r + num_lockers : r);
  }

  const std::size_t n = state.x2.size();
  std::vector<double> raw(n);
  for (std::size_t p = 0; p < n; ++p) {
    raw[p] = state.x2[p] + omega * (state.x2[p] - neighbor.x2[p]);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&raw](std::size_t a, std::size_t b) { return raw[a] < raw[b]; });
  out.x2.resize(n);
  for (std::size_t rank = 0; rank < n; ++rank) out.x2[order[rank]] = static_cast<int>(rank);
  return out;
}

double q_learning_step(double q, double reward, double max_next, double alpha, double gamma) {
  return q + alpha * (reward + gamma * max_next - q);
}

namespace {

void update_chain(Matrix& q, std::size_t start_row, const std::vector<int>& chain, double reward,
                  double alpha, double gamma) {
  std::size_t s = start_row;
  for (int v : chain) {
    const auto a = static_cast<std::size_t>(v);
    const auto next = q.row(a);
    const double max_next = *std::max_element(next.begin(), next.end());
    q(s, a) = q_learning_step(q(s, a), reward, max_next, alpha, gamma);
    s = a;
  }
}

}  // namespace

void update_q(QMatrices& q, const SearchState& state, double reward, double alpha, double gamma) {
  update_chain(q.q1, q.start_row_q1(), state.x1, reward, alpha, gamma);
  update_chain(q.q2, q.start_row_q2(), state.x2, reward, alpha, gamma);
}

namespace {

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("Q-matrix dimensions differ");
  }
  double worst = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) worst = std::max(worst, std::abs(a(r, c) - b(r, c)));
  }
  return worst;
}

// Runs fn(i) for every agent; bodies only touch agent i.
template <typename Fn>
void for_each_agent(std::size_t n, Execution exec, Fn&& fn) {
  if (exec == Execution::serial || omp_in_parallel()) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(mplq_agent_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

const SearchState& best_of(const std::vector<Agent>& agents) {
  const SearchState* best = &agents.front().best;
  for (const auto& a : agents) {
    if (better_state(a.best, *best)) best = &a.best;
  }
  return *best;
}

}  // namespace

bool has_converged(const QMatrices& prev, const QMatrices& cur, double tol) {
  const double d1 = max_abs_diff(prev.q1, cur.q1);
  const double d2 = max_abs_diff(prev.q2, cur.q2);
  return std::max(d1, d2) < tol;
}

SolveResult run_hqm(const Problem& problem, const HqmParams& params) {
  auto [agents, q] = init_agents(problem, params);
  const std::size_t n = agents.size();

  SolveResult result;
  result.history.initial = best_of(agents).reward;

  std::vector<SearchState> snapshot(n);
  for (int t = 0; t < params.timesteps; ++t) {
    const double alpha = learning_rate(params, t);
    const QMatrices qn = normalize_q(q);

    // Global search: rebuild a state from the learned chains.
    for_each_agent(n, params.exec, [&](std::size_t i) {
      Agent& a = agents[i];
      SearchState cand = global_construct(qn, params.epsilon, a.rng);
      cand.reward = evaluate_reward(cand, problem);
      if (cand.reward > a.best.reward) a.best = std::move(cand);
    });

    // Local search against another agent's (post-global) best.
    for (std::size_t i = 0; i < n; ++i) snapshot[i] = agents[i].best;
    for_each_agent(n, params.exec, [&](std::size_t i) {
      Agent& a = agents[i];
      std::size_t j = i;
      if (n > 1) {
        j = std::uniform_int_distribution<std::size_t>(0, n - 2)(a.rng);
        if (j >= i) ++j;
      }
      const double omega = std::uniform_real_distribution<double>(-1.0, 1.0)(a.rng);
      SearchState cand = local_move(a.best, snapshot[j], omega, problem.num_lockers);
      cand.reward = evaluate_reward(cand, problem);
      if (cand.reward > a.best.reward) a.best = std::move(cand);
    });

    const QMatrices prev = q;
    for (const auto& a : agents) update_q(q, a.best, a.best.reward, alpha, params.gamma);

    result.history.best_reward.push_back(best_of(agents).reward);
    if (has_converged(prev, q, params.tol)) {
      result.history.converged_at = t;
      break;
    }
  }

  result.best = best_of(agents);
  result.evaluation = evaluate_solution(result.best, problem);
  result.history.final = result.best.reward;
  return result;
}

std::string history_csv(const RunHistory& history) {
  std::ostringstream os;
  os.precision(17);
  os << "timestep,best_reward\n";
  for (std::size_t t = 0; t < history.best_reward.size(); ++t) {
    os << t << ',' << history.best_reward[t] << '\n';
  }
  return os.str();
}

}  // namespace mplq

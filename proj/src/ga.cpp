#include "mplq/ga.hpp"

#include <algorithm>
#include <cmath>

#include "mplq/errors.hpp"

namespace mplq {

void check_params(const GaParams& p) {
  if (p.population < 2) throw ParameterError("ga: population must be >= 2");
  if (p.generations < 1) throw ConfigError("ga: generations must be >= 1");
  auto prob = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!prob(p.elite_fraction) || !prob(p.crossover) || !prob(p.mutation))
    throw ConfigError("ga: fractions and probabilities must be in [0,1]");
  if (elite_count(p) < 1) throw ConfigError("ga: elite_fraction * population must be >= 1");
}

int elite_count(const GaParams& p) {
  return static_cast<int>(std::floor(p.elite_fraction * p.population + 1e-9));
}

std::vector<int> order_crossover(const std::vector<int>& a, const std::vector<int>& b,
                                 std::size_t cut_lo, std::size_t cut_hi) {
  const std::size_t n = a.size();
  std::vector<int> child(n, -1);
  std::vector<char> taken(n, 0);
  for (std::size_t k = cut_lo; k <= cut_hi && k < n; ++k) {
    child[k] = a[k];
    taken[static_cast<std::size_t>(a[k])] = 1;
  }
  std::size_t write = (cut_hi + 1) % n;
  for (std::size_t step = 0; step < n; ++step) {
    const int v = b[(cut_hi + 1 + step) % n];
    if (taken[static_cast<std::size_t>(v)]) continue;
    while (child[write] != -1) write = (write + 1) % n;
    child[write] = v;
    taken[static_cast<std::size_t>(v)] = 1;
  }
  return child;
}

namespace {

std::size_t roulette(const std::vector<SearchState>& pop, double total, std::mt19937_64& rng) {
  if (!(total > 0.0)) {
    return std::uniform_int_distribution<std::size_t>(0, pop.size() - 1)(rng);
  }
  double target = std::uniform_real_distribution<double>(0.0, total)(rng);
  for (std::size_t i = 0; i < pop.size(); ++i) {
    target -= pop[i].reward;
    if (target < 0.0) return i;
  }
  return pop.size() - 1;
}

SearchState crossover(const SearchState& a, const SearchState& b, std::mt19937_64& rng) {
  SearchState child;
  std::bernoulli_distribution coin(0.5);
  child.x1.resize(a.x1.size());
  for (std::size_t t = 0; t < a.x1.size(); ++t) child.x1[t] = coin(rng) ? a.x1[t] : b.x1[t];
  std::uniform_int_distribution<std::size_t> cut(0, a.x2.size() - 1);
  std::size_t lo = cut(rng);
  std::size_t hi = cut(rng);
  if (lo > hi) std::swap(lo, hi);
  child.x2 = order_crossover(a.x2, b.x2, lo, hi);
  return child;
}

void mutate(SearchState& s, double rate, int num_lockers, std::mt19937_64& rng) {
  if (rate <= 0.0) return;
  std::bernoulli_distribution hit(rate);
  std::uniform_int_distribution<int> locker(0, num_lockers - 1);
  for (auto& v : s.x1) {
    if (hit(rng)) v = locker(rng);
  }
  std::uniform_int_distribution<std::size_t> pos(0, s.x2.size() - 1);
  for (std::size_t p = 0; p < s.x2.size(); ++p) {
    if (hit(rng)) std::swap(s.x2[p], s.x2[pos(rng)]);
  }
}

}  // namespace

std::vector<SearchState> next_generation(std::vector<SearchState> population,
                                         const GaParams& params, std::mt19937_64& rng,
                                         const Problem& problem) {
  if (population.size() < 2) throw ParameterError("ga: population must be >= 2");
  std::sort(population.begin(), population.end(), better_state);

  const std::size_t size = population.size();
  const auto elites = std::min(size, static_cast<std::size_t>(std::max(
                                         1.0, std::floor(params.elite_fraction * size + 1e-9))));
  double total = 0.0;
  for (const auto& s : population) total += s.reward;

  std::vector<SearchState> next(population.begin(),
                                population.begin() + static_cast<std::ptrdiff_t>(elites));
  std::vector<SearchState> children;
  std::bernoulli_distribution do_cross(params.crossover);
  while (next.size() + children.size() < size) {
    const SearchState& a = population[roulette(population, total, rng)];
    const SearchState& b = population[roulette(population, total, rng)];
    SearchState c1 = a;
    SearchState c2 = b;
    if (do_cross(rng)) {
      c1 = crossover(a, b, rng);
      c2 = crossover(b, a, rng);
    }
    mutate(c1, params.mutation, problem.num_lockers, rng);
    children.push_back(std::move(c1));
    if (next.size() + children.size() < size) {
      mutate(c2, params.mutation, problem.num_lockers, rng);
      children.push_back(std::move(c2));
    }
  }
  evaluate_batch(children, problem, params.exec);
  for (auto& c : children) next.push_back(std::move(c));
  return next;
}

SolveResult run_ga(const Problem& problem, const GaParams& params) {
  check_params(params);
  if (problem.pool.empty()) throw NothingToSolveError("task pool is empty");

  std::seed_seq seq{static_cast<std::uint32_t>(params.seed),
                    static_cast<std::uint32_t>(params.seed >> 32), 0x6a09e667U};
  std::mt19937_64 rng(seq);

  std::vector<SearchState> population;
  for (int i = 0; i < params.population; ++i) {
    population.push_back(random_state(problem.pool.size(), problem.num_lockers, rng));
  }
  evaluate_batch(population, problem, params.exec);

  auto best_of = [](const std::vector<SearchState>& pop) {
    return *std::min_element(pop.begin(), pop.end(), better_state);
  };

  SolveResult result;
  SearchState best = best_of(population);
  result.history.initial = best.reward;
  for (int g = 0; g < params.generations; ++g) {
    population = next_generation(std::move(population), params, rng, problem);
    SearchState gen_best = best_of(population);
    if (better_state(gen_best, best)) best = std::move(gen_best);
    result.history.best_reward.push_back(best.reward);
  }
  result.best = best;
  result.evaluation = evaluate_solution(best, problem);
  result.history.final = best.reward;
  return result;
}

}  // namespace mplq

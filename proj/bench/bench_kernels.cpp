// Serial reference vs OpenMP kernels: batch evaluation and exhaustive search.
#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "mplq/instance.hpp"
#include "mplq/kernels.hpp"
#include "mplq/oracle.hpp"
#include "mplq/routing.hpp"
#include "mplq/taskgen.hpp"

namespace {

struct Fixture {
  mplq::Instance inst;
  mplq::TaskPool pool;

  Fixture(int spaces, int locations, int lockers) {
    mplq::GeneratorConfig cfg;
    cfg.num_spaces = spaces;
    cfg.locations_per_space = locations;
    cfg.fleet.max_lockers = lockers;
    cfg.seed = 2024;
    inst = mplq::generate_instance(cfg);
    pool = mplq::build_tasks(inst, mplq::assign_customers(inst));
  }
};

std::vector<mplq::SearchState> random_batch(const Fixture& f, std::size_t n) {
  std::mt19937_64 rng(7);
  std::vector<mplq::SearchState> states;
  for (std::size_t i = 0; i < n; ++i) {
    states.push_back(mplq::random_state(f.pool.size(), f.inst.fleet.max_lockers, rng));
  }
  return states;
}

void BM_EvaluateBatch(benchmark::State& state, mplq::Execution exec) {
  static const Fixture f(10, 20, 10);
  auto batch = random_batch(f, static_cast<std::size_t>(state.range(0)));
  const mplq::Problem problem(f.inst, f.pool, mplq::AdjustmentPolicy::hcps, f.inst.fleet.max_lockers);
  for (auto _ : state) {
    mplq::evaluate_batch(batch, problem, exec);
    benchmark::DoNotOptimize(batch.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Oracle(benchmark::State& state, mplq::Execution exec) {
  static const Fixture f(2, 4, 2);
  const mplq::Problem problem(f.inst, f.pool, mplq::AdjustmentPolicy::btd, 2);
  for (auto _ : state) {
    auto r = mplq::brute_force_best(problem, {}, exec);
    benchmark::DoNotOptimize(r.best.reward);
  }
}

}  // namespace

BENCHMARK_CAPTURE(BM_EvaluateBatch, serial, mplq::Execution::serial)->Arg(100)->Arg(1000);
BENCHMARK_CAPTURE(BM_EvaluateBatch, omp, mplq::Execution::parallel)->Arg(100)->Arg(1000);
BENCHMARK_CAPTURE(BM_Oracle, serial, mplq::Execution::serial);
BENCHMARK_CAPTURE(BM_Oracle, omp, mplq::Execution::parallel);

BENCHMARK_MAIN();

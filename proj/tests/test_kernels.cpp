#include <gtest/gtest.h>

#include "mplq/errors.hpp"
#include "mplq/kernels.hpp"
#include "support.hpp"

using namespace mplq;

TEST(Kernels, ParallelMatchesSerialReference) {
  GeneratorConfig c;
  c.seed = 4;
  c.num_spaces = 8;
  c.locations_per_space = 15;
  const Instance inst = generate_instance(c);
  const TaskPool pool = build_tasks(inst, assign_customers(inst));
  ASSERT_FALSE(pool.empty());
  for (auto policy : {AdjustmentPolicy::btd, AdjustmentPolicy::hcps}) {
    const Problem problem(inst, pool, policy, inst.fleet.max_lockers);
    std::mt19937_64 rng(6);
    std::vector<SearchState> a;
    for (int i = 0; i < 300; ++i) a.push_back(random_state(pool.size(), problem.num_lockers, rng));
    auto b = a;
    evaluate_batch_serial(a, problem);
    evaluate_batch_omp(b, problem);
    EXPECT_EQ(a, b);
  }
}

TEST(Kernels, ErrorsPropagateFromWorkers) {
  const Instance inst = testing_support::instance_with_spaces({{1, 0}});
  const TaskPool pool = testing_support::pool_of({{1, 0, 1440, 1, 0}});
  const Problem problem(inst, pool, AdjustmentPolicy::hcps, 1);
  std::vector<SearchState> states(5, SearchState{{0}, {0}, 0});
  states[3].x1 = {4};
  EXPECT_THROW(evaluate_batch_omp(states, problem), ShapeError);
  EXPECT_THROW(evaluate_batch_serial(states, problem), ShapeError);
}

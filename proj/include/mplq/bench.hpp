#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mplq/instance.hpp"
#include "mplq/routing.hpp"
#include "mplq/solve.hpp"

namespace mplq {

// (final - initial) / initial * 100. Throws UndefinedRateError when the
// initial reward is not positive.
double improvement_rate(const RunHistory& history);

// reward(BTD) - reward(HCPS), sign preserved.
double reward_gap(double reward_btd, double reward_hcps);

enum class Solver { hqm, ga };
std::string to_string(Solver solver);
Solver parse_solver(const std::string& text);

// Search effort per solve: agents doubles as GA population size and
// iterations as HQM timesteps / GA generations.
struct Budget {
  int agents = 20;
  int iterations = 200;

  static Budget desk() { return {20, 200}; }
  static Budget full() { return {100, 1000}; }
};
Budget parse_budget(const std::string& text);

struct SolverSetup {
  Solver solver = Solver::hqm;
  AdjustmentPolicy policy = AdjustmentPolicy::hcps;
  Budget budget{};
  std::uint64_t seed = 0;
};

// Runs one solver on one problem; the inner evaluation is serial when called
// from inside a parallel region.
SolveResult solve(const Problem& problem, const SolverSetup& setup);

// Seed for replication `rep` of the cell (spaces, locations).
std::uint64_t replication_seed(std::uint64_t base, int spaces, int locations, int rep);

struct GridConfig {
  std::vector<int> space_counts{5, 6, 7, 8, 9, 10};
  std::vector<int> locations_per_space{5, 10, 15, 20};
  std::vector<AdjustmentPolicy> policies{AdjustmentPolicy::btd, AdjustmentPolicy::hcps};
  std::vector<Solver> solvers{Solver::hqm, Solver::ga};
  int replications = 1;
  GeneratorConfig base{};
  std::uint64_t seed = 1;
  Budget budget{};
};

void check_config(const GridConfig& grid);

struct GridEntry {
  int spaces = 0;
  int locations = 0;
  int replication = 0;
  std::uint64_t seed = 0;
  Solver solver = Solver::hqm;
  AdjustmentPolicy policy = AdjustmentPolicy::hcps;
  int tasks = 0;
  int lockers = 0;
  double distance_km = 0.0;
  double average_delay = 0.0;
  double reward = 0.0;
  double improvement_rate = 0.0;
  // Same value on the BTD and HCPS entries of a pair; unset when the grid
  // does not run both policies.
  std::optional<double> reward_gap;

  bool operator==(const GridEntry&) const = default;
};

// Means over replications. locations == 0 marks a per-row mean over every
// locations setting of a space count.
struct GridAggregate {
  int spaces = 0;
  int locations = 0;
  Solver solver = Solver::hqm;
  AdjustmentPolicy policy = AdjustmentPolicy::hcps;
  int count = 0;
  int lockers = 0;  // mean rounded upward
  double mean_lockers = 0.0;
  double distance_km = 0.0;
  double average_delay = 0.0;
  double reward = 0.0;
  double improvement_rate = 0.0;
  std::optional<double> reward_gap;

  bool operator==(const GridAggregate&) const = default;
};

struct GridResult {
  std::vector<GridEntry> entries;
  std::vector<GridAggregate> aggregates;
  // Replications whose task pool came out empty (only the cell fields are set).
  std::vector<GridEntry> skipped;

  bool operator==(const GridResult&) const = default;
};

// Called once per solve with the entry, the problem and the raw result;
// calls are serialized even when the grid runs in parallel.
using GridObserver =
    std::function<void(const GridEntry&, const Problem&, const SolveResult&)>;

GridResult run_grid(const GridConfig& grid, const GridObserver& observer = {});

// Recomputes per-cell and per-row means from the entries.
std::vector<GridAggregate> aggregate(const std::vector<GridEntry>& entries);

enum class Factor {
  customer_span,  // T_s
  parking_span,   // T_p
  capacity,       // Q
  speed,          // V_l
  spaces,
  locations,
  service_radius,  // rho_l
  walk_range,      // rho_c
};
std::string to_string(Factor factor);
Factor parse_factor(const std::string& text);

// Sets one factor on a generator config. Spans are drawn from [v - 20, v + 20].
void apply_factor(GeneratorConfig& config, Factor factor, double value);

struct SweepAxis {
  Factor factor = Factor::customer_span;
  std::vector<double> values;
};

struct SweepConfig {
  std::vector<SweepAxis> axes;
  int replications = 10;
  GeneratorConfig base{};
  std::uint64_t seed = 1;
  Budget budget{};
  AdjustmentPolicy policy = AdjustmentPolicy::hcps;
};

void check_config(const SweepConfig& sweep);

struct SweepRow {
  std::vector<double> values;  // one per axis
  int count = 0;
  double mean_delay = 0.0;
  double stderr_delay = 0.0;

  bool operator==(const SweepRow&) const = default;
};

struct SweepResult {
  std::vector<Factor> factors;
  std::vector<SweepRow> rows;

  bool operator==(const SweepResult&) const = default;
};

SweepResult sweep_factor(const SweepConfig& sweep);

std::string grid_csv(const GridResult& result);
GridResult grid_from_csv(const std::string& text);
std::string sweep_csv(const SweepResult& result);
SweepResult sweep_from_csv(const std::string& text);

// Writes per-figure series files with columns x,y,series.
std::vector<std::filesystem::path> write_plot_data(const std::filesystem::path& dir,
                                                   const GridResult& result);
std::vector<std::filesystem::path> write_plot_data(const std::filesystem::path& dir,
                                                   const SweepResult& result);

}  // namespace mplq

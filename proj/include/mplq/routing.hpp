#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mplq/instance.hpp"
#include "mplq/state.hpp"
#include "mplq/taskgen.hpp"

namespace mplq {

// Preferred fix when a locker would reach its next space too early.
enum class AdjustmentPolicy { btd, hcps };

enum class Adjustment { none, btd, hcps };

const char* to_string(AdjustmentPolicy policy);
const char* to_string(Adjustment adjustment);
AdjustmentPolicy parse_policy(const std::string& text);

// A node visited by a locker. Depot stops have task == -1.
struct Stop {
  int node = 0;
  int task = -1;
  double arrival = 0.0;
  double start = 0.0;
  double leave = 0.0;
  int load = 0;  // parcels handed out since the last depot visit
  Adjustment adjustment = Adjustment::none;
  double lateness = 0.0;  // max(0, start - l_ia)

  bool is_depot() const { return task < 0; }
  bool operator==(const Stop&) const = default;
};

struct LockerRoute {
  int locker = 0;
  std::vector<Stop> stops;  // begins and ends at the depot
  double distance = 0.0;    // km

  bool operator==(const LockerRoute&) const = default;
};

struct RoutePlan {
  std::vector<LockerRoute> routes;  // dispatched lockers only, by locker index
  double total_distance = 0.0;
  int lockers_dispatched = 0;
  double total_lateness = 0.0;
  double average_lateness = 0.0;
  int visits = 0;

  bool operator==(const RoutePlan&) const = default;
};

struct CostBreakdown {
  double fleet_term = 0.0;   // W1 * F_m * lockers
  double travel_term = 0.0;  // W2 * sum C_ij
  double objective = 0.0;
  double reward = 0.0;  // 1 / objective
};

// Optional multiplicative driving-time noise, off by default. Each leg's time
// is scaled by a factor in [1, 1 + noise] derived from (seed, locker, leg).
struct RoutingOptions {
  double noise = 0.0;
  std::uint64_t noise_seed = 0;
};

double travel_time(const Position& from, const Position& to, double speed);

struct ScheduleTimes {
  double arrival = 0.0;
  double start = 0.0;
  double leave = 0.0;
};

// Earliest-start recurrence. For the first task prev_leave is the depot
// departure bound (0) and travel is t_01.
ScheduleTimes earliest_schedule(double prev_leave, double travel, const TimeWindow& task_window,
                                double earliest_pickup, double service_time);

// Detour through the depot: arrival at j given the task start at i.
double apply_btd(double prev_start, double service_time, double to_depot, double from_depot);

// Hold at the current space until `hold_until`, then drive to j.
double apply_hcps(double hold_until, double travel);

// Schedules tasks in the given order (sorted by window start) for one locker.
LockerRoute schedule_route(std::span<const int> task_ids, const TaskPool& pool,
                           const Instance& instance, AdjustmentPolicy policy,
                           const RoutingOptions& options = {}, int locker = 0);

CostBreakdown compute_cost(int lockers_dispatched, double distance_km, const Instance& instance);

// Everything needed to score a SearchState.
struct Problem {
  const Instance& instance;
  const TaskPool& pool;
  AdjustmentPolicy policy = AdjustmentPolicy::hcps;
  int num_lockers = 1;
  RoutingOptions routing{};

  Problem(const Instance& inst, const TaskPool& tasks, AdjustmentPolicy p, int lockers,
          RoutingOptions options = {})
      : instance(inst), pool(tasks), policy(p), num_lockers(lockers), routing(options) {}
};

struct Evaluation {
  RoutePlan plan;
  CostBreakdown cost;
};

// Per-locker task lists: x1 partitions, x2 orders, then a stable sort by
// window start.
std::vector<std::vector<int>> locker_task_lists(const SearchState& state, const TaskPool& pool,
                                                int num_lockers);

Evaluation evaluate_solution(const SearchState& state, const Problem& problem);
Evaluation evaluate_solution(const SearchState& state, const TaskPool& pool,
                             const Instance& instance, AdjustmentPolicy policy);
double evaluate_reward(const SearchState& state, const Problem& problem);

struct DelayStats {
  double total = 0.0;
  double average = 0.0;
};

DelayStats compute_delay(const RoutePlan& plan);

enum class Constraint {
  assignment,   // each task served exactly once, by its allocated locker
  depot,        // routes start and end at the depot
  capacity,     // load within capacity, emptied at the depot
  time_window,  // service at the task's space inside its sub-interval
  time_order,   // times consistent with driving and service along the route
};

std::string to_string(Constraint c);

struct FeasibilityIssue {
  Constraint constraint = Constraint::assignment;
  std::string entity;
  std::string description;
  bool hard = true;
  double lateness = 0.0;  // soft (late service) issues only
};

struct FeasibilityReport {
  std::vector<FeasibilityIssue> issues;

  bool empty() const { return issues.empty(); }
  bool has_hard() const;
  double soft_lateness() const;
};

FeasibilityReport check_feasibility(const RoutePlan& plan, const SearchState& state,
                                    const TaskPool& pool, const Instance& instance);

std::string route_plan_csv(const RoutePlan& plan);

}  // namespace mplq

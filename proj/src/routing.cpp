#include "mplq/routing.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mplq/errors.hpp"

namespace mplq {

const char* to_string(AdjustmentPolicy policy) {
  return policy == AdjustmentPolicy::btd ? "btd" : "hcps";
}

const char* to_string(Adjustment adjustment) {
  switch (adjustment) {
    case Adjustment::btd:
      return "btd";
    case Adjustment::hcps:
      return "hcps";
    case Adjustment::none:
      break;
  }
  return "none";
}

AdjustmentPolicy parse_policy(const std::string& text) {
  if (text == "btd" || text == "BTD") return AdjustmentPolicy::btd;
  if (text == "hcps" || text == "HCPS") return AdjustmentPolicy::hcps;
  throw ConfigError("unknown policy '" + text + "' (expected btd or hcps)");
}

double travel_time(const Position& from, const Position& to, double speed) {
  if (!(speed > 0.0)) throw ParameterError("speed must be positive");
  return distance(from, to) / speed;
}

ScheduleTimes earliest_schedule(double prev_leave, double travel, const TimeWindow& task_window,
                                double earliest_pickup, double service_time) {
  ScheduleTimes t;
  t.arrival = std::max(prev_leave + travel, task_window.start);
  t.start = std::max(t.arrival, earliest_pickup);
  t.leave = t.start + service_time;
  return t;
}

double apply_btd(double prev_start, double service_time, double to_depot, double from_depot) {
  return prev_start + service_time + to_depot + from_depot;
}

double apply_hcps(double hold_until, double travel) { return hold_until + travel; }

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Drives one locker through its task list; keeps leg accounting in one place.
class RouteBuilder {
 public:
  RouteBuilder(const Instance& inst, const RoutingOptions& options, int locker)
      : inst_(inst), options_(options) {
    route_.locker = locker;
    route_.stops.push_back(Stop{});  // depot departure, times filled on first leg
  }

  const Stop& last() const { return route_.stops.back(); }
  int node() const { return last().node; }

  double leg_time(int from, int to) {
    double t = travel_time(inst_.node_position(from), inst_.node_position(to), inst_.fleet.speed);
    if (options_.noise > 0.0) {
      const std::uint64_t h = splitmix64(options_.noise_seed ^
                                         splitmix64(static_cast<std::uint64_t>(route_.locker)) ^
                                         (static_cast<std::uint64_t>(legs_) << 32));
      const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
      t *= 1.0 + options_.noise * u;
    }
    ++legs_;
    return t;
  }

  void add_distance(int from, int to) {
    route_.distance += distance(inst_.node_position(from), inst_.node_position(to));
  }

  void set_departure(double time) {
    route_.stops.front().start = time;
    route_.stops.front().leave = time;
    route_.stops.front().arrival = time;
  }

  void push(Stop stop) {
    add_distance(node(), stop.node);
    route_.stops.push_back(stop);
  }

  LockerRoute finish() {
    if (route_.stops.size() > 1) {
      const double back = last().leave + leg_time(node(), 0);
      push(Stop{0, -1, back, back, back, 0, Adjustment::none, 0.0});
    }
    return std::move(route_);
  }

 private:
  const Instance& inst_;
  const RoutingOptions& options_;
  LockerRoute route_;
  int legs_ = 0;
};

}  // namespace

LockerRoute schedule_route(std::span<const int> task_ids, const TaskPool& pool,
                           const Instance& inst, AdjustmentPolicy policy,
                           const RoutingOptions& options, int locker) {
  RouteBuilder rb(inst, options, locker);
  if (task_ids.empty()) return rb.finish();

  const int capacity = inst.fleet.capacity;
  int load = 0;
  const Task* prev = nullptr;

  for (int id : task_ids) {
    const Task& task = pool.task(id);
    const ParkingSpace& space = inst.space(task.space_id);
    const double pickup = task.earliest_member_pickup();

    Stop stop;
    stop.node = task.space_id;
    stop.task = id;

    // Back to the depot before driving on to this task; empties the locker.
    auto via_depot = [&]() {
      const Stop& from = rb.last();
      const double service = inst.space(from.node).service_time;
      const double to_depot = rb.leg_time(from.node, 0);
      const double from_depot = rb.leg_time(0, task.space_id);
      const double arrival = apply_btd(from.start, service, to_depot, from_depot);
      const double at_depot = from.leave + to_depot;
      rb.push(Stop{0, -1, at_depot, at_depot, at_depot, 0, Adjustment::none, 0.0});
      load = 0;
      stop.adjustment = Adjustment::btd;
      return arrival;
    };

    if (prev == nullptr) {
      const double travel = rb.leg_time(0, task.space_id);
      const ScheduleTimes t = earliest_schedule(0.0, travel, task.window, pickup, space.service_time);
      rb.set_departure(t.arrival - travel);
      stop.arrival = t.arrival;
    } else if (load > 0 && load + task.demand > capacity) {
      stop.arrival = via_depot();
    } else {
      const double travel = rb.leg_time(rb.node(), task.space_id);
      const double arrival = rb.last().leave + travel;
      if (arrival >= task.window.start) {
        stop.arrival = arrival;
      } else {
        const ParkingSpace& here = inst.space(prev->space_id);
        const double hold_until = std::max(prev->window.end, task.window.start - travel);
        if (policy == AdjustmentPolicy::hcps && hold_until <= here.window.end) {
          stop.arrival = apply_hcps(hold_until, travel);
          stop.adjustment = Adjustment::hcps;
        } else {
          stop.arrival = via_depot();
        }
      }
    }

    stop.start = std::max({stop.arrival, task.window.start, pickup});
    stop.leave = stop.start + space.service_time;
    load += task.demand;
    stop.load = load;
    stop.lateness = std::max(0.0, stop.start - task.window.end);
    rb.push(stop);
    prev = &task;
  }
  return rb.finish();
}


CostBreakdown compute_cost(int lockers_dispatched, double distance_km, const Instance& inst) {
  CostBreakdown c;
  c.fleet_term = inst.weights.fleet * inst.fleet.fixed_cost * lockers_dispatched;
  c.travel_term = inst.weights.travel * inst.fleet.unit_travel_cost * distance_km;
  c.objective = c.fleet_term + c.travel_term;
  c.reward = c.objective > 0.0 ? 1.0 / c.objective : 0.0;
  return c;
}

std::vector<std::vector<int>> locker_task_lists(const SearchState& state, const TaskPool& pool,
                                                int num_lockers) {
  std::vector<std::vector<int>> lists(static_cast<std::size_t>(num_lockers));
  for (int task : state.x2) {
    lists[static_cast<std::size_t>(state.x1[static_cast<std::size_t>(task)])].push_back(task);
  }
  for (auto& list : lists) {
    std::stable_sort(list.begin(), list.end(), [&pool](int a, int b) {
      return pool.task(a).window.start < pool.task(b).window.start;
    });
  }
  return lists;
}

Evaluation evaluate_solution(const SearchState& state, const Problem& problem) {
  check_shape(state, problem.pool.size(), problem.num_lockers);
  const auto lists = locker_task_lists(state, problem.pool, problem.num_lockers);

  Evaluation ev;
  for (std::size_t m = 0; m < lists.size(); ++m) {
    if (lists[m].empty()) continue;
    LockerRoute route = schedule_route(lists[m], problem.pool, problem.instance, problem.policy,
                                       problem.routing, static_cast<int>(m));
    ev.plan.total_distance += route.distance;
    ++ev.plan.lockers_dispatched;
    ev.plan.routes.push_back(std::move(route));
  }
  const DelayStats delay = compute_delay(ev.plan);
  ev.plan.total_lateness = delay.total;
  ev.plan.average_lateness = delay.average;
  for (const auto& r : ev.plan.routes) {
    for (const auto& s : r.stops) ev.plan.visits += s.is_depot() ? 0 : 1;
  }
  ev.cost = compute_cost(ev.plan.lockers_dispatched, ev.plan.total_distance, problem.instance);
  return ev;
}

Evaluation evaluate_solution(const SearchState& state, const TaskPool& pool,
                             const Instance& instance, AdjustmentPolicy policy) {
  return evaluate_solution(state, Problem(instance, pool, policy, instance.fleet.max_lockers));
}

double evaluate_reward(const SearchState& state, const Problem& problem) {
  return evaluate_solution(state, problem).cost.reward;
}

DelayStats compute_delay(const RoutePlan& plan) {
  DelayStats d;
  int visits = 0;
  for (const auto& r : plan.routes) {
    for (const auto& s : r.stops) {
      if (s.is_depot()) continue;
      d.total += s.lateness;
      ++visits;
    }
  }
  d.average = visits > 0 ? d.total / visits : 0.0;
  return d;
}

bool FeasibilityReport::has_hard() const {
  return std::any_of(issues.begin(), issues.end(), [](const auto& i) { return i.hard; });
}

double FeasibilityReport::soft_lateness() const {
  double total = 0.0;
  for (const auto& i : issues) total += i.hard ? 0.0 : i.lateness;
  return total;
}

std::string to_string(Constraint c) {
  switch (c) {
    case Constraint::assignment: return "assignment";
    case Constraint::depot: return "depot";
    case Constraint::capacity: return "capacity";
    case Constraint::time_window: return "time_window";
    case Constraint::time_order: return "time_order";
  }
  return "unknown";
}

FeasibilityReport check_feasibility(const RoutePlan& plan, const SearchState& state,
                                    const TaskPool& pool, const Instance& inst) {
  FeasibilityReport report;
  auto hard = [&report](Constraint constraint, std::string entity, std::string what) {
    report.issues.push_back({constraint, std::move(entity), std::move(what), true, 0.0});
  };
  constexpr double eps = 1e-9;

  // Every task served exactly once, by the locker x1 names.
  if (!is_permutation_of_ids(state.x2, pool.size())) {
    hard(Constraint::assignment, "state", "x2 is not a permutation of the task ids");
  }
  std::vector<int> served(pool.size(), 0);
  for (const auto& r : plan.routes) {
    for (const auto& s : r.stops) {
      if (s.is_depot()) continue;
      if (s.task >= static_cast<int>(pool.size())) {
        hard(Constraint::assignment, "task " + std::to_string(s.task), "unknown task");
        continue;
      }
      ++served[static_cast<std::size_t>(s.task)];
      if (static_cast<std::size_t>(s.task) < state.x1.size() &&
          state.x1[static_cast<std::size_t>(s.task)] != r.locker) {
        hard(Constraint::assignment, "task " + std::to_string(s.task),
             "served by locker " + std::to_string(r.locker) + " but allocated to locker " +
                 std::to_string(state.x1[static_cast<std::size_t>(s.task)]));
      }
    }
  }
  for (std::size_t t = 0; t < served.size(); ++t) {
    if (served[t] != 1) {
      hard(Constraint::assignment, "task " + std::to_string(t),
           "served " + std::to_string(served[t]) + " times, expected exactly once");
    }
  }

  for (const auto& r : plan.routes) {
    const std::string locker = "locker " + std::to_string(r.locker);
    // Depart from and return to the depot.
    if (r.stops.size() < 3 || !r.stops.front().is_depot() || !r.stops.back().is_depot() ||
        r.stops.front().node != 0 || r.stops.back().node != 0) {
      hard(Constraint::depot, locker, "route does not start and end at the depot with at least one visit");
    }

    for (std::size_t k = 0; k < r.stops.size(); ++k) {
      const Stop& s = r.stops[k];
      const std::string where = locker + " stop " + std::to_string(k);
      // Capacity.
      if (s.load > inst.fleet.capacity) {
        hard(Constraint::capacity, where,
             "load " + std::to_string(s.load) + " exceeds capacity " +
                 std::to_string(inst.fleet.capacity));
      }
      if (s.is_depot() && s.load != 0) hard(Constraint::capacity, where, "load not emptied at the depot");

      // Time flows forward along the route.
      if (k > 0) {
        const Stop& p = r.stops[k - 1];
        const double drive = distance(inst.node_position(p.node), inst.node_position(s.node)) /
                             inst.fleet.speed;
        if (s.arrival + eps < p.leave + drive) {
          hard(Constraint::time_order, where, "arrival precedes departure plus driving time");
        }
      }
      if (s.start + eps < s.arrival || s.leave + eps < s.start) {
        hard(Constraint::time_order, where, "arrival <= start <= leave violated");
      }
      if (s.is_depot()) continue;

      const Task& task = pool.task(s.task);
      if (s.node != task.space_id) hard(Constraint::time_window, where, "visit at a node other than the task's space");
      // Service inside the sub-interval.
      if (s.start + eps < task.window.start) {
        hard(Constraint::time_window, where, "service starts before the sub-interval opens");
      }
      const double late = std::max(0.0, s.start - task.window.end);
      if (late > 0.0) {
        std::ostringstream os;
        os << "service starts " << late << " min after the sub-interval closes";
        report.issues.push_back({Constraint::time_window, where, os.str(), false, late});
      }
    }
  }
  return report;
}

std::string route_plan_csv(const RoutePlan& plan) {
  std::ostringstream os;
  os.precision(17);
  os << "locker_id,leg_index,from_node,to_node,arrive_min,start_min,leave_min,load,adjustment,"
        "lateness_min\n";
  for (const auto& r : plan.routes) {
    for (std::size_t k = 1; k < r.stops.size(); ++k) {
      const Stop& s = r.stops[k];
      os << r.locker << ',' << k - 1 << ',' << r.stops[k - 1].node << ',' << s.node << ','
         << s.arrival << ',' << s.start << ',' << s.leave << ',' << s.load << ','
         << to_string(s.adjustment) << ',' << s.lateness << '\n';
    }
  }
  return os.str();
}

}  // namespace mplq

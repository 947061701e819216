#pragma once

// Builders and independent recomputations shared by the test binaries. None
// of the helpers here call into the scheduler they are used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "mplq/instance.hpp"
#include "mplq/routing.hpp"
#include "mplq/taskgen.hpp"

namespace testing_support {

using namespace mplq;

// Seeded source for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }
  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// Instance with a depot at the origin and spaces at the given points; every
// space is open all day.
inline Instance instance_with_spaces(const std::vector<Position>& points, double service = 30.0) {
  Instance inst;
  int id = 1;
  for (const auto& p : points) {
    ParkingSpace s;
    s.id = id++;
    s.position = p;
    s.window = {0.0, 1440.0};
    s.service_time = service;
    inst.spaces.push_back(s);
  }
  return inst;
}

struct TaskSpec {
  int space = 1;
  double start = 0.0;
  double end = 0.0;
  int demand = 1;
  double pickup = 0.0;  // earliest member pickup
};

inline TaskPool pool_of(const std::vector<TaskSpec>& specs) {
  TaskPool pool;
  for (const auto& s : specs) {
    Task t;
    t.id = static_cast<int>(pool.tasks.size());
    t.space_id = s.space;
    t.subinterval = 1;
    t.demand = s.demand;
    t.window = {s.start, s.end};
    t.members.push_back({t.id, s.pickup});
    pool.customer_task[t.id] = t.id;
    pool.tasks.push_back(t);
  }
  return pool;
}

inline double euclid(const Position& a, const Position& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

inline const Position& where(const Instance& inst, int node) {
  return node == 0 ? inst.depot : inst.spaces[static_cast<std::size_t>(node - 1)].position;
}

// Sum of leg lengths over consecutive stops.
inline double route_length(const Instance& inst, const LockerRoute& route) {
  double d = 0.0;
  for (std::size_t k = 1; k < route.stops.size(); ++k) {
    d += euclid(where(inst, route.stops[k - 1].node), where(inst, route.stops[k].node));
  }
  return d;
}

// Recomputes the earliest-start recurrences over every visit that was not
// adjusted and returns the number of mismatches (exact comparison). The
// first visit must satisfy A = max(e, t01) with the depot departure at
// A - t01; later visits A = prev leave + t (which is >= e when nothing fired),
// start = max(A, e, earliest pickup) and leave = start + S.
struct RecurrenceCheck {
  int checked = 0;
  int mismatches = 0;
};

inline RecurrenceCheck check_recurrences(const Instance& inst, const TaskPool& pool,
                                         const LockerRoute& route) {
  RecurrenceCheck out;
  const auto& stops = route.stops;
  for (std::size_t k = 1; k + 1 < stops.size(); ++k) {
    const Stop& s = stops[k];
    if (s.is_depot() || s.adjustment != Adjustment::none) continue;
    const Task& task = pool.task(s.task);
    const double service = inst.space(task.space_id).service_time;
    double pickup = task.members.empty() ? 0.0 : task.members.front().earliest_pickup;
    for (const auto& m : task.members) pickup = std::min(pickup, m.earliest_pickup);
    const Stop& p = stops[k - 1];
    const double t = euclid(where(inst, p.node), where(inst, s.node)) / inst.fleet.speed;

    double arrival = 0.0;
    if (k == 1) {
      arrival = std::max(task.window.start, 0.0 + t);
      if (p.leave != arrival - t) ++out.mismatches;
    } else {
      if (p.is_depot()) continue;  // a forced depot return is an adjustment of its own
      arrival = std::max(p.leave + t, task.window.start);
    }
    const double start = std::max(arrival, pickup);
    const double leave = start + service;
    ++out.checked;
    if (s.arrival != arrival || s.start != start || s.leave != leave) ++out.mismatches;
  }
  return out;
}

}  // namespace testing_support

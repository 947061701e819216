#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mplq/instance.hpp"

namespace mplq {

struct SubInterval {
  int space_id = 0;
  int index = 1;  // a, 1-based
  TimeWindow window;

  bool operator==(const SubInterval&) const = default;
};

struct TaskMember {
  int customer_id = 0;
  double earliest_pickup = 0.0;  // E_nk of the chosen location

  bool operator==(const TaskMember&) const = default;
};

// All demand collected at one space within one sub-interval.
struct Task {
  int id = 0;
  int space_id = 0;
  int subinterval = 1;
  int demand = 0;
  TimeWindow window;
  std::vector<TaskMember> members;

  double earliest_member_pickup() const;
  bool operator==(const Task&) const = default;
};

struct TaskPool {
  std::vector<Task> tasks;
  std::map<int, int> customer_task;  // customer id -> task id
  std::vector<int> unservable;       // assigned, but no sub-interval overlaps by >= buffer

  std::size_t size() const { return tasks.size(); }
  bool empty() const { return tasks.empty(); }
  const Task& task(int id) const { return tasks.at(static_cast<std::size_t>(id)); }
};

// Availability of a space tightened to the span of its customers' windows.
// Empty when nothing overlaps the parking window.
std::optional<TimeWindow> reduce_availability(const ParkingSpace& space,
                                              std::span<const TimeWindow> customer_windows);

// floor((end - start) / service_time) back-to-back windows of length service_time.
std::vector<SubInterval> partition_subintervals(const TimeWindow& availability,
                                                double service_time, int space_id = 0);

// Index of the earliest sub-interval whose window overlaps `window` by at
// least `buffer` minutes.
std::optional<std::size_t> earliest_feasible_subinterval(std::span<const SubInterval> subs,
                                                         const TimeWindow& window, double buffer);

TaskPool build_tasks(const Instance& instance, const Assignment& assignment);

std::string taskpool_csv(const TaskPool& pool);

}  // namespace mplq

#include "mplq/taskgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mplq/errors.hpp"

namespace mplq {

double Task::earliest_member_pickup() const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& m : members) best = std::min(best, m.earliest_pickup);
  return best;
}

std::optional<TimeWindow> reduce_availability(const ParkingSpace& space,
                                              std::span<const TimeWindow> customer_windows) {
  std::optional<TimeWindow> hull;
  for (const auto& w : customer_windows) {
    const TimeWindow clipped{std::max(space.window.start, w.start),
                             std::min(space.window.end, w.end)};
    if (clipped.end < clipped.start) continue;
    if (!hull) {
      hull = clipped;
    } else {
      hull->start = std::min(hull->start, clipped.start);
      hull->end = std::max(hull->end, clipped.end);
    }
  }
  if (hull && !(hull->end > hull->start)) return std::nullopt;
  return hull;
}

std::vector<SubInterval> partition_subintervals(const TimeWindow& availability,
                                                double service_time, int space_id) {
  if (!(service_time > 0.0)) throw ParameterError("service time must be positive");
  std::vector<SubInterval> subs;
  const double span = availability.end - availability.start;
  if (!(span > 0.0)) return subs;
  // Tolerance so exact multiples are not lost to rounding.
  const auto count = static_cast<int>(std::floor(span / service_time + 1e-9));
  for (int a = 1; a <= count; ++a) {
    subs.push_back({space_id, a,
                    {availability.start + (a - 1) * service_time,
                     availability.start + a * service_time}});
  }
  return subs;
}

std::optional<std::size_t> earliest_feasible_subinterval(std::span<const SubInterval> subs,
                                                         const TimeWindow& window, double buffer) {
  for (std::size_t k = 0; k < subs.size(); ++k) {
    if (overlap(subs[k].window, window) >= buffer) return k;
  }
  return std::nullopt;
}

TaskPool build_tasks(const Instance& instance, const Assignment& assignment) {
  // Customers grouped by assigned space, in customer id order.
  std::map<int, std::vector<std::pair<int, TimeWindow>>> by_space;
  for (const auto& [cid, a] : assignment.assigned) {
    const Customer& c = instance.customers.at(static_cast<std::size_t>(cid));
    by_space[a.space_id].emplace_back(
        cid, c.locations.at(static_cast<std::size_t>(a.location_index)).window);
  }

  TaskPool pool;
  for (const auto& [space_id, members] : by_space) {
    const ParkingSpace& space = instance.space(space_id);
    std::vector<TimeWindow> windows;
    for (const auto& m : members) windows.push_back(m.second);

    std::vector<SubInterval> subs;
    if (auto avail = reduce_availability(space, windows)) {
      subs = partition_subintervals(*avail, space.service_time, space_id);
    }

    std::vector<std::vector<TaskMember>> slots(subs.size());
    for (const auto& [cid, window] : members) {
      auto k = earliest_feasible_subinterval(subs, window, instance.buffer);
      if (!k) {
        pool.unservable.push_back(cid);
        continue;
      }
      slots[*k].push_back({cid, window.start});
    }

    for (std::size_t k = 0; k < subs.size(); ++k) {
      if (slots[k].empty()) continue;
      Task task;
      task.id = static_cast<int>(pool.tasks.size());
      task.space_id = space_id;
      task.subinterval = subs[k].index;
      task.window = subs[k].window;
      task.members = std::move(slots[k]);
      for (const auto& m : task.members) {
        task.demand += instance.customers.at(static_cast<std::size_t>(m.customer_id)).demand;
        pool.customer_task[m.customer_id] = task.id;
      }
      pool.tasks.push_back(std::move(task));
    }
  }
  std::sort(pool.unservable.begin(), pool.unservable.end());
  return pool;
}

std::string taskpool_csv(const TaskPool& pool) {
  std::ostringstream os;
  os.precision(17);
  os << "task_id,space_id,a,e_min,l_min,q,member_customer_ids\n";
  for (const auto& t : pool.tasks) {
    os << t.id << ',' << t.space_id << ',' << t.subinterval << ',' << t.window.start << ','
       << t.window.end << ',' << t.demand << ',';
    for (std::size_t k = 0; k < t.members.size(); ++k) {
      if (k) os << ';';
      os << t.members[k].customer_id;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace mplq

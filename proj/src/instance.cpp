#include "mplq/instance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "mplq/errors.hpp"

namespace mplq {

double distance(const Position& a, const Position& b) { return std::hypot(a.x - b.x, a.y - b.y); }

double overlap(const TimeWindow& a, const TimeWindow& b) {
  return std::min(a.end, b.end) - std::max(a.start, b.start);
}

const Position& Instance::node_position(int node) const {
  if (node == 0) return depot;
  return space(node).position;
}

OracleRefused::OracleRefused(long double cardinality, std::uint64_t limit)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "search space of " << static_cast<double>(cardinality) << " states exceeds limit "
           << limit;
        return os.str();
      }()),
      cardinality_(cardinality),
      limit_(limit) {}

void check_config(const GeneratorConfig& c) {
  auto fail = [](const std::string& what) { throw ConfigError("generator config: " + what); };
  if (c.num_spaces < 0) fail("num_spaces must be >= 0");
  if (c.locations_per_space < 0) fail("locations_per_space must be >= 0");
  if (!(c.service_radius >= 0.0)) fail("service_radius must be >= 0");
  if (!c.locations_per_customer.valid() || c.locations_per_customer.min < 1)
    fail("locations_per_customer must satisfy 1 <= min <= max");
  if (!(c.working_hours.start >= 0.0 && c.working_hours.start < c.working_hours.end &&
        c.working_hours.end <= 1440.0))
    fail("working_hours must satisfy 0 <= start < end <= 1440");
  if (!c.demand.valid() || c.demand.min < 1) fail("demand range must satisfy 1 <= min <= max");
  if (!c.walk_range.valid() || !(c.walk_range.min > 0.0))
    fail("walk_range must satisfy 0 < min <= max");
  if (!c.customer_span.valid() || !(c.customer_span.min > 0.0))
    fail("customer_span must satisfy 0 < min <= max");
  if (!c.parking_span.valid() || !(c.parking_span.min >= 1.0))
    fail("parking_span must satisfy 1 <= min <= max");
  if (c.fleet.capacity <= 0 || !(c.fleet.speed > 0.0) || c.fleet.max_lockers < 1)
    fail("fleet needs capacity > 0, speed > 0 and max_lockers >= 1");
  if (!(c.weights.fleet > 0.0 && c.weights.travel > 0.0)) fail("weights must be positive");
  if (!(c.buffer >= 0.0)) fail("buffer must be >= 0");
}

namespace {

struct LocationPoint {
  Position position;
  double max_walk;
};

double uniform(std::mt19937_64& rng, double lo, double hi) {
  if (lo == hi) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

Position polar_sample(std::mt19937_64& rng, const Position& centre, double radius) {
  const double r = radius * std::sqrt(uniform(rng, 0.0, 1.0));
  const double theta = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  return {centre.x + r * std::cos(theta), centre.y + r * std::sin(theta)};
}

}  // namespace

Instance generate_instance(const GeneratorConfig& config) {
  check_config(config);
  std::mt19937_64 rng(config.seed);

  Instance inst;
  inst.depot = {0.0, 0.0};
  inst.fleet = config.fleet;
  inst.buffer = config.buffer;
  inst.weights = config.weights;

  for (int i = 1; i <= config.num_spaces; ++i) {
    ParkingSpace space;
    space.id = i;
    space.position = polar_sample(rng, inst.depot, config.service_radius);
    space.window = config.working_hours;
    space.service_time =
        std::round(uniform(rng, config.parking_span.min, config.parking_span.max));
    inst.spaces.push_back(space);
  }

  std::vector<LocationPoint> points;
  for (const auto& space : inst.spaces) {
    for (int p = 0; p < config.locations_per_space; ++p) {
      const double walk = uniform(rng, config.walk_range.min, config.walk_range.max);
      // Shrunk slightly so the point stays strictly inside the walking range.
      points.push_back({polar_sample(rng, space.position, 0.999 * walk), walk});
    }
  }
  std::shuffle(points.begin(), points.end(), rng);

  const TimeWindow hours = config.working_hours;
  std::size_t next = 0;
  while (next < points.size()) {
    const auto remaining = static_cast<int>(points.size() - next);
    const int k = std::min(
        remaining,
        uniform_int(rng, config.locations_per_customer.min, config.locations_per_customer.max));

    Customer customer;
    customer.id = static_cast<int>(inst.customers.size());
    customer.demand = uniform_int(rng, config.demand.min, config.demand.max);

    // One disjoint slot of the working day per location keeps the windows
    // pairwise non-overlapping.
    const double slot_len = hours.length() / k;
    for (int j = 0; j < k; ++j) {
      const double slot_start = std::ceil(hours.start + j * slot_len);
      const double slot_end = std::floor(hours.start + (j + 1) * slot_len);
      const double span = std::min(
          std::round(uniform(rng, config.customer_span.min, config.customer_span.max)),
          slot_end - slot_start);
      const double latest = slot_end - span;
      const double start =
          latest > slot_start ? static_cast<double>(uniform_int(
                                    rng, static_cast<int>(slot_start), static_cast<int>(latest)))
                              : slot_start;
      const LocationPoint& pt = points[next + static_cast<std::size_t>(j)];
      customer.locations.push_back({pt.position, {start, start + span}, pt.max_walk});
    }
    next += static_cast<std::size_t>(k);
    inst.customers.push_back(std::move(customer));
  }
  return inst;
}

Assignment assign_customers(const Instance& instance) {
  Assignment result;
  for (const auto& customer : instance.customers) {
    std::optional<AssignedLocation> best;
    for (std::size_t k = 0; k < customer.locations.size(); ++k) {
      const auto& loc = customer.locations[k];
      for (const auto& space : instance.spaces) {
        const double d = distance(loc.position, space.position);
        if (d > loc.max_walk) continue;
        // Iteration order already breaks ties by (location, space id).
        if (!best || d < best->distance_km) {
          best = AssignedLocation{space.id, static_cast<int>(k), d};
        }
      }
    }
    if (best) {
      result.assigned.emplace(customer.id, *best);
    } else {
      result.unassignable.push_back(customer.id);
    }
  }
  return result;
}

namespace {

bool valid_window(const TimeWindow& w) {
  return std::isfinite(w.start) && std::isfinite(w.end) && 0.0 <= w.start && w.start <= w.end &&
         w.end <= 1440.0;
}

bool finite(const Position& p) { return std::isfinite(p.x) && std::isfinite(p.y); }

}  // namespace

std::vector<Violation> validate_instance(const Instance& inst) {
  std::vector<Violation> out;
  auto add = [&out](std::string entity, std::string rule) {
    out.push_back({std::move(entity), std::move(rule)});
  };

  if (!finite(inst.depot)) add("depot", "non-finite position");
  if (!(inst.weights.fleet > 0.0) || !(inst.weights.travel > 0.0))
    add("weights", "weights must be strictly positive");
  if (!(inst.buffer >= 0.0)) add("buffer", "negative buffer time");

  const auto& f = inst.fleet;
  if (f.max_lockers < 1) add("fleet", "max_lockers must be at least 1");
  if (f.capacity <= 0) add("fleet", "non-positive capacity");
  if (!(f.speed > 0.0)) add("fleet", "non-positive speed");
  if (!(f.fixed_cost >= 0.0)) add("fleet", "negative fixed cost");
  if (!(f.unit_travel_cost >= 0.0)) add("fleet", "negative unit travel cost");

  for (std::size_t k = 0; k < inst.spaces.size(); ++k) {
    const auto& s = inst.spaces[k];
    const std::string name = "space " + std::to_string(s.id);
    if (s.id != static_cast<int>(k) + 1) add(name, "space ids must be 1..I in order");
    if (!finite(s.position)) add(name, "non-finite position");
    if (!valid_window(s.window) || !(s.window.end > s.window.start))
      add(name, "invalid parking window");
    if (!(s.service_time > 0.0)) add(name, "non-positive service time");
  }

  for (std::size_t k = 0; k < inst.customers.size(); ++k) {
    const auto& c = inst.customers[k];
    const std::string name = "customer " + std::to_string(c.id);
    if (c.id != static_cast<int>(k)) add(name, "customer ids must be 0..N-1 in order");
    if (c.demand < 1) add(name, "demand must be at least 1");
    if (c.locations.empty()) add(name, "no locations");
    for (const auto& loc : c.locations) {
      if (!finite(loc.position)) add(name, "non-finite location position");
      if (!valid_window(loc.window)) add(name, "invalid location window");
      if (!(loc.max_walk > 0.0)) add(name, "non-positive max walk");
    }
    bool overlapping = false;
    for (std::size_t a = 0; a < c.locations.size(); ++a) {
      for (std::size_t b = a + 1; b < c.locations.size(); ++b) {
        if (overlap(c.locations[a].window, c.locations[b].window) > 0.0) overlapping = true;
      }
    }
    if (overlapping) add(name, "customer windows overlap");
  }
  return out;
}

std::string assignment_csv(const Assignment& assignment) {
  std::ostringstream os;
  os.precision(17);
  os << "customer_id,space_id,location_index,distance_km\n";
  for (const auto& [id, a] : assignment.assigned) {
    os << id << ',' << a.space_id << ',' << a.location_index << ',' << a.distance_km << '\n';
  }
  return os.str();
}

}  // namespace mplq

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mplq {

// Planar coordinates in km.
struct Position {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Position&) const = default;
};

double distance(const Position& a, const Position& b);

// Minutes since midnight.
struct TimeWindow {
  double start = 0.0;
  double end = 0.0;

  double length() const { return end - start; }
  bool operator==(const TimeWindow&) const = default;
};

// Length of the intersection of two windows, or a negative number when they
// are disjoint.
double overlap(const TimeWindow& a, const TimeWindow& b);

struct CustomerLocation {
  Position position;
  TimeWindow window;
  double max_walk = 1.0;  // km

  bool operator==(const CustomerLocation&) const = default;
};

struct Customer {
  int id = 0;
  int demand = 1;
  std::vector<CustomerLocation> locations;

  bool operator==(const Customer&) const = default;
};

struct ParkingSpace {
  int id = 1;  // node index, 1..I; the depot is node 0
  Position position;
  TimeWindow window;
  double service_time = 30.0;

  bool operator==(const ParkingSpace&) const = default;
};

struct FleetSpec {
  int max_lockers = 10;
  int capacity = 20;
  double speed = 0.7;  // km per minute
  double fixed_cost = 1.0;
  double unit_travel_cost = 1.0;  // per km

  bool operator==(const FleetSpec&) const = default;
};

struct ObjectiveWeights {
  double fleet = 5.0;   // W1
  double travel = 1.0;  // W2

  bool operator==(const ObjectiveWeights&) const = default;
};

struct Instance {
  Position depot;
  std::vector<ParkingSpace> spaces;
  std::vector<Customer> customers;
  FleetSpec fleet;
  double buffer = 10.0;  // minimum handover overlap, minutes
  ObjectiveWeights weights;

  // Position of a network node: 0 is the depot, i >= 1 is space i.
  const Position& node_position(int node) const;
  const ParkingSpace& space(int id) const { return spaces.at(static_cast<std::size_t>(id - 1)); }

  bool operator==(const Instance&) const = default;
};

template <typename T>
struct Range {
  T min{};
  T max{};

  bool valid() const { return min <= max; }
};

struct GeneratorConfig {
  int num_spaces = 5;
  int locations_per_space = 5;
  double service_radius = 5.0;  // km around the depot
  Range<int> locations_per_customer{1, 4};
  TimeWindow working_hours{540.0, 1080.0};
  Range<int> demand{1, 4};
  double walk_speed = 0.08;  // km/min, carried for reference only
  Range<double> walk_range{0.1, 1.0};
  Range<double> customer_span{30.0, 90.0};
  // Service time S_i of each parking space, i.e. the sub-interval length.
  Range<double> parking_span{30.0, 70.0};
  std::uint64_t seed = 42;

  FleetSpec fleet{};
  double buffer = 10.0;
  ObjectiveWeights weights{};
};

// Throws ConfigError when a range is empty or a count is negative.
void check_config(const GeneratorConfig& config);

Instance generate_instance(const GeneratorConfig& config);

struct AssignedLocation {
  int space_id = 0;
  int location_index = 0;
  double distance_km = 0.0;

  bool operator==(const AssignedLocation&) const = default;
};

struct Assignment {
  std::map<int, AssignedLocation> assigned;  // keyed by customer id
  std::vector<int> unassignable;

  bool operator==(const Assignment&) const = default;
};

// Nearest-space clustering with the parking spaces as fixed centroids.
Assignment assign_customers(const Instance& instance);

struct Violation {
  std::string entity;
  std::string rule;
};

std::vector<Violation> validate_instance(const Instance& instance);

// --- persistence -----------------------------------------------------------

struct LoadResult {
  Instance instance;
  std::vector<std::string> warnings;  // ignored unknown fields
};

std::string instance_to_json(const Instance& instance, const std::string& meta = {});
LoadResult instance_from_json(const std::string& text);

void save_instance(const Instance& instance, const std::filesystem::path& path,
                   const std::string& meta = {});
LoadResult load_instance(const std::filesystem::path& path);

// Saves to `path` and loads it back.
Instance roundtrip_instance(const Instance& instance, const std::filesystem::path& path);

std::string assignment_csv(const Assignment& assignment);

}  // namespace mplq

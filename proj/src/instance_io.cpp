#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mplq/errors.hpp"
#include "mplq/instance.hpp"

namespace mplq {

using nlohmann::json;

namespace {

json to_json(const Position& p) { return json::array({p.x, p.y}); }
json to_json(const TimeWindow& w) { return json::array({w.start, w.end}); }

// Walks a parsed document while keeping a path for error messages.
class Reader {
 public:
  Reader(const json& node, std::string path, std::vector<std::string>& warnings)
      : node_(node), path_(std::move(path)), warnings_(warnings) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("instance file: field '" + path_ + "': " + what);
  }

  Reader at(const std::string& key) const {
    if (!node_.is_object()) fail("expected an object");
    auto it = node_.find(key);
    if (it == node_.end()) {
      throw ParseError("instance file: field '" + child_path(key) + "': missing");
    }
    return {*it, child_path(key), warnings_};
  }

  bool has(const std::string& key) const { return node_.is_object() && node_.contains(key); }

  void expect_keys(std::initializer_list<const char*> known) const {
    std::set<std::string> allowed(known.begin(), known.end());
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (!allowed.count(it.key())) {
        warnings_.push_back("ignoring unknown field '" + child_path(it.key()) + "'");
      }
    }
  }

  std::vector<Reader> items() const {
    if (!node_.is_array()) fail("expected an array");
    std::vector<Reader> out;
    for (std::size_t i = 0; i < node_.size(); ++i) {
      out.push_back({node_[i], path_ + "[" + std::to_string(i) + "]", warnings_});
    }
    return out;
  }

  double number() const {
    if (!node_.is_number()) fail("expected a number");
    return node_.get<double>();
  }

  int integer() const {
    if (!node_.is_number_integer()) fail("expected an integer");
    return node_.get<int>();
  }

  std::string string() const {
    if (!node_.is_string()) fail("expected a string");
    return node_.get<std::string>();
  }

  std::pair<double, double> pair() const {
    if (!node_.is_array() || node_.size() != 2 || !node_[0].is_number() || !node_[1].is_number())
      fail("expected an array of 2 numbers");
    return {node_[0].get<double>(), node_[1].get<double>()};
  }

  Position position() const {
    auto [x, y] = pair();
    return {x, y};
  }

  TimeWindow window() const {
    auto [s, e] = pair();
    return {s, e};
  }

 private:
  std::string child_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const json& node_;
  std::string path_;
  std::vector<std::string>& warnings_;
};

}  // namespace

std::string instance_to_json(const Instance& inst, const std::string& meta) {
  json doc;
  if (!meta.empty()) doc["meta"] = meta;
  doc["depot"] = to_json(inst.depot);
  doc["spaces"] = json::array();
  for (const auto& s : inst.spaces) {
    doc["spaces"].push_back({{"id", s.id},
                             {"position", to_json(s.position)},
                             {"window", to_json(s.window)},
                             {"service_time", s.service_time}});
  }
  doc["customers"] = json::array();
  for (const auto& c : inst.customers) {
    json locs = json::array();
    for (const auto& l : c.locations) {
      locs.push_back({{"position", to_json(l.position)},
                      {"window", to_json(l.window)},
                      {"max_walk", l.max_walk}});
    }
    doc["customers"].push_back({{"id", c.id}, {"demand", c.demand}, {"locations", locs}});
  }
  doc["fleet"] = {{"max_lockers", inst.fleet.max_lockers},
                  {"capacity", inst.fleet.capacity},
                  {"speed", inst.fleet.speed},
                  {"fixed_cost", inst.fleet.fixed_cost},
                  {"unit_travel_cost", inst.fleet.unit_travel_cost}};
  doc["buffer_min"] = inst.buffer;
  doc["weights"] = json::array({inst.weights.fleet, inst.weights.travel});
  return doc.dump(1) + "\n";
}

LoadResult instance_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("instance file: ") + e.what());
  }

  LoadResult result;
  Reader root(doc, "", result.warnings);
  if (!doc.is_object()) root.fail("expected a top-level object");
  root.expect_keys({"meta", "depot", "spaces", "customers", "fleet", "buffer_min", "weights"});

  Instance& inst = result.instance;
  inst.depot = root.at("depot").position();
  for (const auto& s : root.at("spaces").items()) {
    s.expect_keys({"id", "position", "window", "service_time"});
    inst.spaces.push_back({s.at("id").integer(), s.at("position").position(),
                           s.at("window").window(), s.at("service_time").number()});
  }
  for (const auto& c : root.at("customers").items()) {
    c.expect_keys({"id", "demand", "locations"});
    Customer customer;
    customer.id = c.at("id").integer();
    customer.demand = c.at("demand").integer();
    for (const auto& l : c.at("locations").items()) {
      l.expect_keys({"position", "window", "max_walk"});
      customer.locations.push_back(
          {l.at("position").position(), l.at("window").window(), l.at("max_walk").number()});
    }
    inst.customers.push_back(std::move(customer));
  }
  const Reader fleet = root.at("fleet");
  fleet.expect_keys({"max_lockers", "capacity", "speed", "fixed_cost", "unit_travel_cost"});
  inst.fleet.max_lockers = fleet.at("max_lockers").integer();
  inst.fleet.capacity = fleet.at("capacity").integer();
  inst.fleet.speed = fleet.at("speed").number();
  inst.fleet.fixed_cost = fleet.at("fixed_cost").number();
  inst.fleet.unit_travel_cost = fleet.at("unit_travel_cost").number();
  inst.buffer = root.at("buffer_min").number();
  auto [w1, w2] = root.at("weights").pair();
  inst.weights = {w1, w2};
  return result;
}

void save_instance(const Instance& instance, const std::filesystem::path& path,
                   const std::string& meta) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << instance_to_json(instance, meta);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

LoadResult load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return instance_from_json(buf.str());
}

Instance roundtrip_instance(const Instance& instance, const std::filesystem::path& path) {
  save_instance(instance, path);
  return load_instance(path).instance;
}

}  // namespace mplq

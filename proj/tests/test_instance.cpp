#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "mplq/errors.hpp"
#include "mplq/instance.hpp"
#include "support.hpp"

using namespace mplq;
using testing_support::euclid;

namespace {

GeneratorConfig day_config() {
  GeneratorConfig c;
  c.num_spaces = 5;
  c.locations_per_space = 5;
  c.service_radius = 5.0;
  c.working_hours = {540.0, 1080.0};
  c.demand = {1, 4};
  c.walk_range = {0.1, 1.0};
  c.customer_span = {30.0, 90.0};
  c.parking_span = {30.0, 70.0};
  c.seed = 42;
  return c;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("mplq_test_" + name);
}

}  // namespace

TEST(Generate, DefaultDayHasFiveSpacesAndTwentyFivePoints) {
  const Instance inst = generate_instance(day_config());
  ASSERT_EQ(inst.spaces.size(), 5u);
  std::size_t points = 0;
  for (const auto& c : inst.customers) points += c.locations.size();
  EXPECT_EQ(points, 25u);
  EXPECT_TRUE(validate_instance(inst).empty());
}

TEST(Generate, SameSeedGivesByteIdenticalFiles) {
  const auto a = instance_to_json(generate_instance(day_config()));
  const auto b = instance_to_json(generate_instance(day_config()));
  EXPECT_EQ(a, b);
  auto other = day_config();
  other.seed = 43;
  EXPECT_NE(a, instance_to_json(generate_instance(other)));
}

TEST(Generate, ZeroLocationsGivesNoCustomers) {
  auto c = day_config();
  c.locations_per_space = 0;
  const Instance inst = generate_instance(c);
  EXPECT_EQ(inst.spaces.size(), 5u);
  EXPECT_TRUE(inst.customers.empty());
  EXPECT_TRUE(validate_instance(inst).empty());
}

TEST(Generate, InvalidRangesAreRejected) {
  auto c = day_config();
  c.demand = {4, 1};
  EXPECT_THROW(generate_instance(c), ConfigError);
  c = day_config();
  c.walk_range = {0.0, 1.0};
  EXPECT_THROW(generate_instance(c), ConfigError);
  c = day_config();
  c.num_spaces = -1;
  EXPECT_THROW(check_config(c), ConfigError);
}

TEST(Generate, PropertiesHoldAcrossSeeds) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    auto c = day_config();
    c.seed = seed;
    c.num_spaces = 1 + static_cast<int>(seed % 7);
    c.locations_per_space = static_cast<int>(seed % 11);
    const Instance inst = generate_instance(c);
    for (const auto& s : inst.spaces) {
      EXPECT_LE(euclid(s.position, inst.depot), c.service_radius + 1e-12);
      EXPECT_GE(s.service_time, c.parking_span.min);
      EXPECT_LE(s.service_time, c.parking_span.max);
    }
    for (const auto& cust : inst.customers) {
      for (std::size_t a = 0; a < cust.locations.size(); ++a) {
        const auto& w = cust.locations[a].window;
        EXPECT_GE(w.start, c.working_hours.start);
        EXPECT_LE(w.end, c.working_hours.end);
        for (std::size_t b = a + 1; b < cust.locations.size(); ++b) {
          EXPECT_LE(overlap(w, cust.locations[b].window), 0.0) << "seed " << seed;
        }
      }
    }
    EXPECT_TRUE(validate_instance(inst).empty()) << "seed " << seed;
  }
}

TEST(Assign, SingleSpaceTakesEveryoneInRange) {
  Instance inst = testing_support::instance_with_spaces({{0, 0}});
  for (int i = 0; i < 4; ++i) {
    inst.customers.push_back({i, 1, {{{0.1 * i, 0.2}, {600, 660}, 1.0}}});
  }
  const Assignment a = assign_customers(inst);
  EXPECT_EQ(a.assigned.size(), 4u);
  for (const auto& [id, loc] : a.assigned) EXPECT_EQ(loc.space_id, 1);
  EXPECT_TRUE(a.unassignable.empty());
}

TEST(Assign, NearestSpaceWins) {
  Instance inst = testing_support::instance_with_spaces({{0, 0}, {10, 0}});
  inst.customers.push_back({0, 1, {{{1, 0}, {600, 660}, 2.0}}});
  const Assignment a = assign_customers(inst);
  ASSERT_EQ(a.assigned.count(0), 1u);
  EXPECT_EQ(a.assigned.at(0).space_id, 1);
  EXPECT_DOUBLE_EQ(a.assigned.at(0).distance_km, 1.0);
}

TEST(Assign, OutOfWalkingRangeIsUnassignable) {
  Instance inst = testing_support::instance_with_spaces({{0, 0}});
  inst.customers.push_back({0, 1, {{{5, 0}, {600, 660}, 1.0}}});
  const Assignment a = assign_customers(inst);
  EXPECT_TRUE(a.assigned.empty());
  EXPECT_EQ(a.unassignable, std::vector<int>{0});
}

TEST(Assign, RespectsWalkRangeAndIsDeterministic) {
  for (std::uint64_t seed = 1; seed < 30; ++seed) {
    auto c = day_config();
    c.seed = seed;
    c.walk_range = {0.5, 3.0};
    const Instance inst = generate_instance(c);
    const Assignment a = assign_customers(inst);
    EXPECT_EQ(a, assign_customers(inst));
    EXPECT_EQ(a.assigned.size() + a.unassignable.size(), inst.customers.size());
    for (const auto& [id, loc] : a.assigned) {
      const auto& l = inst.customers[static_cast<std::size_t>(id)].locations[static_cast<std::size_t>(loc.location_index)];
      const double d = euclid(l.position, inst.space(loc.space_id).position);
      EXPECT_LE(d, l.max_walk);
      EXPECT_DOUBLE_EQ(d, loc.distance_km);
      // No other (location, space) pair is strictly closer.
      for (const auto& other : inst.customers[static_cast<std::size_t>(id)].locations) {
        for (const auto& s : inst.spaces) {
          const double e = euclid(other.position, s.position);
          if (e <= other.max_walk) EXPECT_GE(e, d);
        }
      }
    }
  }
}

TEST(Validate, WellFormedInstanceIsClean) {
  EXPECT_TRUE(validate_instance(generate_instance(day_config())).empty());
}

TEST(Validate, OverlappingCustomerWindowsAreReported) {
  Instance inst = testing_support::instance_with_spaces({{0, 0}});
  inst.customers.push_back({0, 1, {{{0, 0}, {600, 700}, 1.0}, {{0, 0}, {650, 720}, 1.0}}});
  const auto v = validate_instance(inst);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].entity, "customer 0");
  EXPECT_EQ(v[0].rule, "customer windows overlap");
}

TEST(Validate, ZeroServiceTimeIsReported) {
  Instance inst = testing_support::instance_with_spaces({{0, 0}}, 0.0);
  const auto v = validate_instance(inst);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].entity, "space 1");
  EXPECT_EQ(v[0].rule, "non-positive service time");
}

TEST(Persist, RoundtripIsIdentity) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto c = day_config();
    c.seed = seed;
    const Instance inst = generate_instance(c);
    EXPECT_EQ(roundtrip_instance(inst, temp_file("roundtrip.json")), inst);
  }
}

TEST(Persist, TruncatedFileIsAParseError) {
  const auto text = instance_to_json(generate_instance(day_config()));
  const auto path = temp_file("truncated.json");
  {
    std::ofstream out(path);
    out << text.substr(0, text.size() / 2);
  }
  try {
    load_instance(path);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line"), std::string::npos) << e.what();
  }
}

TEST(Persist, WrongFieldTypeNamesTheField) {
  auto doc = instance_to_json(generate_instance(day_config()));
  const auto pos = doc.find("\"window\"");
  ASSERT_NE(pos, std::string::npos);
  doc.replace(pos, 8, "\"window\": \"x\", \"w\"");
  try {
    instance_from_json(doc);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("window"), std::string::npos) << e.what();
  }
}

TEST(Persist, UnknownFieldsAreIgnoredWithWarning) {
  auto doc = instance_to_json(generate_instance(day_config()));
  doc.insert(doc.find('{') + 1, "\"colour\": \"blue\",");
  const LoadResult r = instance_from_json(doc);
  EXPECT_EQ(r.instance, generate_instance(day_config()));
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_NE(r.warnings[0].find("colour"), std::string::npos);
}

TEST(Persist, AssignmentCsvHasHeaderAndRows) {
  const Instance inst = generate_instance(day_config());
  const Assignment a = assign_customers(inst);
  const auto text = assignment_csv(a);
  EXPECT_EQ(text.rfind("customer_id,space_id,location_index,distance_km\n", 0), 0u);
  EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')),
            a.assigned.size() + 1);
}

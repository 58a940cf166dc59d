#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "vertisafe/io.hpp"

using namespace vertisafe;

namespace {

const std::string kData = VERTISAFE_DATA_DIR;

std::string read(const std::string& name) {
  std::ifstream in(kData + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t error_line(const std::function<void()>& f) {
  try {
    f();
  } catch (const InputError& e) {
    return e.line();
  }
  ADD_FAILURE() << "no InputError";
  return 0;
}

const char* kSmall = R"({
  "w": "1",
  "nodes": [
    {"id": "a", "capacity": "unbounded"},
    {"id": "b", "capacity": 1}
  ],
  "links": [
    {"id": "e", "tail": "a", "head": "b", "tmin": "1", "tmax": "2.5", "backups": ["a", "b"]}
  ],
  "routes": [
    {"id": "R", "links": ["e"]}
  ]
})";

}  // namespace

TEST(Io, RoundTripsEveryFixture) {
  for (const char* n : {"example1.network.json", "example2.network.json", "example2_c2_3.network.json"}) {
    UamNetwork net = parse_network(read(n), n);
    EXPECT_EQ(serialize_network(parse_network(serialize_network(net))), serialize_network(net)) << n;
  }
  UamNetwork net = load_network(kData + "/example1.network.json");
  for (const char* s : {"example1_unsafe40.schedule.json", "example1_v4contention.schedule.json"}) {
    FlightSchedule sched = parse_schedule(net, read(s), s);
    EXPECT_EQ(serialize_schedule(net, parse_schedule(net, serialize_schedule(net, sched))), serialize_schedule(net, sched));
  }
}

TEST(Io, AcceptsIntegersForTimesAndCapacity) {
  UamNetwork net = parse_network(kSmall);
  EXPECT_EQ(net.link(0).max_travel, *Time::parse("2.5"));
  FlightSchedule s = parse_schedule(net, R"({"flights": [{"id": "f", "route": "R", "depart": 3}]})");
  EXPECT_EQ(s.flight(0).departure, Time::units(3));
}

TEST(Io, SyntaxErrorsCarryTheLine) {
  std::string text = kSmall;
  text.replace(text.find("\"b\", \"capacity\": 1}"), 19, "\"b\", \"capacity\": 1,}");
  EXPECT_EQ(error_line([&] { parse_network(text); }), 5u);
}

TEST(Io, SemanticErrorsPointAtTheOffendingValue) {
  std::string bad_tmax = kSmall;
  bad_tmax.replace(bad_tmax.find("\"2.5\""), 5, "\"0.5\"");
  EXPECT_EQ(error_line([&] { parse_network(bad_tmax); }), 8u);

  std::string bad_backup = kSmall;
  bad_backup.replace(bad_backup.find("[\"a\", \"b\"]"), 10, "[\"a\", \"z\"]");
  EXPECT_EQ(error_line([&] { parse_network(bad_backup); }), 8u);

  std::string bad_time = kSmall;
  bad_time.replace(bad_time.find("\"1\","), 4, "\"1.2345\",");
  EXPECT_EQ(error_line([&] { parse_network(bad_time); }), 2u);

  UamNetwork net = parse_network(kSmall);
  const char* sched = "{\n  \"flights\": [\n    {\"id\": \"f\", \"route\": \"R\", \"depart\": \"1\"},\n"
                      "    {\"id\": \"f\", \"route\": \"R\", \"depart\": \"2\"}\n  ]\n}";
  EXPECT_EQ(error_line([&] { parse_schedule(net, sched); }), 4u);
}

TEST(Io, RejectsUnknownAndMissingKeys) {
  std::string extra = kSmall;
  extra.replace(extra.find("\"w\": \"1\","), 9, "\"w\": \"1\", \"colour\": 3,");
  EXPECT_THROW(parse_network(extra), InputError);
  std::string missing = kSmall;
  missing.replace(missing.find("\"tmin\": \"1\", "), 13, "");
  EXPECT_EQ(error_line([&] { parse_network(missing); }), 8u);
  UamNetwork net = parse_network(kSmall);
  EXPECT_THROW(parse_schedule(net, R"({"flights": [{"id": "f", "route": "Q", "depart": "1"}]})"), InputError);
  EXPECT_THROW(parse_schedule(net, R"({"flights": [{"id": "f", "route": "R", "depart": "1", "x": 0}]})"), InputError);
}

TEST(Io, MissingFileNamesThePath) {
  try {
    load_network(kData + "/does-not-exist.json");
    FAIL();
  } catch (const std::exception& e) {
    EXPECT_NE(std::string(e.what()).find("does-not-exist.json"), std::string::npos);
  }
}

#include <gtest/gtest.h>

#include "vertisafe/io.hpp"
#include "vertisafe/simulator.hpp"

using namespace vertisafe;

namespace {

const std::string kData = VERTISAFE_DATA_DIR;

struct Fixture {
  UamNetwork net;
  FlightSchedule schedule;
  TimelineTable table;

  Fixture(const std::string& network, const std::string& sched)
      : net(load_network(kData + "/" + network)), schedule(load_schedule(net, kData + "/" + sched)), table(net, schedule) {}

  NodeIndex node(const char* id) const { return *net.find_node(id); }
  FlightIndex flight(const std::string& id) const {
    for (FlightIndex j = 0; j < schedule.size(); ++j)
      if (schedule.flight(j).id == id) return j;
    throw std::out_of_range(id);
  }

  Realization slowest() const {
    std::vector<std::vector<Time>> times;
    for (FlightIndex j = 0; j < schedule.size(); ++j) {
      times.emplace_back();
      for (LinkIndex e : table.route_of(j).links) times.back().push_back(net.link(e).max_travel);
    }
    return Realization(table, times);
  }
};

}  // namespace

TEST(Simulator, EarlyThirdFlightSurvivesWithTheRightChoice) {
  Fixture f("example2.network.json", "example2_delta0.schedule.json");
  const Realization real = f.slowest();
  const NodeIndex v4 = f.node("v4");
  auto status = classify_flights(f.table, real, v4, Time::units(15));
  EXPECT_EQ(status[f.flight("S1")].state, FlightState::rerouted);
  EXPECT_EQ(status[f.flight("S2")].state, FlightState::landed_held);
  EXPECT_EQ(status[f.flight("S2")].final_node, f.node("v2"));
  EXPECT_EQ(status[f.flight("S3")].state, FlightState::unaffected);

  auto good = simulate_closure(f.table, real, v4, Time::units(15), {{f.flight("S1"), f.node("v2")}});
  EXPECT_TRUE(good.safe());
  auto bad = simulate_closure(f.table, real, v4, Time::units(15), {{f.flight("S1"), f.node("v3")}});
  ASSERT_FALSE(bad.safe());
  EXPECT_EQ(bad.violations[0].node, f.node("v3"));
  EXPECT_EQ(bad.violations[0].at, Time::units(16));
  EXPECT_EQ(bad.violations[0].occupancy, 2);
}

TEST(Simulator, LateThirdFlightOverflowsUnderEveryChoice) {
  Fixture f("example2.network.json", "example2_delta10.schedule.json");
  const Realization real = f.slowest();
  for (const char* backup : {"v2", "v3"}) {
    auto trace = simulate_closure(f.table, real, f.node("v4"), Time::units(15), {{f.flight("S1"), f.node(backup)}});
    EXPECT_FALSE(trace.safe()) << backup;
  }
}

TEST(Simulator, RejectsInvalidChoices) {
  Fixture f("example2.network.json", "example2_delta0.schedule.json");
  const Realization real = f.slowest();
  const NodeIndex v4 = f.node("v4");
  const Time at = Time::units(15);
  EXPECT_THROW(simulate_closure(f.table, real, v4, at, {}), InvalidChoice);
  EXPECT_THROW(simulate_closure(f.table, real, v4, at, {{f.flight("S1"), v4}}), InvalidChoice);
  EXPECT_THROW(simulate_closure(f.table, real, v4, at, {{f.flight("S1"), f.node("v1")}}), InvalidChoice);
}

TEST(Simulator, SourceClosureCancelsEverything) {
  Fixture f("example2.network.json", "example2_delta10.schedule.json");
  const Realization real = f.slowest();
  auto trace = simulate_closure(f.table, real, f.node("v1"), Time{}, {});
  EXPECT_TRUE(trace.safe());
  for (const auto& st : trace.flights) EXPECT_EQ(st.state, FlightState::canceled);
  for (const auto& steps : trace.occupancy)
    for (const auto& [t, n] : steps) EXPECT_EQ(n, 0);
}

TEST(Simulator, SampledArrivalsStayInsideTheBounds) {
  Fixture f("example1.network.json", "example1_unsafe40.schedule.json");
  std::mt19937_64 rng(9);
  bool hit_min = false, hit_max = false;
  for (int k = 0; k < 200; ++k) {
    Realization real = sample_realization(f.table, rng);
    for (FlightIndex j = 0; j < f.schedule.size(); ++j) {
      const FlightTimeline& tl = f.table.timeline(j);
      const Route& r = f.table.route_of(j);
      for (std::size_t p = 0; p < r.size(); ++p) {
        const Link& l = f.net.link(r.links[p]);
        ASSERT_GE(real.travel(j)[p], l.min_travel);
        ASSERT_LE(real.travel(j)[p], l.max_travel);
        ASSERT_GE(real.arrival(j, p), tl.earliest_arrival[p]);
        ASSERT_LE(real.arrival(j, p), tl.latest_arrival[p]);
        hit_min |= real.travel(j)[p] == l.min_travel;
        hit_max |= real.travel(j)[p] == l.max_travel;
      }
    }
  }
  EXPECT_TRUE(hit_min);
  EXPECT_TRUE(hit_max);
}

TEST(Simulator, FixedTravelTimesAreDeterministic) {
  NetworkDescription d = load_network(kData + "/example2.network.json").describe();
  for (auto& l : d.links) l.max_travel = l.min_travel;
  UamNetwork net = build_network(d);
  FlightSchedule s = load_schedule(net, kData + "/example2_delta0.schedule.json");
  TimelineTable table(net, s);
  Realization a = sample_realization(table, std::uint64_t{1});
  Realization b = sample_realization(table, std::uint64_t{2});
  for (FlightIndex j = 0; j < s.size(); ++j)
    for (std::size_t p = 0; p < table.route_of(j).size(); ++p) {
      EXPECT_EQ(a.arrival(j, p), table.timeline(j).earliest_arrival[p]);
      EXPECT_EQ(a.arrival(j, p), b.arrival(j, p));
    }
}

TEST(Simulator, SameSeedSameRealization) {
  Fixture f("example1.network.json", "example1_unsafe40.schedule.json");
  Realization a = sample_realization(f.table, std::uint64_t{77});
  Realization b = sample_realization(f.table, std::uint64_t{77});
  for (FlightIndex j = 0; j < f.schedule.size(); ++j)
    for (std::size_t p = 0; p < f.table.route_of(j).size(); ++p) EXPECT_EQ(a.arrival(j, p), b.arrival(j, p));
}

TEST(Soundness, WorstCaseSafeClosuresNeverOverflow) {
  Fixture f("example2.network.json", "example2_delta0.schedule.json");
  for (const char* v : {"v2", "v3", "v4"}) {
    SoundnessSummary s = check_soundness(f.table, f.node(v), 200, 5);
    EXPECT_TRUE(s.sound()) << v;
  }
  SoundnessSummary s = check_soundness(f.table, f.node("v4"), 200, 5);
  EXPECT_GT(s.scenarios, 0u);
  EXPECT_EQ(s.realizations, s.scenarios * 200);
}

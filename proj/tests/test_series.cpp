#include <gtest/gtest.h>

#include <sstream>

#include "vertisafe/io.hpp"
#include "vertisafe/series.hpp"

using namespace vertisafe;

namespace {

const std::string kData = VERTISAFE_DATA_DIR;

struct Fixture {
  UamNetwork net;
  FlightSchedule schedule;
  TimelineTable table;

  explicit Fixture(const std::string& sched)
      : net(load_network(kData + "/example2.network.json")), schedule(load_schedule(net, kData + "/" + sched)), table(net, schedule) {}

  NodeIndex node(const char* id) const { return *net.find_node(id); }
};

// Rows alternate between event times and gap midpoints; a time strictly
// between two events is represented by the midpoint of its gap.
const SeriesRow& row_at(const SeriesTable& t, Time at) {
  for (std::size_t i = 0; i + 1 < t.rows.size(); ++i) {
    if (t.rows[i].at == at) return t.rows[i];
    if (t.rows[i].at < at && at < t.rows[i + 1].at) return t.rows[i % 2 == 1 ? i : i + 1];
  }
  throw std::out_of_range("no row covers " + at.to_string());
}

using Values = std::vector<std::optional<std::int64_t>>;

}  // namespace

TEST(Series, NodeColumnsAndValuesLate) {
  Fixture f("example2_delta10.schedule.json");
  SeriesTable t = node_series(f.table, f.node("v4"), f.node("v2"));
  EXPECT_EQ(t.columns, (std::vector<std::string>{"N_R", "fixed:e1", "var:e3"}));
  const SeriesRow& r = row_at(t, Time::units(15));
  EXPECT_FALSE(r.safe);
  EXPECT_EQ(r.values, (Values{1, 1, std::nullopt}));
  EXPECT_EQ(r.capacity, 2);
}

TEST(Series, NodeColumnsAndValuesEarly) {
  Fixture f("example2_delta0.schedule.json");
  SeriesTable t = node_series(f.table, f.node("v4"), f.node("v2"));
  const SeriesRow& r = row_at(t, Time::units(15));
  EXPECT_TRUE(r.safe);
  EXPECT_EQ(r.values, (Values{0, 1, 1}));
}

TEST(Series, SafeRowsFitTheCapacity) {
  Fixture f("example2_delta0.schedule.json");
  for (const char* closed : {"v2", "v3", "v4"})
    for (const char* seen : {"v2", "v3", "v4"}) {
      if (std::string(closed) == seen) continue;
      SeriesTable t = node_series(f.table, f.node(closed), f.node(seen));
      for (const auto& r : t.rows) {
        if (!r.safe) continue;
        std::int64_t sum = 0;
        for (const auto& v : r.values) sum += v.value();
        EXPECT_LE(sum, *r.capacity) << closed << " " << seen << " " << r.at;
      }
    }
}

TEST(Series, SourceWithoutInboundLinksHasOnlyTheBaseline) {
  Fixture f("example2_delta10.schedule.json");
  SeriesTable t = node_series(f.table, f.node("v4"), f.node("v1"));
  EXPECT_EQ(t.columns, (std::vector<std::string>{"N_R"}));
  for (const auto& r : t.rows) {
    EXPECT_FALSE(r.capacity.has_value());
    EXPECT_EQ(r.values, (Values{0}));
  }
  std::ostringstream ss;
  t.write_csv(ss);
  EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), "t_c,N_R,capacity,status");
  EXPECT_NE(ss.str().find(",0,unbounded,"), std::string::npos);
}

TEST(Series, LinkRedistribution) {
  Fixture f("example2_delta0.schedule.json");
  LinkIndex e3 = *f.net.find_link("e3");
  SeriesTable t = link_series(f.table, f.node("v4"), e3);
  EXPECT_EQ(t.columns, (std::vector<std::string>{"supply", "to:v2", "to:v3"}));
  EXPECT_EQ(row_at(t, Time::units(15)).values, (Values{1, 1, 0}));
  EXPECT_THROW(link_series(f.table, f.node("v2"), e3), UnknownObserver);
}

TEST(Series, CsvMarksInfeasibleRows) {
  Fixture f("example2_delta10.schedule.json");
  std::ostringstream ss;
  node_series(f.table, f.node("v4"), f.node("v2")).write_csv(ss);
  EXPECT_NE(ss.str().find(",1,1,x,2,infeasible\n"), std::string::npos) << ss.str();
}

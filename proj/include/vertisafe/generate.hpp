#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "vertisafe/model.hpp"
#include "vertisafe/verify.hpp"

namespace vertisafe {

class GenerationBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GenerateOptions {
  std::size_t count = 1;
  std::uint64_t seed = 0;
  std::optional<Time> horizon;  // departures drawn from [0, horizon]; 3 units per flight by default
  std::uint64_t attempts = 0;   // total draws allowed; 1000 per flight by default
  OccupancySemantics semantics = OccupancySemantics::right_open;
};

namespace detail {

/// Peak simultaneous occupancy of `extra` together with the intervals of
/// `others` that meet it.
inline std::int64_t peak_with(const std::vector<TimeInterval>& others, TimeInterval extra, OccupancySemantics sem) {
  std::vector<Occupant> occ;
  occ.push_back({0, extra});
  for (const auto& iv : others) {
    const bool meets = sem == OccupancySemantics::closed ? !(iv.hi < extra.lo || extra.hi < iv.lo)
                                                         : (iv.lo < extra.hi && extra.lo < iv.hi);
    if (meets) occ.push_back({0, iv});
  }
  if (occ.size() == 1) return 1;
  return OccupancySweep(std::move(occ), sem).max_overall();
}

}  // namespace detail

/// Draws flights one at a time (uniform route, uniform departure on a
/// millisecond grid) and keeps each draw that leaves the schedule feasible.
inline FlightSchedule generate_schedule(const UamNetwork& net, const GenerateOptions& opt) {
  if (opt.count == 0) throw std::invalid_argument("count must be at least 1");
  if (net.routes().empty()) throw std::invalid_argument("network has no routes");
  const Time horizon = opt.horizon.value_or(Time::units(3 * static_cast<std::int64_t>(opt.count)));
  const std::uint64_t budget = opt.attempts ? opt.attempts : 1000 * static_cast<std::uint64_t>(opt.count);
  const std::int64_t step = Time::kTicksPerUnit / 1000;

  std::mt19937_64 rng(opt.seed);
  std::uniform_int_distribution<std::size_t> pick_route(0, net.routes().size() - 1);
  std::uniform_int_distribution<std::int64_t> pick_depart(0, horizon.ticks() / step);

  std::vector<std::vector<TimeInterval>> busy(net.nodes().size());
  std::vector<Flight> flights;
  std::uint64_t used = 0;
  while (flights.size() < opt.count) {
    if (used++ >= budget)
      throw GenerationBudgetExceeded("placed " + std::to_string(flights.size()) + " of " + std::to_string(opt.count) +
                                     " flights within " + std::to_string(budget) + " attempts");
    Flight f;
    f.id = "F" + std::to_string(flights.size() + 1);
    f.route = pick_route(rng);
    f.departure = Time::from_ticks(pick_depart(rng) * step);
    const FlightTimeline tl = compute_timeline(net, f);
    const Route& r = net.route(f.route);
    bool ok = true;
    for (std::size_t p = 0; p < r.size() && ok; ++p) {
      const NodeIndex v = r.nodes[p + 1];
      const Capacity cap = net.node(v).capacity;
      if (!cap.bounded()) continue;
      ok = cap.admits(detail::peak_with(busy[v], tl.occupancy(p), opt.semantics));
    }
    if (!ok) continue;
    for (std::size_t p = 0; p < r.size(); ++p) busy[r.nodes[p + 1]].push_back(tl.occupancy(p));
    flights.push_back(std::move(f));
  }
  return FlightSchedule(std::move(flights));
}

struct BenchmarkRow {
  std::size_t size = 0;
  double seconds = 0;
  bool safe = false;
  std::size_t scenarios = 0;
};

struct BenchmarkResult {
  std::vector<BenchmarkRow> rows;
  std::optional<double> exponent;  // least-squares slope of log time on log size
};

inline std::optional<double> fit_exponent(const std::vector<BenchmarkRow>& rows) {
  if (rows.size() < 2) return std::nullopt;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(rows.size());
  for (const auto& r : rows) {
    const double x = std::log(static_cast<double>(r.size));
    const double y = std::log(std::max(r.seconds, 1e-9));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0) return std::nullopt;
  return (n * sxy - sx * sy) / den;
}

/// Times full worst-case 1-closure verification of a generated schedule
/// for each size, keeping the fastest of `repeats` runs.
inline BenchmarkResult run_benchmark(const UamNetwork& net, const std::vector<std::size_t>& sizes, std::uint64_t seed,
                                     unsigned jobs = 1, unsigned repeats = 1) {
  if (!std::is_sorted(sizes.begin(), sizes.end())) throw std::invalid_argument("sizes must be ascending");
  BenchmarkResult out;
  for (std::size_t n : sizes) {
    GenerateOptions g;
    g.count = n;
    g.seed = seed;
    const FlightSchedule schedule = generate_schedule(net, g);
    VerifyOptions opt;
    opt.mode = SafetyCase::worst;
    opt.jobs = jobs;
    opt.keep_records = false;
    BenchmarkRow row;
    row.size = n;
    for (unsigned k = 0; k < std::max(1u, repeats); ++k) {
      const auto start = std::chrono::steady_clock::now();
      const TimelineTable table(net, schedule);
      const VerificationReport rep = verify(table, opt);
      const auto stop = std::chrono::steady_clock::now();
      const double secs = std::chrono::duration<double>(stop - start).count();
      if (k == 0 || secs < row.seconds) row.seconds = secs;
      row.safe = rep.safe();
      row.scenarios = 0;
      for (const auto& nv : rep.nodes) row.scenarios += nv.scenarios;
    }
    out.rows.push_back(row);
  }
  out.exponent = fit_exponent(out.rows);
  return out;
}

}  // namespace vertisafe

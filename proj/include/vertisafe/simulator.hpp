#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "vertisafe/closure.hpp"
#include "vertisafe/model.hpp"
#include "vertisafe/transport.hpp"

namespace vertisafe {

class Realization;

/// Deterministic given the engine state. Each link time is uniform over its
/// bounds, except that each bound is hit exactly with probability
/// `endpoint_share`.
template <typename Engine>
Realization sample_realization(const TimelineTable& table, Engine& rng, double endpoint_share = 0.05);

/// Concrete travel times for every flight on every link of its route.
class Realization {
 public:
  Realization() = default;
  /// `times[j][p]`: travel time of flight j on the link at route position p.
  Realization(const TimelineTable& table, const std::vector<std::vector<Time>>& times) {
    start_.reserve(times.size() + 1);
    start_.push_back(0);
    for (const auto& t : times) start_.push_back(start_.back() + t.size());
    travel_.reserve(start_.back());
    for (const auto& t : times) travel_.insert(travel_.end(), t.begin(), t.end());
    finish(table);
  }

  std::span<const Time> travel(FlightIndex j) const { return {travel_.data() + start_[j], start_[j + 1] - start_[j]}; }
  std::span<const Time> arrivals(FlightIndex j) const { return {arrive_.data() + start_[j], start_[j + 1] - start_[j]}; }
  Time arrival(FlightIndex j, std::size_t p) const { return arrive_[start_[j] + p]; }

 private:
  template <typename Engine>
  friend Realization sample_realization(const TimelineTable&, Engine&, double);

  void finish(const TimelineTable& table) {
    const Time w = table.network().ground_time();
    arrive_.resize(travel_.size());
    for (FlightIndex j = 0; j + 1 < start_.size(); ++j) {
      Time t = table.schedule().flight(j).departure;
      for (std::size_t k = start_[j]; k < start_[j + 1]; ++k) {
        if (k > start_[j]) t += w;
        t += travel_[k];
        arrive_[k] = t;
      }
    }
  }

  std::vector<std::size_t> start_;
  std::vector<Time> travel_;
  std::vector<Time> arrive_;
};

template <typename Engine>
Realization sample_realization(const TimelineTable& table, Engine& rng, double endpoint_share) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  const UamNetwork& net = table.network();
  Realization real;
  real.start_.reserve(table.schedule().size() + 1);
  real.start_.push_back(0);
  for (FlightIndex j = 0; j < table.schedule().size(); ++j) {
    for (LinkIndex e : table.route_of(j).links) {
      const Link& l = net.link(e);
      double u = coin(rng);
      Time x;
      if (u < endpoint_share) {
        x = l.min_travel;
      } else if (u < 2 * endpoint_share) {
        x = l.max_travel;
      } else {
        std::uniform_int_distribution<std::int64_t> pick(l.min_travel.ticks(), l.max_travel.ticks());
        x = Time::from_ticks(pick(rng));
      }
      real.travel_.push_back(x);
    }
    real.start_.push_back(real.travel_.size());
  }
  real.finish(table);
  return real;
}

inline Realization sample_realization(const TimelineTable& table, std::uint64_t seed, double endpoint_share = 0.05) {
  std::mt19937_64 rng(seed);
  return sample_realization(table, rng, endpoint_share);
}

/// Backup node chosen for each flight diverted away from the closed node.
using RerouteChoice = std::map<FlightIndex, NodeIndex>;

class InvalidChoice : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class FlightState {
  unaffected,   // continues as scheduled
  canceled,     // affected and not yet departed
  held,         // affected while stopped at a node; stays there
  landed_held,  // affected on a link with an open head; lands and stays
  rerouted,     // affected on a link into the closed node; diverts
};

struct FlightStatus {
  FlightState state = FlightState::unaffected;
  std::optional<std::size_t> link_position;  // link travelled at the closure
  std::optional<NodeIndex> final_node;       // where an affected flight stays
};

/// Where each flight is at the closure and what the rules make it do,
/// before any reroute choice is applied.
inline std::vector<FlightStatus> classify_flights(const TimelineTable& table, const Realization& real, NodeIndex closed,
                                                  Time at) {
  std::vector<FlightStatus> out(table.schedule().size());
  for (FlightIndex j = 0; j < table.schedule().size(); ++j) {
    const Route& r = table.route_of(j);
    const Time depart = table.schedule().flight(j).departure;
    auto pos = r.position_of(closed);
    FlightStatus& st = out[j];
    if (!pos) continue;
    if (*pos == 0) {
      if (depart > at) st.state = FlightState::canceled;
      continue;
    }
    const auto& arr = real.arrivals(j);
    if (!(arr[*pos - 1] > at)) continue;  // already reached the closed node
    if (depart > at) {
      st.state = FlightState::canceled;
      continue;
    }
    const Time w = table.network().ground_time();
    for (std::size_t p = 0; p < *pos; ++p) {
      if (at < arr[p]) {
        st.link_position = p;
        if (p + 1 == *pos) {
          st.state = FlightState::rerouted;
        } else {
          st.state = FlightState::landed_held;
          st.final_node = r.nodes[p + 1];
        }
        break;
      }
      if (at < arr[p] + w) {
        st.state = FlightState::held;
        st.final_node = r.nodes[p + 1];
        break;
      }
    }
  }
  return out;
}

struct SimulationViolation {
  NodeIndex node;
  Time at;
  std::int64_t occupancy;
  std::int64_t capacity;
};

struct SimulationTrace {
  NodeIndex closed = 0;
  Time at;
  Time horizon;
  std::vector<FlightStatus> flights;
  /// Per node: (time, occupancy after the change) step points.
  std::vector<std::vector<std::pair<Time, std::int64_t>>> occupancy;
  std::vector<SimulationViolation> violations;

  bool safe() const { return violations.empty(); }
};

/// Applies the closure rules to one realization and tracks node occupancy
/// up to a horizon past the last event. Held and diverted flights keep their
/// spot until the horizon; a diverted flight occupies its backup from the
/// closure time on.
inline SimulationTrace simulate_closure(const TimelineTable& table, const Realization& real, NodeIndex closed, Time at,
                                        const RerouteChoice& choice, bool record_occupancy = true) {
  const UamNetwork& net = table.network();
  const Time w = net.ground_time();
  SimulationTrace trace;
  trace.closed = closed;
  trace.at = at;
  trace.flights = classify_flights(table, real, closed, at);

  Time last = at;
  Time longest;
  for (const auto& l : net.links()) longest = std::max(longest, l.max_travel);
  for (FlightIndex j = 0; j < table.schedule().size(); ++j)
    if (!real.arrivals(j).empty()) last = std::max(last, real.arrivals(j).back() + w);
  trace.horizon = last + w + longest;

  struct Event {
    NodeIndex node;
    Time at;
    bool arrival;
  };
  std::vector<Event> events;
  auto stay = [&](NodeIndex v, Time from, Time to) {
    events.push_back({v, from, true});
    events.push_back({v, to, false});
  };
  for (FlightIndex j = 0; j < table.schedule().size(); ++j) {
    FlightStatus& st = trace.flights[j];
    const Route& r = table.route_of(j);
    const auto& arr = real.arrivals(j);
    switch (st.state) {
      case FlightState::canceled:
        break;
      case FlightState::unaffected:
        for (std::size_t p = 0; p < arr.size(); ++p) stay(r.nodes[p + 1], arr[p], arr[p] + w);
        break;
      case FlightState::held:
      case FlightState::landed_held: {
        std::size_t stop = *r.position_of(*st.final_node) - 1;
        for (std::size_t p = 0; p < stop; ++p) stay(r.nodes[p + 1], arr[p], arr[p] + w);
        stay(*st.final_node, arr[stop], trace.horizon);
        break;
      }
      case FlightState::rerouted: {
        const std::size_t p = *st.link_position;
        const Link& link = net.link(r.links[p]);
        auto it = choice.find(j);
        if (it == choice.end())
          throw InvalidChoice("no backup chosen for flight " + table.schedule().flight(j).id);
        if (it->second == closed || !link.has_backup(it->second))
          throw InvalidChoice("node " + net.node(it->second).id + " is not a usable backup of link " + link.id);
        st.final_node = it->second;
        for (std::size_t q = 0; q < p; ++q) stay(r.nodes[q + 1], arr[q], arr[q] + w);
        stay(it->second, at, trace.horizon);
        break;
      }
    }
  }

  const bool arrivals_first = table.semantics() == OccupancySemantics::closed;
  std::sort(events.begin(), events.end(), [arrivals_first](const Event& a, const Event& b) {
    if (a.node != b.node) return a.node < b.node;
    if (a.at != b.at) return a.at < b.at;
    if (a.arrival != b.arrival) return arrivals_first ? a.arrival : !a.arrival;
    return false;
  });
  if (record_occupancy) trace.occupancy.resize(net.nodes().size());
  std::int64_t count = 0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const Event& ev = events[i];
    if (i == 0 || events[i - 1].node != ev.node) count = 0;
    count += ev.arrival ? 1 : -1;
    if (record_occupancy) {
      auto& series = trace.occupancy[ev.node];
      if (!series.empty() && series.back().first == ev.at)
        series.back().second = count;
      else
        series.emplace_back(ev.at, count);
    }
    const Capacity cap = net.node(ev.node).capacity;
    if (ev.arrival && !cap.admits(count)) trace.violations.push_back({ev.node, ev.at, count, cap.spots()});
  }
  return trace;
}

/// Diverted flights at the closure and the backups each may choose.
inline std::vector<std::pair<FlightIndex, std::vector<NodeIndex>>> reroute_options(const TimelineTable& table,
                                                                                   const Realization& real,
                                                                                   NodeIndex closed, Time at) {
  std::vector<std::pair<FlightIndex, std::vector<NodeIndex>>> out;
  auto statuses = classify_flights(table, real, closed, at);
  for (FlightIndex j = 0; j < statuses.size(); ++j) {
    if (statuses[j].state != FlightState::rerouted) continue;
    const Link& l = table.network().link(table.route_of(j).links[*statuses[j].link_position]);
    std::vector<NodeIndex> opts;
    for (NodeIndex b : l.backups)
      if (b != closed) opts.push_back(b);
    out.emplace_back(j, std::move(opts));
  }
  return out;
}

/// Turns a worst-case witness (counts per link and backup node) into
/// per-flight choices for one realization.
///
/// Diverted flights counted in a link's supply consume that link's counts
/// in flight order. A flight left out of the supply because an earlier
/// window already reserved a spot for it goes to that earlier head.
inline RerouteChoice witness_choices(const TimelineTable& table, const ClosureScenario& scenario,
                                     const WorstCaseSystem& system, const TransportWitness& witness,
                                     const Realization& real) {
  const ClosureGeometry& g = *scenario.geometry;
  const std::size_t n_nodes = table.network().nodes().size();
  std::vector<std::size_t> row_of(table.network().links().size(), SIZE_MAX);
  for (std::size_t i = 0; i < system.rows.size(); ++i) row_of[system.rows[i].link] = i;
  std::vector<std::int64_t> left(system.rows.size() * n_nodes, 0);
  for (std::size_t c = 0; c < system.instance.cells.size(); ++c) {
    const auto& cell = system.instance.cells[c];
    left[cell.row * n_nodes + cell.column] += witness.at(c);
  }
  RerouteChoice choice;
  auto statuses = classify_flights(table, real, g.closed, scenario.at);
  for (FlightIndex j = 0; j < statuses.size(); ++j) {
    if (statuses[j].state != FlightState::rerouted) continue;
    const Route& r = table.route_of(j);
    const LinkIndex e = r.links[*statuses[j].link_position];
    if (counts_in_link_supply(table, scenario, j)) {
      bool placed = false;
      for (NodeIndex v : g.reachable_backups[e]) {
        auto& n = left[row_of[e] * n_nodes + v];
        if (n > 0) {
          --n;
          choice[j] = v;
          placed = true;
          break;
        }
      }
      if (!placed) throw std::logic_error("witness counts exhausted for link " + table.network().link(e).id);
      continue;
    }
    const FlightTimeline& tl = table.timeline(j);
    bool placed = false;
    for (std::size_t p : g.earlier_backup_positions[j]) {
      if (tl.worst_window(p, false).contains_closed(scenario.at)) {
        choice[j] = r.nodes[p + 1];
        placed = true;
        break;
      }
    }
    if (!placed) throw std::logic_error("diverted flight " + table.schedule().flight(j).id + " has no reserved spot");
  }
  return choice;
}

struct SoundnessCounterexample {
  NodeIndex closed = 0;
  Time at;
  std::uint64_t seed = 0;    // stream seed of the scenario
  std::size_t sample = 0;    // draw index within that stream
  SimulationViolation violation;
};

struct SoundnessSummary {
  std::size_t scenarios = 0;       // worst-case safe scenarios exercised
  std::size_t realizations = 0;
  std::size_t violating_runs = 0;
  std::vector<SoundnessCounterexample> examples;  // first few only

  bool sound() const { return violating_runs == 0; }
};

/// Stream seed for scenario i, spread by splitmix64.
inline std::uint64_t realization_seed(std::uint64_t base, std::uint64_t scenario, std::uint64_t sample) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (scenario * 1000003ULL + sample + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// For every critical time at which closing `closed` is worst-case safe,
/// drives `samples` realizations with the witness-derived choices and
/// counts runs that break a capacity.
inline SoundnessSummary check_soundness(const TimelineTable& table, NodeIndex closed, std::size_t samples,
                                        std::uint64_t seed, std::size_t keep_examples = 5) {
  SoundnessSummary out;
  auto geometry = std::make_shared<const ClosureGeometry>(build_closure_geometry(table, closed));
  std::uint64_t index = 0;
  for (Time at : critical_times(table, closed, SafetyCase::worst)) {
    ++index;
    ClosureScenario s = derive_scenario(table, geometry, at);
    WorstCaseSystem sys = build_worst_case_system(table, s);
    SolveOutcome res = solve(sys.instance);
    if (!res.feasible) continue;
    ++out.scenarios;
    const std::uint64_t rs = realization_seed(seed, index, 0);
    std::mt19937_64 rng(rs);
    for (std::size_t k = 0; k < samples; ++k) {
      Realization real = sample_realization(table, rng);
      RerouteChoice choice = witness_choices(table, s, sys, res.witness, real);
      SimulationTrace trace = simulate_closure(table, real, closed, at, choice, false);
      ++out.realizations;
      if (trace.safe()) continue;
      ++out.violating_runs;
      if (out.examples.size() < keep_examples) out.examples.push_back({closed, at, rs, k, trace.violations.front()});
    }
  }
  return out;
}

}  // namespace vertisafe

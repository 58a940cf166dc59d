#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "vertisafe/time.hpp"

namespace vertisafe {

using NodeIndex = std::size_t;
using LinkIndex = std::size_t;
using RouteIndex = std::size_t;
using FlightIndex = std::size_t;

/// Number of landing spots at a node; sources may be unbounded.
class Capacity {
 public:
  constexpr Capacity() = default;
  static constexpr Capacity unbounded() { return Capacity(); }
  static constexpr Capacity finite(std::int64_t spots) { return Capacity(spots); }

  constexpr bool bounded() const { return bounded_; }
  constexpr std::int64_t spots() const { return spots_; }

  /// True when `occupancy` fits.
  constexpr bool admits(std::int64_t occupancy) const { return !bounded_ || occupancy <= spots_; }

  constexpr bool operator==(const Capacity&) const = default;

  std::string to_string() const { return bounded_ ? std::to_string(spots_) : std::string("unbounded"); }

 private:
  constexpr explicit Capacity(std::int64_t spots) : bounded_(true), spots_(spots) {}
  bool bounded_ = false;
  std::int64_t spots_ = 0;
};

/// Input validation failure. `where` names the offending element
/// (e.g. "links[4].backups") so callers can map it back to a source line.
class InvalidInput : public std::runtime_error {
 public:
  InvalidInput(std::string where, const std::string& what)
      : std::runtime_error(what), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

class InvalidNetwork : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class InvalidSchedule : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

struct Node {
  std::string id;
  Capacity capacity;
};

struct Link {
  std::string id;
  NodeIndex tail = 0;
  NodeIndex head = 0;
  Time min_travel;
  Time max_travel;
  std::vector<NodeIndex> backups;  // input order, contains tail and head

  bool has_backup(NodeIndex v) const { return std::find(backups.begin(), backups.end(), v) != backups.end(); }
};

/// Connected link sequence from a source to a sink.
struct Route {
  std::string id;
  std::vector<LinkIndex> links;
  std::vector<NodeIndex> nodes;  // links.size() + 1 entries, origin first

  std::size_t size() const { return links.size(); }
  NodeIndex origin() const { return nodes.front(); }
  NodeIndex destination() const { return nodes.back(); }

  /// Position of `v` in `nodes` (0 is the origin), if visited.
  std::optional<std::size_t> position_of(NodeIndex v) const {
    auto it = std::find(nodes.begin(), nodes.end(), v);
    if (it == nodes.end()) return std::nullopt;
    return static_cast<std::size_t>(it - nodes.begin());
  }
  bool visits(NodeIndex v) const { return position_of(v).has_value(); }
};

/// Unvalidated network as read from a file (ids instead of indices).
struct NetworkDescription {
  struct NodeEntry {
    std::string id;
    Capacity capacity;
  };
  struct LinkEntry {
    std::string id;
    std::string tail;
    std::string head;
    Time min_travel;
    Time max_travel;
    std::vector<std::string> backups;
  };
  struct RouteEntry {
    std::string id;
    std::vector<std::string> links;
  };

  std::vector<NodeEntry> nodes;
  std::vector<LinkEntry> links;
  std::vector<RouteEntry> routes;
  Time ground_time;
};

class UamNetwork;
UamNetwork build_network(const NetworkDescription& raw);

/// Validated, immutable vertiport network.
class UamNetwork {
 public:
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Link>& links() const { return links_; }
  const std::vector<Route>& routes() const { return routes_; }
  const Node& node(NodeIndex v) const { return nodes_.at(v); }
  const Link& link(LinkIndex e) const { return links_.at(e); }
  const Route& route(RouteIndex r) const { return routes_.at(r); }
  Time ground_time() const { return ground_time_; }

  bool is_source(NodeIndex v) const { return is_source_.at(v); }
  bool is_sink(NodeIndex v) const { return is_sink_.at(v); }

  std::optional<NodeIndex> find_node(std::string_view id) const { return lookup(node_ids_, id); }
  std::optional<LinkIndex> find_link(std::string_view id) const { return lookup(link_ids_, id); }
  std::optional<RouteIndex> find_route(std::string_view id) const { return lookup(route_ids_, id); }

  /// Copy with one node capacity replaced.
  UamNetwork with_capacity(NodeIndex v, Capacity c) const {
    UamNetwork copy = *this;
    copy.nodes_.at(v).capacity = c;
    return copy;
  }

  NetworkDescription describe() const {
    NetworkDescription d;
    d.ground_time = ground_time_;
    for (const auto& n : nodes_) d.nodes.push_back({n.id, n.capacity});
    for (const auto& l : links_) {
      NetworkDescription::LinkEntry entry{l.id, nodes_[l.tail].id, nodes_[l.head].id, l.min_travel, l.max_travel, {}};
      for (NodeIndex b : l.backups) entry.backups.push_back(nodes_[b].id);
      d.links.push_back(std::move(entry));
    }
    for (const auto& r : routes_) {
      NetworkDescription::RouteEntry entry{r.id, {}};
      for (LinkIndex e : r.links) entry.links.push_back(links_[e].id);
      d.routes.push_back(std::move(entry));
    }
    return d;
  }

 private:
  friend UamNetwork build_network(const NetworkDescription& raw);
  using IdMap = std::unordered_map<std::string, std::size_t>;

  static std::optional<std::size_t> lookup(const IdMap& m, std::string_view id) {
    auto it = m.find(std::string(id));
    if (it == m.end()) return std::nullopt;
    return it->second;
  }

  std::vector<Node> nodes_;
  std::vector<Link> links_;
  std::vector<Route> routes_;
  Time ground_time_;
  std::vector<bool> is_source_;
  std::vector<bool> is_sink_;
  IdMap node_ids_;
  IdMap link_ids_;
  IdMap route_ids_;
};

inline UamNetwork build_network(const NetworkDescription& raw) {
  UamNetwork net;
  if (raw.ground_time <= Time{}) throw InvalidNetwork("w", "ground service time must be positive");
  net.ground_time_ = raw.ground_time;

  for (std::size_t i = 0; i < raw.nodes.size(); ++i) {
    const auto& n = raw.nodes[i];
    std::string where = "nodes[" + std::to_string(i) + "]";
    if (n.id.empty()) throw InvalidNetwork(where, "node id must not be empty");
    if (n.capacity.bounded() && n.capacity.spots() < 0)
      throw InvalidNetwork(where + ".capacity", "node " + n.id + " has negative capacity");
    if (!net.node_ids_.emplace(n.id, i).second) throw InvalidNetwork(where, "duplicate node id " + n.id);
    net.nodes_.push_back({n.id, n.capacity});
  }
  if (net.nodes_.empty()) throw InvalidNetwork("nodes", "network has no nodes");

  auto node_ref = [&](const std::string& id, const std::string& where) {
    auto v = net.find_node(id);
    if (!v) throw InvalidNetwork(where, "unknown node " + id);
    return *v;
  };

  for (std::size_t i = 0; i < raw.links.size(); ++i) {
    const auto& l = raw.links[i];
    std::string where = "links[" + std::to_string(i) + "]";
    if (l.id.empty()) throw InvalidNetwork(where, "link id must not be empty");
    if (!net.link_ids_.emplace(l.id, i).second) throw InvalidNetwork(where, "duplicate link id " + l.id);
    Link link;
    link.id = l.id;
    link.tail = node_ref(l.tail, where + ".tail");
    link.head = node_ref(l.head, where + ".head");
    if (link.tail == link.head) throw InvalidNetwork(where, "link " + l.id + " is a self-loop");
    if (!(Time{} < l.min_travel))
      throw InvalidNetwork(where + ".tmin", "link " + l.id + " needs a positive minimum travel time");
    if (l.max_travel < l.min_travel)
      throw InvalidNetwork(where + ".tmax", "link " + l.id + " has tmax below tmin");
    link.min_travel = l.min_travel;
    link.max_travel = l.max_travel;
    for (std::size_t b = 0; b < l.backups.size(); ++b) {
      NodeIndex v = node_ref(l.backups[b], where + ".backups[" + std::to_string(b) + "]");
      if (link.has_backup(v)) throw InvalidNetwork(where + ".backups", "link " + l.id + " lists backup " + l.backups[b] + " twice");
      link.backups.push_back(v);
    }
    if (!link.has_backup(link.tail) || !link.has_backup(link.head))
      throw InvalidNetwork(where + ".backups", "backup set of link " + l.id + " must contain its tail and head");
    net.links_.push_back(std::move(link));
  }

  const std::size_t n = net.nodes_.size();
  net.is_source_.assign(n, true);
  net.is_sink_.assign(n, true);
  for (const auto& l : net.links_) {
    net.is_source_[l.head] = false;
    net.is_sink_[l.tail] = false;
  }
  for (NodeIndex v = 0; v < n; ++v) {
    if (net.is_source_[v] && net.is_sink_[v])
      throw InvalidNetwork("nodes[" + std::to_string(v) + "]",
                           "node " + net.nodes_[v].id + " is both a source and a sink (isolated)");
  }

  for (std::size_t i = 0; i < raw.routes.size(); ++i) {
    const auto& r = raw.routes[i];
    std::string where = "routes[" + std::to_string(i) + "]";
    if (r.id.empty()) throw InvalidNetwork(where, "route id must not be empty");
    if (!net.route_ids_.emplace(r.id, i).second) throw InvalidNetwork(where, "duplicate route id " + r.id);
    if (r.links.empty()) throw InvalidNetwork(where + ".links", "route " + r.id + " has no links");
    Route route;
    route.id = r.id;
    for (std::size_t k = 0; k < r.links.size(); ++k) {
      auto e = net.find_link(r.links[k]);
      if (!e) throw InvalidNetwork(where + ".links[" + std::to_string(k) + "]", "unknown link " + r.links[k]);
      const Link& l = net.links_[*e];
      if (route.nodes.empty()) {
        route.nodes.push_back(l.tail);
      } else if (route.nodes.back() != l.tail) {
        throw InvalidNetwork(where + ".links[" + std::to_string(k) + "]",
                             "route " + r.id + " is not connected at link " + l.id);
      }
      if (route.visits(l.head))
        throw InvalidNetwork(where + ".links[" + std::to_string(k) + "]",
                             "route " + r.id + " visits node " + net.nodes_[l.head].id + " twice");
      route.links.push_back(*e);
      route.nodes.push_back(l.head);
    }
    if (!net.is_source_[route.origin()])
      throw InvalidNetwork(where, "route " + r.id + " does not start at a source node");
    if (!net.is_sink_[route.destination()])
      throw InvalidNetwork(where, "route " + r.id + " does not end at a sink node");
    net.routes_.push_back(std::move(route));
  }
  return net;
}

struct Flight {
  std::string id;
  RouteIndex route = 0;
  Time departure;
};

struct ScheduleDescription {
  struct FlightEntry {
    std::string id;
    std::string route;
    Time departure;
  };
  std::vector<FlightEntry> flights;
};

/// Set of scheduled flights in input order.
class FlightSchedule {
 public:
  FlightSchedule() = default;
  explicit FlightSchedule(std::vector<Flight> flights) : flights_(std::move(flights)) {}

  const std::vector<Flight>& flights() const { return flights_; }
  const Flight& flight(FlightIndex j) const { return flights_.at(j); }
  std::size_t size() const { return flights_.size(); }
  bool empty() const { return flights_.empty(); }

  ScheduleDescription describe(const UamNetwork& net) const {
    ScheduleDescription d;
    for (const auto& f : flights_) d.flights.push_back({f.id, net.route(f.route).id, f.departure});
    return d;
  }

 private:
  std::vector<Flight> flights_;
};

inline FlightSchedule build_schedule(const UamNetwork& net, const ScheduleDescription& raw) {
  std::vector<Flight> flights;
  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < raw.flights.size(); ++i) {
    const auto& f = raw.flights[i];
    std::string where = "flights[" + std::to_string(i) + "]";
    if (f.id.empty()) throw InvalidSchedule(where, "flight id must not be empty");
    if (!seen.emplace(f.id, i).second) throw InvalidSchedule(where, "duplicate flight id " + f.id);
    auto r = net.find_route(f.route);
    if (!r) throw InvalidSchedule(where + ".route", "flight " + f.id + " uses unknown route " + f.route);
    if (f.departure < Time{}) throw InvalidSchedule(where + ".depart", "flight " + f.id + " departs before time 0");
    flights.push_back({f.id, *r, f.departure});
  }
  return FlightSchedule(std::move(flights));
}

/// Arrival bounds, occupancy intervals and rerouting windows of one flight.
///
/// Link positions p are 0-based along the route; the head of link p is route
/// node p + 1. Occupancy of node p + 1 is [earliest_arrival, latest_arrival + w).
struct FlightTimeline {
  Time departure;
  Time ground;
  std::vector<Time> earliest_arrival;
  std::vector<Time> latest_arrival;

  std::size_t size() const { return latest_arrival.size(); }

  TimeInterval occupancy(std::size_t p) const { return {earliest_arrival.at(p), latest_arrival.at(p) + ground}; }

  /// Earliest time the flight can be on link p.
  Time window_lower(std::size_t p) const { return p == 0 ? departure : earliest_arrival.at(p - 1) + ground; }

  /// Worst-case window upper bound: latest departure from the head, or the
  /// latest arrival there when the head is the closed node.
  Time worst_upper(std::size_t p, bool head_closed) const {
    return head_closed ? latest_arrival.at(p) : latest_arrival.at(p) + ground;
  }

  /// Best-case variant: a flight inbound to the closed node only counts while
  /// it cannot yet have arrived.
  Time best_upper(std::size_t p, bool head_closed) const {
    return head_closed ? earliest_arrival.at(p) : latest_arrival.at(p) + ground;
  }

  TimeInterval worst_window(std::size_t p, bool head_closed) const { return {window_lower(p), worst_upper(p, head_closed)}; }
  TimeInterval best_window(std::size_t p, bool head_closed) const { return {window_lower(p), best_upper(p, head_closed)}; }
};

inline FlightTimeline compute_timeline(const UamNetwork& net, const Flight& flight) {
  const Route& route = net.route(flight.route);
  const Time w = net.ground_time();
  FlightTimeline tl;
  tl.departure = flight.departure;
  tl.ground = w;
  Time lo = flight.departure;
  Time hi = flight.departure;
  for (std::size_t p = 0; p < route.size(); ++p) {
    const Link& l = net.link(route.links[p]);
    if (p > 0) {
      lo += w;
      hi += w;
    }
    lo += l.min_travel;
    hi += l.max_travel;
    tl.earliest_arrival.push_back(lo);
    tl.latest_arrival.push_back(hi);
  }
  return tl;
}

/// One flight's stay at one node.
struct Occupant {
  FlightIndex flight;
  TimeInterval span;
};

/// Sorted +1/-1 events for a set of occupancy intervals.
///
/// With right-open semantics departures at time t are ordered before
/// arrivals at t; with closed semantics arrivals come first.
class OccupancySweep {
 public:
  struct Event {
    Time at;
    bool arrival;
    std::size_t occupant;
  };

  OccupancySweep() = default;
  OccupancySweep(std::vector<Occupant> occupants, OccupancySemantics semantics)
      : occupants_(std::move(occupants)), semantics_(semantics) {
    events_.reserve(occupants_.size() * 2);
    for (std::size_t i = 0; i < occupants_.size(); ++i) {
      events_.push_back({occupants_[i].span.lo, true, i});
      events_.push_back({occupants_[i].span.hi, false, i});
    }
    const bool arrivals_first = semantics_ == OccupancySemantics::closed;
    std::sort(events_.begin(), events_.end(), [arrivals_first](const Event& a, const Event& b) {
      if (a.at != b.at) return a.at < b.at;
      if (a.arrival != b.arrival) return arrivals_first ? a.arrival : !a.arrival;
      return a.occupant < b.occupant;
    });
  }

  const std::vector<Occupant>& occupants() const { return occupants_; }
  const std::vector<Event>& events() const { return events_; }
  OccupancySemantics semantics() const { return semantics_; }

  /// sup over t >= from of the number of selected intervals containing t.
  template <typename Selected>
  std::int64_t max_from(Time from, Selected&& selected) const {
    std::int64_t count = 0;
    std::size_t i = 0;
    // Bring the count to the occupancy at `from` itself.
    for (; i < events_.size(); ++i) {
      const Event& ev = events_[i];
      bool before = ev.at < from || (ev.at == from && (semantics_ == OccupancySemantics::right_open || ev.arrival));
      if (!before) break;
      if (!selected(occupants_[ev.occupant].flight)) continue;
      count += ev.arrival ? 1 : -1;
    }
    std::int64_t best = count;
    for (; i < events_.size(); ++i) {
      const Event& ev = events_[i];
      if (!selected(occupants_[ev.occupant].flight)) continue;
      count += ev.arrival ? 1 : -1;
      best = std::max(best, count);
    }
    return best;
  }

  std::int64_t max_overall() const {
    std::int64_t count = 0;
    std::int64_t best = 0;
    for (const auto& ev : events_) {
      count += ev.arrival ? 1 : -1;
      best = std::max(best, count);
    }
    return best;
  }

 private:
  std::vector<Occupant> occupants_;
  std::vector<Event> events_;
  OccupancySemantics semantics_ = OccupancySemantics::right_open;
};

/// A flight's stop at a node: its flight index and the incoming link position.
struct Visit {
  FlightIndex flight;
  std::size_t link_position;
};

/// Network, schedule and every derived per-flight quantity, computed once and
/// shared read-only by all closure analyses.
class TimelineTable {
 public:
  TimelineTable(const UamNetwork& net, const FlightSchedule& schedule,
                OccupancySemantics semantics = OccupancySemantics::right_open)
      : net_(&net), schedule_(&schedule), semantics_(semantics) {
    const std::size_t n_nodes = net.nodes().size();
    visits_.resize(n_nodes);
    origin_flights_.resize(n_nodes);
    std::vector<std::vector<Occupant>> occupants(n_nodes);
    timelines_.reserve(schedule.size());
    for (FlightIndex j = 0; j < schedule.size(); ++j) {
      const Flight& f = schedule.flight(j);
      timelines_.push_back(compute_timeline(net, f));
      const Route& r = net.route(f.route);
      origin_flights_[r.origin()].push_back(j);
      for (std::size_t p = 0; p < r.size(); ++p) {
        NodeIndex v = r.nodes[p + 1];
        visits_[v].push_back({j, p});
        occupants[v].push_back({j, timelines_.back().occupancy(p)});
      }
    }
    sweeps_.reserve(n_nodes);
    for (NodeIndex v = 0; v < n_nodes; ++v) sweeps_.emplace_back(std::move(occupants[v]), semantics);
  }

  const UamNetwork& network() const { return *net_; }
  const FlightSchedule& schedule() const { return *schedule_; }
  OccupancySemantics semantics() const { return semantics_; }

  const FlightTimeline& timeline(FlightIndex j) const { return timelines_.at(j); }
  const std::vector<FlightTimeline>& timelines() const { return timelines_; }
  const Route& route_of(FlightIndex j) const { return net_->route(schedule_->flight(j).route); }

  /// Flights landing at v (origin excluded), in flight order.
  const std::vector<Visit>& visits(NodeIndex v) const { return visits_.at(v); }
  /// Flights whose route starts at v.
  const std::vector<FlightIndex>& departures_from(NodeIndex v) const { return origin_flights_.at(v); }
  const OccupancySweep& sweep(NodeIndex v) const { return sweeps_.at(v); }

 private:
  const UamNetwork* net_;
  const FlightSchedule* schedule_;
  OccupancySemantics semantics_;
  std::vector<FlightTimeline> timelines_;
  std::vector<std::vector<Visit>> visits_;
  std::vector<std::vector<FlightIndex>> origin_flights_;
  std::vector<OccupancySweep> sweeps_;
};

/// Capacity exceeded at `node` at time `at` by `flights`.
struct CapacityViolation {
  NodeIndex node;
  Time at;
  std::vector<FlightIndex> flights;
};

struct FeasibilityReport {
  bool feasible = true;
  std::vector<CapacityViolation> violations;  // first violation per node
};

/// Nominal check: no finite-capacity node is ever over-occupied.
inline FeasibilityReport check_feasible(const TimelineTable& table) {
  FeasibilityReport report;
  const UamNetwork& net = table.network();
  for (NodeIndex v = 0; v < net.nodes().size(); ++v) {
    const Capacity cap = net.node(v).capacity;
    if (!cap.bounded()) continue;
    const OccupancySweep& sweep = table.sweep(v);
    std::vector<std::size_t> active;
    for (const auto& ev : sweep.events()) {
      if (ev.arrival) {
        active.push_back(ev.occupant);
        if (!cap.admits(static_cast<std::int64_t>(active.size()))) {
          CapacityViolation viol{v, ev.at, {}};
          for (std::size_t o : active) viol.flights.push_back(sweep.occupants()[o].flight);
          std::sort(viol.flights.begin(), viol.flights.end());
          report.feasible = false;
          report.violations.push_back(std::move(viol));
          break;
        }
      } else {
        active.erase(std::find(active.begin(), active.end(), ev.occupant));
      }
    }
  }
  return report;
}

inline FeasibilityReport check_feasible(const UamNetwork& net, const FlightSchedule& schedule,
                                        OccupancySemantics semantics = OccupancySemantics::right_open) {
  return check_feasible(TimelineTable(net, schedule, semantics));
}

}  // namespace vertisafe

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "vertisafe/model.hpp"
#include "vertisafe/transport.hpp"

namespace vertisafe {

/// Closure-time-independent sets for one closed node.
struct ClosureGeometry {
  NodeIndex closed = 0;

  /// Links whose head is the closed node, in link order.
  std::vector<LinkIndex> affected_links;
  /// Per link: nodes a flight on it may end up at. The head alone when it is
  /// open, otherwise the backup set minus the closed node.
  std::vector<std::vector<NodeIndex>> reachable_backups;
  /// Per node: links from which flights may end up at that node.
  std::vector<std::vector<LinkIndex>> inbound_reroute_links;

  /// Per flight: position of the closed node on its route (0 = origin).
  std::vector<std::optional<std::size_t>> closed_position;
  /// Per flight: earlier link positions whose head is a possible backup of
  /// the link leading into the closed node.
  std::vector<std::vector<std::size_t>> earlier_backup_positions;
  // Flights whose route visits the closed node, in index order.
  std::vector<FlightIndex> through;

  bool is_affected_link(LinkIndex e) const {
    return std::binary_search(affected_links.begin(), affected_links.end(), e);
  }
};

inline ClosureGeometry build_closure_geometry(const TimelineTable& table, NodeIndex closed) {
  const UamNetwork& net = table.network();
  ClosureGeometry g;
  g.closed = closed;
  g.reachable_backups.resize(net.links().size());
  g.inbound_reroute_links.resize(net.nodes().size());
  for (LinkIndex e = 0; e < net.links().size(); ++e) {
    const Link& l = net.link(e);
    if (l.head != closed) {
      g.reachable_backups[e] = {l.head};
      g.inbound_reroute_links[l.head].push_back(e);
    } else {
      g.affected_links.push_back(e);
      for (NodeIndex b : l.backups) {
        if (b == closed) continue;
        g.reachable_backups[e].push_back(b);
        g.inbound_reroute_links[b].push_back(e);
      }
    }
  }
  for (auto& links : g.inbound_reroute_links) std::sort(links.begin(), links.end());

  const std::size_t n = table.schedule().size();
  g.closed_position.resize(n);
  g.earlier_backup_positions.resize(n);
  for (FlightIndex j = 0; j < n; ++j) {
    const Route& r = table.route_of(j);
    auto pos = r.position_of(closed);
    g.closed_position[j] = pos;
    if (pos) g.through.push_back(j);
    if (!pos || *pos == 0) continue;
    const auto& backups = g.reachable_backups[r.links[*pos - 1]];
    for (std::size_t p = 0; p + 1 < *pos; ++p) {
      NodeIndex head = r.nodes[p + 1];
      if (std::find(backups.begin(), backups.end(), head) != backups.end()) g.earlier_backup_positions[j].push_back(p);
    }
  }
  return g;
}

/// A closure of one node at one time, with every flight set it induces.
struct ClosureScenario {
  std::shared_ptr<const ClosureGeometry> geometry;
  Time at;

  /// Flights whose route visits the closed node.
  std::vector<FlightIndex> through_closed;
  /// Flights that may still reach the closed node at or after the closure.
  std::vector<FlightIndex> possibly_affected;
  /// Flights through the closed node that have not departed yet.
  std::vector<FlightIndex> canceled;
  /// Possibly affected and already departed.
  std::vector<FlightIndex> rerouting;
  /// Rerouting flights that cannot have reached the closed node yet.
  std::vector<FlightIndex> definitely_affected;

  std::vector<char> possibly_affected_mask;
  std::vector<char> rerouting_mask;

  NodeIndex closed() const { return geometry->closed; }
  bool is_possibly_affected(FlightIndex j) const { return possibly_affected_mask[j] != 0; }
  bool is_rerouting(FlightIndex j) const { return rerouting_mask[j] != 0; }
};

inline ClosureScenario derive_scenario(const TimelineTable& table, std::shared_ptr<const ClosureGeometry> geometry,
                                       Time at) {
  ClosureScenario s;
  s.at = at;
  const std::size_t n = table.schedule().size();
  s.possibly_affected_mask.assign(n, 0);
  s.rerouting_mask.assign(n, 0);
  const ClosureGeometry& g = *geometry;
  s.through_closed = g.through;
  s.possibly_affected.reserve(g.through.size());
  s.rerouting.reserve(g.through.size());
  for (FlightIndex j : g.through) {
    auto pos = g.closed_position[j];
    const FlightTimeline& tl = table.timeline(j);
    // For the origin, "latest presence" is the departure itself.
    const Time leaves = *pos == 0 ? tl.departure : tl.latest_arrival[*pos - 1] + tl.ground;
    if (!(leaves > at)) continue;
    s.possibly_affected.push_back(j);
    s.possibly_affected_mask[j] = 1;
    if (tl.departure > at) {
      s.canceled.push_back(j);
      continue;
    }
    s.rerouting.push_back(j);
    s.rerouting_mask[j] = 1;
    if (*pos > 0 && tl.earliest_arrival[*pos - 1] >= at) s.definitely_affected.push_back(j);
  }
  s.geometry = std::move(geometry);
  return s;
}

inline ClosureScenario derive_scenario(const TimelineTable& table, NodeIndex closed, Time at) {
  return derive_scenario(table, std::make_shared<const ClosureGeometry>(build_closure_geometry(table, closed)), at);
}

/// Flights through `v` that are certainly unaffected by the closure.
inline std::vector<FlightIndex> unaffected_at(const TimelineTable& table, const ClosureScenario& s, NodeIndex v) {
  std::vector<FlightIndex> out;
  for (const Visit& visit : table.visits(v))
    if (!s.is_possibly_affected(visit.flight)) out.push_back(visit.flight);
  return out;
}

/// Largest simultaneous occupancy of `v` after the closure by flights the
/// closure cannot affect.
inline std::int64_t compute_n_r(const TimelineTable& table, const ClosureScenario& s, NodeIndex v) {
  return table.sweep(v).max_from(s.at, [&s](FlightIndex j) { return !s.is_possibly_affected(j); });
}

enum class SafetyCase { worst, best, both };

/// Times at which some scenario set or count can change, plus one sample in
/// every gap between them and one after the last.
inline std::vector<Time> critical_times(const TimelineTable& table, NodeIndex closed, SafetyCase which = SafetyCase::both) {
  std::vector<Time> events;
  const bool worst = which != SafetyCase::best;
  const bool best = which != SafetyCase::worst;
  for (FlightIndex j = 0; j < table.schedule().size(); ++j) {
    const FlightTimeline& tl = table.timeline(j);
    const Route& r = table.route_of(j);
    events.push_back(tl.departure);
    for (std::size_t p = 0; p < tl.size(); ++p) {
      const TimeInterval m = tl.occupancy(p);
      events.push_back(m.lo);
      events.push_back(m.hi);
      const bool head_closed = r.nodes[p + 1] == closed;
      events.push_back(tl.window_lower(p));
      if (worst) events.push_back(tl.worst_upper(p, head_closed));
      if (best) events.push_back(tl.best_upper(p, head_closed));
    }
  }
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end()), events.end());
  if (events.empty()) return events;
  std::vector<Time> out;
  out.reserve(events.size() * 2 + 1);
  for (std::size_t i = 0; i < events.size(); ++i) {
    out.push_back(events[i]);
    if (i + 1 < events.size()) out.push_back(Time::midpoint(events[i], events[i + 1]));
  }
  out.push_back(events.back() + Time::units(1));
  return out;
}

/// Per-node capacity bookkeeping shared by both systems.
struct NodeBudget {
  NodeIndex node = 0;
  Capacity capacity;
  std::int64_t unaffected_peak = 0;  // N_R
  std::int64_t fixed_inbound = 0;    // flights that must land here (worst case)

  std::optional<std::int64_t> residual() const {
    if (!capacity.bounded()) return std::nullopt;
    return capacity.spots() - unaffected_peak - fixed_inbound;
  }
};

/// Worst-case conditions as a transportation problem: rows are links into the
/// closed node, columns are nodes.
struct WorstCaseSystem {
  struct LinkRow {
    LinkIndex link = 0;
    std::int64_t supply = 0;
    std::vector<FlightIndex> flights;  // flights counted in the supply
  };
  struct FixedInbound {
    LinkIndex link = 0;
    NodeIndex node = 0;
    std::int64_t count = 0;
    std::vector<FlightIndex> flights;
  };

  std::vector<LinkRow> rows;
  std::vector<NodeBudget> nodes;     // one per network node, in node order
  std::vector<FixedInbound> fixed;   // nonzero fixed cells only
  std::vector<NodeIndex> negative_residual;
  TransportInstance instance;
};

/// Whether j counts in the supply of the link leading into the closed node.
inline bool counts_in_link_supply(const TimelineTable& table, const ClosureScenario& s, FlightIndex j) {
  const ClosureGeometry& g = *s.geometry;
  auto pos = g.closed_position[j];
  if (!pos || *pos == 0) return false;
  const FlightTimeline& tl = table.timeline(j);
  if (!tl.worst_window(*pos - 1, true).contains_closed(s.at)) return false;
  for (std::size_t p : g.earlier_backup_positions[j])
    if (tl.worst_window(p, false).contains_closed(s.at)) return false;
  return true;
}

inline WorstCaseSystem build_worst_case_system(const TimelineTable& table, const ClosureScenario& s) {
  const UamNetwork& net = table.network();
  const ClosureGeometry& g = *s.geometry;
  WorstCaseSystem sys;

  std::vector<std::size_t> row_of(net.links().size(), SIZE_MAX);
  sys.rows.reserve(g.affected_links.size());
  for (LinkIndex e : g.affected_links) {
    row_of[e] = sys.rows.size();
    sys.rows.push_back({e, 0, {}});
  }
  std::vector<WorstCaseSystem::FixedInbound> fixed_by_link(net.links().size());
  for (FlightIndex j : s.rerouting) {
    const FlightTimeline& tl = table.timeline(j);
    const Route& r = table.route_of(j);
    for (std::size_t p = 0; p < r.size(); ++p) {
      LinkIndex e = r.links[p];
      if (row_of[e] != SIZE_MAX) continue;
      if (tl.worst_window(p, false).contains_closed(s.at)) {
        auto& f = fixed_by_link[e];
        ++f.count;
        f.flights.push_back(j);
      }
    }
    if (counts_in_link_supply(table, s, j)) {
      auto& row = sys.rows[row_of[r.links[*g.closed_position[j] - 1]]];
      ++row.supply;
      row.flights.push_back(j);
    }
  }

  sys.nodes.resize(net.nodes().size());
  for (NodeIndex v = 0; v < net.nodes().size(); ++v) {
    auto& b = sys.nodes[v];
    b.node = v;
    b.capacity = net.node(v).capacity;
    b.unaffected_peak = compute_n_r(table, s, v);
  }
  for (LinkIndex e = 0; e < net.links().size(); ++e) {
    auto& f = fixed_by_link[e];
    if (f.count == 0) continue;
    f.link = e;
    f.node = net.link(e).head;
    sys.nodes[f.node].fixed_inbound += f.count;
    sys.fixed.push_back(std::move(f));
  }

  TransportInstance& inst = sys.instance;
  inst.rows.reserve(sys.rows.size());
  inst.columns.reserve(sys.nodes.size());
  inst.fixed.reserve(sys.fixed.size());
  for (const auto& row : sys.rows) inst.rows.push_back({net.link(row.link).id, row.supply});
  for (const auto& b : sys.nodes) {
    std::optional<std::int64_t> cap;
    if (b.capacity.bounded()) cap = b.capacity.spots() - b.unaffected_peak;
    inst.columns.push_back({net.node(b.node).id, cap});
    if (auto res = b.residual(); res && *res < 0) sys.negative_residual.push_back(b.node);
  }
  for (const auto& f : sys.fixed) inst.fixed.push_back({f.node, f.count});
  for (std::size_t i = 0; i < sys.rows.size(); ++i)
    for (NodeIndex v : g.reachable_backups[sys.rows[i].link]) inst.cells.push_back({i, v, std::nullopt});
  return sys;
}

/// Best-case conditions: rows are definitely affected flights with demand
/// one, columns are nodes, cells are the nodes each flight could divert to.
struct BestCaseSystem {
  std::vector<FlightIndex> flights;
  std::vector<std::vector<NodeIndex>> allowed;  // per row
  std::vector<NodeBudget> nodes;
  std::vector<FlightIndex> isolated;
  TransportInstance instance;
};

inline BestCaseSystem build_best_case_system(const TimelineTable& table, const ClosureScenario& s) {
  const UamNetwork& net = table.network();
  const ClosureGeometry& g = *s.geometry;
  BestCaseSystem sys;
  sys.flights = s.definitely_affected;
  for (FlightIndex j : sys.flights) {
    const FlightTimeline& tl = table.timeline(j);
    const Route& r = table.route_of(j);
    std::vector<char> ok(net.nodes().size(), 0);
    for (std::size_t p = 0; p < r.size(); ++p) {
      LinkIndex e = r.links[p];
      if (!tl.best_window(p, net.link(e).head == g.closed).contains_closed(s.at)) continue;
      for (NodeIndex v : g.reachable_backups[e]) ok[v] = 1;
    }
    std::vector<NodeIndex> allowed;
    for (NodeIndex v = 0; v < ok.size(); ++v)
      if (ok[v]) allowed.push_back(v);
    if (allowed.empty()) sys.isolated.push_back(j);
    sys.allowed.push_back(std::move(allowed));
  }
  sys.nodes.resize(net.nodes().size());
  for (NodeIndex v = 0; v < net.nodes().size(); ++v) {
    auto& b = sys.nodes[v];
    b.node = v;
    b.capacity = net.node(v).capacity;
    b.unaffected_peak = compute_n_r(table, s, v);
  }

  TransportInstance& inst = sys.instance;
  for (FlightIndex j : sys.flights) inst.rows.push_back({table.schedule().flight(j).id, 1});
  for (const auto& b : sys.nodes) {
    std::optional<std::int64_t> cap;
    if (auto res = b.residual()) cap = *res;
    inst.columns.push_back({net.node(b.node).id, cap});
  }
  for (std::size_t i = 0; i < sys.flights.size(); ++i)
    for (NodeIndex v : sys.allowed[i]) inst.cells.push_back({i, v, std::int64_t{1}});
  return sys;
}

}  // namespace vertisafe

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vertisafe/closure.hpp"
#include "vertisafe/model.hpp"
#include "vertisafe/transport.hpp"

namespace vertisafe {

class UnknownObserver : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr const char* kInfeasibleMarker = "x";

/// One emitted row. `values` is aligned with `SeriesTable::columns`;
/// an empty optional is written as the infeasibility marker.
struct SeriesRow {
  Time at;
  std::vector<std::optional<std::int64_t>> values;
  std::optional<std::int64_t> capacity;
  bool safe = true;
};

struct SeriesTable {
  std::vector<std::string> columns;  // between t_c and capacity
  std::vector<SeriesRow> rows;

  void write_csv(std::ostream& out) const {
    out << "t_c";
    for (const auto& c : columns) out << ',' << c;
    out << ",capacity,status\n";
    for (const auto& r : rows) {
      out << r.at.to_string();
      for (const auto& v : r.values) {
        out << ',';
        if (v)
          out << *v;
        else
          out << kInfeasibleMarker;
      }
      out << ',' << (r.capacity ? std::to_string(*r.capacity) : std::string("unbounded"));
      out << ',' << (r.safe ? "safe" : "infeasible") << '\n';
    }
  }
};

/// Worst-case occupancy decomposition at `observed` for closures of
/// `closed`: N_R, fixed inbound counts per link into the node, and the
/// witness amount sent from each reroute link.
inline SeriesTable node_series(const TimelineTable& table, NodeIndex closed, NodeIndex observed) {
  const UamNetwork& net = table.network();
  auto geometry = std::make_shared<const ClosureGeometry>(build_closure_geometry(table, closed));
  SeriesTable out;
  out.columns.push_back("N_R");
  std::vector<LinkIndex> fixed_links;
  for (LinkIndex e = 0; e < net.links().size(); ++e)
    if (net.link(e).head == observed && !geometry->is_affected_link(e)) {
      fixed_links.push_back(e);
      out.columns.push_back("fixed:" + net.link(e).id);
    }
  std::vector<LinkIndex> var_links;
  for (LinkIndex e : geometry->inbound_reroute_links[observed])
    if (geometry->is_affected_link(e)) {
      var_links.push_back(e);
      out.columns.push_back("var:" + net.link(e).id);
    }

  for (Time at : critical_times(table, closed, SafetyCase::worst)) {
    ClosureScenario s = derive_scenario(table, geometry, at);
    WorstCaseSystem sys = build_worst_case_system(table, s);
    SolveOutcome res = solve(sys.instance);
    SeriesRow row;
    row.at = at;
    row.safe = res.feasible;
    row.values.push_back(sys.nodes[observed].unaffected_peak);
    for (LinkIndex e : fixed_links) {
      std::int64_t n = 0;
      for (const auto& f : sys.fixed)
        if (f.link == e) n = f.count;
      row.values.push_back(n);
    }
    for (LinkIndex e : var_links) {
      if (!res.feasible) {
        row.values.push_back(std::nullopt);
        continue;
      }
      std::int64_t n = 0;
      for (std::size_t c = 0; c < sys.instance.cells.size(); ++c) {
        const auto& cell = sys.instance.cells[c];
        if (cell.column == observed && sys.rows[cell.row].link == e) n += res.witness[c];
      }
      row.values.push_back(n);
    }
    if (net.node(observed).capacity.bounded()) row.capacity = net.node(observed).capacity.spots();
    out.rows.push_back(std::move(row));
  }
  return out;
}

/// How the flights on `link` are redistributed over its backups.
inline SeriesTable link_series(const TimelineTable& table, NodeIndex closed, LinkIndex link) {
  const UamNetwork& net = table.network();
  if (net.link(link).head != closed)
    throw UnknownObserver("link " + net.link(link).id + " does not lead into node " + net.node(closed).id);
  auto geometry = std::make_shared<const ClosureGeometry>(build_closure_geometry(table, closed));
  SeriesTable out;
  out.columns.push_back("supply");
  const auto& targets = geometry->reachable_backups[link];
  for (NodeIndex v : targets) out.columns.push_back("to:" + net.node(v).id);

  for (Time at : critical_times(table, closed, SafetyCase::worst)) {
    ClosureScenario s = derive_scenario(table, geometry, at);
    WorstCaseSystem sys = build_worst_case_system(table, s);
    SolveOutcome res = solve(sys.instance);
    SeriesRow row;
    row.at = at;
    row.safe = res.feasible;
    std::size_t r = 0;
    while (sys.rows[r].link != link) ++r;
    row.values.push_back(sys.rows[r].supply);
    for (NodeIndex v : targets) {
      if (!res.feasible) {
        row.values.push_back(std::nullopt);
        continue;
      }
      std::int64_t n = 0;
      for (std::size_t c = 0; c < sys.instance.cells.size(); ++c)
        if (sys.instance.cells[c].row == r && sys.instance.cells[c].column == v) n += res.witness[c];
      row.values.push_back(n);
    }
    row.capacity = sys.rows[r].supply;
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace vertisafe

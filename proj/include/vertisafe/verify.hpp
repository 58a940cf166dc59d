#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "vertisafe/closure.hpp"
#include "vertisafe/model.hpp"
#include "vertisafe/transport.hpp"

namespace vertisafe {

/// Solver outcome with row and column ids resolved for reporting.
struct CaseResult {
  struct Amount {
    std::string row;
    std::string column;
    std::int64_t amount;
  };
  struct Certificate {
    std::vector<std::string> rows;
    std::vector<std::string> columns;
    std::vector<std::pair<std::string, std::string>> boundary_cells;
    std::int64_t demand = 0;
    std::int64_t room = 0;
  };

  bool safe = false;
  std::vector<Amount> assignments;  // nonzero cells only
  std::optional<Certificate> certificate;
};

inline CaseResult describe_outcome(const TransportInstance& inst, const SolveOutcome& out) {
  CaseResult r;
  r.safe = out.feasible;
  if (out.feasible) {
    for (std::size_t c = 0; c < inst.cells.size(); ++c)
      if (out.witness[c] != 0)
        r.assignments.push_back({inst.rows[inst.cells[c].row].label, inst.columns[inst.cells[c].column].label, out.witness[c]});
  } else if (out.certificate) {
    CaseResult::Certificate cert;
    for (auto i : out.certificate->rows) cert.rows.push_back(inst.rows[i].label);
    for (auto k : out.certificate->columns) cert.columns.push_back(inst.columns[k].label);
    for (auto c : out.certificate->boundary_cells)
      cert.boundary_cells.emplace_back(inst.rows[inst.cells[c].row].label, inst.columns[inst.cells[c].column].label);
    cert.demand = out.certificate->demand;
    cert.room = out.certificate->room;
    r.certificate = std::move(cert);
  }
  return r;
}

struct ScenarioRecord {
  NodeIndex closed = 0;
  Time at;
  std::optional<CaseResult> worst;
  std::optional<CaseResult> best;
};

/// Evaluates one (closed node, closure time) pair.
/// With `detailed` unset only the verdicts are filled in.
inline ScenarioRecord evaluate_scenario(const TimelineTable& table, const std::shared_ptr<const ClosureGeometry>& geometry,
                                        Time at, SafetyCase which, bool detailed = true) {
  ScenarioRecord rec;
  rec.closed = geometry->closed;
  rec.at = at;
  ClosureScenario s = derive_scenario(table, geometry, at);
  auto outcome = [detailed](const TransportInstance& inst) {
    SolveOutcome out = solve(inst);
    if (!detailed) return CaseResult{out.feasible, {}, {}};
    return describe_outcome(inst, out);
  };
  if (which != SafetyCase::best) rec.worst = outcome(build_worst_case_system(table, s).instance);
  if (which != SafetyCase::worst) rec.best = outcome(build_best_case_system(table, s).instance);
  return rec;
}

struct VerifyOptions {
  SafetyCase mode = SafetyCase::worst;
  std::optional<NodeIndex> node;  // all nodes when empty
  unsigned jobs = 1;
  bool force = false;             // analyse even when nominally infeasible
  bool shortcut_sources = true;   // sources are safe without evaluation
  bool keep_records = true;
};

struct NodeVerdict {
  NodeIndex node = 0;
  bool source = false;
  bool shortcut = false;
  std::size_t scenarios = 0;
  std::optional<bool> worst_safe;
  std::optional<bool> best_safe;
  std::optional<Time> first_worst_unsafe;
  std::optional<Time> first_best_unsafe;
};

struct VerificationReport {
  SafetyCase mode = SafetyCase::worst;
  FeasibilityReport nominal;
  bool analysed = false;
  std::vector<ScenarioRecord> records;
  std::vector<NodeVerdict> nodes;
  std::optional<bool> worst_safe;
  std::optional<bool> best_safe;

  /// Safe in every requested case; a nominally infeasible schedule is unsafe.
  bool safe() const {
    if (!nominal.feasible && !analysed) return false;
    return worst_safe.value_or(true) && best_safe.value_or(true);
  }
};

/// Runs `fn(i)` for i in [0, n) on up to `jobs` threads.
template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < jobs; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  for (auto& th : pool) th.join();
}

inline VerificationReport verify(const TimelineTable& table, const VerifyOptions& opt = {}) {
  VerificationReport report;
  report.mode = opt.mode;
  report.nominal = check_feasible(table);
  if (!report.nominal.feasible && !opt.force) return report;
  report.analysed = true;

  const UamNetwork& net = table.network();
  std::vector<NodeIndex> targets;
  if (opt.node)
    targets.push_back(*opt.node);
  else
    for (NodeIndex v = 0; v < net.nodes().size(); ++v) targets.push_back(v);

  struct Task {
    std::size_t verdict;
    std::shared_ptr<const ClosureGeometry> geometry;
    Time at;
  };
  std::vector<Task> tasks;
  for (NodeIndex v : targets) {
    NodeVerdict nv;
    nv.node = v;
    nv.source = net.is_source(v);
    if (opt.mode != SafetyCase::best) nv.worst_safe = true;
    if (opt.mode != SafetyCase::worst) nv.best_safe = true;
    if (nv.source && opt.shortcut_sources) {
      nv.shortcut = true;
      report.nodes.push_back(nv);
      continue;
    }
    auto geometry = std::make_shared<const ClosureGeometry>(build_closure_geometry(table, v));
    auto times = critical_times(table, v, opt.mode);
    nv.scenarios = times.size();
    for (Time t : times) tasks.push_back({report.nodes.size(), geometry, t});
    report.nodes.push_back(nv);
  }

  std::vector<ScenarioRecord> results(tasks.size());
  parallel_for(tasks.size(), opt.jobs, [&](std::size_t i) {
    results[i] = evaluate_scenario(table, tasks[i].geometry, tasks[i].at, opt.mode, opt.keep_records);
  });

  for (std::size_t i = 0; i < tasks.size(); ++i) {
    NodeVerdict& nv = report.nodes[tasks[i].verdict];
    const ScenarioRecord& rec = results[i];
    if (rec.worst && !rec.worst->safe) {
      nv.worst_safe = false;
      if (!nv.first_worst_unsafe) nv.first_worst_unsafe = rec.at;
    }
    if (rec.best && !rec.best->safe) {
      nv.best_safe = false;
      if (!nv.first_best_unsafe) nv.first_best_unsafe = rec.at;
    }
  }
  if (opt.mode != SafetyCase::best) {
    report.worst_safe = std::all_of(report.nodes.begin(), report.nodes.end(), [](const NodeVerdict& n) { return *n.worst_safe; });
  }
  if (opt.mode != SafetyCase::worst) {
    report.best_safe = std::all_of(report.nodes.begin(), report.nodes.end(), [](const NodeVerdict& n) { return *n.best_safe; });
  }
  if (opt.keep_records) report.records = std::move(results);
  return report;
}

inline nlohmann::ordered_json case_to_json(const CaseResult& c) {
  nlohmann::ordered_json j;
  j["safe"] = c.safe;
  if (c.safe) {
    j["assignments"] = nlohmann::ordered_json::array();
    for (const auto& a : c.assignments) j["assignments"].push_back({{"row", a.row}, {"node", a.column}, {"count", a.amount}});
  } else if (c.certificate) {
    nlohmann::ordered_json cert;
    cert["rows"] = c.certificate->rows;
    cert["nodes"] = c.certificate->columns;
    cert["boundary"] = nlohmann::ordered_json::array();
    for (const auto& [r, k] : c.certificate->boundary_cells) cert["boundary"].push_back({r, k});
    cert["demand"] = c.certificate->demand;
    cert["room"] = c.certificate->room;
    j["certificate"] = std::move(cert);
  }
  return j;
}

inline std::string mode_name(SafetyCase m) {
  switch (m) {
    case SafetyCase::worst: return "worst";
    case SafetyCase::best: return "best";
    case SafetyCase::both: return "both";
  }
  return "worst";
}

inline nlohmann::ordered_json report_to_json(const VerificationReport& rep, const TimelineTable& table) {
  const UamNetwork& net = table.network();
  nlohmann::ordered_json j;
  j["mode"] = mode_name(rep.mode);
  j["nominal"]["feasible"] = rep.nominal.feasible;
  j["nominal"]["violations"] = nlohmann::ordered_json::array();
  for (const auto& v : rep.nominal.violations) {
    nlohmann::ordered_json f = nlohmann::ordered_json::array();
    for (auto k : v.flights) f.push_back(table.schedule().flight(k).id);
    j["nominal"]["violations"].push_back({{"node", net.node(v.node).id}, {"time", v.at.to_string()}, {"flights", f}});
  }
  j["analysed"] = rep.analysed;
  auto opt_bool = [](std::optional<bool> b) -> nlohmann::ordered_json { return b ? nlohmann::ordered_json(*b) : nlohmann::ordered_json(); };
  j["worst_safe"] = opt_bool(rep.worst_safe);
  j["best_safe"] = opt_bool(rep.best_safe);
  j["nodes"] = nlohmann::ordered_json::array();
  for (const auto& n : rep.nodes) {
    nlohmann::ordered_json o;
    o["node"] = net.node(n.node).id;
    o["source"] = n.source;
    o["scenarios"] = n.scenarios;
    o["worst_safe"] = opt_bool(n.worst_safe);
    o["best_safe"] = opt_bool(n.best_safe);
    if (n.first_worst_unsafe) o["first_worst_unsafe"] = n.first_worst_unsafe->to_string();
    if (n.first_best_unsafe) o["first_best_unsafe"] = n.first_best_unsafe->to_string();
    j["nodes"].push_back(std::move(o));
  }
  j["scenarios"] = nlohmann::ordered_json::array();
  for (const auto& r : rep.records) {
    nlohmann::ordered_json o;
    o["closed"] = net.node(r.closed).id;
    o["time"] = r.at.to_string();
    if (r.worst) o["worst"] = case_to_json(*r.worst);
    if (r.best) o["best"] = case_to_json(*r.best);
    j["scenarios"].push_back(std::move(o));
  }
  return j;
}

}  // namespace vertisafe

// vertisafe: check a flight schedule against single vertiport closures.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vertisafe/generate.hpp"
#include "vertisafe/io.hpp"
#include "vertisafe/series.hpp"
#include "vertisafe/simulator.hpp"
#include "vertisafe/verify.hpp"

namespace {

using namespace vertisafe;

constexpr int kSafe = 0;
constexpr int kInputError = 1;
constexpr int kUnsafe = 2;

struct Common {
  std::string network;
  std::string schedule;
  std::string semantics = "right-open";
};

OccupancySemantics semantics_of(const std::string& s) {
  return s == "closed" ? OccupancySemantics::closed : OccupancySemantics::right_open;
}

NodeIndex node_or_throw(const UamNetwork& net, const std::string& id) {
  auto v = net.find_node(id);
  if (!v) throw UnknownObserver("unknown node \"" + id + "\"");
  return *v;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Schedule safety under a single vertiport closure"};
  app.require_subcommand(1);
  const std::vector<std::string> semantics_names{"right-open", "closed"};

  // verify
  Common vc;
  std::string mode = "worst";
  std::string node;
  unsigned jobs = 1;
  bool force = false;
  bool timing = false;
  std::string out_path;
  auto* verify_cmd = app.add_subcommand("verify", "Check closure safety; exit 0 safe, 2 unsafe, 1 bad input");
  verify_cmd->add_option("network", vc.network, "Network file")->required();
  verify_cmd->add_option("schedule", vc.schedule, "Schedule file")->required();
  verify_cmd->add_option("--mode", mode, "worst, best or both")->check(CLI::IsMember({"worst", "best", "both"}));
  verify_cmd->add_option("--node", node, "Only closures of this node");
  verify_cmd->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  verify_cmd->add_flag("--force", force, "Analyse closures even if the schedule is nominally infeasible");
  verify_cmd->add_option("--semantics", vc.semantics)->check(CLI::IsMember(semantics_names));
  verify_cmd->add_flag("--timing", timing, "Add wall time to the report");
  verify_cmd->add_option("--out", out_path, "Report path (stdout by default)");

  // emit-series
  Common sc;
  std::string closed_id;
  std::string observe;
  std::string series_out;
  auto* series_cmd = app.add_subcommand("emit-series", "Write the worst-case occupancy decomposition as CSV");
  series_cmd->add_option("network", sc.network)->required();
  series_cmd->add_option("schedule", sc.schedule)->required();
  series_cmd->add_option("--node", closed_id, "Closed node")->required();
  series_cmd->add_option("--observe", observe, "Node or link to observe")->required();
  series_cmd->add_option("--semantics", sc.semantics)->check(CLI::IsMember(semantics_names));
  series_cmd->add_option("--out", series_out);

  // generate
  std::string gen_network;
  GenerateOptions gen;
  std::string gen_horizon;
  std::string gen_out;
  std::string gen_semantics = "right-open";
  auto* gen_cmd = app.add_subcommand("generate", "Sample a nominally feasible random schedule");
  gen_cmd->add_option("network", gen_network)->required();
  gen_cmd->add_option("--count", gen.count)->required()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen.seed);
  gen_cmd->add_option("--horizon", gen_horizon, "Latest departure (default 3 per flight)");
  gen_cmd->add_option("--attempts", gen.attempts, "Draw budget (default 1000 per flight)");
  gen_cmd->add_option("--semantics", gen_semantics)->check(CLI::IsMember(semantics_names));
  gen_cmd->add_option("--out", gen_out);

  // benchmark
  std::string bench_network;
  std::vector<std::size_t> sizes;
  std::uint64_t bench_seed = 0;
  unsigned bench_jobs = 1;
  unsigned bench_repeat = 1;
  std::string bench_out;
  auto* bench_cmd = app.add_subcommand("benchmark", "Time worst-case 1-closure verification over schedule sizes");
  bench_cmd->add_option("network", bench_network)->required();
  bench_cmd->add_option("--sizes", sizes)->required()->delimiter(',');
  bench_cmd->add_option("--seed", bench_seed);
  bench_cmd->add_option("--jobs", bench_jobs)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--repeat", bench_repeat, "Runs per size; the fastest is kept")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--out", bench_out);

  // simulate
  Common mc;
  std::string sim_node;
  std::size_t samples = 1000;
  std::uint64_t sim_seed = 0;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte-Carlo check of worst-case safe scenarios");
  sim_cmd->add_option("network", mc.network)->required();
  sim_cmd->add_option("schedule", mc.schedule)->required();
  sim_cmd->add_option("--node", sim_node, "Only closures of this node");
  sim_cmd->add_option("--samples", samples);
  sim_cmd->add_option("--seed", sim_seed);
  sim_cmd->add_option("--semantics", mc.semantics)->check(CLI::IsMember(semantics_names));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }

  try {
    if (*verify_cmd) {
      const UamNetwork net = load_network(vc.network);
      const FlightSchedule schedule = load_schedule(net, vc.schedule);
      const TimelineTable table(net, schedule, semantics_of(vc.semantics));
      VerifyOptions opt;
      opt.mode = mode == "best" ? SafetyCase::best : mode == "both" ? SafetyCase::both : SafetyCase::worst;
      if (!node.empty()) opt.node = node_or_throw(net, node);
      opt.jobs = jobs;
      opt.force = force;
      const auto start = std::chrono::steady_clock::now();
      const VerificationReport rep = verify(table, opt);
      const auto stop = std::chrono::steady_clock::now();
      auto j = report_to_json(rep, table);
      if (timing) j["seconds"] = std::chrono::duration<double>(stop - start).count();
      emit(out_path, j.dump(2) + "\n");
      if (!rep.nominal.feasible && !rep.analysed)
        std::cerr << "schedule is nominally infeasible; closure analysis skipped (use --force)\n";
      return rep.safe() ? kSafe : kUnsafe;
    }

    if (*series_cmd) {
      const UamNetwork net = load_network(sc.network);
      const FlightSchedule schedule = load_schedule(net, sc.schedule);
      const TimelineTable table(net, schedule, semantics_of(sc.semantics));
      const NodeIndex closed = node_or_throw(net, closed_id);
      SeriesTable series;
      if (auto v = net.find_node(observe))
        series = node_series(table, closed, *v);
      else if (auto e = net.find_link(observe))
        series = link_series(table, closed, *e);
      else
        throw UnknownObserver("unknown node or link \"" + observe + "\"");
      std::ostringstream ss;
      series.write_csv(ss);
      emit(series_out, ss.str());
      return kSafe;
    }

    if (*gen_cmd) {
      const UamNetwork net = load_network(gen_network);
      if (!gen_horizon.empty()) {
        auto h = Time::parse(gen_horizon);
        if (!h || *h < Time()) throw std::invalid_argument("bad --horizon \"" + gen_horizon + "\"");
        gen.horizon = *h;
      }
      gen.semantics = semantics_of(gen_semantics);
      const FlightSchedule schedule = generate_schedule(net, gen);
      emit(gen_out, serialize_schedule(net, schedule));
      return kSafe;
    }

    if (*bench_cmd) {
      const UamNetwork net = load_network(bench_network);
      const BenchmarkResult res = run_benchmark(net, sizes, bench_seed, bench_jobs, bench_repeat);
      std::ostringstream ss;
      ss << "size,seconds,scenarios,safe\n";
      for (const auto& r : res.rows) ss << r.size << ',' << r.seconds << ',' << r.scenarios << ',' << (r.safe ? 1 : 0) << '\n';
      if (res.exponent) ss << "# exponent " << *res.exponent << '\n';
      emit(bench_out, ss.str());
      return kSafe;
    }

    if (*sim_cmd) {
      const UamNetwork net = load_network(mc.network);
      const FlightSchedule schedule = load_schedule(net, mc.schedule);
      const TimelineTable table(net, schedule, semantics_of(mc.semantics));
      std::vector<NodeIndex> targets;
      if (!sim_node.empty())
        targets.push_back(node_or_throw(net, sim_node));
      else
        for (NodeIndex v = 0; v < net.nodes().size(); ++v) targets.push_back(v);
      bool sound = true;
      for (NodeIndex v : targets) {
        const SoundnessSummary s = check_soundness(table, v, samples, sim_seed);
        std::cout << net.node(v).id << ": " << s.scenarios << " safe scenarios, " << s.realizations << " runs, "
                  << s.violating_runs << " with violations\n";
        for (const auto& ex : s.examples)
          std::cout << "  closure at " << ex.at.to_string() << " seed " << ex.seed << ": node "
                    << net.node(ex.violation.node).id << " holds " << ex.violation.occupancy << " > "
                    << ex.violation.capacity << " at " << ex.violation.at.to_string() << '\n';
        sound = sound && s.sound();
      }
      return sound ? kSafe : kUnsafe;
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}

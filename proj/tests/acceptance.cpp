// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <iostream>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "vertisafe/generate.hpp"
#include "vertisafe/io.hpp"
#include "vertisafe/oracle.hpp"
#include "vertisafe/series.hpp"
#include "vertisafe/simulator.hpp"
#include "vertisafe/verify.hpp"

using namespace vertisafe;

namespace {

const std::string kData = VERTISAFE_DATA_DIR;

UamNetwork network(const std::string& name) { return load_network(kData + "/" + name + ".network.json"); }

FlightSchedule example2_schedule(const UamNetwork& net, Time delta3) {
  ScheduleDescription d;
  d.flights.push_back({"S1", "R2", Time::units(1)});
  d.flights.push_back({"S2", "R2", Time::units(8)});
  d.flights.push_back({"S3", "R1", delta3});
  return build_schedule(net, d);
}

struct Fixture {
  std::string name;
  UamNetwork net;
  FlightSchedule schedule;
};

std::vector<Fixture> fixtures() {
  std::vector<Fixture> out;
  for (const char* n : {"example2", "example2_c2_3", "example2_c3_2"}) {
    UamNetwork net = network(n);
    for (int d : {0, 4, 5, 10}) {
      FlightSchedule s = example2_schedule(net, Time::units(d));
      out.push_back({std::string(n) + "/delta" + std::to_string(d), net, s});
    }
  }
  for (const char* n : {"example1", "example1_c4_8"}) {
    UamNetwork net = network(n);
    for (const char* s : {"example1_unsafe40", "example1_v4contention"})
      out.push_back({std::string(n) + "/" + s, net, load_schedule(net, kData + "/" + s + ".schedule.json")});
  }
  return out;
}

bool worst_safe_at(const TimelineTable& t, NodeIndex v, Time at) {
  return evaluate_scenario(t, std::make_shared<const ClosureGeometry>(build_closure_geometry(t, v)), at, SafetyCase::worst)
      .worst->safe;
}

bool best_safe_at(const TimelineTable& t, NodeIndex v, Time at) {
  return evaluate_scenario(t, std::make_shared<const ClosureGeometry>(build_closure_geometry(t, v)), at, SafetyCase::best)
      .best->safe;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Clock {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double s) {
  std::ostringstream ss;
  ss.precision(3);
  ss << std::fixed << s << "s";
  return ss.str();
}

Outcome criterion1() {
  Clock clock;
  const UamNetwork net = network("example2");
  const NodeIndex v4 = *net.find_node("v4");
  std::ostringstream bad;
  auto check = [&](int d, bool want_worst) {
    FlightSchedule s = example2_schedule(net, Time::units(d));
    TimelineTable t(net, s);
    bool w = worst_safe_at(t, v4, Time::units(15));
    if (w != want_worst) bad << " worst(delta3=" << d << ")=" << (w ? "safe" : "unsafe");
  };
  for (int d : {0, 1, 2, 3, 4}) check(d, true);
  for (int d : {5, 8, 10}) check(d, false);
  for (int d = 0; d <= 12; ++d) {
    FlightSchedule s = example2_schedule(net, Time::units(d));
    TimelineTable t(net, s);
    if (!best_safe_at(t, v4, Time::units(15))) bad << " best(delta3=" << d << ")=unsafe";
  }
  const double secs = clock.seconds();
  if (secs >= 1.0) bad << " runtime " << fmt(secs);
  return {bad.str().empty(), bad.str().empty() ? "boundary at delta3 <= 4, best case safe for 0..12, " + fmt(secs)
                                               : "mismatch:" + bad.str()};
}

Outcome criterion2() {
  Clock clock;
  std::ostringstream bad;
  {
    const UamNetwork net = network("example2_c2_3");
    FlightSchedule s = example2_schedule(net, Time::units(10));
    TimelineTable t(net, s);
    VerifyOptions node_opt;
    node_opt.node = *net.find_node("v4");
    if (!verify(t, node_opt).safe()) bad << " C_v2=3: not node-conditionally safe for v4;";
    if (!verify(t, VerifyOptions{}).safe()) bad << " C_v2=3: not 1-closure safe;";
  }
  {
    const UamNetwork net = network("example2_c3_2");
    const NodeIndex v4 = *net.find_node("v4");
    std::vector<int> at15_unsafe;
    std::vector<int> node_mismatch;
    for (int d = 0; d <= 12; ++d) {
      FlightSchedule s = example2_schedule(net, Time::units(d));
      TimelineTable t(net, s);
      if (!worst_safe_at(t, v4, Time::units(15))) at15_unsafe.push_back(d);
      VerifyOptions opt;
      opt.node = v4;
      const VerificationReport rep = verify(t, opt);
      if (rep.safe() != (d >= 4)) node_mismatch.push_back(d);
    }
    auto list = [](const std::vector<int>& v) {
      std::string s;
      for (int d : v) s += (s.empty() ? "" : ",") + std::to_string(d);
      return s;
    };
    if (!at15_unsafe.empty()) bad << " C_v3=2: unsafe at (v4,15) for delta3 in {" << list(at15_unsafe) << "};";
    if (!node_mismatch.empty())
      bad << " C_v3=2: node-conditional verdict differs from 'safe iff delta3 >= 4' for delta3 in {"
          << list(node_mismatch) << "} (boundary-semantics open question; see decisions ledger);";
  }
  const double secs = clock.seconds();
  if (secs >= 5.0) bad << " runtime " << fmt(secs);
  return {bad.str().empty(), bad.str().empty() ? "both variants as stated, " + fmt(secs) : bad.str()};
}

/// Random scenario source shared by criteria 3 and 5.
struct RandomScenario {
  UamNetwork net;
  FlightSchedule schedule;
  NodeIndex closed;
  Time at;
};

RandomScenario random_scenario(const UamNetwork& base, std::mt19937_64& rng) {
  UamNetwork net = base;
  for (NodeIndex v = 0; v < net.nodes().size(); ++v) {
    if (!net.node(v).capacity.bounded()) continue;
    std::uniform_int_distribution<std::int64_t> cap(1, net.node(v).capacity.spots());
    net = net.with_capacity(v, Capacity::finite(cap(rng)));
  }
  std::uniform_int_distribution<std::size_t> n_flights(1, 6);
  std::uniform_int_distribution<std::size_t> route(0, net.routes().size() - 1);
  std::uniform_int_distribution<std::int64_t> depart(0, 30 * 2);
  ScheduleDescription d;
  const std::size_t n = n_flights(rng);
  for (std::size_t i = 0; i < n; ++i)
    d.flights.push_back({"F" + std::to_string(i + 1), net.route(route(rng)).id, Time::from_ticks(depart(rng) * Time::kTicksPerUnit / 2)});
  FlightSchedule s = build_schedule(net, d);
  std::uniform_int_distribution<NodeIndex> node(1, net.nodes().size() - 1);
  const NodeIndex closed = node(rng);
  TimelineTable t(net, s);
  auto times = critical_times(t, closed, SafetyCase::both);
  Time at = Time::units(10);
  if (!times.empty()) at = times[std::uniform_int_distribution<std::size_t>(0, times.size() - 1)(rng)];
  return {net, s, closed, at};
}

Outcome criterion3() {
  Clock clock;
  const UamNetwork base = network("example1");
  std::mt19937_64 rng(20240601);
  std::size_t trials = 0, disagreements = 0, bad_witness = 0, feasible = 0, skipped = 0;
  while (trials < 1000) {
    RandomScenario rs = random_scenario(base, rng);
    TimelineTable t(rs.net, rs.schedule);
    ClosureScenario s = derive_scenario(t, rs.closed, rs.at);
    for (const TransportInstance& inst :
         {build_worst_case_system(t, s).instance, build_best_case_system(t, s).instance}) {
      EnumerationResult oracle;
      try {
        oracle = enumerate_assignments(inst);
      } catch (const SearchSpaceTooLarge&) {
        ++skipped;
        continue;
      }
      const SolveOutcome out = solve(inst);
      ++trials;
      if (out.feasible != oracle.feasible) ++disagreements;
      if (out.feasible) {
        ++feasible;
        if (!validate_witness(inst, out.witness)) ++bad_witness;
      } else if (!out.certificate || !validate_certificate(inst, *out.certificate)) {
        ++bad_witness;
      }
    }
  }
  const double secs = clock.seconds();
  const bool pass = disagreements == 0 && bad_witness == 0 && secs < 120;
  std::ostringstream d;
  d << trials << " instances (" << feasible << " feasible, " << skipped << " over search bound), " << disagreements
    << " disagreements, " << bad_witness << " invalid witnesses or certificates, " << fmt(secs);
  return {pass, d.str()};
}

Outcome criterion4(const std::vector<Fixture>& fx) {
  Clock clock;
  struct Job {
    const Fixture* f;
    NodeIndex v;
  };
  std::vector<Job> jobs;
  for (const auto& f : fx) {
    TimelineTable t(f.net, f.schedule);
    if (!check_feasible(t).feasible) continue;
    for (NodeIndex v = 0; v < f.net.nodes().size(); ++v) jobs.push_back({&f, v});
  }
  std::vector<SoundnessSummary> results(jobs.size());
  std::vector<std::string> errors(jobs.size());
  parallel_for(jobs.size(), std::max(1u, std::thread::hardware_concurrency()), [&](std::size_t i) {
    TimelineTable t(jobs[i].f->net, jobs[i].f->schedule);
    try {
      results[i] = check_soundness(t, jobs[i].v, 1000, 77 + i);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  std::size_t scenarios = 0, runs = 0, violating = 0;
  std::ostringstream where;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    scenarios += results[i].scenarios;
    runs += results[i].realizations;
    violating += results[i].violating_runs;
    if (!errors[i].empty()) where << " " << jobs[i].f->name << "@" << jobs[i].f->net.node(jobs[i].v).id << ": " << errors[i] << ";";
    if (results[i].violating_runs && where.str().size() < 400) {
      const auto& ex = results[i].examples.front();
      where << " " << jobs[i].f->name << " closing " << jobs[i].f->net.node(jobs[i].v).id << " at "
            << ex.at.to_string() << " overfills " << jobs[i].f->net.node(ex.violation.node).id << " ("
            << results[i].violating_runs << " runs);";
    }
  }
  const double secs = clock.seconds();
  const bool pass = violating == 0 && where.str().empty() && secs < 120;
  std::ostringstream d;
  d << scenarios << " safe scenarios, " << runs << " realizations, " << violating << " with violations, " << fmt(secs)
    << where.str();
  return {pass, d.str()};
}

Outcome criterion5() {
  Clock clock;
  const UamNetwork base = network("example1");
  std::mt19937_64 rng(99);
  std::size_t checked = 0, worst_safe = 0, counter = 0;
  for (int i = 0; i < 2000; ++i) {
    RandomScenario rs = random_scenario(base, rng);
    TimelineTable t(rs.net, rs.schedule);
    auto g = std::make_shared<const ClosureGeometry>(build_closure_geometry(t, rs.closed));
    for (Time at : critical_times(t, rs.closed, SafetyCase::both)) {
      ScenarioRecord r = evaluate_scenario(t, g, at, SafetyCase::both);
      ++checked;
      if (r.worst->safe) {
        ++worst_safe;
        if (!r.best->safe) ++counter;
      }
    }
  }
  const UamNetwork big = network("example1_plus10");
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    GenerateOptions g;
    g.count = 60;
    g.seed = seed;
    FlightSchedule s = generate_schedule(big, g);
    TimelineTable t(big, s);
    VerifyOptions opt;
    opt.mode = SafetyCase::both;
    opt.shortcut_sources = false;
    for (const auto& r : verify(t, opt).records) {
      ++checked;
      if (r.worst->safe) {
        ++worst_safe;
        if (!r.best->safe) ++counter;
      }
    }
  }
  std::ostringstream d;
  d << checked << " scenarios, " << worst_safe << " worst-case safe, " << counter << " counterexamples, "
    << fmt(clock.seconds());
  return {counter == 0, d.str()};
}

Outcome criterion6(const std::vector<Fixture>& fx) {
  std::size_t checked = 0, failures = 0;
  std::ostringstream where;
  for (const auto& f : fx) {
    TimelineTable t(f.net, f.schedule);
    if (!check_feasible(t).feasible) continue;
    for (NodeIndex v = 0; v < f.net.nodes().size(); ++v) {
      if (!f.net.is_source(v)) continue;
      VerifyOptions opt;
      opt.node = v;
      opt.mode = SafetyCase::both;
      opt.shortcut_sources = false;
      ++checked;
      if (!verify(t, opt).safe()) {
        ++failures;
        where << " " << f.name << "@" << f.net.node(v).id;
      }
    }
  }
  std::ostringstream d;
  d << checked << " source closures evaluated in full, " << failures << " failures" << where.str();
  return {failures == 0 && checked > 0, d.str()};
}

Outcome criterion7() {
  const UamNetwork net = network("example1_plus10");
  std::vector<std::size_t> sizes;
  for (std::size_t n = 100; n <= 1000; n += 100) sizes.push_back(n);
  const BenchmarkResult res = run_benchmark(net, sizes, 2024, 1, 5);
  std::ostringstream d;
  const double last = res.rows.back().seconds;
  d << "exponent " << (res.exponent ? *res.exponent : 0.0) << ", 1000 flights in " << fmt(last) << " (";
  for (const auto& r : res.rows) d << r.size << ":" << fmt(r.seconds) << (r.size == 1000 ? "" : " ");
  d << ")";
  const bool pass = res.exponent && *res.exponent >= 1.6 && *res.exponent <= 2.4 && last < 120;
  return {pass, d.str()};
}

Outcome criterion8(const std::vector<Fixture>& fx) {
  std::size_t rows = 0, bad = 0;
  std::ostringstream where;
  for (const auto& f : fx) {
    TimelineTable t(f.net, f.schedule);
    if (!check_feasible(t).feasible) continue;
    for (NodeIndex closed = 0; closed < f.net.nodes().size(); ++closed) {
      if (f.net.is_source(closed)) continue;
      auto g = std::make_shared<const ClosureGeometry>(build_closure_geometry(t, closed));
      for (NodeIndex v = 0; v < f.net.nodes().size(); ++v) {
        if (v == closed) continue;
        const SeriesTable series = node_series(t, closed, v);
        for (const auto& row : series.rows) {
          ++rows;
          const bool verdict = evaluate_scenario(t, g, row.at, SafetyCase::worst).worst->safe;
          const bool marker = !row.safe || std::any_of(row.values.begin(), row.values.end(), [](const auto& x) { return !x; });
          std::int64_t stack = 0;
          for (const auto& x : row.values) stack += x.value_or(0);
          const bool fits = !row.capacity || stack <= *row.capacity;
          const bool ok = verdict == row.safe && (verdict ? (!marker && fits) : marker);
          if (!ok) {
            ++bad;
            if (where.str().size() < 300)
              where << " " << f.name << " closing " << f.net.node(closed).id << " observing " << f.net.node(v).id << " at "
                    << row.at.to_string() << ";";
          }
        }
      }
    }
  }
  std::ostringstream d;
  d << rows << " rows checked, " << bad << " inconsistencies" << where.str();
  return {bad == 0 && rows > 0, d.str()};
}

}  // namespace

int main() {
  const std::vector<Fixture> fx = fixtures();
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 example-2 worst/best boundary at (v4, 15)", criterion1},
      {"2 example-2 capacity variants", criterion2},
      {"3 solver agrees with exhaustive enumeration", criterion3},
      {"4 Monte-Carlo soundness of worst-case safe scenarios", [&] { return criterion4(fx); }},
      {"5 worst-case safe implies best-case safe", criterion5},
      {"6 source closures are safe", [&] { return criterion6(fx); }},
      {"7 quadratic scaling of 1-closure verification", criterion7},
      {"8 emitted series agree with verdicts", [&] { return criterion8(fx); }},
  };
  int failed = 0;
  for (auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << name << ": " << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}

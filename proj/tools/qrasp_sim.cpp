// qrasp-sim: command-line front end for the mesh NoC simulator.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "qrasp/config.hpp"
#include "qrasp/engine.hpp"
#include "qrasp/report.hpp"

namespace {

using namespace qrasp;

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kDrainTimeout = 3,
  kTurnCheckFailed = 4,
};

// --out wins; otherwise $QRASP_OUT_DIR/<name>; otherwise stdout ("-").
std::string resolve_out(const std::string& flag, const std::string& default_name) {
  if (!flag.empty()) return flag;
  if (const char* dir = std::getenv("QRASP_OUT_DIR"); dir && *dir)
    return (std::filesystem::path(dir) / default_name).string();
  return "-";
}

void emit(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

SimConfig base_config(const std::string& path) {
  return path.empty() ? SimConfig{} : load_config(path);
}

int cmd_run(const std::string& config, std::optional<std::uint64_t> seed, const std::string& out,
            const std::string& timeseries, const std::string& trace) {
  SimConfig cfg = base_config(config);
  if (seed) cfg.seed = *seed;
  Simulator sim(cfg);
  std::ofstream trace_os;
  if (!trace.empty()) {
    trace_os.open(trace, std::ios::binary);
    if (!trace_os) throw std::runtime_error("cannot write " + trace);
    sim.set_trace(&trace_os);
  }
  SweepRow row{cfg.policy.kind, cfg.traffic.label(), cfg.traffic.injection_rate, cfg.seed, sim.run()};

  std::ostringstream csv;
  write_provenance(csv, cfg);
  write_results(csv, {row});
  emit(resolve_out(out, "run.csv"), csv.str());
  if (!timeseries.empty()) {
    std::ostringstream ts;
    write_provenance(ts, cfg);
    write_timeseries(ts, row.stats);
    emit(timeseries, ts.str());
  }
  if (row.stats.saturated) {
    std::cerr << fmt::format("drain timeout after {} cycles: {}\n", cfg.drain_timeout, row.stats.census);
    return kDrainTimeout;
  }
  return kOk;
}

int cmd_sweep(const std::string& config, const std::vector<double>& rates,
              const std::vector<std::string>& policy_names, const std::vector<std::uint64_t>& seeds,
              const std::string& out, unsigned jobs) {
  SimConfig cfg = base_config(config);
  std::vector<PolicyKind> policies;
  for (const auto& name : policy_names) policies.push_back(parse_policy(name));
  if (policies.empty()) policies.push_back(cfg.policy.kind);
  std::vector<std::uint64_t> seed_list = seeds.empty() ? std::vector{cfg.seed} : seeds;
  std::vector<double> rate_list = rates.empty() ? std::vector{cfg.traffic.injection_rate} : rates;

  const auto rows = sweep(cfg, rate_list, policies, seed_list, jobs);

  std::string policies_s, rates_s, seeds_s;
  for (auto p : policies) policies_s += (policies_s.empty() ? "" : ",") + std::string(to_string(p));
  for (auto r : rate_list) rates_s += (rates_s.empty() ? "" : ",") + fmt::format("{}", r);
  for (auto s : seed_list) seeds_s += (seeds_s.empty() ? "" : ",") + std::to_string(s);
  std::ostringstream csv;
  write_provenance(csv, cfg,
                   {"sweep policies = " + policies_s, "sweep rates = " + rates_s,
                    "sweep seeds = " + seeds_s});
  write_results(csv, rows);
  emit(resolve_out(out, "sweep.csv"), csv.str());
  for (const auto& r : rows)
    if (r.stats.saturated)
      std::cerr << fmt::format("saturated: {} rate={} seed={}\n", to_string(r.policy), r.rate, r.seed);
  return kOk;
}

int cmd_verify_turns(int max_side) {
  bool ok = true;
  int meshes = 0;
  const TurnRule all_turns = [](Direction in, Direction out) {
    return in == Direction::Local || out == Direction::Local || out != opposite(in);
  };
  for (int w = 2; w <= max_side; ++w)
    for (int h = 2; h <= max_side; ++h) {
      const MeshConfig mesh{w, h};
      const bool a = cdg_acyclic(VcClass::A, mesh);
      const bool b = cdg_acyclic(VcClass::B, mesh);
      const bool control = cdg_acyclic(all_turns, mesh);
      ++meshes;
      if (!a || !b || control) {
        ok = false;
        std::cout << fmt::format("{}x{}: class A {}, class B {}, all-turns control {}\n", w, h,
                                 a ? "acyclic" : "CYCLIC", b ? "acyclic" : "CYCLIC",
                                 control ? "ACYCLIC (unexpected)" : "cyclic");
      }
    }
  std::cout << fmt::format(
      "class A (no turn east/west after travelling south): acyclic on all {} meshes 2x2..{}x{}\n"
      "class B (no turn east/west after travelling north): acyclic on all {} meshes\n"
      "all-turns control: cyclic on all {} meshes\n",
      meshes, max_side, max_side, meshes, meshes);
  if (!ok) std::cout << "turn check FAILED\n";
  return ok ? kOk : kTurnCheckFailed;
}

int cmd_dump_qtable(const std::string& config, std::optional<std::uint64_t> seed,
                    std::optional<int> node, const std::string& out) {
  SimConfig cfg = base_config(config);
  if (seed) cfg.seed = *seed;
  Simulator sim(cfg);
  const StatsRecord stats = sim.run();
  if (!sim.policy().has_tables())
    throw InputError(fmt::format("policy '{}' keeps no Q-tables", to_string(cfg.policy.kind)));
  const int n_nodes = cfg.mesh.node_count();
  if (node && (*node < 0 || *node >= n_nodes))
    throw InputError(fmt::format("--node must lie in [0, {})", n_nodes));

  std::ostringstream csv;
  write_provenance(csv, cfg);
  csv << "node,dest,q_h,q_v,route\n";
  for (int n = node.value_or(0); n < (node ? *node + 1 : n_nodes); ++n) {
    std::ostringstream one;
    sim.policy().dump_table(n, one);
    std::istringstream lines(one.str());
    std::string line;
    std::getline(lines, line);  // per-table header
    while (std::getline(lines, line)) csv << n << ',' << line << '\n';
  }
  emit(resolve_out(out, "qtable.csv"), csv.str());
  return stats.saturated ? kDrainTimeout : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cycle-level 2D-mesh NoC simulator with Q-learning routing policies"};
  app.require_subcommand(1);

  std::string config, out, timeseries, trace;
  std::optional<std::uint64_t> seed;

  auto* run = app.add_subcommand("run", "Run one simulation and write a one-row CSV");
  run->add_option("--config", config, "Config file (defaults apply when omitted)");
  run->add_option("--seed", seed, "Override [run] seed");
  run->add_option("--out", out, "Output CSV path, '-' for stdout");
  run->add_option("--timeseries", timeseries, "Also write per-window mean latency CSV");
  run->add_option("--trace", trace, "Write the per-cycle router event trace");

  std::vector<double> rates;
  std::vector<std::string> policies;
  std::vector<std::uint64_t> seeds;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  auto* sw = app.add_subcommand("sweep", "Run the policy x rate x seed cartesian product");
  sw->add_option("--config", config, "Config file (defaults apply when omitted)");
  sw->add_option("--rates", rates, "Injection rates in flits/node/cycle")->delimiter(',');
  sw->add_option("--policies", policies, "xy,dyad,qr,bilcq,crq,qrasp")->delimiter(',');
  sw->add_option("--seeds", seeds, "Seeds")->delimiter(',');
  sw->add_option("--out", out, "Output CSV path, '-' for stdout");
  sw->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  int max_side = 8;
  auto* vt = app.add_subcommand("verify-turns", "Check channel-dependency acyclicity of both VC classes");
  vt->add_option("--max-side", max_side, "Largest mesh side to check")->check(CLI::Range(2, 32));

  std::optional<int> node;
  auto* dq = app.add_subcommand("dump-qtable", "Run the config, then dump Q-tables as CSV");
  dq->add_option("--config", config, "Config file (defaults apply when omitted)");
  dq->add_option("--seed", seed, "Override [run] seed");
  dq->add_option("--node", node, "Only this router");
  dq->add_option("--out", out, "Output CSV path, '-' for stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (run->parsed()) return cmd_run(config, seed, out, timeseries, trace);
    if (sw->parsed()) return cmd_sweep(config, rates, policies, seeds, out, jobs);
    if (vt->parsed()) return cmd_verify_turns(max_side);
    if (dq->parsed()) return cmd_dump_qtable(config, seed, node, out);
  } catch (const InputError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}

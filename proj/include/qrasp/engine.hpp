#pragma once

// Simulation driver: warmup, measurement and drain phases on top of the
// router network, plus sweeps and the saturation search used by experiments.

#include <cstdint>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "qrasp/packet.hpp"
#include "qrasp/policy.hpp"
#include "qrasp/router.hpp"
#include "qrasp/rng.hpp"
#include "qrasp/traffic.hpp"

namespace qrasp {

struct SimConfig {
  MeshConfig mesh;
  RouterParams router;
  PolicyConfig policy;
  TrafficSchedule traffic;
  Cycle warmup_cycles = 10000;
  Cycle measure_cycles = 100000;
  Cycle drain_timeout = 50000;
  std::uint64_t seed = 1;
  Cycle window_cycles = 1000;

  // Throws InputError on any out-of-range field.
  void validate() const;
};

struct WindowStat {
  Cycle start = 0;
  Cycle end = 0;
  PatternKind pattern = PatternKind::Uniform;  // pattern active at window start
  std::uint64_t delivered = 0;
  double mean_latency = 0.0;
};

struct PacketTrace {
  std::uint64_t serial = 0;
  NodeId src = 0;
  NodeId dst = 0;
  Cycle created = 0;
  Cycle entered = 0;
  Cycle ejected = 0;
  int hops = 0;
  bool operator==(const PacketTrace&) const = default;
};

struct StatsRecord {
  // Packets created inside the measurement window and how many of them arrived.
  std::uint64_t injected = 0;
  std::uint64_t delivered = 0;
  double mean_latency = 0.0;
  double median_latency = 0.0;
  double p99_latency = 0.0;
  double throughput = 0.0;  // accepted flits / node / cycle during measurement
  double offered = 0.0;     // generated flits / node / cycle during measurement
  bool saturated = false;   // drain did not finish within drain_timeout
  Cycle end_cycle = 0;
  std::uint64_t hop_violations = 0;  // delivered packets with hops != Manhattan distance
  std::uint64_t total_delivered = 0;
  std::vector<WindowStat> windows;
  EventCounters counters;
  std::string census;  // in-flight packet summary when saturated
};

class Simulator {
 public:
  explicit Simulator(SimConfig cfg);

  // Enqueue a packet at `src` now, independent of the synthetic generator.
  void inject_packet(NodeId src, NodeId dst, int length);
  // Advance one cycle; synthetic generation runs only when enabled.
  void step();
  void set_generation(bool on) { generate_ = on; }
  // Step until no packet is queued or in flight and the learning network is
  // empty, at most `limit` cycles.
  bool drain(Cycle limit);

  // Full warmup -> measure -> drain run from cycle 0.
  StatsRecord run();

  Cycle now() const { return now_; }
  bool idle() const;
  Network& network() { return *network_; }
  const Network& network() const { return *network_; }
  RoutingPolicy& policy() { return *policy_; }
  const EventCounters& counters() const { return counters_; }
  const SimConfig& config() const { return cfg_; }

  void record_traces(bool on) { record_traces_ = on; }
  const std::vector<PacketTrace>& traces() const { return traces_; }
  void set_trace(std::ostream* os) { network_->set_trace(os); }

  // Per-packet invariant check: credit conservation and injected = delivered + in flight.
  bool conservation_holds() const;

 private:
  void generate();
  void on_eject(PacketHandle h, Cycle now);
  std::uint64_t live_packets() const { return packets_.live(); }
  std::string census() const;
  bool in_measure(Cycle c) const {
    return c >= cfg_.warmup_cycles && c < cfg_.warmup_cycles + cfg_.measure_cycles;
  }

  SimConfig cfg_;
  EventCounters counters_;
  PacketStore packets_;
  std::unique_ptr<RoutingPolicy> policy_;
  std::unique_ptr<Network> network_;
  std::vector<Rng> inject_rng_;
  std::vector<Rng> dest_rng_;
  double inject_p_ = 0.0;
  Cycle now_ = 0;
  bool generate_ = false;
  std::uint64_t next_serial_ = 0;
  std::uint64_t created_ = 0;

  // Statistics.
  std::vector<std::int32_t> latencies_;
  std::uint64_t measured_created_ = 0;
  std::uint64_t measured_flits_created_ = 0;
  std::uint64_t measured_flits_accepted_ = 0;
  std::uint64_t hop_violations_ = 0;
  std::uint64_t total_delivered_ = 0;
  std::vector<std::uint64_t> window_count_;
  std::vector<double> window_sum_;
  bool record_traces_ = false;
  std::vector<PacketTrace> traces_;
};

StatsRecord run(const SimConfig& cfg);

struct SweepRow {
  PolicyKind policy = PolicyKind::Xy;
  std::string pattern;
  double rate = 0.0;
  std::uint64_t seed = 0;
  StatsRecord stats;
};

// One run per (policy, rate, seed), rows ordered policy-major, then rate,
// then seed. Runs are spread over `workers` threads with no shared state.
std::vector<SweepRow> sweep(const SimConfig& base, const std::vector<double>& rates,
                            const std::vector<PolicyKind>& policies,
                            const std::vector<std::uint64_t>& seeds, unsigned workers = 1);

struct SaturationSearch {
  double low = 0.005;
  double high = 0.6;
  int iterations = 7;
  Cycle warmup_cycles = 3000;
  Cycle measure_cycles = 12000;
  double latency_factor = 3.0;     // saturated once mean latency exceeds this x zero-load
  double acceptance_ratio = 0.95;  // or accepted throughput falls below this x offered
};

// Lowest injection rate (flits/node/cycle) judged saturated by bisection.
double find_saturation_rate(const SimConfig& base, const SaturationSearch& search = {});

// Per-router table storage in bits under the documented bit model.
long table_storage_bits(PolicyKind kind, const MeshConfig& mesh);

}  // namespace qrasp

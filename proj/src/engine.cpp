#include "qrasp/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

namespace qrasp {

void SimConfig::validate() const {
  mesh.validate();
  router.validate();
  policy.validate();
  traffic.validate(mesh);
  injection_probability(traffic.injection_rate, traffic.packet_len);
  if (warmup_cycles < 0) throw InputError("warmup_cycles must be >= 0");
  if (measure_cycles < 0) throw InputError("measure_cycles must be >= 0");
  if (drain_timeout < 0) throw InputError("drain_timeout must be >= 0");
  if (window_cycles <= 0) throw InputError("window_cycles must be positive");
}

Simulator::Simulator(SimConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.policy.learning_queue_capacity = cfg_.router.learning_queue_capacity;
  cfg_.validate();
  policy_ = make_policy(cfg_.policy, cfg_.mesh, cfg_.seed);
  network_ = std::make_unique<Network>(cfg_.mesh, cfg_.router, *policy_, counters_, packets_);
  network_->set_eject_handler([this](PacketHandle h, Cycle c) { on_eject(h, c); });
  for (NodeId n = 0; n < cfg_.mesh.node_count(); ++n) {
    inject_rng_.emplace_back(cfg_.seed, static_cast<std::uint64_t>(n), Rng::Purpose::Injection);
    dest_rng_.emplace_back(cfg_.seed, static_cast<std::uint64_t>(n), Rng::Purpose::Destination);
  }
  inject_p_ = injection_probability(cfg_.traffic.injection_rate, cfg_.traffic.packet_len);
}

void Simulator::inject_packet(NodeId src, NodeId dst, int length) {
  if (src == dst) throw InputError("packet source equals destination");
  if (length < 1) throw InputError("packet length must be >= 1");
  PacketInfo info;
  info.serial = next_serial_++;
  info.src = src;
  info.dst = dst;
  info.vc_class = vc_class_for(id_to_coord(src, cfg_.mesh), id_to_coord(dst, cfg_.mesh), info.serial);
  info.length = length;
  info.create_cycle = now_;
  info.measured = in_measure(now_);
  if (info.measured) {
    ++measured_created_;
    measured_flits_created_ += static_cast<std::uint64_t>(length);
  }
  ++created_;
  network_->enqueue(packets_.add(info));
}

void Simulator::generate() {
  if (inject_p_ <= 0.0) return;
  const PatternKind pattern = active_pattern(cfg_.traffic, now_);
  for (NodeId n = 0; n < cfg_.mesh.node_count(); ++n) {
    auto& irng = inject_rng_[static_cast<std::size_t>(n)];
    if (!irng.bernoulli(inject_p_)) continue;
    const auto dst = dest_for(pattern, n, cfg_.mesh, dest_rng_[static_cast<std::size_t>(n)]);
    if (dst) inject_packet(n, *dst, cfg_.traffic.packet_len);
  }
}

void Simulator::step() {
  if (generate_) generate();
  network_->tick(now_);
  ++now_;
}

bool Simulator::idle() const {
  return packets_.live() == 0 && network_->learning_in_flight() == 0;
}

bool Simulator::drain(Cycle limit) {
  const bool was = generate_;
  generate_ = false;
  const Cycle end = now_ + limit;
  while (!idle() && now_ < end) step();
  generate_ = was;
  return idle();
}

void Simulator::on_eject(PacketHandle h, Cycle now) {
  const PacketInfo& p = packets_[h];
  const Cycle latency = now - p.entry_cycle;
  const int distance = manhattan(id_to_coord(p.src, cfg_.mesh), id_to_coord(p.dst, cfg_.mesh));
  if (p.hops != distance) ++hop_violations_;
  ++total_delivered_;
  if (p.measured) latencies_.push_back(static_cast<std::int32_t>(latency));
  if (in_measure(now)) measured_flits_accepted_ += static_cast<std::uint64_t>(p.length);

  const auto w = static_cast<std::size_t>(now / cfg_.window_cycles);
  if (window_count_.size() <= w) {
    window_count_.resize(w + 1, 0);
    window_sum_.resize(w + 1, 0.0);
  }
  ++window_count_[w];
  window_sum_[w] += static_cast<double>(latency);

  if (record_traces_)
    traces_.push_back({p.serial, p.src, p.dst, p.create_cycle, p.entry_cycle, now, p.hops});
  packets_.release(h);
}

std::string Simulator::census() const {
  std::uint64_t queued = 0;
  std::uint64_t in_net = 0;
  std::uint64_t measured = 0;
  const PacketInfo* oldest = nullptr;
  packets_.for_each_live([&](PacketHandle, const PacketInfo& p) {
    (p.entry_cycle < 0 ? queued : in_net) += 1;
    measured += p.measured;
    if (!oldest || p.serial < oldest->serial) oldest = &p;
  });
  std::ostringstream os;
  os << "in-flight packets: " << queued + in_net << " (" << queued << " in source queues, "
     << in_net << " in network, " << measured << " from the measurement window)";
  if (oldest)
    os << "; oldest packet " << oldest->serial << " " << oldest->src << "->" << oldest->dst
       << " created at cycle " << oldest->create_cycle;
  return os.str();
}

bool Simulator::conservation_holds() const {
  std::uint64_t entered_live = 0;
  std::uint64_t live = 0;
  packets_.for_each_live([&](PacketHandle, const PacketInfo& p) {
    ++live;
    entered_live += p.entry_cycle >= 0;
  });
  return network_->credits_conserved() &&
         counters_.packets_injected == counters_.packets_delivered + entered_live &&
         created_ == total_delivered_ + live;
}

StatsRecord Simulator::run() {
  if (now_ != 0) throw std::logic_error("Simulator::run expects a fresh simulator");
  generate_ = true;
  const Cycle gen_end = cfg_.warmup_cycles + cfg_.measure_cycles;
  while (now_ < gen_end) step();
  generate_ = false;
  const bool drained = drain(cfg_.drain_timeout);

  StatsRecord s;
  s.injected = measured_created_;
  s.delivered = latencies_.size();
  s.saturated = !drained;
  s.end_cycle = now_;
  s.hop_violations = hop_violations_;
  s.total_delivered = total_delivered_;
  s.counters = counters_;
  if (!latencies_.empty()) {
    std::vector<std::int32_t> sorted = latencies_;
    std::sort(sorted.begin(), sorted.end());
    double sum = 0.0;
    for (auto l : sorted) sum += l;
    s.mean_latency = sum / static_cast<double>(sorted.size());
    auto rank = [&](double q) {
      const auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
      return static_cast<double>(sorted[std::max<std::size_t>(k, 1) - 1]);
    };
    s.median_latency = rank(0.5);
    s.p99_latency = rank(0.99);
  }
  const double node_cycles =
      static_cast<double>(cfg_.mesh.node_count()) * static_cast<double>(cfg_.measure_cycles);
  if (node_cycles > 0) {
    s.throughput = static_cast<double>(measured_flits_accepted_) / node_cycles;
    s.offered = static_cast<double>(measured_flits_created_) / node_cycles;
  }
  for (std::size_t w = 0; w < window_count_.size(); ++w) {
    WindowStat ws;
    ws.start = static_cast<Cycle>(w) * cfg_.window_cycles;
    ws.end = ws.start + cfg_.window_cycles;
    ws.pattern = active_pattern(cfg_.traffic, ws.start);
    ws.delivered = window_count_[w];
    ws.mean_latency = window_count_[w] ? window_sum_[w] / static_cast<double>(window_count_[w]) : 0.0;
    s.windows.push_back(ws);
  }
  if (s.saturated) s.census = census();
  return s;
}

StatsRecord run(const SimConfig& cfg) { return Simulator(cfg).run(); }

std::vector<SweepRow> sweep(const SimConfig& base, const std::vector<double>& rates,
                            const std::vector<PolicyKind>& policies,
                            const std::vector<std::uint64_t>& seeds, unsigned workers) {
  if (rates.empty() || policies.empty() || seeds.empty())
    throw InputError("sweep needs at least one rate, policy and seed");
  std::vector<SweepRow> rows;
  for (PolicyKind k : policies)
    for (double r : rates)
      for (std::uint64_t s : seeds) rows.push_back({k, base.traffic.label(), r, s, {}});

  auto job = [&](std::size_t i) {
    SimConfig cfg = base;
    cfg.policy.kind = rows[i].policy;
    cfg.traffic.injection_rate = rows[i].rate;
    cfg.seed = rows[i].seed;
    rows[i].stats = run(cfg);
  };
  // Validate up front so a bad point fails before any work starts.
  for (const auto& row : rows) {
    SimConfig cfg = base;
    cfg.policy.kind = row.policy;
    cfg.traffic.injection_rate = row.rate;
    cfg.validate();
  }

  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(rows.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < rows.size(); ++i) job(i);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < rows.size(); i = next++) job(i);
    });
  pool.clear();
  return rows;
}

double find_saturation_rate(const SimConfig& base, const SaturationSearch& search) {
  auto probe = [&](double rate) {
    SimConfig cfg = base;
    cfg.traffic.injection_rate = rate;
    cfg.warmup_cycles = search.warmup_cycles;
    cfg.measure_cycles = search.measure_cycles;
    cfg.drain_timeout = search.measure_cycles;
    return run(cfg);
  };
  const double zero_load = probe(search.low).mean_latency;
  auto saturated = [&](double rate) {
    const StatsRecord s = probe(rate);
    return s.saturated || s.throughput < search.acceptance_ratio * s.offered ||
           s.mean_latency > search.latency_factor * zero_load;
  };
  double lo = search.low;
  double hi = search.high;
  if (!saturated(hi)) return hi;
  for (int i = 0; i < search.iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    (saturated(mid) ? hi : lo) = mid;
  }
  return hi;
}

long table_storage_bits(PolicyKind kind, const MeshConfig& mesh) {
  const long rows = mesh.node_count() - 1;
  constexpr long kWide = QWide::kTotalBits;
  switch (kind) {
    case PolicyKind::Xy:
    case PolicyKind::Dyad: return 0;
    case PolicyKind::Qrasp: return rows * (2 * QFixed::kTotalBits + 3);  // two Q-values + route
    case PolicyKind::Qr: return rows * (2 * kWide);
    case PolicyKind::Bilcq: return rows * (2 * kWide + kWide);  // reverse-estimate staging
    case PolicyKind::Crq: return rows * (2 * kWide + 2 * 8);    // two 8-bit credence stamps
  }
  return 0;
}

}  // namespace qrasp

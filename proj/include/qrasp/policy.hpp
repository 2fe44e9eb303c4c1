#pragma once

// Routing-policy contract and the six policies: xy, dyad, qr, bilcq, crq and
// qrasp (region-aware contention cost with shared-path learning updates).

#include <cmath>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "qrasp/packet.hpp"
#include "qrasp/qtable.hpp"
#include "qrasp/rng.hpp"
#include "qrasp/topology.hpp"

namespace qrasp {

enum class PolicyKind : std::uint8_t { Xy, Dyad, Qr, Bilcq, Crq, Qrasp };

inline constexpr std::array<PolicyKind, 6> kAllPolicies = {
    PolicyKind::Xy, PolicyKind::Dyad, PolicyKind::Qr,
    PolicyKind::Bilcq, PolicyKind::Crq, PolicyKind::Qrasp};

std::string_view to_string(PolicyKind k);
// Throws InputError for anything outside xy|dyad|qr|bilcq|crq|qrasp.
PolicyKind parse_policy(std::string_view name);

struct PolicyConfig {
  PolicyKind kind = PolicyKind::Qrasp;
  std::optional<double> alpha;  // unset: 0.7 for qrasp, 0.5 otherwise
  std::optional<double> gamma;  // unset: 0.9 for qrasp, 1.0 otherwise
  double mu = 0.1;
  bool shared_path = true;
  bool count_arriving_vc = true;
  double exploration = 0.0;
  double crq_half_life = 512.0;
  double crq_floor = 1.0 / 16.0;
  // Test hook: every learning packet carries this cost instead of the measured one.
  std::optional<double> cost_override;
  int learning_queue_capacity = 4;

  double resolved_alpha() const;
  double resolved_gamma() const;
  void validate() const;
};

// Read-only window onto one router's live state.
class RouterView {
 public:
  virtual ~RouterView() = default;
  virtual NodeId id() const = 0;
  // Input VCs holding or streaming a packet.
  virtual int occupied_vcs(Direction in_port) const = 0;
  // Buffered flits across all VCs of the input port.
  virtual int occupied_slots(Direction in_port) const = 0;
  // Output VCs currently reserved by a packet.
  virtual int reserved_vcs(Direction out_port) const = 0;
  // Free downstream buffer slots summed over the VCs of `cls` at `out_port`.
  virtual int free_credits(Direction out_port, VcClass cls) const = 0;
};

struct CostSample {
  int r_i = 0;
  int r_o = 0;
  int q_p = 0;
  int q_r = 0;
  double q_y = 0.0;
};

// Path contention at the arrival input plus the selected output, and region
// contention over the remaining non-local outputs weighted by mu.
// `count_arriving_vc` false discounts the arriving packet's own VC from r_i.
CostSample cost_qrasp(const RouterView& y, Direction in_port, Direction out_dir, double mu,
                      bool count_arriving_vc = true);

// Flits buffered at y's arrival port, not counting the arriving head.
double cost_bilcq(const RouterView& y, Direction in_port, bool head_buffered);

// base_alpha * max(floor, 2^(-(now - last_update) / half_life)).
double crq_effective_alpha(Cycle last_update, Cycle now, double base_alpha,
                           double half_life = 512.0, double floor = 1.0 / 16.0);

// Learning packets y returns upstream: the primary update for the packet's
// destination first, then one per shared destination, truncated to capacity.
template <class Q>
std::vector<LearningPacket> make_learning_packets(const BasicQTable<Q>& y_table, NodeId dest,
                                                  std::span<const NodeId> shared, double cost,
                                                  std::size_t capacity, NodeId target,
                                                  Cycle now) {
  std::vector<LearningPacket> out;
  if (capacity == 0) return out;
  auto make = [&](NodeId d) {
    LearningPacket lp;
    lp.dest = d;
    lp.cost = cost;
    const auto [dir, est] = y_table.min_estimate(d);
    lp.estimate = est.value();
    lp.estimate_stamp =
        d == y_table.owner() ? now : y_table.row(d).stamp(is_horizontal(dir) ? Slot::Horizontal : Slot::Vertical);
    lp.origin = y_table.owner();
    lp.target = target;
    lp.issue_cycle = now;
    return lp;
  };
  out.push_back(make(dest));
  for (NodeId d : shared) {
    if (out.size() >= capacity) break;
    if (d == dest) continue;
    out.push_back(make(d));
  }
  return out;
}

// Q-learning update of Q_x(lp.dest, toward_origin). Returns false (and
// leaves the table untouched) when that direction is not a minimal candidate.
template <class Q>
bool apply_learning_packet(BasicQTable<Q>& x_table, const LearningPacket& lp, double alpha,
                           double gamma, Direction toward_origin, Cycle now = 0) {
  const auto slot = x_table.slot_for(lp.dest, toward_origin);
  if (!slot) return false;
  auto& row = x_table.row(lp.dest);
  row.at(*slot) = q_update(row.at(*slot), alpha, lp.cost, gamma, Q::quantize(lp.estimate));
  row.stamp(*slot) = now;
  return true;
}

// Everything a policy may emit from a hook goes back toward the packet's
// upstream neighbour (the router's arrival port).
using LearningOut = std::vector<LearningPacket>;

class RoutingPolicy {
 public:
  virtual ~RoutingPolicy() = default;

  virtual PolicyKind kind() const = 0;

  // Called at RC. `candidates` is never empty and already turn-filtered.
  virtual Direction select_output(const RouterView& at, const PacketInfo& pkt, DirSet candidates,
                                  Cycle now) = 0;

  // Head written at `y` (or, at its destination, consumed by the sink).
  virtual void on_head_arrival(const RouterView& /*y*/, PacketInfo& /*pkt*/, Direction /*in_port*/,
                               bool /*at_destination*/, Cycle /*now*/, LearningOut& /*out*/) {}
  // After RC selected `out_dir`.
  virtual void on_head_routed(const RouterView& /*at*/, PacketInfo& /*pkt*/, Direction /*in_port*/,
                              Direction /*out_dir*/, Cycle /*now*/, LearningOut& /*out*/) {}
  // Head won switch allocation toward `out_dir`.
  virtual void on_head_granted(const RouterView& /*at*/, PacketInfo& /*pkt*/, Direction /*in_port*/,
                               Direction /*out_dir*/, Cycle /*now*/, LearningOut& /*out*/) {}
  // Learning packet delivered at `target`; `toward_origin` is the port facing the sender.
  virtual void apply_learning(NodeId /*target*/, Direction /*toward_origin*/,
                              const LearningPacket& /*lp*/, Cycle /*now*/) {}

  virtual bool has_tables() const { return false; }
  virtual void dump_table(NodeId /*node*/, std::ostream& /*os*/) const {}

  void attach_counters(EventCounters* counters) { counters_ = counters; }

 protected:
  EventCounters* counters_ = nullptr;
  void count_read(std::uint64_t n = 1) { if (counters_) counters_->qtable_reads += n; }
  void count_write(std::uint64_t n = 1) { if (counters_) counters_->qtable_writes += n; }
  void count_discard() { if (counters_) ++counters_->learning_discards; }
};

class XyPolicy final : public RoutingPolicy {
 public:
  PolicyKind kind() const override { return PolicyKind::Xy; }
  Direction select_output(const RouterView& at, const PacketInfo& pkt, DirSet candidates,
                          Cycle now) override;
};

class DyadPolicy final : public RoutingPolicy {
 public:
  PolicyKind kind() const override { return PolicyKind::Dyad; }
  Direction select_output(const RouterView& at, const PacketInfo& pkt, DirSet candidates,
                          Cycle now) override;
};

// Shared table storage, greedy minimum selection and plain Q-learning updates.
template <class Q>
class TabularPolicy : public RoutingPolicy {
 public:
  TabularPolicy(const MeshConfig& mesh, const PolicyConfig& cfg, std::uint64_t seed);

  Direction select_output(const RouterView& at, const PacketInfo& pkt, DirSet candidates,
                          Cycle now) override;
  void apply_learning(NodeId target, Direction toward_origin, const LearningPacket& lp,
                      Cycle now) override;

  bool has_tables() const override { return true; }
  void dump_table(NodeId node, std::ostream& os) const override { table(node).dump_csv(os); }

  BasicQTable<Q>& table(NodeId node) { return tables_[static_cast<std::size_t>(node)]; }
  const BasicQTable<Q>& table(NodeId node) const { return tables_[static_cast<std::size_t>(node)]; }

  double alpha() const { return alpha_; }
  double gamma() const { return gamma_; }

 protected:
  // Primary learning packet toward the upstream router.
  void emit(NodeId at, NodeId dest, double cost, NodeId target, Cycle now, LearningOut& out);
  double cost_or_override(double measured) const {
    return cfg_.cost_override ? *cfg_.cost_override : measured;
  }

  MeshConfig mesh_;
  PolicyConfig cfg_;
  double alpha_;
  double gamma_;
  std::vector<BasicQTable<Q>> tables_;
  std::vector<Rng> explore_;
};

// Cost: the packet's queueing time at the previous router. No extra updates.
class QrPolicy final : public TabularPolicy<QWide> {
 public:
  using TabularPolicy::TabularPolicy;
  PolicyKind kind() const override { return PolicyKind::Qr; }
  void on_head_arrival(const RouterView& y, PacketInfo& pkt, Direction in_port,
                       bool at_destination, Cycle now, LearningOut& out) override;
  void on_head_granted(const RouterView& at, PacketInfo& pkt, Direction in_port,
                       Direction out_dir, Cycle now, LearningOut& out) override;
};

// Cost: downstream input-port queue length. Every hop also updates the
// reverse path toward the packet's source from a payload on the head flit.
class BilcqPolicy final : public TabularPolicy<QWide> {
 public:
  using TabularPolicy::TabularPolicy;
  PolicyKind kind() const override { return PolicyKind::Bilcq; }
  void on_head_arrival(const RouterView& y, PacketInfo& pkt, Direction in_port,
                       bool at_destination, Cycle now, LearningOut& out) override;
  void on_head_granted(const RouterView& at, PacketInfo& pkt, Direction in_port,
                       Direction out_dir, Cycle now, LearningOut& out) override;
};

// Cost: downstream input-queue latency, available once the head leaves the
// downstream router. Learning rate scaled by the credence of the estimate.
class CrqPolicy final : public TabularPolicy<QWide> {
 public:
  using TabularPolicy::TabularPolicy;
  PolicyKind kind() const override { return PolicyKind::Crq; }
  void on_head_arrival(const RouterView& y, PacketInfo& pkt, Direction in_port,
                       bool at_destination, Cycle now, LearningOut& out) override;
  void on_head_granted(const RouterView& at, PacketInfo& pkt, Direction in_port,
                       Direction out_dir, Cycle now, LearningOut& out) override;
  void apply_learning(NodeId target, Direction toward_origin, const LearningPacket& lp,
                      Cycle now) override;
};

class QraspPolicy final : public TabularPolicy<QFixed> {
 public:
  using TabularPolicy::TabularPolicy;
  PolicyKind kind() const override { return PolicyKind::Qrasp; }
  void on_head_arrival(const RouterView& y, PacketInfo& pkt, Direction in_port,
                       bool at_destination, Cycle now, LearningOut& out) override;
  void on_head_routed(const RouterView& at, PacketInfo& pkt, Direction in_port,
                      Direction out_dir, Cycle now, LearningOut& out) override;

 private:
  void return_experience(const RouterView& y, PacketInfo& pkt, Direction in_port,
                         Direction out_dir, Cycle now, LearningOut& out);
};

std::unique_ptr<RoutingPolicy> make_policy(const PolicyConfig& cfg, const MeshConfig& mesh,
                                           std::uint64_t seed);

}  // namespace qrasp

#include <algorithm>
#include <string>

#include "qrasp/policy.hpp"

namespace qrasp {

std::string_view to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::Xy: return "xy";
    case PolicyKind::Dyad: return "dyad";
    case PolicyKind::Qr: return "qr";
    case PolicyKind::Bilcq: return "bilcq";
    case PolicyKind::Crq: return "crq";
    case PolicyKind::Qrasp: return "qrasp";
  }
  return "?";
}

PolicyKind parse_policy(std::string_view name) {
  for (PolicyKind k : kAllPolicies)
    if (to_string(k) == name) return k;
  throw InputError("unknown policy '" + std::string(name) +
                   "' (expected xy|dyad|qr|bilcq|crq|qrasp)");
}

double PolicyConfig::resolved_alpha() const {
  return alpha.value_or(kind == PolicyKind::Qrasp ? 0.7 : 0.5);
}

double PolicyConfig::resolved_gamma() const {
  return gamma.value_or(kind == PolicyKind::Qrasp ? 0.9 : 1.0);
}

void PolicyConfig::validate() const {
  auto unit = [](double v, const char* what) {
    if (!(v >= 0.0 && v <= 1.0)) throw InputError(std::string(what) + " must lie in [0, 1]");
  };
  unit(resolved_alpha(), "alpha");
  unit(resolved_gamma(), "gamma");
  unit(mu, "mu");
  unit(exploration, "exploration");
  if (!(crq_half_life > 0.0)) throw InputError("crq_half_life must be positive");
  if (!(crq_floor > 0.0 && crq_floor <= 1.0)) throw InputError("crq_floor must lie in (0, 1]");
  if (learning_queue_capacity < 1 || learning_queue_capacity > kMaxSharedDests + 1)
    throw InputError("learning_queue_capacity must lie in [1, " +
                     std::to_string(kMaxSharedDests + 1) + "]");
  if (cost_override && *cost_override < 0.0) throw InputError("cost_override must be >= 0");
}

CostSample cost_qrasp(const RouterView& y, Direction in_port, Direction out_dir, double mu,
                      bool count_arriving_vc) {
  CostSample s;
  s.r_i = std::max(0, y.occupied_vcs(in_port) - (count_arriving_vc ? 0 : 1));
  s.r_o = out_dir == Direction::Local ? 0 : y.reserved_vcs(out_dir);
  s.q_p = s.r_i + s.r_o;
  for (Direction d : kMeshDirections)
    if (d != out_dir) s.q_r += y.reserved_vcs(d);
  s.q_y = s.q_p + mu * s.q_r;
  return s;
}

double cost_bilcq(const RouterView& y, Direction in_port, bool head_buffered) {
  return std::max(0, y.occupied_slots(in_port) - (head_buffered ? 1 : 0));
}

double crq_effective_alpha(Cycle last_update, Cycle now, double base_alpha, double half_life,
                           double floor) {
  const double age = static_cast<double>(std::max<Cycle>(0, now - last_update));
  return base_alpha * std::max(floor, std::exp2(-age / half_life));
}

Direction XyPolicy::select_output(const RouterView&, const PacketInfo&, DirSet candidates,
                                  Cycle) {
  for (Direction d : candidates)
    if (is_horizontal(d)) return d;
  return candidates[0];
}

Direction DyadPolicy::select_output(const RouterView& at, const PacketInfo& pkt,
                                    DirSet candidates, Cycle) {
  Direction best = candidates[0];
  int best_credits = at.free_credits(best, pkt.vc_class);
  for (int i = 1; i < candidates.size(); ++i) {
    const int c = at.free_credits(candidates[i], pkt.vc_class);
    if (c > best_credits || (c == best_credits && is_horizontal(candidates[i]) && !is_horizontal(best))) {
      best = candidates[i];
      best_credits = c;
    }
  }
  return best;
}

template <class Q>
TabularPolicy<Q>::TabularPolicy(const MeshConfig& mesh, const PolicyConfig& cfg,
                                std::uint64_t seed)
    : mesh_(mesh), cfg_(cfg), alpha_(cfg.resolved_alpha()), gamma_(cfg.resolved_gamma()) {
  cfg_.validate();
  tables_.reserve(static_cast<std::size_t>(mesh.node_count()));
  explore_.reserve(static_cast<std::size_t>(mesh.node_count()));
  for (NodeId n = 0; n < mesh.node_count(); ++n) {
    tables_.emplace_back(n, mesh);
    explore_.emplace_back(seed, static_cast<std::uint64_t>(n), Rng::Purpose::Exploration);
  }
}

template <class Q>
Direction TabularPolicy<Q>::select_output(const RouterView& at, const PacketInfo& pkt,
                                          DirSet candidates, Cycle) {
  if (cfg_.exploration > 0.0 && candidates.size() > 1) {
    Rng& rng = explore_[static_cast<std::size_t>(at.id())];
    if (rng.bernoulli(cfg_.exploration))
      return candidates[static_cast<int>(rng.next_below(static_cast<std::uint64_t>(candidates.size())))];
  }
  count_read();
  return table(at.id()).min_estimate(pkt.dst, candidates).first;
}

template <class Q>
void TabularPolicy<Q>::apply_learning(NodeId target, Direction toward_origin,
                                      const LearningPacket& lp, Cycle now) {
  if (apply_learning_packet(table(target), lp, alpha_, gamma_, toward_origin, now))
    count_write();
  else
    count_discard();
}

template <class Q>
void TabularPolicy<Q>::emit(NodeId at, NodeId dest, double cost, NodeId target, Cycle now,
                            LearningOut& out) {
  count_read();
  auto lps = make_learning_packets(table(at), dest, {}, cost, 1, target, now);
  out.insert(out.end(), lps.begin(), lps.end());
}

template class TabularPolicy<QFixed>;
template class TabularPolicy<QWide>;

namespace {

NodeId upstream_of(NodeId at, Direction in_port, const MeshConfig& mesh) {
  return coord_to_id(step(id_to_coord(at, mesh), in_port), mesh);
}

}  // namespace

// --- qr ---------------------------------------------------------------------

void QrPolicy::on_head_granted(const RouterView&, PacketInfo& pkt, Direction, Direction,
                               Cycle now, LearningOut&) {
  pkt.ctx.prev_queue_cycles = now - pkt.ctx.write_cycle;
}

void QrPolicy::on_head_arrival(const RouterView& y, PacketInfo& pkt, Direction in_port, bool,
                               Cycle now, LearningOut& out) {
  const double cost = cost_or_override(static_cast<double>(pkt.ctx.prev_queue_cycles));
  emit(y.id(), pkt.dst, cost, upstream_of(y.id(), in_port, mesh_), now, out);
}

// --- bilcq ------------------------------------------------------------------

void BilcqPolicy::on_head_granted(const RouterView& at, PacketInfo& pkt, Direction,
                                  Direction out_dir, Cycle, LearningOut&) {
  count_read();
  pkt.ctx.reverse_estimate = table(at.id()).min_estimate(pkt.src).second.value();
  pkt.ctx.reverse_cost = cost_or_override(static_cast<double>(at.occupied_slots(out_dir)));
  pkt.ctx.reverse_valid = true;
}

void BilcqPolicy::on_head_arrival(const RouterView& y, PacketInfo& pkt, Direction in_port,
                                  bool at_destination, Cycle now, LearningOut& out) {
  if (pkt.ctx.reverse_valid) {
    LearningPacket rev;
    rev.dest = pkt.src;
    rev.cost = pkt.ctx.reverse_cost;
    rev.estimate = pkt.ctx.reverse_estimate;
    rev.origin = upstream_of(y.id(), in_port, mesh_);
    rev.target = y.id();
    rev.issue_cycle = now;
    if (apply_learning_packet(table(y.id()), rev, alpha_, gamma_, in_port, now)) count_write();
    pkt.ctx.reverse_valid = false;
  }
  const double cost = cost_or_override(cost_bilcq(y, in_port, !at_destination));
  emit(y.id(), pkt.dst, cost, upstream_of(y.id(), in_port, mesh_), now, out);
}

// --- crq --------------------------------------------------------------------

void CrqPolicy::on_head_granted(const RouterView& at, PacketInfo& pkt, Direction in_port,
                                Direction, Cycle now, LearningOut& out) {
  if (in_port == Direction::Local) return;
  const double cost = cost_or_override(static_cast<double>(now - pkt.ctx.write_cycle));
  emit(at.id(), pkt.dst, cost, upstream_of(at.id(), in_port, mesh_), now, out);
}

void CrqPolicy::on_head_arrival(const RouterView& y, PacketInfo& pkt, Direction in_port,
                                bool at_destination, Cycle now, LearningOut& out) {
  // In transit the cost is only known at switch allocation; the sink has no queue.
  if (!at_destination) return;
  emit(y.id(), pkt.dst, cost_or_override(0.0), upstream_of(y.id(), in_port, mesh_), now, out);
}

void CrqPolicy::apply_learning(NodeId target, Direction toward_origin, const LearningPacket& lp,
                               Cycle now) {
  const double a =
      crq_effective_alpha(lp.estimate_stamp, now, alpha_, cfg_.crq_half_life, cfg_.crq_floor);
  if (apply_learning_packet(table(target), lp, a, gamma_, toward_origin, now))
    count_write();
  else
    count_discard();
}

// --- qrasp ------------------------------------------------------------------

void QraspPolicy::return_experience(const RouterView& y, PacketInfo& pkt, Direction in_port,
                                    Direction out_dir, Cycle now, LearningOut& out) {
  const double cost =
      cost_or_override(cost_qrasp(y, in_port, out_dir, cfg_.mu, cfg_.count_arriving_vc).q_y);
  const std::span<const NodeId> shared(pkt.ctx.shared.data(), pkt.ctx.shared_count);
  auto lps = make_learning_packets(table(y.id()), pkt.dst, shared, cost,
                                   static_cast<std::size_t>(cfg_.learning_queue_capacity),
                                   upstream_of(y.id(), in_port, mesh_), now);
  count_read(lps.size());
  out.insert(out.end(), lps.begin(), lps.end());
}

void QraspPolicy::on_head_arrival(const RouterView& y, PacketInfo& pkt, Direction in_port,
                                  bool at_destination, Cycle now, LearningOut& out) {
  if (at_destination) return_experience(y, pkt, in_port, Direction::Local, now, out);
}

void QraspPolicy::on_head_routed(const RouterView& at, PacketInfo& pkt, Direction in_port,
                                 Direction out_dir, Cycle now, LearningOut& out) {
  if (in_port != Direction::Local) return_experience(at, pkt, in_port, out_dir, now, out);

  auto& tbl = table(at.id());
  const RouteKey key{in_port, out_dir};
  pkt.ctx.shared_count = 0;
  if (cfg_.shared_path) {
    count_read();
    const auto shared = tbl.shared_dests(
        key, pkt.dst, static_cast<std::size_t>(cfg_.learning_queue_capacity - 1));
    std::copy(shared.begin(), shared.end(), pkt.ctx.shared.begin());
    pkt.ctx.shared_count = static_cast<std::uint8_t>(shared.size());
  }
  tbl.record_route(pkt.dst, key);
  count_write();
}

std::unique_ptr<RoutingPolicy> make_policy(const PolicyConfig& cfg, const MeshConfig& mesh,
                                           std::uint64_t seed) {
  cfg.validate();
  switch (cfg.kind) {
    case PolicyKind::Xy: return std::make_unique<XyPolicy>();
    case PolicyKind::Dyad: return std::make_unique<DyadPolicy>();
    case PolicyKind::Qr: return std::make_unique<QrPolicy>(mesh, cfg, seed);
    case PolicyKind::Bilcq: return std::make_unique<BilcqPolicy>(mesh, cfg, seed);
    case PolicyKind::Crq: return std::make_unique<CrqPolicy>(mesh, cfg, seed);
    case PolicyKind::Qrasp: return std::make_unique<QraspPolicy>(mesh, cfg, seed);
  }
  throw InputError("unknown policy kind");
}

}  // namespace qrasp

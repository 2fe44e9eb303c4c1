#include "qrasp/router.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace qrasp {

void RouterParams::validate() const {
  if (vcs_per_port < 2 || vcs_per_port % 2 != 0 || vcs_per_port > kMaxVcsPerPort)
    throw InputError("vcs_per_port must be an even number in [2, " +
                     std::to_string(kMaxVcsPerPort) + "]");
  if (buffer_depth < 1 || buffer_depth > kMaxBufferDepth)
    throw InputError("buffer_depth must lie in [1, " + std::to_string(kMaxBufferDepth) + "]");
  if (learning_queue_capacity < 1) throw InputError("learning_queue_capacity must be >= 1");
}

PacketHandle PacketStore::add(const PacketInfo& info) {
  if (!free_.empty()) {
    const PacketHandle h = free_.back();
    free_.pop_back();
    slots_[h] = info;
    return h;
  }
  slots_.push_back(info);
  return static_cast<PacketHandle>(slots_.size() - 1);
}

void PacketStore::release(PacketHandle h) { free_.push_back(h); }

Router::Router(NodeId id, const MeshConfig& mesh, const RouterParams& params)
    : id_(id),
      coord_(id_to_coord(id, mesh)),
      vcs_(params.vcs_per_port),
      depth_(params.buffer_depth),
      in_(static_cast<std::size_t>(kNumPorts * params.vcs_per_port)),
      out_(static_cast<std::size_t>(kNumPorts * params.vcs_per_port)) {
  links_[ordinal(Direction::Local)] = true;
  for (Direction d : kMeshDirections) links_[ordinal(d)] = in_bounds(step(coord_, d), mesh);
  for (auto& o : out_) o.credits = depth_;
  sa_rr_.fill(-1);
}

std::pair<int, int> Router::class_vcs(VcClass cls) const {
  const int half = vcs_ / 2;
  return cls == VcClass::A ? std::pair{0, half} : std::pair{half, vcs_};
}

int Router::occupied_vcs(Direction in_port) const {
  int n = 0;
  for (int v = 0; v < vcs_; ++v) n += input(in_port, v).stage != VcStage::Idle;
  return n;
}

int Router::occupied_slots(Direction in_port) const {
  int n = 0;
  for (int v = 0; v < vcs_; ++v) n += input(in_port, v).buffer.size();
  return n;
}

int Router::reserved_vcs(Direction out_port) const {
  int n = 0;
  for (int v = 0; v < vcs_; ++v) n += output(out_port, v).reserved;
  return n;
}

int Router::free_credits(Direction out_port, VcClass cls) const {
  if (!has_link(out_port)) return 0;
  const auto [lo, hi] = class_vcs(cls);
  int n = 0;
  for (int v = lo; v < hi; ++v) n += output(out_port, v).credits;
  return n;
}

Network::Network(const MeshConfig& mesh, const RouterParams& params, RoutingPolicy& policy,
                 EventCounters& counters, PacketStore& packets)
    : mesh_(mesh), params_(params), policy_(policy), counters_(counters), packets_(packets) {
  mesh_.validate();
  params_.validate();
  const auto n = static_cast<std::size_t>(mesh.node_count());
  routers_.reserve(n);
  neighbor_.assign(n * kNumPorts, -1);
  for (NodeId id = 0; id < mesh.node_count(); ++id) {
    routers_.emplace_back(id, mesh, params);
    const Coord c = id_to_coord(id, mesh);
    for (Direction d : kMeshDirections)
      if (in_bounds(step(c, d), mesh)) neighbor_[link_index(id, d)] = coord_to_id(step(c, d), mesh);
  }
  flit_links_.resize(n * kNumPorts);
  credit_links_.resize(n * kNumPorts);
  learning_links_.resize(n * kNumPorts);
  sources_.resize(n);
  policy_.attach_counters(&counters_);
}

void Network::enqueue(PacketHandle h) {
  sources_[static_cast<std::size_t>(packets_[h].src)].pending.push_back(h);
}

std::size_t Network::queued_packets() const {
  std::size_t n = 0;
  for (const auto& s : sources_) n += s.pending.size() - (s.vc >= 0 ? 1 : 0);
  return n;
}

std::size_t Network::queued_packets(NodeId node) const {
  const auto& s = sources_[static_cast<std::size_t>(node)];
  return s.pending.size() - (s.vc >= 0 ? 1 : 0);
}

void Network::tick(Cycle now) {
  deliver(now);
  inject(now);
  for (Router& r : routers_) {
    if (r.active_vcs_ == 0) continue;
    switch_allocate(r, now);
    vc_allocate(r, now);
    route_compute(r, now);
  }
  send_learning(now);
}

void Network::trace(Cycle now, NodeId r, const char* event, PacketHandle h, Direction d, int vc) {
  if (!trace_) return;
  *trace_ << now << ' ' << r << ' ' << event << " pkt=" << packets_[h].serial
          << " dir=" << short_name(d) << " vc=" << vc << '\n';
}

void Network::deliver(Cycle now) {
  for (Router& r : routers_) {
    for (Direction p : kMeshDirections) {
      if (!r.links_[ordinal(p)]) continue;
      auto& link = flit_links_[link_index(neighbor(r.id_, p), opposite(p))];
      if (!link.empty() && link.front().arrival == now) {
        const TimedFlit tf = link.front();
        link.pop_front();
        write_flit(r, p, tf.vc, tf.flit, now);
      }
    }
  }
  for (Router& r : routers_) {
    for (Direction o : kMeshDirections) {
      auto& link = credit_links_[link_index(r.id_, o)];
      while (!link.empty() && link.front().arrival == now) {
        ++r.output(o, link.front().vc).credits;
        link.pop_front();
      }
    }
  }
  for (Router& r : routers_) {
    for (Direction p : kMeshDirections) {
      if (!r.links_[ordinal(p)]) continue;
      auto& link = learning_links_[link_index(neighbor(r.id_, p), opposite(p))];
      if (!link.empty() && link.front().arrival == now) {
        const LearningPacket lp = link.front().lp;
        link.pop_front();
        policy_.apply_learning(r.id_, p, lp, now);
        if (trace_)
          *trace_ << now << ' ' << r.id_ << " learn dest=" << lp.dest << " from=" << lp.origin << '\n';
      }
    }
  }
}

void Network::write_flit(Router& r, Direction port, int vc, const Flit& f, Cycle now) {
  PacketInfo& pkt = packets_[f.pkt];
  InputVc& ivc = r.input(port, vc);
  if (f.head && ivc.stage != VcStage::Idle)
    throw std::logic_error("head flit written into a busy VC at router " + std::to_string(r.id_));

  if (pkt.dst == r.id_) {
    if (f.head) {
      ivc.stage = VcStage::Ejecting;
      ivc.pkt = f.pkt;
      pkt.ctx.arrival_port = port;
      pkt.ctx.write_cycle = now;
      policy_.on_head_arrival(r, pkt, port, true, now, scratch_);
      push_learning(r, port, scratch_);
    }
    credit_links_[link_index(neighbor(r.id_, port), opposite(port))].push_back({now + 1, vc});
    if (f.tail) {
      ivc.stage = VcStage::Idle;
      ++counters_.packets_delivered;
      trace(now, r.id_, "eject", f.pkt, port, vc);
      if (on_eject_) on_eject_(f.pkt, now);
    }
    return;
  }

  ivc.buffer.push({f, now});
  ++counters_.buffer_writes;
  if (f.head) {
    ivc.stage = VcStage::Routing;
    ivc.ready = now + 1;
    ivc.pkt = f.pkt;
    ++r.active_vcs_;
    pkt.ctx.arrival_port = port;
    pkt.ctx.write_cycle = now;
    if (port != Direction::Local) {
      policy_.on_head_arrival(r, pkt, port, false, now, scratch_);
      push_learning(r, port, scratch_);
    }
  }
}

void Network::inject(Cycle now) {
  for (Router& r : routers_) {
    SourceQueue& sq = sources_[static_cast<std::size_t>(r.id_)];
    if (sq.pending.empty()) continue;
    const PacketHandle h = sq.pending.front();
    PacketInfo& pkt = packets_[h];
    if (sq.vc < 0) {
      const auto [lo, hi] = r.class_vcs(pkt.vc_class);
      for (int v = lo; v < hi; ++v) {
        const InputVc& ivc = r.input(Direction::Local, v);
        if (ivc.stage == VcStage::Idle && ivc.buffer.empty()) {
          sq.vc = v;
          break;
        }
      }
      if (sq.vc < 0) continue;
      sq.next_seq = 0;
      pkt.entry_cycle = now;
      ++counters_.packets_injected;
      trace(now, r.id_, "inject", h, Direction::Local, sq.vc);
    }
    if (r.input(Direction::Local, sq.vc).buffer.size() >= params_.buffer_depth) continue;
    Flit f;
    f.pkt = h;
    f.seq = static_cast<std::uint16_t>(sq.next_seq);
    f.head = sq.next_seq == 0;
    f.tail = sq.next_seq == pkt.length - 1;
    write_flit(r, Direction::Local, sq.vc, f, now);
    ++sq.next_seq;
    if (f.tail) {
      sq.pending.pop_front();
      sq.vc = -1;
    }
  }
}

void Network::switch_allocate(Router& r, Cycle now) {
  const int total = kNumPorts * r.vcs_;
  std::array<bool, kNumPorts> input_used{};
  for (int k = 0; k < 4; ++k) {
    const Direction o = kMeshDirections[static_cast<std::size_t>((now + k) % 4)];
    if (!r.links_[ordinal(o)]) continue;
    const int start = r.sa_rr_[ordinal(o)];
    for (int step_i = 1; step_i <= total; ++step_i) {
      const int idx = (start + step_i + total) % total;
      InputVc& ivc = r.in_[static_cast<std::size_t>(idx)];
      if (ivc.stage != VcStage::Active || ivc.route_out != o || ivc.ready > now) continue;
      const int port_i = idx / r.vcs_;
      if (input_used[static_cast<std::size_t>(port_i)] || ivc.buffer.empty()) continue;
      const auto& head = ivc.buffer.front();
      if (head.written >= now) continue;
      OutputVc& ovc = r.output(o, ivc.out_vc);
      if (ovc.credits <= 0) continue;

      input_used[static_cast<std::size_t>(port_i)] = true;
      r.sa_rr_[ordinal(o)] = idx;
      const Flit f = head.flit;
      ivc.buffer.pop();
      --ovc.credits;
      flit_links_[link_index(r.id_, o)].push_back({now + 2, f, ivc.out_vc});
      ++counters_.flit_hops;
      const Direction port = direction_from_ordinal(port_i);
      const int in_vc = idx % r.vcs_;
      if (port != Direction::Local)
        credit_links_[link_index(neighbor(r.id_, port), opposite(port))].push_back({now + 1, in_vc});
      if (f.head) {
        PacketInfo& pkt = packets_[f.pkt];
        ++pkt.hops;
        trace(now, r.id_, "sa", f.pkt, o, ivc.out_vc);
        policy_.on_head_granted(r, pkt, port, o, now, scratch_);
        push_learning(r, port, scratch_);
      }
      if (f.tail) {
        ovc.reserved = false;
        ivc.stage = VcStage::Idle;
        ivc.out_vc = -1;
        --r.active_vcs_;
      }
      break;
    }
  }
}

void Network::vc_allocate(Router& r, Cycle now) {
  const int total = kNumPorts * r.vcs_;
  va_order_.clear();
  for (int idx = 0; idx < total; ++idx) {
    const InputVc& ivc = r.in_[static_cast<std::size_t>(idx)];
    if (ivc.stage == VcStage::VcAlloc && ivc.ready <= now) va_order_.push_back(idx);
  }
  if (va_order_.empty()) return;
  // Oldest request first; equal ages rotate round-robin with the cycle count.
  const int rot = static_cast<int>(now % total);
  std::sort(va_order_.begin(), va_order_.end(), [&](int a, int b) {
    const Cycle ta = r.in_[static_cast<std::size_t>(a)].va_since;
    const Cycle tb = r.in_[static_cast<std::size_t>(b)].va_since;
    if (ta != tb) return ta < tb;
    return (a - rot + total) % total < (b - rot + total) % total;
  });
  for (int idx : va_order_) {
    InputVc& ivc = r.in_[static_cast<std::size_t>(idx)];
    const auto [lo, hi] = r.class_vcs(packets_[ivc.pkt].vc_class);
    for (int v = lo; v < hi; ++v) {
      OutputVc& ovc = r.output(ivc.route_out, v);
      if (ovc.reserved || ovc.credits != r.depth_) continue;
      ovc.reserved = true;
      ivc.out_vc = v;
      ivc.stage = VcStage::Active;
      ivc.ready = now + 1;
      trace(now, r.id_, "va", ivc.pkt, ivc.route_out, v);
      break;
    }
  }
}

void Network::route_compute(Router& r, Cycle now) {
  const int total = kNumPorts * r.vcs_;
  for (int idx = 0; idx < total; ++idx) {
    InputVc& ivc = r.in_[static_cast<std::size_t>(idx)];
    if (ivc.stage != VcStage::Routing || ivc.ready > now) continue;
    PacketInfo& pkt = packets_[ivc.pkt];
    const Direction port = direction_from_ordinal(idx / r.vcs_);
    const Direction travelled = opposite(port);
    const DirSet cands = minimal_candidates(r.coord_, id_to_coord(pkt.dst, mesh_))
                             .filtered([&](Direction d) {
                               return allowed_turn(pkt.vc_class, travelled, d);
                             });
    if (cands.empty())
      throw std::logic_error("no legal minimal output at router " + std::to_string(r.id_) +
                             " for packet " + std::to_string(pkt.serial));
    const Direction out = policy_.select_output(r, pkt, cands, now);
    if (!cands.contains(out))
      throw std::logic_error("policy selected a non-candidate output at router " +
                             std::to_string(r.id_));
    ivc.route_out = out;
    ivc.stage = VcStage::VcAlloc;
    ivc.ready = now + 1;
    ivc.va_since = now + 1;
    trace(now, r.id_, "rc", ivc.pkt, out, idx % r.vcs_);
    policy_.on_head_routed(r, pkt, port, out, now, scratch_);
    push_learning(r, port, scratch_);
  }
}

void Network::push_learning(Router& r, Direction toward, LearningOut& lps) {
  if (toward != Direction::Local) {
    auto& q = r.learning_queue_[ordinal(toward)];
    for (const LearningPacket& lp : lps) {
      if (static_cast<int>(q.size()) < params_.learning_queue_capacity)
        q.push_back(lp);
      else
        ++counters_.learning_drops;
    }
  }
  lps.clear();
}

void Network::send_learning(Cycle now) {
  for (Router& r : routers_) {
    for (Direction d : kMeshDirections) {
      auto& q = r.learning_queue_[ordinal(d)];
      if (q.empty()) continue;
      learning_links_[link_index(r.id_, d)].push_back({now + 1, q.front()});
      q.pop_front();
      ++counters_.learning_flits;
    }
  }
}

std::uint64_t Network::learning_in_flight() const {
  std::uint64_t n = 0;
  for (const Router& r : routers_)
    for (const auto& q : r.learning_queue_) n += q.size();
  for (const auto& link : learning_links_) n += link.size();
  return n;
}

bool Network::credits_conserved() const {
  for (const Router& r : routers_) {
    for (Direction o : kMeshDirections) {
      if (!r.links_[ordinal(o)]) continue;
      const Router& rx = routers_[static_cast<std::size_t>(neighbor(r.id_, o))];
      const Direction p = opposite(o);
      for (int v = 0; v < r.vcs_; ++v) {
        int sum = r.output(o, v).credits + rx.input(p, v).buffer.size();
        for (const auto& tf : flit_links_[link_index(r.id_, o)]) sum += tf.vc == v;
        for (const auto& tc : credit_links_[link_index(r.id_, o)]) sum += tc.vc == v;
        if (sum != r.depth_) return false;
      }
    }
  }
  return true;
}

std::uint64_t Network::data_flits_in_flight() const {
  std::uint64_t n = 0;
  for (const auto& l : flit_links_) n += l.size();
  return n;
}

}  // namespace qrasp

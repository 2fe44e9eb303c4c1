#pragma once

// Cycle-level wormhole mesh: input-buffered VC routers with a four-stage
// pipeline (RC, VA, SA, ST), one-cycle links, credit flow control and a
// separate single-flit learning network between neighbours.
//
// Timing for a head flit written into an input VC at cycle t:
//   RC at t+1, VA at t+2, SA at t+3, switch/link traversal at t+4,
//   buffer write downstream at t+5.
// Body and tail flits skip RC and VA. Credits take one cycle back upstream.
// A flit that reaches its destination router is taken by the local sink in
// the cycle it arrives.

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <ostream>
#include <vector>

#include "qrasp/packet.hpp"
#include "qrasp/policy.hpp"
#include "qrasp/topology.hpp"

namespace qrasp {

inline constexpr int kMaxBufferDepth = 16;
inline constexpr int kMaxVcsPerPort = 16;

struct RouterParams {
  int vcs_per_port = 4;
  int buffer_depth = 4;
  int learning_queue_capacity = 4;

  void validate() const;
};

using PacketHandle = std::uint32_t;

struct Flit {
  PacketHandle pkt = 0;
  std::uint16_t seq = 0;
  bool head = false;
  bool tail = false;
};

// Stable storage for live packets; handles are recycled after delivery.
class PacketStore {
 public:
  PacketHandle add(const PacketInfo& info);
  void release(PacketHandle h);
  PacketInfo& operator[](PacketHandle h) { return slots_[h]; }
  const PacketInfo& operator[](PacketHandle h) const { return slots_[h]; }
  std::size_t live() const { return slots_.size() - free_.size(); }

  template <class Fn>
  void for_each_live(Fn&& fn) const {
    std::vector<bool> dead(slots_.size(), false);
    for (PacketHandle h : free_) dead[h] = true;
    for (PacketHandle h = 0; h < slots_.size(); ++h)
      if (!dead[h]) fn(h, slots_[h]);
  }

 private:
  std::vector<PacketInfo> slots_;
  std::vector<PacketHandle> free_;
};

enum class VcStage : std::uint8_t { Idle, Routing, VcAlloc, Active, Ejecting };

// Fixed-capacity FIFO of buffered flits.
class FlitBuffer {
 public:
  struct Entry {
    Flit flit;
    Cycle written = 0;
  };

  bool empty() const { return size_ == 0; }
  int size() const { return size_; }
  const Entry& front() const { return items_[head_]; }
  void push(const Entry& e) {
    items_[(head_ + size_) % kMaxBufferDepth] = e;
    ++size_;
  }
  void pop() {
    head_ = (head_ + 1) % kMaxBufferDepth;
    --size_;
  }

 private:
  std::array<Entry, kMaxBufferDepth> items_{};
  int head_ = 0;
  int size_ = 0;
};

struct InputVc {
  FlitBuffer buffer;
  VcStage stage = VcStage::Idle;
  Direction route_out = Direction::Local;
  int out_vc = -1;
  Cycle ready = 0;       // earliest cycle for the next pipeline stage
  Cycle va_since = 0;    // first VA request cycle, for oldest-first allocation
  PacketHandle pkt = 0;
};

struct OutputVc {
  bool reserved = false;
  int credits = 0;
};

class Router final : public RouterView {
 public:
  Router(NodeId id, const MeshConfig& mesh, const RouterParams& params);

  NodeId id() const override { return id_; }
  Coord coord() const { return coord_; }
  int occupied_vcs(Direction in_port) const override;
  int occupied_slots(Direction in_port) const override;
  int reserved_vcs(Direction out_port) const override;
  int free_credits(Direction out_port, VcClass cls) const override;

  bool has_link(Direction d) const { return d == Direction::Local || links_[ordinal(d)]; }

  InputVc& input(Direction port, int vc) { return in_[index(port, vc)]; }
  const InputVc& input(Direction port, int vc) const { return in_[index(port, vc)]; }
  OutputVc& output(Direction port, int vc) { return out_[index(port, vc)]; }
  const OutputVc& output(Direction port, int vc) const { return out_[index(port, vc)]; }

  // VC index range [first, last) owned by a turn-model class.
  std::pair<int, int> class_vcs(VcClass cls) const;

  int vcs() const { return vcs_; }
  int depth() const { return depth_; }

 private:
  friend class Network;
  int index(Direction port, int vc) const { return ordinal(port) * vcs_ + vc; }

  NodeId id_;
  Coord coord_;
  int vcs_;
  int depth_;
  std::array<bool, kNumPorts> links_{};
  std::vector<InputVc> in_;
  std::vector<OutputVc> out_;
  std::array<int, kNumPorts> sa_rr_{};  // per output port, last granted input VC index
  int active_vcs_ = 0;                  // VCs in Routing/VcAlloc/Active
  std::array<std::deque<LearningPacket>, kNumPorts> learning_queue_;
};

// Notified when the tail flit of a packet is taken by its destination sink.
using EjectHandler = std::function<void(PacketHandle, Cycle)>;

class Network {
 public:
  Network(const MeshConfig& mesh, const RouterParams& params, RoutingPolicy& policy,
          EventCounters& counters, PacketStore& packets);

  // Queue a packet at its source network interface. The packet enters the
  // network (entry_cycle) when its head is written into the source router.
  void enqueue(PacketHandle h);

  // Advance every router by one cycle.
  void tick(Cycle now);

  void set_eject_handler(EjectHandler h) { on_eject_ = std::move(h); }
  // Text trace: "<cycle> <router> <event> ..." per line.
  void set_trace(std::ostream* os) { trace_ = os; }

  const Router& router(NodeId n) const { return routers_[static_cast<std::size_t>(n)]; }
  Router& router(NodeId n) { return routers_[static_cast<std::size_t>(n)]; }
  const MeshConfig& mesh() const { return mesh_; }
  const RouterParams& params() const { return params_; }

  // Packets waiting in source queues (not yet entered).
  std::size_t queued_packets() const;
  std::size_t queued_packets(NodeId n) const;
  // Packets that entered the network but whose tail has not been ejected.
  std::uint64_t in_network() const { return counters_.packets_injected - counters_.packets_delivered; }

  // Credit conservation check over every (link, vc): sender credits + flits
  // in flight + receiver occupancy + credits in flight == buffer depth.
  bool credits_conserved() const;
  std::uint64_t data_flits_in_flight() const;
  // Learning packets queued at routers or on links.
  std::uint64_t learning_in_flight() const;

 private:
  struct TimedFlit {
    Cycle arrival;
    Flit flit;
    int vc;
  };
  struct TimedCredit {
    Cycle arrival;
    int vc;
  };
  struct TimedLearning {
    Cycle arrival;
    LearningPacket lp;
  };
  struct SourceQueue {
    std::deque<PacketHandle> pending;
    int vc = -1;         // Local VC used by the packet currently streaming
    int next_seq = 0;    // next flit of the front packet
  };

  std::size_t link_index(NodeId n, Direction d) const {
    return static_cast<std::size_t>(n) * kNumPorts + static_cast<std::size_t>(ordinal(d));
  }
  NodeId neighbor(NodeId n, Direction d) const { return neighbor_[link_index(n, d)]; }

  void deliver(Cycle now);
  void inject(Cycle now);
  void switch_allocate(Router& r, Cycle now);
  void vc_allocate(Router& r, Cycle now);
  void route_compute(Router& r, Cycle now);
  void send_learning(Cycle now);
  void write_flit(Router& r, Direction port, int vc, const Flit& f, Cycle now);
  void push_learning(Router& r, Direction toward, LearningOut& lps);
  void trace(Cycle now, NodeId r, const char* event, PacketHandle h, Direction d, int vc);

  MeshConfig mesh_;
  RouterParams params_;
  RoutingPolicy& policy_;
  EventCounters& counters_;
  PacketStore& packets_;
  std::vector<Router> routers_;
  std::vector<NodeId> neighbor_;
  // Indexed by link_index(sender, out direction).
  std::vector<std::deque<TimedFlit>> flit_links_;
  // Indexed by link_index(receiver of credits, its output direction).
  std::vector<std::deque<TimedCredit>> credit_links_;
  std::vector<std::deque<TimedLearning>> learning_links_;
  std::vector<SourceQueue> sources_;
  LearningOut scratch_;
  std::vector<int> va_order_;
  EjectHandler on_eject_;
  std::ostream* trace_ = nullptr;
};

}  // namespace qrasp

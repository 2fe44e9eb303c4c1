#pragma once

#include <array>
#include <cstdint>

#include "qrasp/topology.hpp"

namespace qrasp {

inline constexpr int kMaxSharedDests = 15;

// State that travels with the head flit from one router to the next.
struct HeadContext {
  Direction arrival_port = Direction::Local;  // port at the router currently holding the head
  Cycle write_cycle = 0;                      // head buffer-write at that router
  Cycle prev_queue_cycles = 0;                // write-to-grant time at the previous router
  // Destinations that shared the previous router's route for this packet.
  std::array<NodeId, kMaxSharedDests> shared{};
  std::uint8_t shared_count = 0;
  // Reverse-direction payload: previous router's estimate toward the source.
  bool reverse_valid = false;
  double reverse_cost = 0.0;
  double reverse_estimate = 0.0;
};

struct PacketInfo {
  std::uint64_t serial = 0;  // global injection-order number
  NodeId src = 0;
  NodeId dst = 0;
  VcClass vc_class = VcClass::A;
  int length = 1;
  Cycle create_cycle = 0;
  Cycle entry_cycle = -1;  // head written into the source router
  int hops = 0;
  bool measured = false;
  HeadContext ctx;
};

// Single-flit message returned from `origin` (y) to `target` (x).
struct LearningPacket {
  NodeId dest = 0;
  double cost = 0.0;
  double estimate = 0.0;     // min_z Q_y(dest, z), an exact fixed-point value
  Cycle estimate_stamp = 0;  // last write to the entry behind `estimate`
  NodeId origin = 0;
  NodeId target = 0;
  Cycle issue_cycle = 0;
};

struct EventCounters {
  std::uint64_t qtable_reads = 0;
  std::uint64_t qtable_writes = 0;
  std::uint64_t learning_flits = 0;
  std::uint64_t learning_drops = 0;
  std::uint64_t learning_discards = 0;  // delivered but not applicable at the target
  std::uint64_t flit_hops = 0;
  std::uint64_t buffer_writes = 0;
  std::uint64_t packets_injected = 0;   // entered the network
  std::uint64_t packets_delivered = 0;  // tail ejected

  bool operator==(const EventCounters&) const = default;
};

}  // namespace qrasp

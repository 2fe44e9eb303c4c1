#include "qrasp/traffic.hpp"

#include <bit>
#include <string>

namespace qrasp {

std::string_view to_string(PatternKind p) {
  switch (p) {
    case PatternKind::Uniform: return "uniform";
    case PatternKind::Transpose: return "transpose";
    case PatternKind::BitReversal: return "bit_reversal";
    case PatternKind::Butterfly: return "butterfly";
  }
  return "?";
}

PatternKind parse_pattern(std::string_view name) {
  for (PatternKind p : {PatternKind::Uniform, PatternKind::Transpose, PatternKind::BitReversal,
                        PatternKind::Butterfly})
    if (to_string(p) == name) return p;
  throw InputError("unknown traffic pattern '" + std::string(name) +
                   "' (expected uniform|transpose|bit_reversal|butterfly)");
}

int address_bits(const MeshConfig& mesh) {
  const auto n = static_cast<unsigned>(mesh.node_count());
  if (!std::has_single_bit(n)) throw InputError("pattern needs a power-of-two node count");
  return std::countr_zero(n);
}

void TrafficSchedule::validate(const MeshConfig& mesh) const {
  if (phases.empty()) throw InputError("traffic schedule has no phases");
  for (const auto& ph : phases) {
    if (ph.duration <= 0) throw InputError("traffic phase duration must be positive");
    if (ph.pattern == PatternKind::Transpose && mesh.width != mesh.height)
      throw InputError("transpose needs a square mesh");
    if (ph.pattern == PatternKind::BitReversal || ph.pattern == PatternKind::Butterfly)
      address_bits(mesh);
  }
  if (!(injection_rate >= 0.0 && injection_rate <= 1.0))
    throw InputError("injection_rate must lie in [0, 1]");
  if (packet_len < 1 || packet_len > 65535) throw InputError("packet_len must be >= 1");
}

std::string TrafficSchedule::label() const {
  std::string out;
  for (const auto& ph : phases) {
    if (!out.empty()) out += '+';
    out += to_string(ph.pattern);
  }
  return out;
}

TrafficSchedule default_interval_schedule(Cycle interval) {
  TrafficSchedule s;
  s.phases = {{PatternKind::Transpose, interval},
              {PatternKind::BitReversal, interval},
              {PatternKind::Butterfly, interval},
              {PatternKind::Uniform, interval}};
  return s;
}

std::optional<NodeId> dest_for(PatternKind pattern, NodeId src, const MeshConfig& mesh, Rng& rng) {
  const int n = mesh.node_count();
  NodeId dst = src;
  switch (pattern) {
    case PatternKind::Uniform: {
      dst = static_cast<NodeId>(rng.next_below(static_cast<std::uint64_t>(n - 1)));
      if (dst >= src) ++dst;
      break;
    }
    case PatternKind::Transpose: {
      const Coord c = id_to_coord(src, mesh);
      dst = coord_to_id({c.y, c.x}, mesh);
      break;
    }
    case PatternKind::BitReversal: {
      const int bits = address_bits(mesh);
      NodeId r = 0;
      for (int b = 0; b < bits; ++b)
        if (src & (1 << b)) r |= 1 << (bits - 1 - b);
      dst = r;
      break;
    }
    case PatternKind::Butterfly: {
      const int bits = address_bits(mesh);
      const int msb = (src >> (bits - 1)) & 1;
      const int lsb = src & 1;
      dst = (src & ~((1 << (bits - 1)) | 1)) | (lsb << (bits - 1)) | msb;
      break;
    }
  }
  if (dst == src) return std::nullopt;
  return dst;
}

double injection_probability(double rate, int packet_len) {
  if (packet_len < 1) throw InputError("packet_len must be >= 1");
  const double p = rate / packet_len;
  if (p > 1.0 || p < 0.0) throw InputError("injection probability outside [0, 1]");
  return p;
}

bool should_inject(double rate, int packet_len, Rng& rng) {
  return rng.bernoulli(injection_probability(rate, packet_len));
}

PatternKind active_pattern(const TrafficSchedule& schedule, Cycle cycle) {
  Cycle total = 0;
  for (const auto& ph : schedule.phases) total += ph.duration;
  Cycle pos = cycle % total;
  for (const auto& ph : schedule.phases) {
    if (pos < ph.duration) return ph.pattern;
    pos -= ph.duration;
  }
  return schedule.phases.back().pattern;
}

}  // namespace qrasp

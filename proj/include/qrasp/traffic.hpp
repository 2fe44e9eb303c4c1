#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qrasp/rng.hpp"
#include "qrasp/topology.hpp"

namespace qrasp {

enum class PatternKind : std::uint8_t { Uniform, Transpose, BitReversal, Butterfly };

std::string_view to_string(PatternKind p);
PatternKind parse_pattern(std::string_view name);

struct TrafficPhase {
  PatternKind pattern = PatternKind::Uniform;
  Cycle duration = 0;
  bool operator==(const TrafficPhase&) const = default;
};

struct TrafficSchedule {
  std::vector<TrafficPhase> phases{{PatternKind::Uniform, 100000}};
  double injection_rate = 0.02;  // flits per node per cycle
  int packet_len = 4;

  // Throws InputError when the schedule is empty, a phase has no duration,
  // the rate is outside [0, 1], or a permutation does not fit the mesh.
  void validate(const MeshConfig& mesh) const;
  // "transpose" for a single phase, "transpose+bit_reversal" otherwise.
  std::string label() const;
};

// transpose -> bit_reversal -> butterfly -> uniform, each `interval` cycles.
TrafficSchedule default_interval_schedule(Cycle interval = 100000);

// Address width in bits; throws InputError when node count is not a power of two.
int address_bits(const MeshConfig& mesh);

// Destination for a packet from `src`, or nullopt when a permutation maps
// `src` onto itself. Only the uniform pattern consumes `rng`.
std::optional<NodeId> dest_for(PatternKind pattern, NodeId src, const MeshConfig& mesh, Rng& rng);

// Per-cycle injection probability rate / packet_len; throws InputError when above 1.
double injection_probability(double rate, int packet_len);
bool should_inject(double rate, int packet_len, Rng& rng);

// Phase containing `cycle`; the schedule repeats after its last phase.
PatternKind active_pattern(const TrafficSchedule& schedule, Cycle cycle);

}  // namespace qrasp

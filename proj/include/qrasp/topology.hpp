#pragma once

// 2D mesh geometry, direction algebra and the two turn-model VC classes.
//
// Node 0 sits at the top-left corner. x grows east, y grows south, and the
// node id is row-major: id = y * width + x.

#include <array>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string_view>

namespace qrasp {

using NodeId = std::int32_t;
using Cycle = std::int64_t;

class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Direction : std::uint8_t { Local = 0, North = 1, East = 2, South = 3, West = 4 };

inline constexpr int kNumPorts = 5;
inline constexpr std::array<Direction, 4> kMeshDirections = {
    Direction::North, Direction::East, Direction::South, Direction::West};

constexpr int ordinal(Direction d) { return static_cast<int>(d); }
constexpr Direction direction_from_ordinal(int v) { return static_cast<Direction>(v); }

constexpr Direction opposite(Direction d) {
  switch (d) {
    case Direction::North: return Direction::South;
    case Direction::South: return Direction::North;
    case Direction::East: return Direction::West;
    case Direction::West: return Direction::East;
    case Direction::Local: return Direction::Local;
  }
  return Direction::Local;
}

constexpr bool is_horizontal(Direction d) { return d == Direction::East || d == Direction::West; }
constexpr bool is_vertical(Direction d) { return d == Direction::North || d == Direction::South; }

std::string_view to_string(Direction d);
// Single-letter form used in CSV and trace output: L N E S W.
char short_name(Direction d);

struct MeshConfig {
  int width = 8;
  int height = 8;

  constexpr int node_count() const { return width * height; }
  // Throws InputError when either side is below 2.
  void validate() const;
  bool operator==(const MeshConfig&) const = default;
};

struct Coord {
  int x = 0;
  int y = 0;
  bool operator==(const Coord&) const = default;
};

Coord id_to_coord(NodeId id, const MeshConfig& mesh);
NodeId coord_to_id(Coord c, const MeshConfig& mesh);
bool in_bounds(Coord c, const MeshConfig& mesh);

// Neighbouring coordinate one step in `d` (Local returns `c`). May be out of bounds.
constexpr Coord step(Coord c, Direction d) {
  switch (d) {
    case Direction::North: return {c.x, c.y - 1};
    case Direction::South: return {c.x, c.y + 1};
    case Direction::East: return {c.x + 1, c.y};
    case Direction::West: return {c.x - 1, c.y};
    case Direction::Local: return c;
  }
  return c;
}

constexpr int manhattan(Coord a, Coord b) {
  return (a.x > b.x ? a.x - b.x : b.x - a.x) + (a.y > b.y ? a.y - b.y : b.y - a.y);
}

// Small ordered set of directions. Iteration order is insertion order; the
// routing code always inserts the horizontal candidate before the vertical one.
class DirSet {
 public:
  constexpr DirSet() = default;
  constexpr DirSet(std::initializer_list<Direction> dirs) {
    for (Direction d : dirs) insert(d);
  }

  constexpr void insert(Direction d) {
    if (!contains(d)) items_[size_++] = d;
  }
  constexpr bool contains(Direction d) const {
    for (int i = 0; i < size_; ++i)
      if (items_[i] == d) return true;
    return false;
  }
  constexpr int size() const { return size_; }
  constexpr bool empty() const { return size_ == 0; }
  constexpr Direction operator[](int i) const { return items_[static_cast<std::size_t>(i)]; }
  constexpr const Direction* begin() const { return items_.data(); }
  constexpr const Direction* end() const { return items_.data() + size_; }

  template <class Pred>
  constexpr DirSet filtered(Pred pred) const {
    DirSet out;
    for (Direction d : *this)
      if (pred(d)) out.insert(d);
    return out;
  }

  constexpr bool operator==(const DirSet& o) const {
    if (size_ != o.size_) return false;
    for (Direction d : *this)
      if (!o.contains(d)) return false;
    return true;
  }

 private:
  std::array<Direction, kNumPorts> items_{};
  int size_ = 0;
};

// Productive directions from `cur` toward `dst`: horizontal first, then
// vertical. {Local} when cur == dst.
DirSet minimal_candidates(Coord cur, Coord dst);

// A = no turn east/west after travelling south; B = no turn east/west after
// travelling north.
enum class VcClass : std::uint8_t { A = 0, B = 1 };

std::string_view to_string(VcClass c);

// Turns are over travel directions. `prev_travel` Local means the packet is
// being injected; `next_travel` Local means ejection. Both are always allowed.
bool allowed_turn(VcClass cls, Direction prev_travel, Direction next_travel);

VcClass vc_class_for(Coord src, Coord dst, std::uint64_t pkt_id);

using TurnRule = std::function<bool(Direction prev_travel, Direction next_travel)>;

// Channel dependency graph over directed mesh links; true iff it has no cycle.
bool cdg_acyclic(const TurnRule& rule, const MeshConfig& mesh);
bool cdg_acyclic(VcClass cls, const MeshConfig& mesh);

// Route through a router: arrival port and selected output port.
struct RouteKey {
  Direction in_dir = Direction::Local;
  Direction out_dir = Direction::Local;
  bool operator==(const RouteKey&) const = default;
};

inline constexpr int kRouteCodeCount = 20;

// in_ordinal * 4 + out index, where the out index skips in_dir. Throws
// InputError when in_dir == out_dir.
int encode_route(RouteKey key);
RouteKey decode_route(int code);

}  // namespace qrasp

#include "qrasp/topology.hpp"

#include <string>
#include <vector>

namespace qrasp {

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::Local: return "local";
    case Direction::North: return "north";
    case Direction::East: return "east";
    case Direction::South: return "south";
    case Direction::West: return "west";
  }
  return "?";
}

char short_name(Direction d) { return "LNESW"[ordinal(d)]; }

std::string_view to_string(VcClass c) { return c == VcClass::A ? "A" : "B"; }

void MeshConfig::validate() const {
  if (width < 2 || height < 2)
    throw InputError("mesh must be at least 2x2, got " + std::to_string(width) + "x" +
                     std::to_string(height));
}

bool in_bounds(Coord c, const MeshConfig& mesh) {
  return c.x >= 0 && c.y >= 0 && c.x < mesh.width && c.y < mesh.height;
}

Coord id_to_coord(NodeId id, const MeshConfig& mesh) {
  if (id < 0 || id >= mesh.node_count())
    throw InputError("node id " + std::to_string(id) + " out of range");
  return {id % mesh.width, id / mesh.width};
}

NodeId coord_to_id(Coord c, const MeshConfig& mesh) {
  if (!in_bounds(c, mesh))
    throw InputError("coordinate (" + std::to_string(c.x) + "," + std::to_string(c.y) +
                     ") out of range");
  return c.y * mesh.width + c.x;
}

DirSet minimal_candidates(Coord cur, Coord dst) {
  DirSet out;
  if (dst.x > cur.x) out.insert(Direction::East);
  if (dst.x < cur.x) out.insert(Direction::West);
  if (dst.y > cur.y) out.insert(Direction::South);
  if (dst.y < cur.y) out.insert(Direction::North);
  if (out.empty()) out.insert(Direction::Local);
  return out;
}

bool allowed_turn(VcClass cls, Direction prev_travel, Direction next_travel) {
  if (prev_travel == Direction::Local || next_travel == Direction::Local) return true;
  if (next_travel == opposite(prev_travel)) return false;
  if (!is_horizontal(next_travel)) return true;
  if (cls == VcClass::A) return prev_travel != Direction::South;
  return prev_travel != Direction::North;
}

VcClass vc_class_for(Coord src, Coord dst, std::uint64_t pkt_id) {
  if (dst.y < src.y) return VcClass::A;
  if (dst.y > src.y) return VcClass::B;
  return pkt_id % 2 == 0 ? VcClass::A : VcClass::B;
}

bool cdg_acyclic(const TurnRule& rule, const MeshConfig& mesh) {
  mesh.validate();
  const int n = mesh.node_count();
  // Channel index = node * 4 + (ordinal(dir) - 1); absent edge links are skipped.
  auto channel = [](NodeId node, Direction d) { return node * 4 + ordinal(d) - 1; };
  std::vector<std::vector<int>> succ(static_cast<std::size_t>(n) * 4);
  std::vector<bool> exists(succ.size(), false);
  for (NodeId u = 0; u < n; ++u) {
    const Coord cu = id_to_coord(u, mesh);
    for (Direction d1 : kMeshDirections) {
      const Coord cv = step(cu, d1);
      if (!in_bounds(cv, mesh)) continue;
      exists[static_cast<std::size_t>(channel(u, d1))] = true;
      const NodeId v = coord_to_id(cv, mesh);
      for (Direction d2 : kMeshDirections) {
        if (!in_bounds(step(cv, d2), mesh) || !rule(d1, d2)) continue;
        succ[static_cast<std::size_t>(channel(u, d1))].push_back(channel(v, d2));
      }
    }
  }

  // Iterative three-colour DFS.
  enum : std::uint8_t { kWhite, kGrey, kBlack };
  std::vector<std::uint8_t> color(succ.size(), kWhite);
  std::vector<std::pair<int, std::size_t>> stack;
  for (std::size_t root = 0; root < succ.size(); ++root) {
    if (!exists[root] || color[root] != kWhite) continue;
    stack.emplace_back(static_cast<int>(root), 0);
    color[root] = kGrey;
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      const auto& out = succ[static_cast<std::size_t>(node)];
      if (next < out.size()) {
        const int to = out[next++];
        if (color[static_cast<std::size_t>(to)] == kGrey) return false;
        if (color[static_cast<std::size_t>(to)] == kWhite) {
          color[static_cast<std::size_t>(to)] = kGrey;
          stack.emplace_back(to, 0);
        }
      } else {
        color[static_cast<std::size_t>(node)] = kBlack;
        stack.pop_back();
      }
    }
  }
  return true;
}

bool cdg_acyclic(VcClass cls, const MeshConfig& mesh) {
  return cdg_acyclic([cls](Direction a, Direction b) { return allowed_turn(cls, a, b); }, mesh);
}

int encode_route(RouteKey key) {
  const int in = ordinal(key.in_dir);
  const int out = ordinal(key.out_dir);
  if (in == out) throw InputError("route key with identical input and output port");
  return in * 4 + (out < in ? out : out - 1);
}

RouteKey decode_route(int code) {
  if (code < 0 || code >= kRouteCodeCount) throw InputError("route code out of range");
  const int in = code / 4;
  int out = code % 4;
  if (out >= in) ++out;
  return {direction_from_ordinal(in), direction_from_ordinal(out)};
}

}  // namespace qrasp

#pragma once

// Per-router table of Q-values, one row per destination, with two slots
// (horizontal and vertical minimal candidate) and an optional recorded route.

#include <algorithm>
#include <cstdio>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qrasp/qfixed.hpp"
#include "qrasp/topology.hpp"

namespace qrasp {

class QueryError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class Slot : std::uint8_t { Horizontal = 0, Vertical = 1 };

template <class Q>
struct QRow {
  NodeId dest = -1;
  Q q_h{};
  Q q_v{};
  bool h_valid = false;
  bool v_valid = false;
  std::optional<RouteKey> route;
  Cycle h_stamp = 0;  // cycle of the last write to q_h
  Cycle v_stamp = 0;

  Q& at(Slot s) { return s == Slot::Horizontal ? q_h : q_v; }
  Q at(Slot s) const { return s == Slot::Horizontal ? q_h : q_v; }
  Cycle& stamp(Slot s) { return s == Slot::Horizontal ? h_stamp : v_stamp; }
  Cycle stamp(Slot s) const { return s == Slot::Horizontal ? h_stamp : v_stamp; }
  bool valid(Slot s) const { return s == Slot::Horizontal ? h_valid : v_valid; }
};

template <class Q>
class BasicQTable {
 public:
  using Value = Q;
  using Row = QRow<Q>;

  BasicQTable(NodeId owner, const MeshConfig& mesh) : owner_(owner), mesh_(mesh) {
    const Coord me = id_to_coord(owner, mesh);
    rows_.resize(static_cast<std::size_t>(mesh.node_count()));
    for (NodeId d = 0; d < mesh.node_count(); ++d) {
      Row& row = rows_[static_cast<std::size_t>(d)];
      row.dest = d;
      if (d == owner) continue;
      const Coord c = id_to_coord(d, mesh);
      row.h_valid = c.x != me.x;
      row.v_valid = c.y != me.y;
    }
  }

  NodeId owner() const { return owner_; }
  const MeshConfig& mesh() const { return mesh_; }
  int row_count() const { return mesh_.node_count() - 1; }

  const Row& row(NodeId dest) const { return rows_[checked(dest)]; }
  Row& row(NodeId dest) { return rows_[checked(dest)]; }

  // Slot holding the Q-value for leaving toward `dest` through `dir`; nullopt
  // when `dir` is not a minimal candidate for `dest`.
  std::optional<Slot> slot_for(NodeId dest, Direction dir) const {
    if (dest == owner_ || dest < 0 || dest >= mesh_.node_count()) return std::nullopt;
    const DirSet cands = minimal_candidates(id_to_coord(owner_, mesh_), id_to_coord(dest, mesh_));
    if (!cands.contains(dir) || dir == Direction::Local) return std::nullopt;
    return is_horizontal(dir) ? Slot::Horizontal : Slot::Vertical;
  }

  Q value(NodeId dest, Direction dir) const {
    const auto slot = slot_for(dest, dir);
    if (!slot) throw QueryError("direction is not a minimal candidate for destination");
    return row(dest).at(*slot);
  }

  void set(NodeId dest, Direction dir, Q v, Cycle now = 0) {
    const auto slot = slot_for(dest, dir);
    if (!slot) throw QueryError("direction is not a minimal candidate for destination");
    Row& r = row(dest);
    r.at(*slot) = v;
    r.stamp(*slot) = now;
  }

  // Minimum over `allowed`. Ties go to the horizontal candidate.
  std::pair<Direction, Q> min_estimate(NodeId dest, DirSet allowed) const {
    if (allowed.empty()) throw QueryError("min_estimate with an empty allowed set");
    const Row& r = row(dest);
    std::optional<std::pair<Direction, Q>> best;
    for (Direction d : allowed) {
      const auto slot = slot_for(dest, d);
      if (!slot) throw QueryError("allowed direction is not a minimal candidate");
      const Q v = r.at(*slot);
      const bool better = !best || v < best->second ||
                          (v == best->second && is_horizontal(d) && !is_horizontal(best->first));
      if (better) best = std::make_pair(d, v);
    }
    return *best;
  }

  // Minimum over every minimal candidate of `dest`; the value is 0 at the owner.
  std::pair<Direction, Q> min_estimate(NodeId dest) const {
    if (dest == owner_) return {Direction::Local, Q{}};
    return min_estimate(dest, minimal_candidates(id_to_coord(owner_, mesh_), id_to_coord(dest, mesh_)));
  }

  void record_route(NodeId dest, RouteKey key) {
    if (dest == owner_) throw QueryError("no row for the owning router");
    row(dest).route = key;
  }

  // Destinations other than `exclude` whose recorded route equals `key`,
  // ascending, at most `limit` entries.
  std::vector<NodeId> shared_dests(RouteKey key, NodeId exclude, std::size_t limit) const {
    std::vector<NodeId> out;
    for (const Row& r : rows_) {
      if (out.size() >= limit) break;
      if (r.dest == owner_ || r.dest == exclude) continue;
      if (r.route && *r.route == key) out.push_back(r.dest);
    }
    return out;
  }

  // dest,q_h,q_v,route with empty cells for invalid slots / unset route.
  void dump_csv(std::ostream& os) const {
    os << "dest,q_h,q_v,route\n";
    for (const Row& r : rows_) {
      if (r.dest == owner_) continue;
      os << r.dest << ',';
      if (r.h_valid) os << format_value(r.q_h);
      os << ',';
      if (r.v_valid) os << format_value(r.q_v);
      os << ',';
      if (r.route) os << short_name(r.route->in_dir) << short_name(r.route->out_dir);
      os << '\n';
    }
  }

 private:
  std::size_t checked(NodeId dest) const {
    if (dest < 0 || dest >= mesh_.node_count()) throw QueryError("destination out of range");
    return static_cast<std::size_t>(dest);
  }

  static std::string format_value(Q q) {
    // Values are multiples of 1/16, so four decimals are exact.
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", q.value());
    return buf;
  }

  NodeId owner_;
  MeshConfig mesh_;
  std::vector<Row> rows_;
};

using QTable = BasicQTable<QFixed>;
using WideQTable = BasicQTable<QWide>;

}  // namespace qrasp

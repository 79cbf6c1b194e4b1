// Indoor path network: typed multi-floor undirected graph with planar
// coordinates, its JSON file format, and the angle geometry used by the
// route-choice criteria.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace routefit {

using NodeId = std::string;

// Thrown when an input stream is structurally malformed.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when well-formed input violates a graph/model/corpus invariant.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Tolerance, in degrees, for angle equality (tie detection). Threshold
// comparisons are inclusive within the same tolerance.
inline constexpr double kAngleEps = 1e-9;

enum class NodeKind { kPlain, kDoorway, kEntrance, kRevolvingDoor };
enum class EdgeKind { kWalk, kStaircase, kElevator };

inline const char* to_string(NodeKind k) {
  switch (k) {
    case NodeKind::kPlain: return "plain";
    case NodeKind::kDoorway: return "doorway";
    case NodeKind::kEntrance: return "entrance";
    case NodeKind::kRevolvingDoor: return "revolving_door";
  }
  return "plain";
}

inline const char* to_string(EdgeKind k) {
  switch (k) {
    case EdgeKind::kWalk: return "walk";
    case EdgeKind::kStaircase: return "staircase";
    case EdgeKind::kElevator: return "elevator";
  }
  return "walk";
}

inline std::optional<NodeKind> node_kind_from_string(const std::string& s) {
  if (s == "plain") return NodeKind::kPlain;
  if (s == "doorway") return NodeKind::kDoorway;
  if (s == "entrance") return NodeKind::kEntrance;
  if (s == "revolving_door") return NodeKind::kRevolvingDoor;
  return std::nullopt;
}

inline std::optional<EdgeKind> edge_kind_from_string(const std::string& s) {
  if (s == "walk") return EdgeKind::kWalk;
  if (s == "staircase") return EdgeKind::kStaircase;
  if (s == "elevator") return EdgeKind::kElevator;
  return std::nullopt;
}

struct Node {
  NodeId id;
  double x = 0.0;  // planar easting, meters
  double y = 0.0;  // planar northing, meters
  int floor = 0;
  NodeKind kind = NodeKind::kPlain;

  friend bool operator==(const Node&, const Node&) = default;
};

struct Edge {
  NodeId a;
  NodeId b;
  double length = 0.0;  // meters; declared, not derived from coordinates
  EdgeKind kind = EdgeKind::kWalk;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Planar angle between two direction vectors, in degrees within [0, 180].
// Empty when either vector has zero length (direction unconstrained).
inline std::optional<double> planar_angle(double ux, double uy, double vx,
                                          double vy) {
  if ((ux == 0.0 && uy == 0.0) || (vx == 0.0 && vy == 0.0)) {
    return std::nullopt;
  }
  const double dot = ux * vx + uy * vy;
  const double cross = ux * vy - uy * vx;
  const double deg = std::atan2(std::fabs(cross), dot) * (180.0 / M_PI);
  return std::clamp(deg, 0.0, 180.0);
}

// Immutable after construction; safe for concurrent read access.
// Node order is canonical (sorted by id), so node indices double as a
// deterministic lexicographic order for tie-breaking.
class IndoorGraph {
 public:
  struct Arc {
    int to = -1;    // neighbor node index
    int edge = -1;  // index into edges()
  };

  IndoorGraph() = default;

  IndoorGraph(std::vector<Node> nodes, std::vector<Edge> edges) {
    build(std::move(nodes), std::move(edges));
  }

  static IndoorGraph from_json(const nlohmann::json& j);
  static IndoorGraph load(std::istream& in);

  nlohmann::json to_json() const;
  void save(std::ostream& out) const;

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }

  const Node& node(int idx) const { return nodes_[static_cast<std::size_t>(idx)]; }
  const Edge& edge(int idx) const { return edges_[static_cast<std::size_t>(idx)]; }

  std::optional<int> find_node(const NodeId& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  // Throws std::invalid_argument for unknown ids.
  int node_index(const NodeId& id) const {
    auto idx = find_node(id);
    if (!idx) throw std::invalid_argument("unknown node id '" + id + "'");
    return *idx;
  }

  const std::vector<Arc>& arcs(int node_idx) const {
    return adjacency_[static_cast<std::size_t>(node_idx)];
  }

  int degree(int node_idx) const {
    return static_cast<int>(adjacency_[static_cast<std::size_t>(node_idx)].size());
  }

  std::optional<int> edge_between(int a, int b) const {
    for (const Arc& arc : arcs(a)) {
      if (arc.to == b) return arc.edge;
    }
    return std::nullopt;
  }

  int floor_of(int node_idx) const { return node(node_idx).floor; }

  // Interior angle at `via` between the segments via->prev and via->next,
  // in degrees: 180 is straight continuation, 0 a full reversal. Empty
  // when either edge changes floors or is a staircase/elevator, or when a
  // segment has zero planar length.
  std::optional<double> turn_angle_idx(int prev, int via, int next) const {
    const int e1 = require_edge(prev, via);
    const int e2 = require_edge(via, next);
    if (!angles_defined(e1) || !angles_defined(e2)) return std::nullopt;
    const Node& p = node(prev);
    const Node& v = node(via);
    const Node& n = node(next);
    return planar_angle(p.x - v.x, p.y - v.y, n.x - v.x, n.y - v.y);
  }

  // Planar angle between the direction via->next and the straight-line
  // direction via->dest; 0 means the edge points straight at dest.
  std::optional<double> deviation_angle_idx(int via, int next, int dest) const {
    const int e = require_edge(via, next);
    if (!angles_defined(e)) return std::nullopt;
    const Node& v = node(via);
    const Node& n = node(next);
    const Node& d = node(dest);
    return planar_angle(n.x - v.x, n.y - v.y, d.x - v.x, d.y - v.y);
  }

  std::optional<double> turn_angle(const NodeId& prev, const NodeId& via,
                                   const NodeId& next) const {
    return turn_angle_idx(node_index(prev), node_index(via), node_index(next));
  }

  std::optional<double> deviation_angle(const NodeId& via, const NodeId& next,
                                        const NodeId& dest) const {
    return deviation_angle_idx(node_index(via), node_index(next),
                               node_index(dest));
  }

  friend bool operator==(const IndoorGraph& lhs, const IndoorGraph& rhs) {
    return lhs.nodes_ == rhs.nodes_ && lhs.edges_ == rhs.edges_;
  }

 private:
  void build(std::vector<Node> nodes, std::vector<Edge> edges);

  int require_edge(int a, int b) const {
    auto e = edge_between(a, b);
    if (!e) {
      throw std::invalid_argument("no edge between '" + node(a).id + "' and '" +
                                  node(b).id + "'");
    }
    return *e;
  }

  // Precomputed: edge is walk-kind and same-floor, so its planar direction
  // is meaningful for angle geometry.
  bool angles_defined(int edge_idx) const {
    return edge_planar_[static_cast<std::size_t>(edge_idx)] != 0;
  }

  std::vector<Node> nodes_;                       // sorted by id
  std::vector<Edge> edges_;                       // canonical endpoint order
  std::vector<char> edge_planar_;
  std::vector<std::vector<Arc>> adjacency_;       // sorted by neighbor index
  std::unordered_map<NodeId, int> index_;
};

inline void IndoorGraph::build(std::vector<Node> nodes, std::vector<Edge> edges) {
  std::sort(nodes.begin(), nodes.end(),
            [](const Node& a, const Node& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (nodes[i].id == nodes[i - 1].id) {
      throw ValidationError("duplicate node id '" + nodes[i].id + "'");
    }
  }
  nodes_ = std::move(nodes);
  index_.reserve(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    if (!std::isfinite(n.x) || !std::isfinite(n.y)) {
      throw ValidationError("node '" + n.id + "' has non-finite coordinates");
    }
    index_.emplace(n.id, static_cast<int>(i));
  }

  for (Edge& e : edges) {
    auto ia = index_.find(e.a);
    if (ia == index_.end()) {
      throw ValidationError("edge references unknown node id '" + e.a + "'");
    }
    auto ib = index_.find(e.b);
    if (ib == index_.end()) {
      throw ValidationError("edge references unknown node id '" + e.b + "'");
    }
    if (ia->second == ib->second) {
      throw ValidationError("self-loop edge at node '" + e.a + "'");
    }
    if (!(e.length > 0.0) || !std::isfinite(e.length)) {
      throw ValidationError("edge '" + e.a + "'-'" + e.b +
                            "' has non-positive or non-finite length");
    }
    const int fa = nodes_[static_cast<std::size_t>(ia->second)].floor;
    const int fb = nodes_[static_cast<std::size_t>(ib->second)].floor;
    if (e.kind == EdgeKind::kWalk && fa != fb) {
      throw ValidationError("edge '" + e.a + "'-'" + e.b +
                            "' of kind walk connects different floors");
    }
    if (ia->second > ib->second) std::swap(e.a, e.b);
  }
  std::sort(edges.begin(), edges.end(), [this](const Edge& l, const Edge& r) {
    const auto lk = std::pair<int, int>(index_.at(l.a), index_.at(l.b));
    const auto rk = std::pair<int, int>(index_.at(r.a), index_.at(r.b));
    return lk < rk;
  });
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (edges[i].a == edges[i - 1].a && edges[i].b == edges[i - 1].b) {
      throw ValidationError("duplicate edge between '" + edges[i].a + "' and '" +
                            edges[i].b + "'");
    }
  }
  edges_ = std::move(edges);

  adjacency_.assign(nodes_.size(), {});
  edge_planar_.assign(edges_.size(), 0);
  for (std::size_t ei = 0; ei < edges_.size(); ++ei) {
    const int a = index_.at(edges_[ei].a);
    const int b = index_.at(edges_[ei].b);
    adjacency_[static_cast<std::size_t>(a)].push_back({b, static_cast<int>(ei)});
    adjacency_[static_cast<std::size_t>(b)].push_back({a, static_cast<int>(ei)});
    edge_planar_[ei] = edges_[ei].kind == EdgeKind::kWalk &&
                               node(a).floor == node(b).floor
                           ? 1
                           : 0;
  }
  for (auto& arcs : adjacency_) {
    std::sort(arcs.begin(), arcs.end(),
              [](const Arc& l, const Arc& r) { return l.to < r.to; });
  }
}

namespace detail {

inline NodeId id_from_json(const nlohmann::json& j, const char* context) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  throw ParseError(std::string(context) + ": id must be a string or integer");
}

inline double number_from_json(const nlohmann::json& j, const char* field) {
  if (!j.is_number()) {
    throw ParseError(std::string(field) + " must be a number");
  }
  return j.get<double>();
}

}  // namespace detail

inline IndoorGraph IndoorGraph::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("graph: top-level value must be an object");
  if (!j.contains("nodes") || !j.at("nodes").is_array()) {
    throw ParseError("graph: missing \"nodes\" array");
  }
  std::vector<Node> nodes;
  nodes.reserve(j.at("nodes").size());
  for (const auto& nj : j.at("nodes")) {
    if (!nj.is_object()) throw ParseError("graph: node entries must be objects");
    Node n;
    if (!nj.contains("id")) throw ParseError("graph: node without \"id\"");
    n.id = detail::id_from_json(nj.at("id"), "node");
    if (!nj.contains("x") || !nj.contains("y")) {
      throw ParseError("graph: node '" + n.id + "' missing coordinates");
    }
    n.x = detail::number_from_json(nj.at("x"), "node x");
    n.y = detail::number_from_json(nj.at("y"), "node y");
    if (nj.contains("floor")) {
      if (!nj.at("floor").is_number_integer()) {
        throw ParseError("graph: node '" + n.id + "' floor must be an integer");
      }
      n.floor = nj.at("floor").get<int>();
    }
    if (nj.contains("kind")) {
      if (!nj.at("kind").is_string()) {
        throw ParseError("graph: node '" + n.id + "' kind must be a string");
      }
      auto k = node_kind_from_string(nj.at("kind").get<std::string>());
      if (!k) {
        throw ParseError("graph: node '" + n.id + "' has unknown kind '" +
                         nj.at("kind").get<std::string>() + "'");
      }
      n.kind = *k;
    }
    nodes.push_back(std::move(n));
  }

  std::vector<Edge> edges;
  if (j.contains("edges")) {
    if (!j.at("edges").is_array()) throw ParseError("graph: \"edges\" must be an array");
    edges.reserve(j.at("edges").size());
    for (const auto& ej : j.at("edges")) {
      if (!ej.is_object()) throw ParseError("graph: edge entries must be objects");
      Edge e;
      if (!ej.contains("a") || !ej.contains("b")) {
        throw ParseError("graph: edge missing endpoint id");
      }
      e.a = detail::id_from_json(ej.at("a"), "edge");
      e.b = detail::id_from_json(ej.at("b"), "edge");
      if (!ej.contains("length")) {
        throw ParseError("graph: edge '" + e.a + "'-'" + e.b + "' missing length");
      }
      e.length = detail::number_from_json(ej.at("length"), "edge length");
      if (ej.contains("kind")) {
        if (!ej.at("kind").is_string()) {
          throw ParseError("graph: edge kind must be a string");
        }
        auto k = edge_kind_from_string(ej.at("kind").get<std::string>());
        if (!k) {
          throw ParseError("graph: edge '" + e.a + "'-'" + e.b +
                           "' has unknown kind '" +
                           ej.at("kind").get<std::string>() + "'");
        }
        e.kind = *k;
      }
      edges.push_back(std::move(e));
    }
  }
  return IndoorGraph(std::move(nodes), std::move(edges));
}

inline IndoorGraph IndoorGraph::load(std::istream& in) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("graph: invalid JSON: ") + e.what());
  }
  return from_json(j);
}

inline nlohmann::json IndoorGraph::to_json() const {
  nlohmann::json j;
  j["nodes"] = nlohmann::json::array();
  for (const Node& n : nodes_) {
    j["nodes"].push_back({{"id", n.id},
                          {"x", n.x},
                          {"y", n.y},
                          {"floor", n.floor},
                          {"kind", to_string(n.kind)}});
  }
  j["edges"] = nlohmann::json::array();
  for (const Edge& e : edges_) {
    j["edges"].push_back({{"a", e.a},
                          {"b", e.b},
                          {"length", e.length},
                          {"kind", to_string(e.kind)}});
  }
  return j;
}

inline void IndoorGraph::save(std::ostream& out) const {
  out << to_json().dump(2) << "\n";
}

}  // namespace routefit

// Weighted cost modifiers: 11 human-preference criteria that extend an
// edge's metric length by configurable penalties, plus the cost-model file
// format. All criterion logic is pure; the evaluator below only memoizes.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "routefit/graph.hpp"

namespace routefit {

enum class CriterionKind : int {
  kTurns = 0,
  kStreets,
  kDecisionPoints,
  kBranchingFactor,
  kMinDeviationAngle,
  kLinearity,
  kStaircases,
  kElevators,
  kDoorways,
  kEntrances,
  kRevolvingDoors,
};

inline constexpr int kCriterionCount = 11;

inline constexpr std::array<CriterionKind, kCriterionCount> kAllCriteria = {
    CriterionKind::kTurns,          CriterionKind::kStreets,
    CriterionKind::kDecisionPoints, CriterionKind::kBranchingFactor,
    CriterionKind::kMinDeviationAngle, CriterionKind::kLinearity,
    CriterionKind::kStaircases,     CriterionKind::kElevators,
    CriterionKind::kDoorways,       CriterionKind::kEntrances,
    CriterionKind::kRevolvingDoors,
};

inline const char* to_string(CriterionKind k) {
  switch (k) {
    case CriterionKind::kTurns: return "turns";
    case CriterionKind::kStreets: return "streets";
    case CriterionKind::kDecisionPoints: return "decision_points";
    case CriterionKind::kBranchingFactor: return "branching_factor";
    case CriterionKind::kMinDeviationAngle: return "min_deviation_angle";
    case CriterionKind::kLinearity: return "linearity";
    case CriterionKind::kStaircases: return "staircases";
    case CriterionKind::kElevators: return "elevators";
    case CriterionKind::kDoorways: return "doorways";
    case CriterionKind::kEntrances: return "entrances";
    case CriterionKind::kRevolvingDoors: return "revolving_doors";
  }
  return "";
}

inline const char* display_name(CriterionKind k) {
  switch (k) {
    case CriterionKind::kTurns: return "Turns";
    case CriterionKind::kStreets: return "Streets";
    case CriterionKind::kDecisionPoints: return "Decision Points";
    case CriterionKind::kBranchingFactor: return "Branching Factor";
    case CriterionKind::kMinDeviationAngle: return "Min Deviation Angle";
    case CriterionKind::kLinearity: return "Linearity";
    case CriterionKind::kStaircases: return "Staircases";
    case CriterionKind::kElevators: return "Elevators";
    case CriterionKind::kDoorways: return "Doorways";
    case CriterionKind::kEntrances: return "Entrances";
    case CriterionKind::kRevolvingDoors: return "Revolving Doors";
  }
  return "";
}

inline std::optional<CriterionKind> criterion_from_string(const std::string& s) {
  for (CriterionKind k : kAllCriteria) {
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

struct WeightedCriterion {
  CriterionKind kind = CriterionKind::kTurns;
  double w = 0.0;  // meters added per triggered occurrence

  friend bool operator==(const WeightedCriterion&,
                         const WeightedCriterion&) = default;
};

// A set of weighted criteria plus the angle thresholds they evaluate
// against. At most one entry per kind; turns and streets are mutually
// exclusive unless allow_turns_and_streets is set (they penalize
// overlapping conditions).
class CostModel {
 public:
  CostModel() = default;

  static CostModel single(CriterionKind kind, double w) {
    CostModel m;
    m.set(kind, w);
    return m;
  }

  void set(CriterionKind kind, double w) {
    weights_[static_cast<std::size_t>(kind)] = w;
  }

  void unset(CriterionKind kind) {
    weights_[static_cast<std::size_t>(kind)].reset();
  }

  bool has(CriterionKind kind) const {
    return weights_[static_cast<std::size_t>(kind)].has_value();
  }

  double weight(CriterionKind kind) const {
    return weights_[static_cast<std::size_t>(kind)].value_or(0.0);
  }

  // Entries in enum order; absent kinds are skipped.
  std::vector<WeightedCriterion> criteria() const {
    std::vector<WeightedCriterion> out;
    for (CriterionKind k : kAllCriteria) {
      if (has(k)) out.push_back({k, weight(k)});
    }
    return out;
  }

  double straight_threshold() const { return straight_threshold_; }
  double turn_threshold() const { return turn_threshold_; }
  double linearity_threshold() const { return linearity_threshold_; }
  bool allow_turns_and_streets() const { return allow_turns_and_streets_; }

  void set_straight_threshold(double deg) { straight_threshold_ = deg; }
  void set_turn_threshold(double deg) { turn_threshold_ = deg; }
  void set_linearity_threshold(double deg) { linearity_threshold_ = deg; }
  void set_allow_turns_and_streets(bool v) { allow_turns_and_streets_ = v; }

  // True when some active criterion reads the arrival direction, i.e. the
  // step cost can differ by predecessor and per-node search is unsound.
  bool predecessor_dependent() const {
    return weight(CriterionKind::kTurns) > 0.0 ||
           weight(CriterionKind::kStreets) > 0.0 ||
           weight(CriterionKind::kLinearity) > 0.0;
  }

  bool is_zero() const {
    for (CriterionKind k : kAllCriteria) {
      if (weight(k) > 0.0) return false;
    }
    return true;
  }

  void validate() const {
    for (CriterionKind k : kAllCriteria) {
      if (!has(k)) continue;
      const double w = weight(k);
      if (!(w >= 0.0) || !std::isfinite(w)) {
        throw ValidationError(std::string("criterion '") + to_string(k) +
                              "' has negative or non-finite weight");
      }
    }
    if (has(CriterionKind::kTurns) && has(CriterionKind::kStreets) &&
        !allow_turns_and_streets_) {
      throw ValidationError(
          "model contains both turns and streets; they overlap (set "
          "allow_turns_and_streets to override)");
    }
    for (double thr : {straight_threshold_, turn_threshold_, linearity_threshold_}) {
      if (!(thr > 0.0) || !(thr <= 180.0)) {
        throw ValidationError("thresholds must lie in (0, 180]");
      }
    }
  }

  static CostModel from_json(const nlohmann::json& j);
  static CostModel load(std::istream& in);
  nlohmann::json to_json() const;
  void save(std::ostream& out) const;

  friend bool operator==(const CostModel&, const CostModel&) = default;

 private:
  std::array<std::optional<double>, kCriterionCount> weights_{};
  double straight_threshold_ = 180.0;
  double turn_threshold_ = 90.0;
  double linearity_threshold_ = 150.0;
  bool allow_turns_and_streets_ = false;
};

inline CostModel CostModel::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("model: top-level value must be an object");
  CostModel m;
  if (j.contains("criteria")) {
    if (!j.at("criteria").is_array()) {
      throw ParseError("model: \"criteria\" must be an array");
    }
    for (const auto& cj : j.at("criteria")) {
      if (!cj.is_object() || !cj.contains("kind") || !cj.contains("w")) {
        throw ParseError("model: criterion entries need \"kind\" and \"w\"");
      }
      if (!cj.at("kind").is_string()) {
        throw ParseError("model: criterion kind must be a string");
      }
      const std::string name = cj.at("kind").get<std::string>();
      auto kind = criterion_from_string(name);
      if (!kind) {
        throw ValidationError("model: unknown criterion kind '" + name + "'");
      }
      if (!cj.at("w").is_number()) {
        throw ParseError("model: criterion '" + name + "' weight must be a number");
      }
      if (m.has(*kind)) {
        throw ValidationError("model: duplicate criterion kind '" + name + "'");
      }
      m.set(*kind, cj.at("w").get<double>());
    }
  }
  auto read_threshold = [&j](const char* field, double fallback) {
    if (!j.contains(field)) return fallback;
    if (!j.at(field).is_number()) {
      throw ParseError(std::string("model: ") + field + " must be a number");
    }
    return j.at(field).get<double>();
  };
  m.straight_threshold_ = read_threshold("straight_threshold", 180.0);
  m.turn_threshold_ = read_threshold("turn_threshold", 90.0);
  m.linearity_threshold_ = read_threshold("linearity_threshold", 150.0);
  if (j.contains("allow_turns_and_streets")) {
    if (!j.at("allow_turns_and_streets").is_boolean()) {
      throw ParseError("model: allow_turns_and_streets must be a boolean");
    }
    m.allow_turns_and_streets_ = j.at("allow_turns_and_streets").get<bool>();
  }
  m.validate();
  return m;
}

inline CostModel CostModel::load(std::istream& in) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("model: invalid JSON: ") + e.what());
  }
  return from_json(j);
}

inline nlohmann::json CostModel::to_json() const {
  nlohmann::json j;
  j["criteria"] = nlohmann::json::array();
  for (const WeightedCriterion& c : criteria()) {
    j["criteria"].push_back({{"kind", to_string(c.kind)}, {"w", c.w}});
  }
  j["straight_threshold"] = straight_threshold_;
  j["turn_threshold"] = turn_threshold_;
  j["linearity_threshold"] = linearity_threshold_;
  j["allow_turns_and_streets"] = allow_turns_and_streets_;
  return j;
}

inline void CostModel::save(std::ostream& out) const {
  out << to_json().dump(2) << "\n";
}

// One traversal step: moving x -> y toward dest, having arrived at x from
// prev (none at the start of a route).
struct StepContext {
  std::optional<NodeId> prev;
  NodeId x;
  NodeId y;
  NodeId dest;
};

struct StepPenalties {
  std::array<double, kCriterionCount> penalty{};

  double total() const {
    double s = 0.0;
    for (double p : penalty) s += p;
    return s;
  }

  double& operator[](CriterionKind k) {
    return penalty[static_cast<std::size_t>(k)];
  }
  double operator[](CriterionKind k) const {
    return penalty[static_cast<std::size_t>(k)];
  }
};

// Computes step costs for one (graph, model, dest) query. Memoizes the
// per-node deviation-angle minimizer sets and the per-(prev, node)
// linearity maximizer sets, both of which are what make repeated step
// evaluations along a search cheap. Not safe for concurrent use; create
// one per worker.
class StepCostEvaluator {
 public:
  StepCostEvaluator(const IndoorGraph& g, const CostModel& model, int dest_idx)
      : g_(g), dest_(dest_idx) {
    model.validate();
    for (CriterionKind k : kAllCriteria) {
      w_[static_cast<std::size_t>(k)] = model.weight(k);
    }
    straight_thr_ = model.straight_threshold();
    turn_thr_ = model.turn_threshold();
    lin_thr_ = model.linearity_threshold();
    dev_exempt_.resize(g.node_count());
  }

  const IndoorGraph& graph() const { return g_; }
  int dest() const { return dest_; }

  // prev_idx < 0 means no predecessor (first step of a route). arc_pos
  // indexes g.arcs(x_idx).
  double step_cost(int prev_idx, int x_idx, int arc_pos) {
    const IndoorGraph::Arc& arc = g_.arcs(x_idx)[static_cast<std::size_t>(arc_pos)];
    double c = g_.edge(arc.edge).length;
    eval_step(prev_idx, x_idx, arc_pos, arc, [&c](CriterionKind, double p) { c += p; });
    return c;
  }

  StepPenalties step_penalties(int prev_idx, int x_idx, int arc_pos) {
    const IndoorGraph::Arc& arc = g_.arcs(x_idx)[static_cast<std::size_t>(arc_pos)];
    StepPenalties out;
    eval_step(prev_idx, x_idx, arc_pos, arc,
              [&out](CriterionKind k, double p) { out[k] += p; });
    return out;
  }

 private:
  double w(CriterionKind k) const { return w_[static_cast<std::size_t>(k)]; }

  template <typename Emit>
  void eval_step(int prev_idx, int x_idx, int arc_pos,
                 const IndoorGraph::Arc& arc, Emit&& emit) {
    const int y_idx = arc.to;
    const int deg = g_.degree(x_idx);

    if (prev_idx >= 0 &&
        (w(CriterionKind::kTurns) != 0.0 || w(CriterionKind::kStreets) != 0.0)) {
      const auto angle = g_.turn_angle_idx(prev_idx, x_idx, y_idx);
      if (angle) {
        if (w(CriterionKind::kTurns) != 0.0 && *angle <= turn_thr_ + kAngleEps) {
          emit(CriterionKind::kTurns, w(CriterionKind::kTurns));
        }
        if (w(CriterionKind::kStreets) != 0.0 && *angle < straight_thr_ - kAngleEps) {
          emit(CriterionKind::kStreets, w(CriterionKind::kStreets));
        }
      }
    }

    if (deg >= 3) {
      if (w(CriterionKind::kDecisionPoints) != 0.0) {
        emit(CriterionKind::kDecisionPoints, w(CriterionKind::kDecisionPoints));
      }
      if (w(CriterionKind::kBranchingFactor) != 0.0) {
        emit(CriterionKind::kBranchingFactor, deg * w(CriterionKind::kBranchingFactor));
      }
      if (w(CriterionKind::kMinDeviationAngle) != 0.0 &&
          !deviation_exempt(x_idx)[static_cast<std::size_t>(arc_pos)]) {
        emit(CriterionKind::kMinDeviationAngle, w(CriterionKind::kMinDeviationAngle));
      }
      if (prev_idx >= 0 && w(CriterionKind::kLinearity) != 0.0) {
        const LinearityInfo& info = linearity_info(prev_idx, x_idx);
        if (info.triggered && !info.exempt[static_cast<std::size_t>(arc_pos)]) {
          emit(CriterionKind::kLinearity, w(CriterionKind::kLinearity));
        }
      }
    }

    const Edge& e = g_.edge(arc.edge);
    if (e.kind == EdgeKind::kStaircase && w(CriterionKind::kStaircases) != 0.0) {
      emit(CriterionKind::kStaircases, w(CriterionKind::kStaircases));
    }
    if (e.kind == EdgeKind::kElevator && w(CriterionKind::kElevators) != 0.0) {
      emit(CriterionKind::kElevators, w(CriterionKind::kElevators));
    }

    const NodeKind yk = g_.node(y_idx).kind;
    if (yk == NodeKind::kDoorway && w(CriterionKind::kDoorways) != 0.0) {
      emit(CriterionKind::kDoorways, w(CriterionKind::kDoorways));
    }
    if (yk == NodeKind::kEntrance && w(CriterionKind::kEntrances) != 0.0) {
      emit(CriterionKind::kEntrances, w(CriterionKind::kEntrances));
    }
    if (yk == NodeKind::kRevolvingDoor && w(CriterionKind::kRevolvingDoors) != 0.0) {
      emit(CriterionKind::kRevolvingDoors, w(CriterionKind::kRevolvingDoors));
    }
  }

  // Arc positions at x whose deviation angle toward dest ties the minimum.
  // Neighbors with undefined angles are never exempt; an empty minimizer
  // set (no defined angle at all) exempts nothing.
  const std::vector<char>& deviation_exempt(int x_idx) {
    auto& slot = dev_exempt_[static_cast<std::size_t>(x_idx)];
    if (slot) return *slot;
    const auto& arcs = g_.arcs(x_idx);
    std::vector<char> exempt(arcs.size(), 0);
    std::vector<std::optional<double>> angles(arcs.size());
    std::optional<double> best;
    for (std::size_t i = 0; i < arcs.size(); ++i) {
      angles[i] = g_.deviation_angle_idx(x_idx, arcs[i].to, dest_);
      if (angles[i] && (!best || *angles[i] < *best)) best = *angles[i];
    }
    if (best) {
      for (std::size_t i = 0; i < arcs.size(); ++i) {
        if (angles[i] && *angles[i] <= *best + kAngleEps) exempt[i] = 1;
      }
    }
    slot = std::move(exempt);
    return *slot;
  }

  struct LinearityInfo {
    bool triggered = false;       // max defined angle reaches the threshold
    std::vector<char> exempt;     // arc positions tying that max
  };

  // Candidates are the neighbors other than prev whose turn angle from the
  // arrival direction is defined; the step back to prev is not a
  // continuation and is never exempt.
  const LinearityInfo& linearity_info(int prev_idx, int x_idx) {
    const std::uint64_t key =
        (static_cast<std::uint64_t>(prev_idx) << 32) |
        static_cast<std::uint32_t>(x_idx);
    auto it = lin_info_.find(key);
    if (it != lin_info_.end()) return it->second;

    const auto& arcs = g_.arcs(x_idx);
    LinearityInfo info;
    info.exempt.assign(arcs.size(), 0);
    std::vector<std::optional<double>> angles(arcs.size());
    std::optional<double> best;
    for (std::size_t i = 0; i < arcs.size(); ++i) {
      if (arcs[i].to == prev_idx) continue;
      angles[i] = g_.turn_angle_idx(prev_idx, x_idx, arcs[i].to);
      if (angles[i] && (!best || *angles[i] > *best)) best = *angles[i];
    }
    if (best && *best >= lin_thr_ - kAngleEps) {
      info.triggered = true;
      for (std::size_t i = 0; i < arcs.size(); ++i) {
        if (angles[i] && *angles[i] >= *best - kAngleEps) info.exempt[i] = 1;
      }
    }
    return lin_info_.emplace(key, std::move(info)).first->second;
  }

  const IndoorGraph& g_;
  int dest_;
  std::array<double, kCriterionCount> w_{};
  double straight_thr_ = 180.0;
  double turn_thr_ = 90.0;
  double lin_thr_ = 150.0;
  std::vector<std::optional<std::vector<char>>> dev_exempt_;
  std::unordered_map<std::uint64_t, LinearityInfo> lin_info_;
};

namespace detail {

inline int arc_position(const IndoorGraph& g, int x_idx, int y_idx) {
  const auto& arcs = g.arcs(x_idx);
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    if (arcs[i].to == y_idx) return static_cast<int>(i);
  }
  throw std::invalid_argument("no edge between '" + g.node(x_idx).id +
                              "' and '" + g.node(y_idx).id + "'");
}

}  // namespace detail

// Weighted length of one step: length(x,y) plus every triggered penalty.
inline double step_cost(const IndoorGraph& g, const StepContext& ctx,
                        const CostModel& model) {
  const int x = g.node_index(ctx.x);
  const int y = g.node_index(ctx.y);
  const int dest = g.node_index(ctx.dest);
  int prev = -1;
  if (ctx.prev) {
    prev = g.node_index(*ctx.prev);
    detail::arc_position(g, prev, x);  // (prev,x) must be an edge
  }
  StepCostEvaluator eval(g, model, dest);
  return eval.step_cost(prev, x, detail::arc_position(g, x, y));
}

// Per-criterion penalty breakdown of one step (excludes the metric length).
inline StepPenalties step_penalties(const IndoorGraph& g, const StepContext& ctx,
                                    const CostModel& model) {
  const int x = g.node_index(ctx.x);
  const int y = g.node_index(ctx.y);
  const int dest = g.node_index(ctx.dest);
  int prev = -1;
  if (ctx.prev) {
    prev = g.node_index(*ctx.prev);
    detail::arc_position(g, prev, x);
  }
  StepCostEvaluator eval(g, model, dest);
  return eval.step_penalties(prev, x, detail::arc_position(g, x, y));
}

}  // namespace routefit

// Minimum-weighted-cost route planning. Costs may depend on the
// predecessor edge (turn-aware criteria), so the exact search labels
// (node, arrived_from) states rather than nodes; a brute-force oracle and
// a classic node-label mode are provided for verification and comparison.
#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "routefit/cost.hpp"
#include "routefit/graph.hpp"

namespace routefit {

struct Route {
  std::vector<NodeId> nodes;   // simple path, start first
  double metric_length = 0.0;  // sum of edge lengths
  double weighted_cost = 0.0;  // sum of step costs, >= metric_length

  friend bool operator==(const Route&, const Route&) = default;
};

enum class PlanMode {
  // Label-setting over (node, arrived_from) states; optimal for every
  // cost model, simple-path result guaranteed.
  kExact,
  // Classic per-node labels that read the turn from the node's current
  // predecessor. Exact for predecessor-independent models, potentially
  // suboptimal otherwise; kept for comparison with that behavior.
  kNodeLabel,
};

struct PlanOptions {
  PlanMode mode = PlanMode::kExact;
};

namespace detail {

struct CostPair {
  double cost = std::numeric_limits<double>::infinity();
  double metric = std::numeric_limits<double>::infinity();

  friend bool operator==(const CostPair&, const CostPair&) = default;

  bool lex_less(const CostPair& o) const {
    if (cost != o.cost) return cost < o.cost;
    return metric < o.metric;
  }
};

using PqItem = std::tuple<double, double, int>;  // cost, metric, state/node
using MinQueue =
    std::priority_queue<PqItem, std::vector<PqItem>, std::greater<PqItem>>;

// Arc-state layout: states offset[v]..offset[v+1]-1 are (v, arrived from
// arcs(v)[k].to); one extra trailing state is (start, no predecessor).
struct StateSpace {
  std::vector<int> offset;
  std::vector<int> state_node;
  int none_state = 0;

  explicit StateSpace(const IndoorGraph& g) {
    const int n = static_cast<int>(g.node_count());
    offset.resize(static_cast<std::size_t>(n) + 1, 0);
    for (int v = 0; v < n; ++v) {
      offset[static_cast<std::size_t>(v) + 1] =
          offset[static_cast<std::size_t>(v)] + g.degree(v);
    }
    none_state = offset[static_cast<std::size_t>(n)];
    state_node.resize(static_cast<std::size_t>(none_state));
    for (int v = 0; v < n; ++v) {
      for (int k = 0; k < g.degree(v); ++k) {
        state_node[static_cast<std::size_t>(offset[static_cast<std::size_t>(v)] + k)] = v;
      }
    }
  }

  int state(int node, int arc_pos) const {
    return offset[static_cast<std::size_t>(node)] + arc_pos;
  }
  int count() const { return none_state + 1; }
};

inline int arc_pos_of(const IndoorGraph& g, int x, int y) {
  const auto& arcs = g.arcs(x);
  int lo = 0;
  int hi = static_cast<int>(arcs.size());
  while (lo < hi) {
    const int mid = (lo + hi) / 2;
    if (arcs[static_cast<std::size_t>(mid)].to < y) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  if (lo == static_cast<int>(arcs.size()) ||
      arcs[static_cast<std::size_t>(lo)].to != y) {
    throw std::logic_error("internal: missing arc");
  }
  return lo;
}

// Cost-to-go per state, from a multi-source run over the reversed state
// graph: togo[(v,p)] = min over neighbors u of step(p,v,u) + togo[(u,v)].
// Settled values are exact, so forward extraction can test candidate sums
// for bit-identical equality against them.
inline std::vector<CostPair> state_togo(const IndoorGraph& g,
                                        StepCostEvaluator& eval,
                                        const StateSpace& ss, int start,
                                        int dest) {
  std::vector<CostPair> togo(static_cast<std::size_t>(ss.count()));
  std::vector<char> done(static_cast<std::size_t>(ss.count()), 0);
  MinQueue pq;
  for (int k = 0; k < g.degree(dest); ++k) {
    const int s = ss.state(dest, k);
    togo[static_cast<std::size_t>(s)] = {0.0, 0.0};
    pq.emplace(0.0, 0.0, s);
  }
  while (!pq.empty()) {
    const auto [cost, metric, s] = pq.top();
    pq.pop();
    if (done[static_cast<std::size_t>(s)]) continue;
    done[static_cast<std::size_t>(s)] = 1;
    // The no-predecessor start state is terminal: nothing precedes the
    // start, so it only ever carries the finished cost.
    if (s == ss.none_state) continue;
    const int u = ss.state_node[static_cast<std::size_t>(s)];
    const int v = g.arcs(u)[static_cast<std::size_t>(s - ss.offset[static_cast<std::size_t>(u)])].to;
    // Arriving at u from v means the step was v -> u; extend to every
    // state at v (and to the no-predecessor start state).
    const int pos_uv = arc_pos_of(g, v, u);
    const double len = g.edge(g.arcs(v)[static_cast<std::size_t>(pos_uv)].edge).length;
    const int vdeg = g.degree(v);
    for (int k = -1; k < vdeg; ++k) {
      int t;
      int p;
      if (k < 0) {
        if (v != start) continue;
        t = ss.none_state;
        p = -1;
      } else {
        t = ss.state(v, k);
        p = g.arcs(v)[static_cast<std::size_t>(k)].to;
        // Walks that immediately retraverse the edge they came by are
        // excluded; simple paths never do, so the bound stays admissible
        // and extraction stays consistent (it skips prev the same way).
        if (p == u) continue;
      }
      if (done[static_cast<std::size_t>(t)]) continue;
      const CostPair cand{cost + eval.step_cost(p, v, pos_uv), metric + len};
      if (cand.lex_less(togo[static_cast<std::size_t>(t)])) {
        togo[static_cast<std::size_t>(t)] = cand;
        pq.emplace(cand.cost, cand.metric, t);
      }
    }
  }
  return togo;
}

// Walks forward from the start state always taking the smallest-id
// neighbor whose candidate sum reproduces the settled cost-to-go, which
// yields the lexicographically smallest optimal walk.
inline std::vector<int> extract_walk(const IndoorGraph& g,
                                     StepCostEvaluator& eval,
                                     const StateSpace& ss,
                                     const std::vector<CostPair>& togo,
                                     int start, int dest) {
  std::vector<int> walk{start};
  int cur = start;
  int prev = -1;
  CostPair rem = togo[static_cast<std::size_t>(ss.none_state)];
  const int step_cap = ss.count() + 1;
  while (cur != dest) {
    if (static_cast<int>(walk.size()) > step_cap) {
      throw std::logic_error("internal: walk extraction did not terminate");
    }
    const auto& arcs = g.arcs(cur);
    int chosen = -1;
    CostPair chosen_togo;
    for (int k = 0; k < static_cast<int>(arcs.size()); ++k) {
      const int y = arcs[static_cast<std::size_t>(k)].to;
      if (y == prev) continue;
      const CostPair& t = togo[static_cast<std::size_t>(ss.state(y, arc_pos_of(g, y, cur)))];
      if (t.cost == std::numeric_limits<double>::infinity()) continue;
      const double len = g.edge(arcs[static_cast<std::size_t>(k)].edge).length;
      const CostPair cand{t.cost + eval.step_cost(prev, cur, k), t.metric + len};
      if (cand == rem) {
        chosen = k;
        chosen_togo = t;
        break;  // arcs are sorted by neighbor, first hit is smallest id
      }
    }
    if (chosen < 0) {
      throw std::logic_error("internal: walk extraction lost the optimum");
    }
    prev = cur;
    cur = arcs[static_cast<std::size_t>(chosen)].to;
    walk.push_back(cur);
    rem = chosen_togo;
  }
  return walk;
}

// Removes every cycle from a walk by cutting back to the first occurrence
// of a revisited node; the result is a simple path with the same endpoints.
inline std::vector<int> splice_simple(const std::vector<int>& walk,
                                      std::size_t node_count) {
  std::vector<int> pos(node_count, -1);
  std::vector<int> path;
  for (int v : walk) {
    if (pos[static_cast<std::size_t>(v)] >= 0) {
      while (static_cast<int>(path.size()) > pos[static_cast<std::size_t>(v)] + 1) {
        pos[static_cast<std::size_t>(path.back())] = -1;
        path.pop_back();
      }
    } else {
      pos[static_cast<std::size_t>(v)] = static_cast<int>(path.size());
      path.push_back(v);
    }
  }
  return path;
}

// Exact search over simple paths, explored in lexicographic node order
// with the state cost-to-go as an admissible bound. Only invoked when the
// optimal walk revisits a node, which is rare; the seed keeps the search
// tightly pruned from the first expansion.
class SimplePathSearch {
 public:
  SimplePathSearch(const IndoorGraph& g, StepCostEvaluator& eval,
                   const StateSpace& ss, const std::vector<CostPair>& togo,
                   int dest)
      : g_(g), eval_(eval), ss_(ss), togo_(togo), dest_(dest),
        on_path_(g.node_count(), 0) {}

  void seed(std::vector<int> nodes, CostPair value) {
    best_nodes_ = std::move(nodes);
    best_ = value;
    best_from_seed_ = true;
  }

  std::vector<int> run(int start) {
    path_.clear();
    path_.push_back(start);
    on_path_[static_cast<std::size_t>(start)] = 1;
    dfs(start, -1, CostPair{0.0, 0.0});
    on_path_[static_cast<std::size_t>(start)] = 0;
    return best_nodes_;
  }

 private:
  void dfs(int cur, int prev, CostPair acc) {
    if (cur == dest_) {
      // Equal values replace only the seed; among search-found paths the
      // lexicographic exploration order makes the first hit the smallest.
      if (acc.lex_less(best_) || (best_from_seed_ && acc == best_)) {
        best_ = acc;
        best_nodes_ = path_;
        best_from_seed_ = false;
      }
      return;
    }
    const auto& arcs = g_.arcs(cur);
    for (int k = 0; k < static_cast<int>(arcs.size()); ++k) {
      const int y = arcs[static_cast<std::size_t>(k)].to;
      if (on_path_[static_cast<std::size_t>(y)]) continue;
      const CostPair& t = togo_[static_cast<std::size_t>(ss_.state(y, arc_pos_of(g_, y, cur)))];
      if (t.cost == std::numeric_limits<double>::infinity()) continue;
      const double len = g_.edge(arcs[static_cast<std::size_t>(k)].edge).length;
      const CostPair next{acc.cost + eval_.step_cost(prev, cur, k),
                          acc.metric + len};
      const CostPair bound{next.cost + t.cost, next.metric + t.metric};
      if (best_.lex_less(bound)) continue;
      on_path_[static_cast<std::size_t>(y)] = 1;
      path_.push_back(y);
      dfs(y, cur, next);
      path_.pop_back();
      on_path_[static_cast<std::size_t>(y)] = 0;
    }
  }

  const IndoorGraph& g_;
  StepCostEvaluator& eval_;
  const StateSpace& ss_;
  const std::vector<CostPair>& togo_;
  int dest_;
  std::vector<char> on_path_;
  std::vector<int> path_;
  std::vector<int> best_nodes_;
  CostPair best_;
  bool best_from_seed_ = false;
};

// Cost-to-go per node; valid only for predecessor-independent models,
// where the step cost is a function of the arc alone.
inline std::vector<CostPair> node_togo(const IndoorGraph& g,
                                       StepCostEvaluator& eval, int dest) {
  const int n = static_cast<int>(g.node_count());
  std::vector<CostPair> togo(static_cast<std::size_t>(n));
  std::vector<char> done(static_cast<std::size_t>(n), 0);
  MinQueue pq;
  togo[static_cast<std::size_t>(dest)] = {0.0, 0.0};
  pq.emplace(0.0, 0.0, dest);
  while (!pq.empty()) {
    const auto [cost, metric, u] = pq.top();
    pq.pop();
    if (done[static_cast<std::size_t>(u)]) continue;
    done[static_cast<std::size_t>(u)] = 1;
    for (const auto& arc : g.arcs(u)) {
      const int v = arc.to;
      if (done[static_cast<std::size_t>(v)]) continue;
      const int pos_uv = arc_pos_of(g, v, u);
      const double len = g.edge(arc.edge).length;
      const CostPair cand{cost + eval.step_cost(-1, v, pos_uv), metric + len};
      if (cand.lex_less(togo[static_cast<std::size_t>(v)])) {
        togo[static_cast<std::size_t>(v)] = cand;
        pq.emplace(cand.cost, cand.metric, v);
      }
    }
  }
  return togo;
}

inline std::vector<int> extract_node_path(const IndoorGraph& g,
                                          StepCostEvaluator& eval,
                                          const std::vector<CostPair>& togo,
                                          int start, int dest) {
  std::vector<int> path{start};
  int cur = start;
  CostPair rem = togo[static_cast<std::size_t>(start)];
  while (cur != dest) {
    const auto& arcs = g.arcs(cur);
    int chosen = -1;
    CostPair chosen_togo;
    for (int k = 0; k < static_cast<int>(arcs.size()); ++k) {
      const int y = arcs[static_cast<std::size_t>(k)].to;
      const CostPair& t = togo[static_cast<std::size_t>(y)];
      if (t.cost == std::numeric_limits<double>::infinity()) continue;
      const double len = g.edge(arcs[static_cast<std::size_t>(k)].edge).length;
      const CostPair cand{t.cost + eval.step_cost(-1, cur, k), t.metric + len};
      if (cand == rem) {
        chosen = k;
        chosen_togo = t;
        break;
      }
    }
    if (chosen < 0) {
      throw std::logic_error("internal: path extraction lost the optimum");
    }
    cur = arcs[static_cast<std::size_t>(chosen)].to;
    path.push_back(cur);
    rem = chosen_togo;
  }
  return path;
}

}  // namespace detail

// Recomputes a route's metric length and weighted cost by walking the node
// sequence front to back. Validates that the sequence is a simple path of
// the graph. This is the single source of truth for reported route costs.
inline Route evaluate_route(const IndoorGraph& g, const CostModel& model,
                            const std::vector<NodeId>& nodes) {
  if (nodes.empty()) throw ValidationError("route: empty node sequence");
  model.validate();
  std::vector<int> idx;
  idx.reserve(nodes.size());
  for (const NodeId& id : nodes) idx.push_back(g.node_index(id));
  std::vector<char> seen(g.node_count(), 0);
  for (int v : idx) {
    if (seen[static_cast<std::size_t>(v)]) {
      throw ValidationError("route: node '" + g.node(v).id + "' repeats");
    }
    seen[static_cast<std::size_t>(v)] = 1;
  }
  Route r;
  r.nodes = nodes;
  if (idx.size() == 1) return r;
  StepCostEvaluator eval(g, model, idx.back());
  int prev = -1;
  for (std::size_t i = 0; i + 1 < idx.size(); ++i) {
    const int x = idx[i];
    const int y = idx[i + 1];
    const auto e = g.edge_between(x, y);
    if (!e) {
      throw ValidationError("route: no edge between '" + g.node(x).id +
                            "' and '" + g.node(y).id + "'");
    }
    r.metric_length += g.edge(*e).length;
    r.weighted_cost += eval.step_cost(prev, x, detail::arc_pos_of(g, x, y));
    prev = x;
  }
  return r;
}

// Aggregated per-criterion penalty totals for a route; sums to
// weighted_cost - metric_length.
inline StepPenalties route_penalties(const IndoorGraph& g,
                                     const CostModel& model,
                                     const std::vector<NodeId>& nodes) {
  if (nodes.empty()) throw ValidationError("route: empty node sequence");
  model.validate();
  StepPenalties total;
  if (nodes.size() == 1) return total;
  std::vector<int> idx;
  idx.reserve(nodes.size());
  for (const NodeId& id : nodes) idx.push_back(g.node_index(id));
  StepCostEvaluator eval(g, model, idx.back());
  int prev = -1;
  for (std::size_t i = 0; i + 1 < idx.size(); ++i) {
    const StepPenalties p =
        eval.step_penalties(prev, idx[i], detail::arc_pos_of(g, idx[i], idx[i + 1]));
    for (CriterionKind k : kAllCriteria) total[k] += p[k];
    prev = idx[i];
  }
  return total;
}

// Minimum-weighted-cost simple path from start to dest, or nothing when
// dest is unreachable. Ties resolve to the smaller metric length, then to
// the lexicographically smallest node-id sequence.
inline std::optional<Route> plan_route(const IndoorGraph& g,
                                       const NodeId& start, const NodeId& dest,
                                       const CostModel& model,
                                       const PlanOptions& options = {}) {
  model.validate();
  const int s = g.node_index(start);
  const int d = g.node_index(dest);
  if (s == d) {
    Route r;
    r.nodes = {g.node(s).id};
    return r;
  }
  StepCostEvaluator eval(g, model, d);
  std::vector<int> idx_path;

  if (options.mode == PlanMode::kNodeLabel && model.predecessor_dependent()) {
    // Forward per-node labels; the turn at u is read from u's settled
    // predecessor, mirroring the classic algorithm. May be suboptimal.
    const int n = static_cast<int>(g.node_count());
    std::vector<detail::CostPair> dist(static_cast<std::size_t>(n));
    std::vector<int> parent(static_cast<std::size_t>(n), -1);
    std::vector<char> done(static_cast<std::size_t>(n), 0);
    detail::MinQueue pq;
    dist[static_cast<std::size_t>(s)] = {0.0, 0.0};
    pq.emplace(0.0, 0.0, s);
    while (!pq.empty()) {
      const auto [cost, metric, u] = pq.top();
      pq.pop();
      if (done[static_cast<std::size_t>(u)]) continue;
      done[static_cast<std::size_t>(u)] = 1;
      if (u == d) break;
      const int prev = parent[static_cast<std::size_t>(u)];
      const auto& arcs = g.arcs(u);
      for (int k = 0; k < static_cast<int>(arcs.size()); ++k) {
        const int y = arcs[static_cast<std::size_t>(k)].to;
        if (done[static_cast<std::size_t>(y)]) continue;
        const double len = g.edge(arcs[static_cast<std::size_t>(k)].edge).length;
        const detail::CostPair cand{cost + eval.step_cost(prev, u, k), metric + len};
        if (cand.lex_less(dist[static_cast<std::size_t>(y)])) {
          dist[static_cast<std::size_t>(y)] = cand;
          parent[static_cast<std::size_t>(y)] = u;
          pq.emplace(cand.cost, cand.metric, y);
        }
      }
    }
    if (!done[static_cast<std::size_t>(d)]) return std::nullopt;
    for (int v = d; v >= 0; v = parent[static_cast<std::size_t>(v)]) {
      idx_path.push_back(v);
    }
    std::reverse(idx_path.begin(), idx_path.end());
  } else if (!model.predecessor_dependent()) {
    const auto togo = detail::node_togo(g, eval, d);
    if (togo[static_cast<std::size_t>(s)].cost ==
        std::numeric_limits<double>::infinity()) {
      return std::nullopt;
    }
    idx_path = detail::extract_node_path(g, eval, togo, s, d);
  } else {
    const detail::StateSpace ss(g);
    const auto togo = detail::state_togo(g, eval, ss, s, d);
    if (togo[static_cast<std::size_t>(ss.none_state)].cost ==
        std::numeric_limits<double>::infinity()) {
      return std::nullopt;
    }
    const auto walk = detail::extract_walk(g, eval, ss, togo, s, d);
    std::vector<char> seen(g.node_count(), 0);
    bool simple = true;
    for (int v : walk) {
      if (seen[static_cast<std::size_t>(v)]) {
        simple = false;
        break;
      }
      seen[static_cast<std::size_t>(v)] = 1;
    }
    if (simple) {
      idx_path = walk;
    } else {
      // The optimal walk revisits a node (e.g. a loop that re-aligns the
      // arrival direction more cheaply than a turn penalty); fall back to
      // an exact search over simple paths seeded with the walk's
      // cycle-free splice.
      const auto seed_nodes = detail::splice_simple(walk, g.node_count());
      detail::CostPair seed_val{0.0, 0.0};
      {
        int prev = -1;
        for (std::size_t i = 0; i + 1 < seed_nodes.size(); ++i) {
          const int x = seed_nodes[i];
          const int y = seed_nodes[i + 1];
          const int pos = detail::arc_pos_of(g, x, y);
          seed_val.cost += eval.step_cost(prev, x, pos);
          seed_val.metric +=
              g.edge(g.arcs(x)[static_cast<std::size_t>(pos)].edge).length;
          prev = x;
        }
      }
      detail::SimplePathSearch search(g, eval, ss, togo, d);
      search.seed(seed_nodes, seed_val);
      idx_path = search.run(s);
    }
  }

  std::vector<NodeId> ids;
  ids.reserve(idx_path.size());
  for (int v : idx_path) ids.push_back(g.node(v).id);
  return evaluate_route(g, model, ids);
}

// Enumerates every simple path start -> dest in lexicographic order and
// returns the minimum under plan_route's tie-break. Verification oracle;
// refuses graphs larger than max_nodes.
inline std::optional<Route> brute_force_route(const IndoorGraph& g,
                                              const NodeId& start,
                                              const NodeId& dest,
                                              const CostModel& model,
                                              std::size_t max_nodes = 15) {
  model.validate();
  if (g.node_count() > max_nodes) {
    throw std::invalid_argument("brute_force_route: graph exceeds node guard");
  }
  const int s = g.node_index(start);
  const int d = g.node_index(dest);
  if (s == d) {
    Route r;
    r.nodes = {g.node(s).id};
    return r;
  }
  StepCostEvaluator eval(g, model, d);
  std::vector<int> path{s};
  std::vector<char> on_path(g.node_count(), 0);
  on_path[static_cast<std::size_t>(s)] = 1;
  std::vector<int> best_nodes;
  detail::CostPair best;

  // Accumulated (cost, metric) never lexicographically decreases along an
  // extension, so any prefix already above the best cannot recover.
  auto dfs = [&](auto&& self, int cur, int prev, detail::CostPair acc) -> void {
    if (cur == d) {
      if (acc.lex_less(best)) {
        best = acc;
        best_nodes = path;
      }
      return;
    }
    const auto& arcs = g.arcs(cur);
    for (int k = 0; k < static_cast<int>(arcs.size()); ++k) {
      const int y = arcs[static_cast<std::size_t>(k)].to;
      if (on_path[static_cast<std::size_t>(y)]) continue;
      const double len = g.edge(arcs[static_cast<std::size_t>(k)].edge).length;
      const detail::CostPair next{acc.cost + eval.step_cost(prev, cur, k),
                                  acc.metric + len};
      if (best.lex_less(next)) continue;
      on_path[static_cast<std::size_t>(y)] = 1;
      path.push_back(y);
      self(self, y, cur, next);
      path.pop_back();
      on_path[static_cast<std::size_t>(y)] = 0;
    }
  };
  dfs(dfs, s, -1, detail::CostPair{0.0, 0.0});
  if (best_nodes.empty()) return std::nullopt;
  std::vector<NodeId> ids;
  ids.reserve(best_nodes.size());
  for (int v : best_nodes) ids.push_back(g.node(v).id);
  return evaluate_route(g, model, ids);
}

}  // namespace routefit

// Route similarity (shared-edge length over the shorter route's length)
// and corpus-level aggregates: mean similarity and the fraction of records
// whose route changes relative to the unweighted shortest path.
#pragma once

#include <algorithm>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_set>
#include <vector>

#include "routefit/router.hpp"

namespace routefit {

struct CorpusRecord {
  NodeId start;
  NodeId dest;
  Route preferred;  // lengths recomputed against the graph at load time

  friend bool operator==(const CorpusRecord&, const CorpusRecord&) = default;
};

struct RouteCorpus {
  std::vector<CorpusRecord> records;

  static RouteCorpus from_json(const nlohmann::json& j, const IndoorGraph& g);
  static RouteCorpus load(std::istream& in, const IndoorGraph& g);
  nlohmann::json to_json() const;
  void save(std::ostream& out) const;

  friend bool operator==(const RouteCorpus&, const RouteCorpus&) = default;
};

// Fraction of shared length: sum of lengths of edges (unordered node
// pairs) present in both routes, divided by the shorter route's length.
// A single-node route shares no edges and scores 0 against any route of
// positive length; two identical single-node routes score 1.
inline double similarity(const IndoorGraph& g, const Route& r1,
                         const Route& r2) {
  const bool d1 = r1.nodes.size() < 2;
  const bool d2 = r2.nodes.size() < 2;
  if (r1.nodes.empty() || r2.nodes.empty()) {
    throw ValidationError("similarity: empty route");
  }
  if (d1 && d2) {
    if (r1.nodes == r2.nodes) return 1.0;
    throw ValidationError("similarity: both routes are degenerate");
  }
  if (d1 || d2) return 0.0;

  std::unordered_set<std::uint64_t> edges1;
  edges1.reserve(r1.nodes.size());
  int prev = g.node_index(r1.nodes.front());
  for (std::size_t i = 1; i < r1.nodes.size(); ++i) {
    const int cur = g.node_index(r1.nodes[i]);
    const auto e = g.edge_between(prev, cur);
    if (!e) throw ValidationError("similarity: route is not a path of the graph");
    edges1.insert(static_cast<std::uint64_t>(std::min(prev, cur)) << 32 |
                  static_cast<std::uint32_t>(std::max(prev, cur)));
    prev = cur;
  }

  double shared = 0.0;
  prev = g.node_index(r2.nodes.front());
  for (std::size_t i = 1; i < r2.nodes.size(); ++i) {
    const int cur = g.node_index(r2.nodes[i]);
    const auto e = g.edge_between(prev, cur);
    if (!e) throw ValidationError("similarity: route is not a path of the graph");
    const std::uint64_t key =
        static_cast<std::uint64_t>(std::min(prev, cur)) << 32 |
        static_cast<std::uint32_t>(std::max(prev, cur));
    if (edges1.count(key)) shared += g.edge(*e).length;
    prev = cur;
  }
  return shared / std::min(r1.metric_length, r2.metric_length);
}

// Per-record planning results for one model over a whole corpus.
struct CorpusEval {
  std::vector<std::optional<Route>> routes;  // per record, corpus order
  std::vector<double> sims;                  // per record similarity
  double mean_sim = 0.0;
  int unreachable = 0;
};

// Plans every record under the model and scores it against the preferred
// route. Unreachable records score 0 and are counted, not fatal, so a
// calibration sweep stays total. Summation runs in corpus order.
inline CorpusEval evaluate_corpus(const IndoorGraph& g,
                                  const RouteCorpus& corpus,
                                  const CostModel& model,
                                  const PlanOptions& options = {}) {
  if (corpus.records.empty()) throw ValidationError("corpus: no records");
  CorpusEval out;
  out.routes.reserve(corpus.records.size());
  out.sims.reserve(corpus.records.size());
  double sum = 0.0;
  for (const CorpusRecord& rec : corpus.records) {
    auto planned = plan_route(g, rec.start, rec.dest, model, options);
    double s = 0.0;
    if (planned) {
      s = similarity(g, *planned, rec.preferred);
    } else {
      ++out.unreachable;
    }
    sum += s;
    out.sims.push_back(s);
    out.routes.push_back(std::move(planned));
  }
  out.mean_sim = sum / static_cast<double>(corpus.records.size());
  return out;
}

inline double mean_similarity(const IndoorGraph& g, const RouteCorpus& corpus,
                              const CostModel& model) {
  return evaluate_corpus(g, corpus, model).mean_sim;
}

// Fraction of records whose planned node sequence differs between two
// evaluations of the same corpus (typically a model vs the all-zero one).
inline double impacted_against(const CorpusEval& eval,
                               const CorpusEval& baseline) {
  if (eval.routes.size() != baseline.routes.size() || eval.routes.empty()) {
    throw ValidationError("impacted: evaluations cover different corpora");
  }
  int changed = 0;
  for (std::size_t i = 0; i < eval.routes.size(); ++i) {
    const bool same =
        (!eval.routes[i] && !baseline.routes[i]) ||
        (eval.routes[i] && baseline.routes[i] &&
         eval.routes[i]->nodes == baseline.routes[i]->nodes);
    if (!same) ++changed;
  }
  return static_cast<double>(changed) / static_cast<double>(eval.routes.size());
}

inline double impacted_fraction(const IndoorGraph& g, const RouteCorpus& corpus,
                                const CostModel& model) {
  const CorpusEval eval = evaluate_corpus(g, corpus, model);
  const CorpusEval baseline = evaluate_corpus(g, corpus, CostModel{});
  return impacted_against(eval, baseline);
}

inline RouteCorpus RouteCorpus::from_json(const nlohmann::json& j,
                                          const IndoorGraph& g) {
  if (!j.is_object() || !j.contains("routes") || !j.at("routes").is_array()) {
    throw ParseError("corpus: missing \"routes\" array");
  }
  RouteCorpus c;
  c.records.reserve(j.at("routes").size());
  for (const auto& rj : j.at("routes")) {
    if (!rj.is_object() || !rj.contains("start") || !rj.contains("dest") ||
        !rj.contains("nodes") || !rj.at("nodes").is_array()) {
      throw ParseError("corpus: route entries need start, dest and nodes");
    }
    CorpusRecord rec;
    rec.start = detail::id_from_json(rj.at("start"), "corpus start");
    rec.dest = detail::id_from_json(rj.at("dest"), "corpus dest");
    std::vector<NodeId> nodes;
    nodes.reserve(rj.at("nodes").size());
    for (const auto& nj : rj.at("nodes")) {
      nodes.push_back(detail::id_from_json(nj, "corpus node"));
    }
    if (nodes.empty()) throw ValidationError("corpus: empty preferred route");
    if (nodes.front() != rec.start || nodes.back() != rec.dest) {
      throw ValidationError("corpus: preferred route endpoints do not match "
                            "start '" + rec.start + "' and dest '" + rec.dest + "'");
    }
    // Validates node existence, adjacency and simplicity; lengths come
    // from the graph, never from the file.
    rec.preferred = evaluate_route(g, CostModel{}, nodes);
    c.records.push_back(std::move(rec));
  }
  return c;
}

inline RouteCorpus RouteCorpus::load(std::istream& in, const IndoorGraph& g) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("corpus: invalid JSON: ") + e.what());
  }
  return from_json(j, g);
}

inline nlohmann::json RouteCorpus::to_json() const {
  nlohmann::json j;
  j["routes"] = nlohmann::json::array();
  for (const CorpusRecord& rec : records) {
    nlohmann::json rj;
    rj["start"] = rec.start;
    rj["dest"] = rec.dest;
    rj["nodes"] = rec.preferred.nodes;
    j["routes"].push_back(std::move(rj));
  }
  return j;
}

inline void RouteCorpus::save(std::ostream& out) const {
  out << to_json().dump(2) << "\n";
}

}  // namespace routefit

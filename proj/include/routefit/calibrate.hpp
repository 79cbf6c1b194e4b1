// Per-criterion weight calibration: exhaustive grid search over a fine +
// coarse weight schedule with local refinement and boundary extension,
// combination of improving criteria, and the comparison report.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "routefit/similarity.hpp"

namespace routefit {

struct WeightSchedule {
  double fine_max = 25.0;
  double fine_step = 1.0;
  double coarse_max = 100.0;
  double coarse_step = 10.0;
  double extension_cap = 1000.0;

  void validate() const {
    if (!(fine_step > 0.0) || !(fine_step <= fine_max) ||
        !(fine_max < coarse_max) || !(coarse_max <= extension_cap) ||
        !(coarse_step > 0.0)) {
      throw ValidationError(
          "schedule: need 0 < fine_step <= fine_max < coarse_max <= "
          "extension_cap and coarse_step > 0");
    }
  }

  // w = 0, fine_step, ... up to fine_max, then the multiples of
  // coarse_step strictly above fine_max up to coarse_max (coarse_max
  // itself is always a point).
  std::vector<double> initial_points() const {
    validate();
    std::vector<double> pts;
    const double tiny = fine_step * 1e-9;
    for (long long i = 0;; ++i) {
      const double w = static_cast<double>(i) * fine_step;
      if (w > fine_max + tiny) break;
      pts.push_back(w);
    }
    if (pts.back() < fine_max) pts.push_back(fine_max);
    for (long long k = static_cast<long long>(std::floor(fine_max / coarse_step)) + 1;;
         ++k) {
      const double w = static_cast<double>(k) * coarse_step;
      if (w > coarse_max + tiny) break;
      if (w > fine_max + tiny) pts.push_back(w);
    }
    if (pts.back() < coarse_max) pts.push_back(coarse_max);
    return pts;
  }
};

struct CurvePoint {
  double w = 0.0;
  double mean_sim = 0.0;
  double impacted = 0.0;

  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

struct SearchResult {
  CriterionKind kind = CriterionKind::kTurns;
  std::vector<CurvePoint> curve;  // ascending by w, always contains w = 0
  double best_w = 0.0;            // smallest w attaining best_sim
  double best_sim = 0.0;
  double baseline_sim = 0.0;      // mean similarity at w = 0
  bool improved = false;          // best_sim > baseline_sim
  bool unbounded = false;         // best sat at the boundary after the
                                  // extension reached its cap

  double impacted_at_best() const {
    for (const CurvePoint& p : curve) {
      if (p.w == best_w) return p.impacted;
    }
    return 0.0;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["kind"] = to_string(kind);
    j["curve"] = nlohmann::json::array();
    for (const CurvePoint& p : curve) {
      j["curve"].push_back({p.w, p.mean_sim, p.impacted});
    }
    j["best_w"] = best_w;
    j["best_sim"] = best_sim;
    j["baseline_sim"] = baseline_sim;
    j["improved"] = improved;
    j["unbounded"] = unbounded;
    return j;
  }

  static SearchResult from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("result: top-level value must be an object");
    SearchResult r;
    if (!j.contains("kind") || !j.at("kind").is_string()) {
      throw ParseError("result: missing \"kind\"");
    }
    const std::string name = j.at("kind").get<std::string>();
    auto kind = criterion_from_string(name);
    if (!kind) throw ValidationError("result: unknown criterion kind '" + name + "'");
    r.kind = *kind;
    if (!j.contains("curve") || !j.at("curve").is_array() || j.at("curve").empty()) {
      throw ParseError("result: missing \"curve\"");
    }
    for (const auto& pj : j.at("curve")) {
      if (!pj.is_array() || pj.size() != 3 || !pj.at(0).is_number() ||
          !pj.at(1).is_number() || !pj.at(2).is_number()) {
        throw ParseError("result: curve points must be [w, mean_sim, impacted]");
      }
      r.curve.push_back({pj.at(0).get<double>(), pj.at(1).get<double>(),
                         pj.at(2).get<double>()});
    }
    for (const char* f : {"best_w", "best_sim", "baseline_sim"}) {
      if (!j.contains(f) || !j.at(f).is_number()) {
        throw ParseError(std::string("result: missing \"") + f + "\"");
      }
    }
    for (const char* f : {"improved", "unbounded"}) {
      if (!j.contains(f) || !j.at(f).is_boolean()) {
        throw ParseError(std::string("result: missing \"") + f + "\"");
      }
    }
    r.best_w = j.at("best_w").get<double>();
    r.best_sim = j.at("best_sim").get<double>();
    r.baseline_sim = j.at("baseline_sim").get<double>();
    r.improved = j.at("improved").get<bool>();
    r.unbounded = j.at("unbounded").get<bool>();
    return r;
  }

  // One row per curve point, full precision, for plotting.
  std::string to_csv() const {
    std::string out = "w,mean_sim,impacted\n";
    char buf[128];
    for (const CurvePoint& p : curve) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", p.w, p.mean_sim,
                    p.impacted);
      out += buf;
    }
    return out;
  }
};

namespace detail {

inline CurvePoint evaluate_weight(const IndoorGraph& g,
                                  const RouteCorpus& corpus, CriterionKind kind,
                                  double w, const CorpusEval& baseline) {
  const CorpusEval eval =
      evaluate_corpus(g, corpus, CostModel::single(kind, w));
  return {w, eval.mean_sim, impacted_against(eval, baseline)};
}

}  // namespace detail

// Exhaustive one-dimensional search for the weight maximizing mean
// similarity. After the initial grid, the region around a coarse optimum
// is refined at fine_step, and while the optimum sits at the top of the
// range the coarse grid is doubled up to extension_cap.
inline SearchResult grid_search(const IndoorGraph& g, const RouteCorpus& corpus,
                                CriterionKind kind,
                                const WeightSchedule& schedule = {}) {
  schedule.validate();
  if (corpus.records.empty()) throw ValidationError("corpus: no records");

  const CorpusEval baseline = evaluate_corpus(g, corpus, CostModel{});
  std::map<double, CurvePoint> evaluated;
  evaluated.emplace(
      0.0, CurvePoint{0.0, baseline.mean_sim,
                      impacted_against(baseline, baseline)});
  for (double w : schedule.initial_points()) {
    if (evaluated.count(w)) continue;
    evaluated.emplace(w, detail::evaluate_weight(g, corpus, kind, w, baseline));
  }

  const double tiny = schedule.fine_step * 1e-9;
  double top = schedule.coarse_max;
  auto current_best = [&evaluated]() {
    const CurvePoint* best = nullptr;
    for (const auto& [w, p] : evaluated) {
      if (!best || p.mean_sim > best->mean_sim) best = &p;
    }
    return *best;
  };

  for (;;) {
    const CurvePoint best = current_best();
    if (best.w == top && top < schedule.extension_cap) {
      const double new_top = std::min(top * 2.0, schedule.extension_cap);
      for (long long k =
               static_cast<long long>(std::floor(top / schedule.coarse_step)) + 1;;
           ++k) {
        const double w = static_cast<double>(k) * schedule.coarse_step;
        if (w > new_top + tiny) break;
        if (w > top + tiny && !evaluated.count(w)) {
          evaluated.emplace(w,
                            detail::evaluate_weight(g, corpus, kind, w, baseline));
        }
      }
      if (!evaluated.count(new_top)) {
        evaluated.emplace(
            new_top, detail::evaluate_weight(g, corpus, kind, new_top, baseline));
      }
      top = new_top;
      continue;
    }
    if (best.w > schedule.fine_max) {
      // Sample fine_step neighbors in a +-coarse_step window around the
      // coarse optimum; repeat until the window around the (possibly
      // moved) optimum is fully covered.
      std::vector<double> cands;
      const double lo = best.w - schedule.coarse_step;
      const double hi = std::min(best.w + schedule.coarse_step, top);
      for (long long i = std::max<long long>(
               0, static_cast<long long>(std::floor(lo / schedule.fine_step)));;
           ++i) {
        const double w = static_cast<double>(i) * schedule.fine_step;
        if (w > hi + tiny) break;
        if (w >= lo - tiny && !evaluated.count(w)) cands.push_back(w);
      }
      if (!cands.empty()) {
        for (double w : cands) {
          evaluated.emplace(w,
                            detail::evaluate_weight(g, corpus, kind, w, baseline));
        }
        continue;
      }
    }
    break;
  }

  SearchResult r;
  r.kind = kind;
  for (const auto& [w, p] : evaluated) r.curve.push_back(p);
  const CurvePoint best = current_best();
  r.best_w = best.w;
  r.best_sim = best.mean_sim;
  r.baseline_sim = evaluated.at(0.0).mean_sim;
  r.improved = r.best_sim > r.baseline_sim;
  r.unbounded = r.best_w == top && top >= schedule.extension_cap;
  return r;
}

struct CombinationResult {
  CostModel model;  // improving criteria at their best weights
  double mean_sim = 0.0;
  double impacted = 0.0;
  std::vector<std::pair<CriterionKind, std::string>> excluded;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["model"] = model.to_json();
    j["mean_sim"] = mean_sim;
    j["impacted"] = impacted;
    j["excluded"] = nlohmann::json::array();
    for (const auto& [kind, reason] : excluded) {
      j["excluded"].push_back({{"kind", to_string(kind)}, {"reason", reason}});
    }
    return j;
  }

  static CombinationResult from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("model") || !j.contains("mean_sim") ||
        !j.contains("impacted") || !j.contains("excluded") ||
        !j.at("excluded").is_array()) {
      throw ParseError("combination: missing fields");
    }
    CombinationResult c;
    c.model = CostModel::from_json(j.at("model"));
    if (!j.at("mean_sim").is_number() || !j.at("impacted").is_number()) {
      throw ParseError("combination: mean_sim and impacted must be numbers");
    }
    c.mean_sim = j.at("mean_sim").get<double>();
    c.impacted = j.at("impacted").get<double>();
    for (const auto& ej : j.at("excluded")) {
      if (!ej.is_object() || !ej.contains("kind") || !ej.contains("reason") ||
          !ej.at("kind").is_string() || !ej.at("reason").is_string()) {
        throw ParseError("combination: excluded entries need kind and reason");
      }
      auto kind = criterion_from_string(ej.at("kind").get<std::string>());
      if (!kind) {
        throw ValidationError("combination: unknown criterion kind '" +
                              ej.at("kind").get<std::string>() + "'");
      }
      c.excluded.emplace_back(*kind, ej.at("reason").get<std::string>());
    }
    return c;
  }
};

// Combines every improving criterion at its best weight into one additive
// model. Turns and streets overlap, so when both improve only the one
// with the higher best similarity survives (ties keep turns); no joint
// re-optimization is attempted.
inline CombinationResult combine(const IndoorGraph& g, const RouteCorpus& corpus,
                                 const std::vector<SearchResult>& results) {
  std::array<bool, kCriterionCount> seen{};
  for (const SearchResult& r : results) {
    if (seen[static_cast<std::size_t>(r.kind)]) {
      throw ValidationError(std::string("combine: duplicate results for '") +
                            to_string(r.kind) + "'");
    }
    seen[static_cast<std::size_t>(r.kind)] = true;
  }

  CombinationResult out;
  const SearchResult* turns = nullptr;
  const SearchResult* streets = nullptr;
  for (const SearchResult& r : results) {
    if (!r.improved) {
      out.excluded.emplace_back(r.kind, "no_improvement");
      continue;
    }
    if (r.kind == CriterionKind::kTurns) turns = &r;
    if (r.kind == CriterionKind::kStreets) streets = &r;
    out.model.set(r.kind, r.best_w);
  }
  if (turns && streets) {
    const SearchResult* loser =
        streets->best_sim > turns->best_sim ? turns : streets;
    out.model.unset(loser->kind);
    out.excluded.emplace_back(loser->kind, "overlap");
  }
  out.model.validate();

  const CorpusEval eval = evaluate_corpus(g, corpus, out.model);
  out.mean_sim = eval.mean_sim;
  out.impacted =
      impacted_against(eval, evaluate_corpus(g, corpus, CostModel{}));
  return out;
}

struct ReportRow {
  std::string factor;
  std::string weight_label;  // "1", "16+" when unbounded, "varied" for the
                             // combination row
  double similarity = 0.0;
  double difference = 0.0;  // similarity - baseline
  double impacted = 0.0;
  bool improved = false;

  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

struct ReportTable {
  std::vector<ReportRow> rows;  // improved section first, then the rest
  double baseline_sim = 0.0;

  std::string to_text() const;
  std::string to_csv() const;
};

namespace detail {

inline std::string format_weight(double w) {
  char buf[64];
  if (w == std::floor(w) && std::fabs(w) < 1e15) {
    std::snprintf(buf, sizeof(buf), "%.0f", w);
  } else {
    std::snprintf(buf, sizeof(buf), "%g", w);
  }
  return buf;
}

inline void sort_rows(std::vector<ReportRow>& rows) {
  std::sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.factor < b.factor;
  });
}

}  // namespace detail

// Figure-style comparison table: one row per improving factor plus the
// combination, sorted by similarity descending, then the factors that
// brought no improvement.
inline ReportTable make_report(const std::vector<SearchResult>& results,
                               const CombinationResult& combo) {
  ReportTable t;
  if (!results.empty()) {
    t.baseline_sim = results.front().baseline_sim;
    for (const SearchResult& r : results) {
      if (r.baseline_sim != t.baseline_sim) {
        throw ValidationError(
            "report: results disagree on the baseline similarity");
      }
    }
  }
  std::vector<ReportRow> improved;
  std::vector<ReportRow> rest;
  for (const SearchResult& r : results) {
    ReportRow row;
    row.factor = display_name(r.kind);
    row.weight_label = detail::format_weight(r.best_w);
    if (r.unbounded) row.weight_label += "+";
    row.similarity = r.best_sim;
    row.difference = r.best_sim - t.baseline_sim;
    row.impacted = r.impacted_at_best();
    row.improved = r.improved;
    (r.improved ? improved : rest).push_back(std::move(row));
  }
  if (!combo.model.criteria().empty()) {
    ReportRow row;
    row.factor = "Combination";
    row.weight_label = "varied";
    row.similarity = combo.mean_sim;
    row.difference = combo.mean_sim - t.baseline_sim;
    row.impacted = combo.impacted;
    row.improved = true;
    improved.push_back(std::move(row));
  }
  detail::sort_rows(improved);
  detail::sort_rows(rest);
  t.rows = std::move(improved);
  t.rows.insert(t.rows.end(), rest.begin(), rest.end());
  return t;
}

inline std::string ReportTable::to_text() const {
  auto pct = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f%%", v * 100.0);
    return std::string(buf);
  };
  auto pad = [](std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
  };
  const char* header[5] = {"Factor", "Weight", "Similarity Score",
                           "Difference to SP", "Impacted Paths"};
  const std::size_t w[5] = {20, 8, 17, 17, 14};
  std::string out;
  auto line = [&](const std::string& a, const std::string& b,
                  const std::string& c, const std::string& d,
                  const std::string& e) {
    out += pad(a, w[0]) + "| " + pad(b, w[1]) + "| " + pad(c, w[2]) + "| " +
           pad(d, w[3]) + "| " + pad(e, w[4]) + "\n";
  };
  line(header[0], header[1], header[2], header[3], header[4]);
  out += std::string(w[0], '-') + "+-" + std::string(w[1], '-') + "+-" +
         std::string(w[2], '-') + "+-" + std::string(w[3], '-') + "+-" +
         std::string(w[4], '-') + "\n";
  bool rest_started = false;
  for (const ReportRow& r : rows) {
    if (!r.improved && !rest_started) {
      out += "\nNo improvement:\n";
      rest_started = true;
    }
    line(r.factor, r.weight_label, pct(r.similarity), pct(r.difference),
         pct(r.impacted));
  }
  char base[64];
  std::snprintf(base, sizeof(base), "\nBaseline (shortest path): %.2f%%\n",
                baseline_sim * 100.0);
  out += base;
  return out;
}

inline std::string ReportTable::to_csv() const {
  std::string out = "factor,weight,similarity,difference_to_sp,impacted,improved\n";
  char buf[256];
  for (const ReportRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%.17g,%.17g,%.17g,%s\n",
                  r.factor.c_str(), r.weight_label.c_str(), r.similarity,
                  r.difference, r.impacted, r.improved ? "true" : "false");
    out += buf;
  }
  return out;
}

}  // namespace routefit

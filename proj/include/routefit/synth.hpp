// Synthetic multi-floor campus generator plus corpus construction from a
// planted cost model. Everything is deterministic for a given spec and
// seed: the generator draws from its own helpers (never from the
// standard distributions, whose outputs vary across library
// implementations), in a fixed documented order, and all lengths and
// coordinates are small dyadic rationals so that downstream cost sums
// are exact in double precision.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "routefit/router.hpp"
#include "routefit/similarity.hpp"

namespace routefit {

struct SyntheticSpec {
  int floors = 3;
  int rows = 14;
  int cols = 14;
  double spacing = 10.0;

  // Each twin shaft is a staircase column and an adjacent elevator
  // column connecting all floors.
  int twin_shafts = 2;
  double stair_edge_length = 4.0;
  double elevator_edge_length = 4.5;

  // Horizontal corridor segments draw once each and fall into exactly
  // one class: subdivided (a plain midpoint), door bypass (a shorter
  // detour through a doorway / entrance / revolving-door node next to a
  // kept plain corridor), or plain. The four densities must sum to <= 1.
  double subdivision_density = 0.15;
  double doorway_density = 0.05;
  double entrance_density = 0.05;
  double revolving_density = 0.05;

  double diagonal_density = 0.10;  // per cell
  double stub_density = 0.15;      // dead-end spur per grid node

  int corpus_size = 50;
  double flip_fraction = 0.3;  // share of records whose planted route
                               // differs from the shortest path
  double noise_p = 0.0;        // per-record chance of perturbed weights
  int min_floor_span = 0;      // minimum |floor(start) - floor(dest)|
  int max_pair_attempts = 4000;

  CostModel planted;

  void validate() const {
    if (floors < 1 || floors > 9) throw ValidationError("synth: floors must be in [1, 9]");
    if (rows < 2 || rows > 99 || cols < 2 || cols > 99) {
      throw ValidationError("synth: rows and cols must be in [2, 99]");
    }
    if (!(spacing > 0.0) || !std::isfinite(spacing)) {
      throw ValidationError("synth: spacing must be positive");
    }
    if (twin_shafts < 0) throw ValidationError("synth: twin_shafts must be >= 0");
    if (floors > 1 && twin_shafts < 1) {
      throw ValidationError("synth: multi-floor campuses need at least one shaft");
    }
    if (twin_shafts > 0 && shaft_col(twin_shafts - 1) + 1 >= cols) {
      throw ValidationError("synth: too many shafts for the column count");
    }
    if (!(stair_edge_length > 0.0) || !std::isfinite(stair_edge_length) ||
        !(elevator_edge_length > 0.0) || !std::isfinite(elevator_edge_length)) {
      throw ValidationError("synth: shaft edge lengths must be positive");
    }
    for (double d : {subdivision_density, doorway_density, entrance_density,
                     revolving_density, diagonal_density, stub_density,
                     flip_fraction, noise_p}) {
      if (!(d >= 0.0) || !(d <= 1.0)) {
        throw ValidationError("synth: densities and fractions must be in [0, 1]");
      }
    }
    if (subdivision_density + doorway_density + entrance_density +
            revolving_density >
        1.0) {
      throw ValidationError("synth: corridor class densities must sum to <= 1");
    }
    if (corpus_size < 1) throw ValidationError("synth: corpus_size must be >= 1");
    if (min_floor_span < 0 || min_floor_span > floors - 1) {
      throw ValidationError("synth: min_floor_span must be in [0, floors - 1]");
    }
    if (max_pair_attempts < corpus_size) {
      throw ValidationError("synth: max_pair_attempts must be >= corpus_size");
    }
    planted.validate();
  }

  // Stair column of shaft t; the elevator column is one to the right.
  int shaft_col(int t) const { return (t + 1) * cols / (twin_shafts + 1); }
  int shaft_row(int t) const { return (t % 2 == 0) ? rows / 3 : (2 * rows) / 3; }
};

struct SyntheticResult {
  IndoorGraph graph;
  RouteCorpus corpus;
  CostModel planted;
};

namespace detail {

// [0, 1) from the top 53 bits; bit-for-bit reproducible everywhere.
inline double draw_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::size_t draw_index(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

template <typename T>
void shuffle_vec(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[draw_index(rng, i)]);
  }
}

inline std::string cell_id(char prefix, int f, int r, int c) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%c%d_%02d_%02d", prefix, f, r, c);
  return buf;
}

}  // namespace detail

// Grid of plain corridor nodes per floor with optional corridor motifs:
// subdivisions, door bypass gadgets, diagonals, dead-end stubs, and the
// inter-floor twin shafts. Draw order is fixed: horizontal segment
// classes (floor, row, col), then diagonals per cell, then stubs per
// node; shafts are structural and draw nothing.
inline IndoorGraph generate_campus(const SyntheticSpec& spec,
                                   std::mt19937_64& rng) {
  spec.validate();
  using detail::cell_id;
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  const double sp = spec.spacing;

  for (int f = 0; f < spec.floors; ++f) {
    for (int r = 0; r < spec.rows; ++r) {
      for (int c = 0; c < spec.cols; ++c) {
        nodes.push_back({cell_id('n', f, r, c), c * sp, r * sp, f,
                         NodeKind::kPlain});
      }
    }
  }

  // Vertical corridors are always plain.
  for (int f = 0; f < spec.floors; ++f) {
    for (int r = 0; r + 1 < spec.rows; ++r) {
      for (int c = 0; c < spec.cols; ++c) {
        edges.push_back({cell_id('n', f, r, c), cell_id('n', f, r + 1, c), sp,
                         EdgeKind::kWalk});
      }
    }
  }

  const double door_hi =
      spec.subdivision_density + spec.doorway_density + spec.entrance_density +
      spec.revolving_density;
  for (int f = 0; f < spec.floors; ++f) {
    for (int r = 0; r < spec.rows; ++r) {
      for (int c = 0; c + 1 < spec.cols; ++c) {
        const std::string a = cell_id('n', f, r, c);
        const std::string b = cell_id('n', f, r, c + 1);
        const double u = detail::draw_unit(rng);
        if (u < spec.subdivision_density) {
          const std::string m = cell_id('m', f, r, c);
          nodes.push_back({m, c * sp + sp / 2, r * sp, f, NodeKind::kPlain});
          edges.push_back({a, m, sp / 2, EdgeKind::kWalk});
          edges.push_back({m, b, sp / 2, EdgeKind::kWalk});
        } else if (u < door_hi) {
          NodeKind kind = NodeKind::kDoorway;
          double lo = spec.subdivision_density + spec.doorway_density;
          if (u >= lo) kind = NodeKind::kEntrance;
          lo += spec.entrance_density;
          if (u >= lo) kind = NodeKind::kRevolvingDoor;
          const std::string d = cell_id('d', f, r, c);
          // The door detour undercuts the kept corridor by 0.5, so the
          // shortest path goes through the door and a per-arrival
          // penalty above 0.5 flips it back.
          nodes.push_back({d, c * sp + sp / 2, r * sp - sp / 4, f, kind});
          edges.push_back({a, b, sp, EdgeKind::kWalk});
          edges.push_back({a, d, 4.75, EdgeKind::kWalk});
          edges.push_back({d, b, 4.75, EdgeKind::kWalk});
        } else {
          edges.push_back({a, b, sp, EdgeKind::kWalk});
        }
      }
    }
  }

  // Diagonals undercut the two-leg corner (14.25 vs 20) without the
  // sharp 90-degree transition, one draw per cell covering both the
  // presence and the direction.
  for (int f = 0; f < spec.floors; ++f) {
    for (int r = 0; r + 1 < spec.rows; ++r) {
      for (int c = 0; c + 1 < spec.cols; ++c) {
        const double u = detail::draw_unit(rng);
        if (u >= spec.diagonal_density) continue;
        const bool down_right = u < spec.diagonal_density / 2;
        const std::string a =
            down_right ? cell_id('n', f, r, c) : cell_id('n', f, r, c + 1);
        const std::string b =
            down_right ? cell_id('n', f, r + 1, c + 1) : cell_id('n', f, r + 1, c);
        edges.push_back({a, b, 14.25, EdgeKind::kWalk});
      }
    }
  }

  // Dead-end stubs raise the anchor's degree, which flips ties between
  // otherwise equal corridors under the density criteria.
  for (int f = 0; f < spec.floors; ++f) {
    for (int r = 0; r < spec.rows; ++r) {
      for (int c = 0; c < spec.cols; ++c) {
        if (detail::draw_unit(rng) >= spec.stub_density) continue;
        const std::string t = cell_id('t', f, r, c);
        nodes.push_back({t, c * sp + sp / 4, r * sp + sp / 4, f,
                         NodeKind::kPlain});
        edges.push_back({cell_id('n', f, r, c), t, sp / 4, EdgeKind::kWalk});
      }
    }
  }

  for (int t = 0; t < spec.twin_shafts; ++t) {
    const int r = spec.shaft_row(t);
    const int cs = spec.shaft_col(t);
    for (int f = 0; f + 1 < spec.floors; ++f) {
      edges.push_back({cell_id('n', f, r, cs), cell_id('n', f + 1, r, cs),
                       spec.stair_edge_length, EdgeKind::kStaircase});
      edges.push_back({cell_id('n', f, r, cs + 1),
                       cell_id('n', f + 1, r, cs + 1),
                       spec.elevator_edge_length, EdgeKind::kElevator});
    }
  }

  return IndoorGraph(std::move(nodes), std::move(edges));
}

// Start/dest pairs are rejection-sampled over the grid nodes (gadget
// nodes are never endpoints) until the requested share of "flips",
// records whose planted route differs from the shortest path, is
// reached and the rest are non-flips. Draw order: two index draws per
// attempt, then one shuffle, then in final order the optional noise
// draws (one acceptance draw per record; a perturbed record redraws one
// scale per planted criterion in declaration order).
inline RouteCorpus generate_corpus(const SyntheticSpec& spec,
                                   const IndoorGraph& g,
                                   std::mt19937_64& rng) {
  spec.validate();
  const std::size_t grid_count = static_cast<std::size_t>(spec.floors) *
                                 spec.rows * spec.cols;
  auto grid_node = [&](std::size_t i) {
    const int f = static_cast<int>(i / (spec.rows * spec.cols));
    const int rest = static_cast<int>(i % (spec.rows * spec.cols));
    return detail::cell_id('n', f, rest / spec.cols, rest % spec.cols);
  };

  const std::size_t want_flips = static_cast<std::size_t>(
      std::ceil(spec.flip_fraction * spec.corpus_size));
  const std::size_t want_total = static_cast<std::size_t>(spec.corpus_size);

  struct Picked {
    CorpusRecord record;
    Route planted;
  };
  std::vector<Picked> picked;
  std::set<std::pair<std::size_t, std::size_t>> used;
  std::size_t flips = 0, nonflips = 0;
  for (int attempt = 0;
       attempt < spec.max_pair_attempts && picked.size() < want_total;
       ++attempt) {
    const std::size_t si = detail::draw_index(rng, grid_count);
    const std::size_t di = detail::draw_index(rng, grid_count);
    if (si == di || used.count({si, di})) continue;
    const int floor_gap = std::abs(static_cast<int>(si / (spec.rows * spec.cols)) -
                                   static_cast<int>(di / (spec.rows * spec.cols)));
    if (floor_gap < spec.min_floor_span) continue;
    const std::string start = grid_node(si);
    const std::string dest = grid_node(di);
    const auto base = plan_route(g, start, dest, CostModel{});
    const auto planted = plan_route(g, start, dest, spec.planted);
    if (!base || !planted) continue;
    const bool flip = base->nodes != planted->nodes;
    if (flip && flips >= want_flips) continue;
    if (!flip && nonflips >= want_total - want_flips) continue;
    used.insert({si, di});
    (flip ? flips : nonflips) += 1;
    picked.push_back({{start, dest, {}}, *planted});
  }
  // When one class ran dry before the corpus filled, top up with any
  // valid pair so the record count is still met.
  for (int attempt = 0;
       attempt < spec.max_pair_attempts && picked.size() < want_total;
       ++attempt) {
    const std::size_t si = detail::draw_index(rng, grid_count);
    const std::size_t di = detail::draw_index(rng, grid_count);
    if (si == di || used.count({si, di})) continue;
    const int floor_gap = std::abs(static_cast<int>(si / (spec.rows * spec.cols)) -
                                   static_cast<int>(di / (spec.rows * spec.cols)));
    if (floor_gap < spec.min_floor_span) continue;
    const std::string start = grid_node(si);
    const std::string dest = grid_node(di);
    const auto planted = plan_route(g, start, dest, spec.planted);
    if (!planted) continue;
    used.insert({si, di});
    picked.push_back({{start, dest, {}}, *planted});
  }
  if (picked.empty()) {
    throw ValidationError("synth: no usable start/dest pairs found");
  }

  detail::shuffle_vec(picked, rng);

  RouteCorpus corpus;
  for (Picked& p : picked) {
    if (spec.noise_p > 0.0 && detail::draw_unit(rng) < spec.noise_p) {
      CostModel noisy;
      for (const WeightedCriterion& wc : spec.planted.criteria()) {
        noisy.set(wc.kind, wc.w * (0.5 + 1.5 * detail::draw_unit(rng)));
      }
      const auto r = plan_route(g, p.record.start, p.record.dest, noisy);
      if (r) p.planted = *r;
    }
    p.record.preferred = std::move(p.planted);
    corpus.records.push_back(std::move(p.record));
  }
  return corpus;
}

inline SyntheticResult generate(const SyntheticSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SyntheticResult out;
  out.graph = generate_campus(spec, rng);
  out.corpus = generate_corpus(spec, out.graph, rng);
  out.planted = spec.planted;
  return out;
}

}  // namespace routefit

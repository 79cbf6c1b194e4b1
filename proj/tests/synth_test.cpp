#include "routefit/synth.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "routefit/calibrate.hpp"

using namespace routefit;

namespace {

SyntheticSpec bare_spec() {
  SyntheticSpec s;
  s.floors = 2;
  s.rows = 5;
  s.cols = 5;
  s.twin_shafts = 1;
  s.subdivision_density = 0.0;
  s.doorway_density = 0.0;
  s.entrance_density = 0.0;
  s.revolving_density = 0.0;
  s.diagonal_density = 0.0;
  s.stub_density = 0.0;
  s.corpus_size = 8;
  s.flip_fraction = 0.0;
  return s;
}

TEST(SyntheticSpec, Validation) {
  EXPECT_NO_THROW(SyntheticSpec{}.validate());
  auto broken = [](auto mutate) {
    SyntheticSpec s;
    mutate(s);
    return s;
  };
  EXPECT_THROW(broken([](SyntheticSpec& s) { s.floors = 0; }).validate(),
               ValidationError);
  EXPECT_THROW(broken([](SyntheticSpec& s) { s.rows = 1; }).validate(),
               ValidationError);
  EXPECT_THROW(broken([](SyntheticSpec& s) { s.spacing = 0.0; }).validate(),
               ValidationError);
  EXPECT_THROW(broken([](SyntheticSpec& s) { s.twin_shafts = 0; }).validate(),
               ValidationError);  // multi-floor default needs a shaft
  EXPECT_THROW(broken([](SyntheticSpec& s) {
                 s.cols = 4;
                 s.twin_shafts = 3;
               }).validate(),
               ValidationError);  // shafts would spill past the last column
  EXPECT_THROW(broken([](SyntheticSpec& s) { s.stair_edge_length = -1.0; }).validate(),
               ValidationError);
  EXPECT_THROW(broken([](SyntheticSpec& s) { s.doorway_density = 1.5; }).validate(),
               ValidationError);
  EXPECT_THROW(broken([](SyntheticSpec& s) {
                 s.subdivision_density = 0.6;
                 s.doorway_density = 0.5;
               }).validate(),
               ValidationError);
  EXPECT_THROW(broken([](SyntheticSpec& s) { s.corpus_size = 0; }).validate(),
               ValidationError);
  EXPECT_THROW(broken([](SyntheticSpec& s) { s.min_floor_span = 3; }).validate(),
               ValidationError);
  EXPECT_THROW(broken([](SyntheticSpec& s) { s.max_pair_attempts = 10; }).validate(),
               ValidationError);
  EXPECT_THROW(broken([](SyntheticSpec& s) {
                 s.planted = CostModel::single(CriterionKind::kTurns, -2.0);
               }).validate(),
               ValidationError);
}

TEST(Generate, DeterministicForSeed) {
  SyntheticSpec spec;
  spec.floors = 2;
  spec.rows = 6;
  spec.cols = 6;
  spec.twin_shafts = 1;
  spec.corpus_size = 12;
  spec.planted = CostModel::single(CriterionKind::kDoorways, 2.0);
  const SyntheticResult a = generate(spec, 99);
  const SyntheticResult b = generate(spec, 99);
  EXPECT_EQ(a.graph, b.graph);
  EXPECT_EQ(a.corpus, b.corpus);
  EXPECT_EQ(a.planted, b.planted);

  std::stringstream sa, sb;
  a.graph.save(sa);
  b.graph.save(sb);
  EXPECT_EQ(sa.str(), sb.str());
  std::stringstream ca, cb;
  a.corpus.save(ca);
  b.corpus.save(cb);
  EXPECT_EQ(ca.str(), cb.str());
}

TEST(Generate, SeedsProduceDifferentWorlds) {
  SyntheticSpec spec;
  spec.floors = 1;
  spec.twin_shafts = 0;
  spec.rows = 8;
  spec.cols = 8;
  spec.corpus_size = 10;
  const SyntheticResult a = generate(spec, 1);
  const SyntheticResult b = generate(spec, 2);
  EXPECT_TRUE(!(a.graph == b.graph) || !(a.corpus == b.corpus));
}

TEST(Generate, BareGridStructuralCounts) {
  const SyntheticSpec spec = bare_spec();
  const SyntheticResult w = generate(spec, 5);
  const std::size_t grid = 2u * 5u * 5u;
  EXPECT_EQ(w.graph.node_count(), grid);
  const std::size_t vertical = 2u * 4u * 5u;
  const std::size_t horizontal = 2u * 5u * 4u;
  const std::size_t shafts = 2u * 1u;  // one stair + one elevator hop
  EXPECT_EQ(w.graph.edge_count(), vertical + horizontal + shafts);

  std::size_t stairs = 0, elevators = 0;
  for (std::size_t i = 0; i < w.graph.edge_count(); ++i) {
    const EdgeKind k = w.graph.edge(static_cast<int>(i)).kind;
    stairs += k == EdgeKind::kStaircase;
    elevators += k == EdgeKind::kElevator;
  }
  EXPECT_EQ(stairs, 1u);
  EXPECT_EQ(elevators, 1u);

  // stair and elevator land on adjacent columns of the same row
  const int t = 0;
  const int sc = spec.shaft_col(t);
  const int sr = spec.shaft_row(t);
  char stair_id[32], elev_id[32];
  std::snprintf(stair_id, sizeof(stair_id), "n0_%02d_%02d", sr, sc);
  std::snprintf(elev_id, sizeof(elev_id), "n1_%02d_%02d", sr, sc + 1);
  EXPECT_TRUE(w.graph.find_node(stair_id).has_value());
  EXPECT_TRUE(w.graph.find_node(elev_id).has_value());
}

TEST(Generate, DoorGadgetKeepsThePlainCorridor) {
  SyntheticSpec spec = bare_spec();
  spec.floors = 1;
  spec.twin_shafts = 0;
  spec.doorway_density = 1.0;  // every horizontal corridor gets a door
  const SyntheticResult w = generate(spec, 11);
  const int a = w.graph.node_index("n0_00_00");
  const int b = w.graph.node_index("n0_00_01");
  const int d = w.graph.node_index("d0_00_00");
  ASSERT_TRUE(w.graph.edge_between(a, b).has_value());
  ASSERT_TRUE(w.graph.edge_between(a, d).has_value());
  ASSERT_TRUE(w.graph.edge_between(d, b).has_value());
  EXPECT_DOUBLE_EQ(w.graph.edge(*w.graph.edge_between(a, b)).length, 10.0);
  EXPECT_DOUBLE_EQ(w.graph.edge(*w.graph.edge_between(a, d)).length, 4.75);
  EXPECT_EQ(w.graph.node(d).kind, NodeKind::kDoorway);
  // the door detour undercuts the corridor, so the baseline goes through
  const auto base = plan_route(w.graph, "n0_00_00", "n0_00_01", CostModel{});
  ASSERT_TRUE(base.has_value());
  EXPECT_EQ(base->nodes,
            (std::vector<NodeId>{"n0_00_00", "d0_00_00", "n0_00_01"}));

  std::size_t doors = 0;
  for (std::size_t i = 0; i < w.graph.node_count(); ++i) {
    doors += w.graph.node(static_cast<int>(i)).kind == NodeKind::kDoorway;
  }
  EXPECT_EQ(doors, 1u * 5u * 4u);
}

TEST(Generate, StubsRaiseAnchorDegree) {
  SyntheticSpec spec = bare_spec();
  spec.floors = 1;
  spec.twin_shafts = 0;
  spec.stub_density = 1.0;
  const SyntheticResult w = generate(spec, 13);
  EXPECT_EQ(w.graph.node_count(), 25u + 25u);
  const int corner = w.graph.node_index("n0_00_00");
  EXPECT_EQ(w.graph.degree(corner), 3);  // two corridors + stub
  const int stub = w.graph.node_index("t0_00_00");
  EXPECT_EQ(w.graph.degree(stub), 1);
}

TEST(Corpus, SizeEndpointsAndUniqueness) {
  SyntheticSpec spec = bare_spec();
  spec.corpus_size = 15;
  spec.flip_fraction = 0.0;
  const SyntheticResult w = generate(spec, 21);
  ASSERT_EQ(w.corpus.records.size(), 15u);
  std::set<std::pair<NodeId, NodeId>> pairs;
  for (const CorpusRecord& rec : w.corpus.records) {
    EXPECT_EQ(rec.start.front(), 'n');  // only grid nodes are endpoints
    EXPECT_EQ(rec.dest.front(), 'n');
    EXPECT_NE(rec.start, rec.dest);
    EXPECT_TRUE(pairs.insert({rec.start, rec.dest}).second);
    ASSERT_FALSE(rec.preferred.nodes.empty());
    EXPECT_EQ(rec.preferred.nodes.front(), rec.start);
    EXPECT_EQ(rec.preferred.nodes.back(), rec.dest);
    // the preferred route is a real path with recomputable cost
    const Route again = evaluate_route(w.graph, CostModel{}, rec.preferred.nodes);
    EXPECT_DOUBLE_EQ(again.metric_length, rec.preferred.metric_length);
  }
}

TEST(Corpus, ZeroPlantedModelPrefersShortestPaths) {
  SyntheticSpec spec = bare_spec();
  spec.diagonal_density = 0.2;
  spec.stub_density = 0.2;
  const SyntheticResult w = generate(spec, 31);
  for (const CorpusRecord& rec : w.corpus.records) {
    const auto base = plan_route(w.graph, rec.start, rec.dest, CostModel{});
    ASSERT_TRUE(base.has_value());
    EXPECT_EQ(base->nodes, rec.preferred.nodes);
  }
}

TEST(Corpus, MinFloorSpanHolds) {
  SyntheticSpec spec = bare_spec();
  spec.floors = 3;
  spec.min_floor_span = 2;
  spec.corpus_size = 10;
  const SyntheticResult w = generate(spec, 41);
  ASSERT_EQ(w.corpus.records.size(), 10u);
  for (const CorpusRecord& rec : w.corpus.records) {
    const int fs = w.graph.floor_of(w.graph.node_index(rec.start));
    const int fd = w.graph.floor_of(w.graph.node_index(rec.dest));
    EXPECT_GE(std::abs(fs - fd), 2);
  }
}

TEST(Corpus, FlipQuotaIsMet) {
  SyntheticSpec spec = bare_spec();
  spec.floors = 1;
  spec.twin_shafts = 0;
  spec.rows = 8;
  spec.cols = 8;
  spec.doorway_density = 0.4;
  spec.corpus_size = 20;
  spec.flip_fraction = 0.3;
  spec.planted = CostModel::single(CriterionKind::kDoorways, 2.0);
  const SyntheticResult w = generate(spec, 51);
  ASSERT_EQ(w.corpus.records.size(), 20u);
  int flips = 0;
  for (const CorpusRecord& rec : w.corpus.records) {
    const auto base = plan_route(w.graph, rec.start, rec.dest, CostModel{});
    ASSERT_TRUE(base.has_value());
    flips += base->nodes != rec.preferred.nodes;
  }
  EXPECT_GE(flips, static_cast<int>(std::ceil(0.3 * 20)));
}

TEST(Corpus, NoiseStaysDeterministicAndValid) {
  SyntheticSpec spec = bare_spec();
  spec.floors = 1;
  spec.twin_shafts = 0;
  spec.rows = 7;
  spec.cols = 7;
  spec.diagonal_density = 0.25;
  spec.noise_p = 1.0;
  spec.flip_fraction = 0.2;
  spec.corpus_size = 12;
  spec.planted = CostModel::single(CriterionKind::kTurns, 3.0);
  const SyntheticResult a = generate(spec, 61);
  const SyntheticResult b = generate(spec, 61);
  EXPECT_EQ(a.corpus, b.corpus);
  for (const CorpusRecord& rec : a.corpus.records) {
    EXPECT_NO_THROW(evaluate_route(a.graph, CostModel{}, rec.preferred.nodes));
  }
}

TEST(Corpus, PlantedTurnsWeightIsRecoverable) {
  SyntheticSpec spec = bare_spec();
  spec.floors = 1;
  spec.twin_shafts = 0;
  spec.rows = 7;
  spec.cols = 7;
  spec.diagonal_density = 0.2;
  spec.stub_density = 0.2;
  spec.corpus_size = 15;
  spec.flip_fraction = 0.3;
  spec.planted = CostModel::single(CriterionKind::kTurns, 3.0);
  const SyntheticResult w = generate(spec, 7);
  const SearchResult r = grid_search(w.graph, w.corpus, CriterionKind::kTurns);
  EXPECT_DOUBLE_EQ(r.best_sim, 1.0);
  EXPECT_TRUE(r.improved);
  EXPECT_LT(r.baseline_sim, 1.0);
}

}  // namespace

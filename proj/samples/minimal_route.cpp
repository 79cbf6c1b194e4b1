// Smallest end-to-end example: build a graph in code, plan the shortest
// route, then replan with a turn penalty and watch the route change.

#include <iostream>

#include "routefit/router.hpp"

int main() {
  using namespace routefit;

  // A square block with a diagonal-free inner corner: going A-B-C is a
  // sharp turn, going A-D-C is two gentle ones but slightly longer.
  IndoorGraph g(
      {
          {"a", 0.0, 0.0, 0, NodeKind::kPlain},
          {"b", 10.0, 0.0, 0, NodeKind::kPlain},
          {"c", 10.0, 10.0, 0, NodeKind::kPlain},
          {"d", 5.0, 7.5, 0, NodeKind::kPlain},
      },
      {
          {"a", "b", 10.0, EdgeKind::kWalk},
          {"b", "c", 10.0, EdgeKind::kWalk},
          {"a", "d", 12.0, EdgeKind::kWalk},
          {"d", "c", 10.5, EdgeKind::kWalk},
      });

  auto print = [](const char* label, const Route& r) {
    std::cout << label << ":";
    for (const auto& id : r.nodes) std::cout << " " << id;
    std::cout << "  (length " << r.metric_length << ", cost "
              << r.weighted_cost << ")\n";
  };

  const auto shortest = plan_route(g, "a", "c", CostModel{});
  print("shortest", *shortest);

  const auto turn_averse =
      plan_route(g, "a", "c", CostModel::single(CriterionKind::kTurns, 10.0));
  print("turn-averse", *turn_averse);
  return 0;
}

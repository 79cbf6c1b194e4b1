// Plant a turn penalty in a synthetic campus, recover it by grid search,
// and print the comparison report. Mirrors the full CLI pipeline in a
// few library calls.

#include <iostream>

#include "routefit/calibrate.hpp"
#include "routefit/synth.hpp"

int main() {
  using namespace routefit;

  SyntheticSpec spec;
  spec.floors = 1;
  spec.rows = 8;
  spec.cols = 8;
  spec.corpus_size = 12;
  spec.diagonal_density = 0.2;
  spec.stub_density = 0.2;
  spec.planted = CostModel::single(CriterionKind::kTurns, 5.0);

  const SyntheticResult data = generate(spec, 7);
  std::cout << "campus: " << data.graph.node_count() << " nodes, "
            << data.graph.edge_count() << " edges, "
            << data.corpus.records.size() << " preferred routes\n";

  std::vector<SearchResult> results;
  for (CriterionKind kind :
       {CriterionKind::kTurns, CriterionKind::kElevators}) {
    results.push_back(grid_search(data.graph, data.corpus, kind));
    const SearchResult& r = results.back();
    std::cout << to_string(kind) << ": best_w=" << r.best_w
              << " best_sim=" << r.best_sim
              << (r.improved ? " (improved)" : " (no improvement)") << "\n";
  }

  const CombinationResult combo = combine(data.graph, data.corpus, results);
  std::cout << "\n" << make_report(results, combo).to_text();
  return 0;
}

// Command-line surface: route planning, corpus evaluation, weight
// calibration, combination, reporting, and synthetic campus generation.
// Every verb validates and loads all inputs before computing and writes
// output files only after the computation finished, so a failing run
// leaves no partial files behind.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "routefit/calibrate.hpp"
#include "routefit/chart.hpp"
#include "routefit/synth.hpp"

namespace {

using namespace routefit;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitUnreachable = 2;
constexpr int kExitIo = 3;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

IndoorGraph load_graph_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open graph file: " + path);
  return IndoorGraph::load(in);
}

RouteCorpus load_corpus_file(const std::string& path, const IndoorGraph& g) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus file: " + path);
  return RouteCorpus::load(in, g);
}

CostModel load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file: " + path);
  return CostModel::load(in);
}

// --model FILE or --criterion NAME --weight W; with neither the model is
// all-zero.
CostModel resolve_model(const std::string& model_path,
                        const std::string& criterion,
                        const std::optional<double>& weight) {
  if (!model_path.empty()) {
    if (!criterion.empty() || weight) {
      throw ValidationError("--model excludes --criterion/--weight");
    }
    return load_model_file(model_path);
  }
  if (!criterion.empty()) {
    if (!weight) throw ValidationError("--criterion requires --weight");
    const auto kind = criterion_from_string(criterion);
    if (!kind) throw ValidationError("unknown criterion '" + criterion + "'");
    return CostModel::single(*kind, *weight);
  }
  if (weight) throw ValidationError("--weight requires --criterion");
  return CostModel{};
}

WeightSchedule resolve_schedule(const std::vector<double>& values) {
  WeightSchedule s;
  if (values.empty()) return s;
  if (values.size() != 4) {
    throw ValidationError(
        "--schedule needs fine_max,fine_step,coarse_max,coarse_step");
  }
  s.fine_max = values[0];
  s.fine_step = values[1];
  s.coarse_max = values[2];
  s.coarse_step = values[3];
  s.validate();
  return s;
}

void write_file(const std::filesystem::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open output file: " + path.string());
  out << data;
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

void ensure_out_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory: " + dir.string());
}

std::filesystem::path result_path(const std::filesystem::path& dir,
                                  CriterionKind kind) {
  return dir / (std::string(to_string(kind)) + ".json");
}

SearchResult load_result_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open result file: " + path.string());
  nlohmann::json j;
  in >> j;
  return SearchResult::from_json(j);
}

int cmd_route(const std::string& graph_path, const std::string& start,
              const std::string& dest, const std::string& model_path,
              const std::string& criterion, const std::optional<double>& weight,
              bool node_labels, const std::string& format) {
  const IndoorGraph g = load_graph_file(graph_path);
  const CostModel model = resolve_model(model_path, criterion, weight);
  g.node_index(start);
  g.node_index(dest);
  PlanOptions options;
  if (node_labels) options.mode = PlanMode::kNodeLabel;
  const auto route = plan_route(g, start, dest, model, options);
  if (!route) {
    std::cerr << "unreachable: no route from '" << start << "' to '" << dest
              << "'\n";
    return kExitUnreachable;
  }
  const StepPenalties penalties = route_penalties(g, model, route->nodes);
  if (format == "json") {
    nlohmann::json j;
    j["nodes"] = route->nodes;
    j["metric_length"] = route->metric_length;
    j["weighted_cost"] = route->weighted_cost;
    j["penalties"] = nlohmann::json::object();
    for (const WeightedCriterion& wc : model.criteria()) {
      j["penalties"][to_string(wc.kind)] = penalties[wc.kind];
    }
    std::cout << j.dump(2) << "\n";
    return kExitOk;
  }
  std::cout << "route:";
  for (const NodeId& id : route->nodes) std::cout << " " << id;
  std::cout << "\n";
  std::cout << "metric_length: " << fmt17(route->metric_length) << "\n";
  std::cout << "weighted_cost: " << fmt17(route->weighted_cost) << "\n";
  for (const WeightedCriterion& wc : model.criteria()) {
    std::cout << "penalty " << to_string(wc.kind) << ": "
              << fmt17(penalties[wc.kind]) << "\n";
  }
  return kExitOk;
}

int cmd_eval(const std::string& graph_path, const std::string& corpus_path,
             const std::string& model_path, const std::string& criterion,
             const std::optional<double>& weight, const std::string& format) {
  const IndoorGraph g = load_graph_file(graph_path);
  const RouteCorpus corpus = load_corpus_file(corpus_path, g);
  const CostModel model = resolve_model(model_path, criterion, weight);
  const CorpusEval eval = evaluate_corpus(g, corpus, model);
  const CorpusEval baseline = evaluate_corpus(g, corpus, CostModel{});
  const double impacted = impacted_against(eval, baseline);
  if (format == "json") {
    nlohmann::json j;
    j["mean_sim"] = eval.mean_sim;
    j["impacted"] = impacted;
    j["unreachable"] = eval.unreachable;
    std::cout << j.dump(2) << "\n";
    return kExitOk;
  }
  std::cout << "mean_similarity: " << fmt17(eval.mean_sim) << "\n";
  std::cout << "impacted: " << fmt17(impacted) << "\n";
  std::cout << "unreachable: " << eval.unreachable << "\n";
  return kExitOk;
}

int cmd_search(const std::string& graph_path, const std::string& corpus_path,
               const std::string& criterion, const std::vector<double>& schedule,
               const std::string& out_dir, const std::string& format) {
  const IndoorGraph g = load_graph_file(graph_path);
  const RouteCorpus corpus = load_corpus_file(corpus_path, g);
  const WeightSchedule ws = resolve_schedule(schedule);
  std::vector<CriterionKind> kinds;
  if (criterion == "all") {
    kinds.assign(kAllCriteria.begin(), kAllCriteria.end());
  } else {
    const auto kind = criterion_from_string(criterion);
    if (!kind) throw ValidationError("unknown criterion '" + criterion + "'");
    kinds.push_back(*kind);
  }
  std::vector<SearchResult> results;
  for (CriterionKind kind : kinds) {
    SearchResult r = grid_search(g, corpus, kind, ws);
    std::cout << to_string(kind) << ": best_w=" << fmt17(r.best_w)
              << " best_sim=" << fmt17(r.best_sim)
              << " baseline=" << fmt17(r.baseline_sim)
              << " improved=" << (r.improved ? "yes" : "no")
              << (r.unbounded ? " unbounded" : "") << "\n";
    results.push_back(std::move(r));
  }
  const std::filesystem::path dir(out_dir);
  ensure_out_dir(dir);
  for (const SearchResult& r : results) {
    write_file(result_path(dir, r.kind), r.to_json().dump(2) + "\n");
    write_file(dir / (std::string(to_string(r.kind)) + ".csv"), r.to_csv());
    if (format == "svg") {
      write_file(dir / (std::string(to_string(r.kind)) + ".svg"), svg_curve(r));
    }
  }
  return kExitOk;
}

// Loads every per-criterion result file present in the directory, in
// criterion declaration order.
std::vector<SearchResult> load_results_dir(const std::filesystem::path& dir) {
  std::vector<SearchResult> results;
  for (CriterionKind kind : kAllCriteria) {
    const auto path = result_path(dir, kind);
    if (!std::filesystem::exists(path)) continue;
    SearchResult r = load_result_file(path);
    if (r.kind != kind) {
      throw ValidationError("result file " + path.string() +
                            " holds criterion '" + to_string(r.kind) + "'");
    }
    results.push_back(std::move(r));
  }
  if (results.empty()) {
    throw ValidationError("no search result files in '" + dir.string() +
                          "'; run search first");
  }
  return results;
}

int cmd_combine(const std::string& graph_path, const std::string& corpus_path,
                const std::string& out_dir) {
  const IndoorGraph g = load_graph_file(graph_path);
  const RouteCorpus corpus = load_corpus_file(corpus_path, g);
  const std::filesystem::path dir(out_dir);
  const std::vector<SearchResult> results = load_results_dir(dir);
  const CombinationResult combo = combine(g, corpus, results);
  std::cout << "combined model:";
  for (const WeightedCriterion& wc : combo.model.criteria()) {
    std::cout << " " << to_string(wc.kind) << "=" << fmt17(wc.w);
  }
  if (combo.model.criteria().empty()) std::cout << " (empty)";
  std::cout << "\n";
  std::cout << "mean_similarity: " << fmt17(combo.mean_sim) << "\n";
  std::cout << "impacted: " << fmt17(combo.impacted) << "\n";
  for (const auto& [kind, reason] : combo.excluded) {
    std::cout << "excluded " << to_string(kind) << ": " << reason << "\n";
  }
  ensure_out_dir(dir);
  write_file(dir / "combination.json", combo.to_json().dump(2) + "\n");
  write_file(dir / "combined_model.json", combo.model.to_json().dump(2) + "\n");
  return kExitOk;
}

int cmd_report(const std::string& out_dir) {
  const std::filesystem::path dir(out_dir);
  const std::vector<SearchResult> results = load_results_dir(dir);
  const auto combo_path = dir / "combination.json";
  if (!std::filesystem::exists(combo_path)) {
    throw ValidationError("missing " + combo_path.string() +
                          "; run combine first");
  }
  std::ifstream in(combo_path, std::ios::binary);
  if (!in) throw IoError("cannot open " + combo_path.string());
  nlohmann::json j;
  in >> j;
  const CombinationResult combo = CombinationResult::from_json(j);
  const ReportTable table = make_report(results, combo);
  const std::string text = table.to_text();
  std::cout << text;
  ensure_out_dir(dir);
  write_file(dir / "report.txt", text);
  write_file(dir / "report.csv", table.to_csv());
  return kExitOk;
}

int cmd_gen(const SyntheticSpec& spec, std::uint64_t seed,
            const std::string& out_dir) {
  const SyntheticResult result = generate(spec, seed);
  const std::filesystem::path dir(out_dir);
  ensure_out_dir(dir);
  {
    std::ofstream out(dir / "graph.json", std::ios::binary);
    if (!out) throw IoError("cannot open output file: graph.json");
    result.graph.save(out);
    if (!out) throw IoError("write failed: graph.json");
  }
  {
    std::ofstream out(dir / "corpus.json", std::ios::binary);
    if (!out) throw IoError("cannot open output file: corpus.json");
    result.corpus.save(out);
    if (!out) throw IoError("write failed: corpus.json");
  }
  {
    std::ofstream out(dir / "planted_model.json", std::ios::binary);
    if (!out) throw IoError("cannot open output file: planted_model.json");
    result.planted.save(out);
    if (!out) throw IoError("write failed: planted_model.json");
  }
  std::cout << "graph: " << result.graph.node_count() << " nodes, "
            << result.graph.edge_count() << " edges\n";
  std::cout << "corpus: " << result.corpus.records.size() << " records\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"criterion-weighted indoor route planning and calibration"};
  app.require_subcommand(1);

  std::string graph_path, corpus_path, model_path, criterion, out_dir = ".";
  std::string format = "text";
  std::optional<double> weight;
  std::vector<double> schedule;
  std::string start, dest;
  bool node_labels = false;
  std::uint64_t seed = 42;
  SyntheticSpec spec;

  auto add_model_flags = [&](CLI::App* cmd) {
    cmd->add_option("--model", model_path, "cost model JSON file");
    cmd->add_option("--criterion", criterion, "single criterion name");
    cmd->add_option("--weight", weight, "weight for --criterion");
  };

  CLI::App* route = app.add_subcommand("route", "plan one route");
  route->add_option("--graph", graph_path, "graph JSON file")->required();
  route->add_option("start", start, "start node id")->required();
  route->add_option("dest", dest, "destination node id")->required();
  add_model_flags(route);
  route->add_flag("--node-labels", node_labels,
                  "classic per-node labels (may miss turn-dependent optima)");
  route->add_option("--format", format, "text|json");

  CLI::App* eval = app.add_subcommand("eval", "mean corpus similarity");
  eval->add_option("--graph", graph_path, "graph JSON file")->required();
  eval->add_option("--corpus", corpus_path, "corpus JSON file")->required();
  add_model_flags(eval);
  eval->add_option("--format", format, "text|json");

  CLI::App* search = app.add_subcommand("search", "per-criterion weight search");
  search->add_option("--graph", graph_path, "graph JSON file")->required();
  search->add_option("--corpus", corpus_path, "corpus JSON file")->required();
  std::string search_criterion = "all";
  search->add_option("--criterion", search_criterion,
                     "criterion name or 'all'");
  search->add_option("--schedule", schedule,
                     "fine_max,fine_step,coarse_max,coarse_step")
      ->delimiter(',');
  search->add_option("--out", out_dir, "output directory");
  search->add_option("--format", format, "also write svg curves: svg");

  CLI::App* combine = app.add_subcommand(
      "combine", "combine improving criteria into one model");
  combine->add_option("--graph", graph_path, "graph JSON file")->required();
  combine->add_option("--corpus", corpus_path, "corpus JSON file")->required();
  combine->add_option("--out", out_dir,
                      "directory with search results; outputs land there");

  CLI::App* report = app.add_subcommand("report", "comparison table");
  report->add_option("--out", out_dir, "directory with search + combine outputs");

  CLI::App* gen = app.add_subcommand("gen", "synthetic campus + corpus");
  gen->add_option("--out", out_dir, "output directory");
  gen->add_option("--seed", seed, "random seed");
  gen->add_option("--floors", spec.floors, "floor count");
  gen->add_option("--rows", spec.rows, "grid rows per floor");
  gen->add_option("--cols", spec.cols, "grid columns per floor");
  gen->add_option("--twin-shafts", spec.twin_shafts,
                  "stair+elevator shaft pairs");
  gen->add_option("--stair-length", spec.stair_edge_length,
                  "per-floor staircase edge length");
  gen->add_option("--elevator-length", spec.elevator_edge_length,
                  "per-floor elevator edge length");
  gen->add_option("--subdivision-density", spec.subdivision_density,
                  "corridor subdivision probability");
  gen->add_option("--doorway-density", spec.doorway_density,
                  "doorway gadget probability");
  gen->add_option("--entrance-density", spec.entrance_density,
                  "entrance gadget probability");
  gen->add_option("--revolving-density", spec.revolving_density,
                  "revolving-door gadget probability");
  gen->add_option("--diagonal-density", spec.diagonal_density,
                  "diagonal shortcut probability per cell");
  gen->add_option("--stub-density", spec.stub_density,
                  "dead-end stub probability per node");
  gen->add_option("--corpus-size", spec.corpus_size, "record count");
  gen->add_option("--flip-fraction", spec.flip_fraction,
                  "target share of records that differ from shortest paths");
  gen->add_option("--noise", spec.noise_p,
                  "per-record chance of perturbed planted weights");
  gen->add_option("--min-floor-span", spec.min_floor_span,
                  "minimum |floor(start) - floor(dest)|");
  gen->add_option("--max-pair-attempts", spec.max_pair_attempts,
                  "sampling attempt cap");
  add_model_flags(gen);

  int rc = kExitOk;
  route->callback([&] {
    rc = cmd_route(graph_path, start, dest, model_path, criterion, weight,
                   node_labels, format);
  });
  eval->callback([&] {
    rc = cmd_eval(graph_path, corpus_path, model_path, criterion, weight,
                  format);
  });
  search->callback([&] {
    rc = cmd_search(graph_path, corpus_path, search_criterion, schedule,
                    out_dir, format);
  });
  combine->callback([&] { rc = cmd_combine(graph_path, corpus_path, out_dir); });
  report->callback([&] { rc = cmd_report(out_dir); });
  gen->callback([&] {
    spec.planted = resolve_model(model_path, criterion, weight);
    rc = cmd_gen(spec, seed, out_dir);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return rc;
}

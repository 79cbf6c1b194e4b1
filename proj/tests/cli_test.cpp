// End-to-end checks running the installed binary through a shell, one
// process per case. ROUTEFIT_CLI_PATH is injected by the build.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <string>

#include "routefit/calibrate.hpp"
#include "routefit/graph.hpp"
#include "routefit/similarity.hpp"
#include "test_util.hpp"

using namespace routefit;

namespace {

struct CmdResult {
  int code = -1;
  std::string output;  // stdout and stderr, interleaved
};

class CliTest : public ::testing::Test {
 protected:
  testutil::TempDir dir_;

  CmdResult run(const std::string& args) {
    const std::string cap = dir_.file("cmd_output.txt");
    const std::string cmd =
        std::string(ROUTEFIT_CLI_PATH) + " " + args + " > " + cap + " 2>&1";
    const int raw = std::system(cmd.c_str());
    CmdResult r;
    r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.output = testutil::read_file(cap);
    return r;
  }

  // corner corridor: a - b - c with a 90 degree bend at b
  std::string corner_graph() {
    const std::string path = dir_.file("graph.json");
    const IndoorGraph g({{"a", 0, 0, 0, NodeKind::kPlain},
                         {"b", 10, 0, 0, NodeKind::kPlain},
                         {"c", 10, 10, 0, NodeKind::kPlain}},
                        {{"a", "b", 10.0, EdgeKind::kWalk},
                         {"b", "c", 10.0, EdgeKind::kWalk}});
    std::ofstream out(path);
    g.save(out);
    return path;
  }

  std::string corner_corpus() {
    const std::string path = dir_.file("corpus.json");
    testutil::write_text(path, R"({"routes": [
      {"start": "a", "dest": "c", "nodes": ["a", "b", "c"]}
    ]})");
    return path;
  }

  // plain 50 corridor vs doorway shortcut of 6.5; flips at weights > 43.5
  void write_door_chain(std::string& graph_path, std::string& corpus_path) {
    const IndoorGraph g({{"a", 0, 0, 0, NodeKind::kPlain},
                         {"b", 50, 0, 0, NodeKind::kPlain},
                         {"d", 25, -5, 0, NodeKind::kDoorway}},
                        {{"a", "b", 50.0, EdgeKind::kWalk},
                         {"a", "d", 3.25, EdgeKind::kWalk},
                         {"d", "b", 3.25, EdgeKind::kWalk}});
    graph_path = dir_.file("chain_graph.json");
    std::ofstream out(graph_path);
    g.save(out);
    corpus_path = dir_.file("chain_corpus.json");
    testutil::write_text(corpus_path, R"({"routes": [
      {"start": "a", "dest": "b", "nodes": ["a", "b"]}
    ]})");
  }
};

TEST_F(CliTest, RouteText) {
  const std::string g = corner_graph();
  const CmdResult r =
      run("route --graph " + g + " a c --criterion turns --weight 3");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.output.find("route: a b c"), std::string::npos);
  EXPECT_NE(r.output.find("metric_length: 20"), std::string::npos);
  EXPECT_NE(r.output.find("weighted_cost: 23"), std::string::npos);
  EXPECT_NE(r.output.find("penalty turns: 3"), std::string::npos);
}

TEST_F(CliTest, RouteJsonBreakdownSums) {
  const std::string g = corner_graph();
  const std::string model = dir_.file("model.json");
  testutil::write_text(model, R"({"criteria": [
    {"kind": "turns", "w": 3},
    {"kind": "decision_points", "w": 0.5}
  ]})");
  const CmdResult r =
      run("route --graph " + g + " a c --model " + model + " --format json");
  ASSERT_EQ(r.code, 0);
  const nlohmann::json j = nlohmann::json::parse(r.output);
  ASSERT_EQ(j.at("nodes").size(), 3u);
  double penalties = 0.0;
  for (const auto& [kind, v] : j.at("penalties").items()) {
    penalties += v.get<double>();
  }
  EXPECT_DOUBLE_EQ(penalties, j.at("weighted_cost").get<double>() -
                                  j.at("metric_length").get<double>());
  EXPECT_DOUBLE_EQ(j.at("weighted_cost").get<double>(), 23.0);
}

TEST_F(CliTest, RouteUnreachableExitsTwo) {
  const std::string path = dir_.file("island.json");
  const IndoorGraph g({{"a", 0, 0, 0, NodeKind::kPlain},
                       {"b", 10, 0, 0, NodeKind::kPlain},
                       {"c", 90, 90, 0, NodeKind::kPlain}},
                      {{"a", "b", 10.0, EdgeKind::kWalk}});
  {
    std::ofstream out(path);
    g.save(out);
  }
  const CmdResult r = run("route --graph " + path + " a c");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("unreachable"), std::string::npos);
}

TEST_F(CliTest, RouteInputErrors) {
  const std::string g = corner_graph();
  EXPECT_EQ(run("route --graph " + g + " a zz").code, 1);

  const std::string broken = dir_.file("broken.json");
  testutil::write_text(broken, "{ nope");
  EXPECT_EQ(run("route --graph " + broken + " a c").code, 1);

  EXPECT_EQ(run("route --graph " + dir_.file("absent.json") + " a c").code, 3);
}

TEST_F(CliTest, ModelFlagValidation) {
  const std::string g = corner_graph();
  const std::string model = dir_.file("model.json");
  testutil::write_text(model, R"({"criteria": []})");
  // --model excludes --criterion/--weight
  EXPECT_EQ(run("route --graph " + g + " a c --model " + model +
                " --criterion turns --weight 1")
                .code,
            1);
  // --criterion needs --weight
  EXPECT_EQ(run("route --graph " + g + " a c --criterion turns").code, 1);
  EXPECT_EQ(run("route --graph " + g + " a c --criterion warp --weight 1").code,
            1);
}

TEST_F(CliTest, EvalTextAndJson) {
  const std::string g = corner_graph();
  const std::string c = corner_corpus();
  const CmdResult text = run("eval --graph " + g + " --corpus " + c);
  EXPECT_EQ(text.code, 0);
  EXPECT_NE(text.output.find("mean_similarity: 1"), std::string::npos);
  EXPECT_NE(text.output.find("unreachable: 0"), std::string::npos);

  const CmdResult js =
      run("eval --graph " + g + " --corpus " + c + " --format json");
  ASSERT_EQ(js.code, 0);
  const nlohmann::json j = nlohmann::json::parse(js.output);
  EXPECT_DOUBLE_EQ(j.at("mean_sim").get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(j.at("impacted").get<double>(), 0.0);
  EXPECT_EQ(j.at("unreachable").get<int>(), 0);
}

TEST_F(CliTest, SearchWritesCurveAndSvg) {
  std::string g, c;
  write_door_chain(g, c);
  const std::string out = dir_.file("sweep");
  const CmdResult r = run("search --graph " + g + " --corpus " + c +
                          " --criterion doorways --out " + out +
                          " --format svg");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.output.find("doorways: best_w=44"), std::string::npos);
  EXPECT_NE(r.output.find("improved=yes"), std::string::npos);

  std::ifstream jf(out + "/doorways.json");
  ASSERT_TRUE(jf.good());
  nlohmann::json j;
  jf >> j;
  const SearchResult sr = SearchResult::from_json(j);
  EXPECT_DOUBLE_EQ(sr.best_w, 44.0);
  EXPECT_DOUBLE_EQ(sr.best_sim, 1.0);

  const std::string csv = testutil::read_file(out + "/doorways.csv");
  EXPECT_EQ(csv.rfind("w,mean_sim,impacted\n", 0), 0u);
  const std::string svg = testutil::read_file(out + "/doorways.svg");
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
}

TEST_F(CliTest, SearchAllCoversEveryCriterion) {
  const std::string g = corner_graph();
  const std::string c = corner_corpus();
  const std::string out = dir_.file("all");
  const CmdResult r =
      run("search --graph " + g + " --corpus " + c + " --out " + out);
  ASSERT_EQ(r.code, 0);
  for (CriterionKind k : kAllCriteria) {
    const std::string stem = out + "/" + to_string(k);
    EXPECT_TRUE(std::ifstream(stem + ".json").good()) << stem;
    EXPECT_TRUE(std::ifstream(stem + ".csv").good()) << stem;
  }
}

TEST_F(CliTest, SearchScheduleValidation) {
  const std::string g = corner_graph();
  const std::string c = corner_corpus();
  EXPECT_EQ(run("search --graph " + g + " --corpus " + c +
                " --criterion turns --schedule 1,2,3")
                .code,
            1);
  EXPECT_EQ(run("search --graph " + g + " --corpus " + c +
                " --criterion turns --schedule 100,1,50,10")
                .code,
            1);
  EXPECT_EQ(run("search --graph " + g + " --corpus " + c +
                " --criterion warp")
                .code,
            1);
}

TEST_F(CliTest, CombineAndReportFlow) {
  std::string g, c;
  write_door_chain(g, c);
  const std::string out = dir_.file("flow");
  ASSERT_EQ(run("search --graph " + g + " --corpus " + c +
                " --criterion doorways --out " + out)
                .code,
            0);

  const CmdResult comb =
      run("combine --graph " + g + " --corpus " + c + " --out " + out);
  ASSERT_EQ(comb.code, 0);
  EXPECT_NE(comb.output.find("doorways=44"), std::string::npos);
  EXPECT_TRUE(std::ifstream(out + "/combination.json").good());
  EXPECT_TRUE(std::ifstream(out + "/combined_model.json").good());

  const CmdResult rep = run("report --out " + out);
  ASSERT_EQ(rep.code, 0);
  EXPECT_NE(rep.output.find("Factor"), std::string::npos);
  EXPECT_NE(rep.output.find("Doorways"), std::string::npos);
  EXPECT_NE(rep.output.find("Combination"), std::string::npos);
  EXPECT_NE(rep.output.find("Baseline (shortest path):"), std::string::npos);
  const std::string txt = testutil::read_file(out + "/report.txt");
  EXPECT_EQ(txt, rep.output);
  const std::string csv = testutil::read_file(out + "/report.csv");
  EXPECT_EQ(csv.rfind("factor,weight,", 0), 0u);
}

TEST_F(CliTest, ReportRequiresCombine) {
  std::string g, c;
  write_door_chain(g, c);
  const std::string out = dir_.file("no_combine");
  ASSERT_EQ(run("search --graph " + g + " --corpus " + c +
                " --criterion doorways --out " + out)
                .code,
            0);
  const CmdResult r = run("report --out " + out);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("run combine first"), std::string::npos);
}

TEST_F(CliTest, CombineAndReportRequireSearch) {
  std::string g, c;
  write_door_chain(g, c);
  const std::string empty = dir_.file("empty");
  ASSERT_EQ(std::system(("mkdir -p " + empty).c_str()), 0);
  EXPECT_EQ(run("combine --graph " + g + " --corpus " + c + " --out " + empty)
                .code,
            1);
  const CmdResult r = run("report --out " + empty);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("run search first"), std::string::npos);
}

TEST_F(CliTest, GenWritesLoadableWorld) {
  const std::string out = dir_.file("world");
  const CmdResult r = run(
      "gen --out " + out +
      " --seed 7 --floors 1 --twin-shafts 0 --rows 6 --cols 6"
      " --corpus-size 8 --doorway-density 0.3 --criterion doorways --weight 2");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.output.find("corpus: 8 records"), std::string::npos);

  std::ifstream gf(out + "/graph.json");
  ASSERT_TRUE(gf.good());
  const IndoorGraph g = IndoorGraph::load(gf);
  EXPECT_GE(g.node_count(), 36u);
  std::ifstream cf(out + "/corpus.json");
  ASSERT_TRUE(cf.good());
  const RouteCorpus corpus = RouteCorpus::load(cf, g);
  EXPECT_EQ(corpus.records.size(), 8u);
  std::ifstream mf(out + "/planted_model.json");
  ASSERT_TRUE(mf.good());
  const CostModel planted = CostModel::load(mf);
  EXPECT_DOUBLE_EQ(planted.weight(CriterionKind::kDoorways), 2.0);
}

TEST_F(CliTest, GenSameSeedSameBytes) {
  const std::string args =
      " --seed 11 --floors 1 --twin-shafts 0 --rows 6 --cols 6"
      " --corpus-size 6 --doorway-density 0.2 --criterion doorways --weight 2";
  const std::string out1 = dir_.file("w1");
  const std::string out2 = dir_.file("w2");
  ASSERT_EQ(run("gen --out " + out1 + args).code, 0);
  ASSERT_EQ(run("gen --out " + out2 + args).code, 0);
  EXPECT_EQ(testutil::read_file(out1 + "/graph.json"),
            testutil::read_file(out2 + "/graph.json"));
  EXPECT_EQ(testutil::read_file(out1 + "/corpus.json"),
            testutil::read_file(out2 + "/corpus.json"));
}

TEST_F(CliTest, GenInvalidSpecWritesNothing) {
  const std::string out = dir_.file("bad");
  const CmdResult r = run("gen --out " + out + " --floors 0");
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(std::ifstream(out + "/graph.json").good());
}

TEST_F(CliTest, FullPipelineIsByteDeterministic) {
  const std::string gen_args =
      " --seed 13 --floors 1 --twin-shafts 0 --rows 6 --cols 6"
      " --corpus-size 8 --doorway-density 0.3 --flip-fraction 0.3"
      " --criterion doorways --weight 2";
  std::string reports[2];
  for (int i = 0; i < 2; ++i) {
    const std::string out = dir_.file("run" + std::to_string(i));
    ASSERT_EQ(run("gen --out " + out + gen_args).code, 0);
    ASSERT_EQ(run("search --graph " + out + "/graph.json --corpus " + out +
                  "/corpus.json --criterion doorways --out " + out)
                  .code,
              0);
    ASSERT_EQ(run("combine --graph " + out + "/graph.json --corpus " + out +
                  "/corpus.json --out " + out)
                  .code,
              0);
    ASSERT_EQ(run("report --out " + out).code, 0);
    reports[i] = testutil::read_file(out + "/report.txt");
    ASSERT_FALSE(reports[i].empty());
  }
  EXPECT_EQ(reports[0], reports[1]);
}

TEST_F(CliTest, ArgumentErrors) {
  EXPECT_EQ(run("").code, 1);             // a subcommand is required
  EXPECT_EQ(run("warp").code, 1);         // unknown subcommand
  EXPECT_EQ(run("route --graph x").code, 1);  // missing positionals
  const std::string g = corner_graph();
  EXPECT_EQ(run("route --graph " + g + " a c --nope").code, 1);
  EXPECT_EQ(run("--help").code, 0);
  EXPECT_EQ(run("route --help").code, 0);
}

}  // namespace

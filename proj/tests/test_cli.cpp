#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "simct/cli.hpp"

using namespace simct;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run simct_run(std::vector<std::string> args) {
  args.insert(args.begin(), "simct");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / "simct-cli-tests" / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

std::string queries_file(const fs::path& dir, std::size_t n = 40) {
  const auto p = (dir / "queries.jsonl").string();
  jsonl::write(p, sim::synth_queries(n, 5));
  return p;
}

std::string sim_endpoint_yaml(const std::string& id, std::uint64_t family, double temperature = 0.6) {
  return "    " + id.substr(id.size() - 1) + ":\n      model_id: " + id + "\n      temperature: " +
         std::to_string(temperature) + "\n      simulated:\n        family_seed: " + std::to_string(family) +
         "\n        vocab_shift: 0.05\n        closed_answer_flip_prob: 0.1\n        verbosity: 30\n";
}

std::string config_file(const fs::path& dir, const std::string& endpoints, const std::string& extra = "") {
  const auto p = (dir / "run.yaml").string();
  spit(p, "seed: 1\nparallelism: 2\nretry: {retry_limit: 0, initial_backoff_ms: 1}\nendpoints:\n" + endpoints +
              extra);
  return p;
}

// Trained once from the simulator training set.
const std::string& shared_model() {
  static const std::string path = [] {
    const auto dir = fresh_dir("shared-model");
    const auto pairs = (dir / "pairs.jsonl").string();
    const auto model = (dir / "model.json").string();
    EXPECT_EQ(simct_run({"sim-pairs", "--seed", "1", "--out", pairs}).code, 0);
    EXPECT_EQ(simct_run({"train", "--pairs", pairs, "--model", model, "--seed", "1"}).code, 0);
    return model;
  }();
  return path;
}

}  // namespace

TEST(CliCraft, DifferentModelsLabelsEveryPairZero) {
  const auto dir = fresh_dir("craft-diff");
  const auto q = queries_file(dir, 12);
  const auto cfg = config_file(dir, sim_endpoint_yaml("model-a", 1) + sim_endpoint_yaml("model-b", 2));
  const auto out = (dir / "pairs.jsonl").string();
  const auto r = simct_run({"craft", "--config", cfg, "--queries", q, "--recipe", "different_models", "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto pairs = jsonl::read<LabeledPair>(out);
  ASSERT_EQ(pairs.size(), 12u);
  for (const auto& p : pairs) {
    EXPECT_EQ(p.label, 0);
    EXPECT_EQ(p.provenance, Provenance::different_models);
    EXPECT_EQ(p.resp_x.query_id, p.query.id);
  }
}

TEST(CliCraft, SameModelTwiceLabelsEveryPairOne) {
  const auto dir = fresh_dir("craft-same");
  const auto q = queries_file(dir, 12);
  const auto cfg = config_file(dir, sim_endpoint_yaml("model-a", 1));
  const auto out = (dir / "pairs.jsonl").string();
  const auto transcript = (dir / "raw.jsonl").string();
  const auto r = simct_run({"craft", "--config", cfg, "--queries", q, "--out", out, "--transcript", transcript});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto pairs = jsonl::read<LabeledPair>(out);
  ASSERT_EQ(pairs.size(), 12u);
  for (const auto& p : pairs) {
    EXPECT_EQ(p.label, 1);
    EXPECT_EQ(p.provenance, Provenance::same_model_twice);
  }
  EXPECT_EQ(jsonl::read<Response>(transcript).size(), 24u);
}

TEST(CliCraft, UnreachableEndpointIsAnError) {
  const auto dir = fresh_dir("craft-dead");
  const auto q = queries_file(dir, 4);
  const auto cfg = config_file(dir, "    a:\n      model_id: ghost\n      base_url: http://127.0.0.1:1/v1\n");
  const auto r = simct_run({"craft", "--config", cfg, "--queries", q, "--out", (dir / "p.jsonl").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("ghost"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("127.0.0.1:1"), std::string::npos) << r.err;
}

TEST(CliCraft, MissingSecondEndpoint) {
  const auto dir = fresh_dir("craft-missing");
  const auto q = queries_file(dir, 4);
  const auto cfg = config_file(dir, sim_endpoint_yaml("model-a", 1));
  const auto r = simct_run({"craft", "--config", cfg, "--queries", q, "--recipe", "different_models", "--out",
                            (dir / "p.jsonl").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("endpoint B"), std::string::npos);
}

TEST(CliTrain, DeterministicAndReportsAuc) {
  const auto dir = fresh_dir("train-det");
  const auto pairs = (dir / "pairs.jsonl").string();
  ASSERT_EQ(simct_run({"sim-pairs", "--seed", "1", "--out", pairs}).code, 0);
  const auto m1 = (dir / "m1.json").string(), m2 = (dir / "m2.json").string();
  const auto r1 = simct_run({"train", "--pairs", pairs, "--model", m1});
  const auto r2 = simct_run({"train", "--pairs", pairs, "--model", m2});
  ASSERT_EQ(r1.code, 0) << r1.err;
  ASSERT_EQ(r2.code, 0) << r2.err;
  EXPECT_EQ(slurp(m1), slurp(m2));
  EXPECT_NE(r1.out.find("validation AUC"), std::string::npos);
  EXPECT_NO_THROW(gbdt::load_model(m1));
}

// The documented example: the simulator training set trains to a
// validation AUC of at least 0.9.
TEST(CliTrain, SimulatorPairsReachDocumentedAuc) {
  const auto dir = fresh_dir("train-auc");
  const auto pairs = (dir / "pairs.jsonl").string();
  ASSERT_EQ(simct_run({"sim-pairs", "--seed", "1", "--out", pairs}).code, 0);
  const auto r = simct_run({"train", "--pairs", pairs, "--model", (dir / "m.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto at = r.out.find("validation AUC: ");
  ASSERT_NE(at, std::string::npos);
  const double auc = std::stod(r.out.substr(at + 16));
  EXPECT_GE(auc, 0.9) << r.out;
}

TEST(CliTrain, SingleClassPairsRejected) {
  const auto dir = fresh_dir("train-one-class");
  const auto q = queries_file(dir, 10);
  const auto cfg = config_file(dir, sim_endpoint_yaml("model-a", 1));
  const auto pairs = (dir / "pairs.jsonl").string();
  ASSERT_EQ(simct_run({"craft", "--config", cfg, "--queries", q, "--out", pairs}).code, 0);
  const auto r = simct_run({"train", "--pairs", pairs, "--model", (dir / "m.json").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(fs::exists(dir / "m.json"));
}

TEST(CliTrain, UnknownGbdtOverride) {
  const auto dir = fresh_dir("train-override");
  const auto cfg = (dir / "c.yaml").string();
  spit(cfg, "gbdt: {num_trees: 3}\n");
  const auto r = simct_run({"train", "--config", cfg, "--pairs", "x", "--model", "y"});
  EXPECT_EQ(r.code, 2);
}

TEST(CliTest, SameSpecIsConsistent) {
  const auto dir = fresh_dir("test-same");
  const auto q = queries_file(dir, 100);
  const auto cfg = config_file(dir, sim_endpoint_yaml("model-a", 3) + sim_endpoint_yaml("model-b", 3));
  const auto report = (dir / "report.json").string();
  const auto r = simct_run({"test", "--config", cfg, "--queries", q, "--model", shared_model(), "--report", report});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  const auto doc = nlohmann::json::parse(slurp(report));
  EXPECT_EQ(doc.at("verdict"), "consistent");
  EXPECT_EQ(doc.at("n"), 100);
  EXPECT_EQ(doc.at("run").at("mode"), "live");
  EXPECT_TRUE(fs::exists(report + ".transcript.jsonl"));
}

TEST(CliTest, DistinctFamilyIsInconsistent) {
  const auto dir = fresh_dir("test-diff");
  const auto q = queries_file(dir, 100);
  const auto cfg = config_file(dir, sim_endpoint_yaml("model-a", 3) + sim_endpoint_yaml("model-b", 4));
  const auto r = simct_run({"test", "--config", cfg, "--queries", q, "--model", shared_model(), "--report",
                            (dir / "report.json").string()});
  EXPECT_EQ(r.code, 1) << r.out << r.err;
  EXPECT_NE(r.out.find("inconsistent"), std::string::npos);
}

TEST(CliTest, MissingModelFailsBeforeTraffic) {
  const auto dir = fresh_dir("test-no-model");
  const auto q = queries_file(dir, 10);
  const auto cfg = config_file(dir, sim_endpoint_yaml("model-a", 3) + sim_endpoint_yaml("model-b", 3));
  const auto transcript = (dir / "t.jsonl").string();
  const auto r = simct_run({"test", "--config", cfg, "--queries", q, "--model", (dir / "none.json").string(),
                            "--responses", transcript});
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(fs::exists(transcript));
}

TEST(CliTest, OfflineReplayIsByteIdentical) {
  const auto dir = fresh_dir("test-replay");
  const auto q = queries_file(dir, 60);
  const auto cfg = config_file(dir, sim_endpoint_yaml("model-a", 3) + sim_endpoint_yaml("model-b", 7));
  const auto transcript = (dir / "t.jsonl").string();
  const auto live = (dir / "live.json").string();
  const auto live_run = simct_run({"test", "--config", cfg, "--queries", q, "--model", shared_model(),
                                   "--responses", transcript, "--report", live});
  ASSERT_NE(live_run.code, 2) << live_run.err;

  const auto r1 = (dir / "r1.json").string(), r2 = (dir / "r2.json").string();
  const auto o1 = simct_run({"test", "--queries", q, "--model", shared_model(), "--responses", transcript,
                             "--report", r1, "--mode", "offline"});
  const auto o2 = simct_run({"test", "--queries", q, "--model", shared_model(), "--responses", transcript,
                             "--report", r2, "--mode", "offline", "--parallelism", "3"});
  EXPECT_EQ(o1.code, live_run.code);
  EXPECT_EQ(o2.code, live_run.code);
  // parallelism is part of the config hash; everything else must match
  auto d1 = nlohmann::json::parse(slurp(r1)), d2 = nlohmann::json::parse(slurp(r2));
  d1.erase("run");
  d2.erase("run");
  EXPECT_EQ(d1.dump(), d2.dump());
  const auto o3 = simct_run({"test", "--queries", q, "--model", shared_model(), "--responses", transcript,
                             "--report", r2, "--mode", "offline"});
  EXPECT_EQ(o3.code, o1.code);
  EXPECT_EQ(slurp(r1), slurp(r2));

  // offline scoring of the live transcript reproduces the live verdict and scores
  auto dl = nlohmann::json::parse(slurp(live));
  dl.erase("run");
  EXPECT_EQ(dl.at("model_a"), "model-a");
  EXPECT_EQ(d1.at("model_a"), "model-a");
  EXPECT_EQ(dl.dump(), d1.dump());
}

TEST(CliTest, ReadingsRecordedInReport) {
  const auto dir = fresh_dir("test-readings");
  const auto q = queries_file(dir, 60);
  const auto cfg = config_file(dir, sim_endpoint_yaml("model-a", 3) + sim_endpoint_yaml("model-b", 3));
  const auto transcript = (dir / "t.jsonl").string();
  ASSERT_NE(simct_run({"test", "--config", cfg, "--queries", q, "--model", shared_model(), "--responses",
                       transcript})
                .code,
            2);
  for (const std::string reading : {"equivalence", "complement"}) {
    const auto rep = (dir / (reading + ".json")).string();
    const auto r = simct_run({"test", "--queries", q, "--model", shared_model(), "--responses", transcript,
                              "--mode", "offline", "--reading", reading, "--report", rep});
    ASSERT_NE(r.code, 2) << r.err;
    const auto doc = nlohmann::json::parse(slurp(rep));
    EXPECT_EQ(doc.at("reading"), reading);
    const double p = doc.at("p_simct").get<double>();
    EXPECT_EQ(r.code == 0, p <= 0.05) << reading;
  }
  EXPECT_EQ(simct_run({"test", "--queries", q, "--model", shared_model(), "--responses", transcript, "--mode",
                       "offline", "--reading", "bogus"})
                .code,
            2);
}

TEST(CliTest, TranscriptWithTooFewTriplets) {
  const auto dir = fresh_dir("test-short");
  const auto q = queries_file(dir, 5);
  const auto transcript = (dir / "t.jsonl").string();
  spit(transcript, "");
  const auto r = simct_run(
      {"test", "--queries", q, "--model", shared_model(), "--responses", transcript, "--mode", "offline"});
  EXPECT_EQ(r.code, 2);
}

TEST(CliThreshold, MajorityAboveLambda) {
  const auto dir = fresh_dir("threshold");
  const auto scores = (dir / "s.jsonl").string();
  spit(scores, "0.6\n0.4\n{\"ct\": 0.7}\n");
  const auto r = simct_run({"threshold", "--scores", scores, "--lambda", "0.5"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("ratio 0.6667"), std::string::npos) << r.out;
  EXPECT_EQ(simct_run({"threshold", "--scores", scores, "--lambda", "0.65"}).code, 1);
}

TEST(CliThreshold, SweepHasNineNonIncreasingRows) {
  const auto dir = fresh_dir("threshold-sweep");
  const auto scores = (dir / "s.jsonl").string();
  spit(scores, "0.05\n0.15\n0.35\n0.55\n0.75\n0.95\n0.66\n");
  const auto csv = (dir / "sweep.csv").string();
  ASSERT_NE(simct_run({"threshold", "--scores", scores, "--sweep", csv}).code, 2);
  std::istringstream in(slurp(csv));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "lambda,ratio,verdict");
  int rows = 0;
  double prev = 2;
  while (std::getline(in, line)) {
    ++rows;
    const auto c1 = line.find(','), c2 = line.rfind(',');
    const double ratio = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
    EXPECT_LE(ratio, prev);
    prev = ratio;
  }
  EXPECT_EQ(rows, 9);
  const auto to_stdout = simct_run({"threshold", "--scores", scores, "--sweep"});
  EXPECT_NE(to_stdout.out.find("0.5,0.571429,consistent"), std::string::npos) << to_stdout.out;
}

TEST(CliThreshold, BadScoreFiles) {
  const auto dir = fresh_dir("threshold-bad");
  const auto empty = (dir / "empty.jsonl").string();
  spit(empty, "");
  EXPECT_EQ(simct_run({"threshold", "--scores", empty}).code, 2);
  const auto range = (dir / "range.jsonl").string();
  spit(range, "0.5\n1.5\n");
  EXPECT_EQ(simct_run({"threshold", "--scores", range}).code, 2);
  EXPECT_EQ(simct_run({"threshold", "--scores", (dir / "missing").string()}).code, 2);
}

TEST(CliThreshold, ReadsTestReports) {
  const auto dir = fresh_dir("threshold-report");
  model_test::TestReport rep;
  rep.per_query = {{"a", 0.9, 0.8}, {"b", 0.2, 0.7}, {"c", 0.8, 0.9}};
  rep.n = 3;
  const auto path = (dir / "report.json").string();
  spit(path, model_test::to_json(rep).dump());
  const auto r = simct_run({"threshold", "--scores", path});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("n 3"), std::string::npos);
}

TEST(CliReport, RendersPerQueryTable) {
  const auto dir = fresh_dir("report");
  model_test::TestReport rep;
  rep.verdict = model_test::Verdict::inconsistent;
  rep.p_simct = 0.3;
  rep.confidence = 0.7;
  rep.per_query = {{"query-one", 0.25, 0.75}};
  rep.n = 1;
  rep.excluded_queries = {"query-two"};
  auto doc = model_test::to_json(rep);
  doc["model_a"] = "left";
  doc["model_b"] = "right";
  const auto path = (dir / "r.json").string();
  spit(path, doc.dump());
  const auto r = simct_run({"report", path});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("left vs right"), std::string::npos);
  EXPECT_NE(r.out.find("query-one  0.2500  0.7500  -0.5000"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("excluded   query-two"), std::string::npos);
  spit(path, "{not json");
  EXPECT_EQ(simct_run({"report", path}).code, 2);
}

TEST(CliConfig, OverridesAndHash) {
  const auto dir = fresh_dir("config");
  const auto cfg = config_file(dir, sim_endpoint_yaml("model-a", 1), "alpha: 0.1\nreading: complement\n");
  const auto r = simct_run({"config", "--config", cfg, "--alpha", "0.01"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_DOUBLE_EQ(j.at("alpha").get<double>(), 0.01);
  EXPECT_EQ(j.at("reading"), "complement");
  EXPECT_EQ(j.at("endpoints").at("a").at("simulated").at("family_seed"), 1);
  EXPECT_EQ(j.at("parallelism"), 2);

  const auto base = cli::load_config(cfg);
  auto moved = base;
  moved.paths.report = "elsewhere.json";
  EXPECT_EQ(cli::config_hash(base), cli::config_hash(moved));
  auto changed = base;
  changed.alpha = 0.2;
  EXPECT_NE(cli::config_hash(base), cli::config_hash(changed));
  EXPECT_EQ(cli::config_hash(cli::config_from_json(cli::to_json(base))), cli::config_hash(base));
}

TEST(CliConfig, Rejections) {
  const auto dir = fresh_dir("config-bad");
  const auto cfg = (dir / "c.yaml").string();
  spit(cfg, "alpha: 2\n");
  EXPECT_EQ(simct_run({"config", "--config", cfg}).code, 2);
  spit(cfg, "endpoints:\n  a: {model_id: x}\n");
  EXPECT_EQ(simct_run({"config", "--config", cfg}).code, 2);
  spit(cfg, "alpha: [1\n");
  EXPECT_EQ(simct_run({"config", "--config", cfg}).code, 2);
  EXPECT_EQ(simct_run({"config", "--config", (dir / "absent.yaml").string()}).code, 2);
  EXPECT_EQ(simct_run({}).code, 2);
  EXPECT_EQ(simct_run({"frobnicate"}).code, 2);
  EXPECT_EQ(simct_run({"--version"}).code, 0);
}

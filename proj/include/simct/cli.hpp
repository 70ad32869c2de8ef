// Copyright 2026 The SimCT Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

// The `simct` command surface. Exit codes: 0 success or consistent,
// 1 inconsistent, 2 error.

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "simct/benchmark.hpp"
#include "simct/collection_harness.hpp"
#include "simct/dense_similarity.hpp"
#include "simct/error.hpp"
#include "simct/features.hpp"
#include "simct/gbdt.hpp"
#include "simct/model_test.hpp"
#include "simct/records.hpp"
#include "simct/response_test.hpp"
#include "simct/run_config.hpp"
#include "simct/sim_server.hpp"
#include "simct/simulator.hpp"

#ifndef SIMCT_VERSION
#define SIMCT_VERSION "0.0.0"
#endif

namespace simct::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInconsistent = 1;
inline constexpr int kExitError = 2;

inline std::string fmt(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

inline std::string fixed(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

// Flags shared by every command; they override the config file.
struct Overrides {
  std::string config;
  std::optional<std::string> queries, model, endpoint_a, endpoint_b, model_id_a, model_id_b, report;
  std::optional<double> alpha, lambda;
  std::optional<std::uint64_t> seed;
  std::optional<int> parallelism;
  std::optional<std::string> reading;
  std::optional<double> margin;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "YAML run configuration");
    app->add_option("--queries", queries, "queries JSONL");
    app->add_option("--model", model, "classifier model file");
    app->add_option("--endpoint-a", endpoint_a, "base URL of model A");
    app->add_option("--endpoint-b", endpoint_b, "base URL of model B");
    app->add_option("--model-id-a", model_id_a, "model id sent to endpoint A");
    app->add_option("--model-id-b", model_id_b, "model id sent to endpoint B");
    app->add_option("--alpha", alpha, "significance level");
    app->add_option("--lambda", lambda, "threshold baseline lambda");
    app->add_option("--seed", seed, "seed");
    app->add_option("--parallelism", parallelism, "request and scoring parallelism");
    app->add_option("--report", report, "report path");
    app->add_option("--reading", reading, "equivalence or complement");
    app->add_option("--margin", margin, "equivalence margin on the CT scale");
  }

  RunConfig resolve() const {
    RunConfig c = config.empty() ? RunConfig{} : load_config(config);
    if (queries) c.paths.queries = *queries;
    if (model) c.paths.model = *model;
    if (report) c.paths.report = *report;
    auto endpoint = [](std::optional<EndpointConfig>& slot, const std::optional<std::string>& url,
                       const std::optional<std::string>& id, const char* fallback) {
      if (!url && !id) return;
      if (!slot) {
        slot.emplace();
        slot->endpoint.model_id = fallback;
      }
      if (url) {
        slot->endpoint.base_url = *url;
        slot->simulated.reset();
      }
      if (id) slot->endpoint.model_id = *id;
    };
    endpoint(c.endpoint_a, endpoint_a, model_id_a, "model-a");
    endpoint(c.endpoint_b, endpoint_b, model_id_b, "model-b");
    if (alpha) c.alpha = *alpha;
    if (lambda) c.lambda = *lambda;
    if (seed) c.seed = *seed;
    if (parallelism) c.parallelism = *parallelism;
    if (reading) c.reading = model_test::reading_from_string(*reading);
    if (margin) c.equivalence_margin = *margin;
    return config_from_json(to_json(c));  // re-validates
  }
};

// Sends simulated endpoints to the in-process simulator and everything else
// over HTTP.
class EndpointRouter final : public harness::Generator {
 public:
  void add(const EndpointConfig& c) {
    if (!c.simulated) return;
    sim_.add(c.endpoint.model_id, *c.simulated);
    simulated_.insert(c.endpoint.model_id);
  }

  std::string generate(const harness::ModelEndpoint& e, const std::string& prompt, const Query& q,
                       int sample_index) override {
    const std::string base = e.model_id.substr(0, e.model_id.rfind("@t="));
    if (simulated_.count(e.model_id) || simulated_.count(base))
      return sim_.generate(e, prompt, q, sample_index);
    return http_.generate(e, prompt, q, sample_index);
  }

 private:
  harness::SimulatedGenerator sim_;
  harness::ChatCompletionClient http_;
  std::set<std::string> simulated_;
};

inline const std::string& require(const std::string& value, const char* what) {
  if (value.empty()) throw InvalidArgument(std::string("missing ") + what);
  return value;
}

inline const EndpointConfig& require(const std::optional<EndpointConfig>& e, const char* what) {
  if (!e) throw InvalidArgument(std::string("missing ") + what);
  return *e;
}

inline void write_text(const std::string& path, const std::string& text) {
  if (const auto dir = std::filesystem::path(path).parent_path(); !dir.empty())
    std::filesystem::create_directories(dir);
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << text;
  if (!out) throw InvalidArgument("write failed: " + path);
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidData("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline nlohmann::json run_metadata(const RunConfig& c, const std::string& command) {
  return {{"command", command},
          {"config_hash", config_hash(c)},
          {"simct_version", SIMCT_VERSION},
          {"feature_layout", kFeatureLayoutVersion},
          {"model_format_version", 1}};
}

// ---- craft ----------------------------------------------------------------

inline int cmd_craft(const RunConfig& c, const std::string& out_path, const std::string& transcript_path,
                     std::ostream& out) {
  const auto recipe = harness::recipe_from_string(c.recipe);
  const auto queries = jsonl::read<Query>(require(c.paths.queries, "queries file (--queries)"));
  std::vector<harness::ModelEndpoint> endpoints;
  EndpointRouter router;
  const auto& a = require(c.endpoint_a, "endpoint A (--endpoint-a or endpoints.a)");
  router.add(a);
  endpoints.push_back(a.endpoint);
  if (recipe == harness::Recipe::different_models) {
    const auto& b = require(c.endpoint_b, "endpoint B (--endpoint-b or endpoints.b)");
    router.add(b);
    endpoints.push_back(b.endpoint);
  }
  harness::CraftOptions opt;
  opt.second_temperature = c.second_temperature;
  opt.request_parallelism = c.parallelism;
  opt.retry = c.retry;
  std::optional<jsonl::AppendWriter> transcript;
  if (!transcript_path.empty()) transcript.emplace(transcript_path);
  const auto result = harness::craft_pairs(queries, endpoints, recipe, router, opt,
                                           transcript ? &*transcript : nullptr);
  jsonl::write(require(out_path, "pairs output (--out or paths.pairs)"), result.pairs);
  std::map<std::string, std::size_t> counts;
  for (const auto& p : result.pairs) ++counts[to_string(p.provenance)];
  out << "wrote " << result.pairs.size() << " pairs to " << out_path << "\n";
  for (const auto& [k, v] : counts) out << "  " << k << ": " << v << "\n";
  if (!result.gaps.empty()) out << "  gaps: " << result.gaps.size() << "\n";
  return kExitOk;
}

// ---- train ----------------------------------------------------------------

inline int cmd_train(const RunConfig& c, std::ostream& out) {
  const auto pairs = jsonl::read<LabeledPair>(require(c.paths.pairs, "pairs file (--pairs)"));
  const dense::EmbeddingProvider provider(c.provider);
  const auto data = bench::featurize(pairs, provider);
  gbdt::TrainReport rep;
  const auto model = gbdt::train(data, c.gbdt_params(), c.validation_fraction, &rep);
  gbdt::save_model(model, require(c.paths.model, "model output (--model)"));
  out << "trained " << model.trees.size() << " trees on " << rep.train_rows << " rows ("
      << rep.validation_rows << " held out)\n";
  if (rep.early_stopping_active)
    out << "validation AUC: " << fixed(rep.best_validation_auc) << "\n";
  else
    out << "validation AUC: n/a (validation split has one class)\n";
  out << "model written to " << c.paths.model << "\n";
  return kExitOk;
}

// ---- test -----------------------------------------------------------------

inline nlohmann::json test_report_json(const model_test::TestReport& r, const std::string& model_a,
                                       const std::string& model_b, const nlohmann::json& run) {
  nlohmann::json j = model_test::to_json(r);
  j["model_a"] = model_a;
  j["model_b"] = model_b;
  j["run"] = run;
  return j;
}

inline int cmd_test(const RunConfig& c, const std::string& mode_flag, std::ostream& out) {
  // Load the model before any traffic is generated.
  const auto model = gbdt::load_model(require(c.paths.model, "model file (--model)"));
  const auto queries = jsonl::read<Query>(require(c.paths.queries, "queries file (--queries)"));
  std::string mode = mode_flag;
  if (mode == "auto") mode = (c.endpoint_a && c.endpoint_b) ? "live" : "offline";
  if (mode != "live" && mode != "offline") throw InvalidArgument("--mode must be live, offline or auto");

  std::string transcript = c.paths.responses;
  if (mode == "live") {
    const auto& a = require(c.endpoint_a, "endpoint A");
    const auto& b = require(c.endpoint_b, "endpoint B");
    if (transcript.empty())
      transcript = c.paths.report.empty() ? "transcript.jsonl" : c.paths.report + ".transcript.jsonl";
    if (const auto dir = std::filesystem::path(transcript).parent_path(); !dir.empty())
      std::filesystem::create_directories(dir);
    EndpointRouter router;
    router.add(a);
    router.add(b);
    harness::CollectionPlan plan;
    plan.queries = queries;
    plan.endpoint_a = a.endpoint;
    plan.endpoint_b = b.endpoint;
    plan.request_parallelism = c.parallelism;
    plan.retry = c.retry;
    jsonl::AppendWriter writer(transcript);
    jsonl::AppendWriter gaps(transcript + ".gaps.jsonl");
    const auto collected = harness::collect_triplets(plan, router, &writer, &gaps);
    out << "collected " << collected.triplets.size() << " triplets into " << transcript;
    if (!collected.gaps.empty()) out << " (" << collected.gaps.size() << " gaps)";
    out << "\n";
  }

  // Scoring always runs from the persisted transcript.
  const auto responses = jsonl::read<Response>(require(transcript, "transcript (paths.responses)"));
  std::string model_a, model_b;
  if (c.endpoint_a && c.endpoint_b) {
    model_a = c.endpoint_a->endpoint.model_id;
    model_b = c.endpoint_b->endpoint.model_id;
  } else {
    std::tie(model_a, model_b) = harness::infer_models(responses);
  }
  std::vector<std::string> missing;
  const auto triplets = harness::triplets_from_responses(queries, responses, model_a, model_b, &missing);
  if (triplets.size() < 2) throw InvalidData("fewer than two complete triplets in " + transcript);
  const dense::EmbeddingProvider provider(c.provider);
  const auto items = batch_response_ct(model, provider, triplets, c.parallelism);
  std::vector<std::string> excluded;
  const auto scores = paired_scores(items, &excluded, triplets);
  auto report = model_test::run_model_wise(scores, c.test_options());
  report.excluded_queries = missing;
  report.excluded_queries.insert(report.excluded_queries.end(), excluded.begin(), excluded.end());

  nlohmann::json run = run_metadata(c, "test");
  run["mode"] = mode;
  const auto doc = test_report_json(report, model_a, model_b, run);
  if (!c.paths.report.empty()) write_text(c.paths.report, doc.dump(2) + "\n");
  out << "verdict: " << model_test::to_string(report.verdict) << " (p_simct " << fmt(report.p_simct, 4)
      << ", confidence " << fixed(report.confidence, 4) << ", n " << report.n << ", "
      << model_test::to_string(report.reading) << " reading)\n";
  if (!report.excluded_queries.empty()) out << "excluded queries: " << report.excluded_queries.size() << "\n";
  return report.verdict == model_test::Verdict::consistent ? kExitOk : kExitInconsistent;
}

// ---- threshold --------------------------------------------------------------

// A CT score file is a test report (per_query ct_ab) or JSONL holding one
// number or one {"ct": x} / {"ct_ab": x} object per line.
inline std::vector<double> read_scores(const std::string& path) {
  const std::string text = read_text(path);
  std::vector<double> out;
  try {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
      auto doc = nlohmann::json::parse(text, nullptr, false);
      if (!doc.is_discarded() && doc.is_object() && doc.contains("per_query")) {
        for (const auto& q : doc.at("per_query")) out.push_back(q.at("ct_ab").get<double>());
        return out;
      }
    }
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      const auto j = nlohmann::json::parse(line);
      if (j.is_number())
        out.push_back(j.get<double>());
      else
        out.push_back(j.contains("ct") ? j.at("ct").get<double>() : j.at("ct_ab").get<double>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidData(path + ": " + e.what());
  }
  for (double v : out)
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidData(path + ": CT scores must lie in [0,1]");
  return out;
}

inline int cmd_threshold(const RunConfig& c, const std::optional<std::string>& sweep, std::ostream& out) {
  const auto scores = read_scores(require(c.paths.scores, "score file (--scores)"));
  if (scores.empty()) throw InvalidData("score file " + c.paths.scores + " is empty");
  model_test::ThresholdConfig tc;
  tc.lambda_response = c.lambda;
  const auto r = model_test::threshold_consistency(scores, tc);
  if (sweep) {
    std::ostringstream csv;
    csv << "lambda,ratio,verdict\n";
    for (int k = 1; k <= 9; ++k) {
      model_test::ThresholdConfig s;
      s.lambda_response = k / 10.0;
      const auto sr = model_test::threshold_consistency(scores, s);
      csv << fixed(s.lambda_response, 1) << "," << fixed(sr.ratio, 6) << "," << model_test::to_string(sr.verdict)
          << "\n";
    }
    if (sweep->empty() || *sweep == "-")
      out << csv.str();
    else
      write_text(*sweep, csv.str());
  }
  const nlohmann::json doc = {{"verdict", model_test::to_string(r.verdict)},
                              {"ratio", r.ratio},
                              {"lambda", tc.lambda_response},
                              {"majority_cut", tc.majority_cut},
                              {"n", scores.size()},
                              {"run", run_metadata(c, "threshold")}};
  if (!c.paths.report.empty()) write_text(c.paths.report, doc.dump(2) + "\n");
  out << "threshold verdict: " << model_test::to_string(r.verdict) << " (ratio " << fixed(r.ratio, 4)
      << " at lambda " << fixed(tc.lambda_response, 2) << ", n " << scores.size() << ")\n";
  return r.verdict == model_test::Verdict::consistent ? kExitOk : kExitInconsistent;
}

// ---- report -----------------------------------------------------------------

inline int cmd_report(const std::string& path, std::ostream& out) {
  const std::string text = read_text(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidData(path + ": " + e.what());
  }
  const auto r = model_test::report_from_json(doc);
  out << "models     " << doc.value("model_a", std::string("?")) << " vs " << doc.value("model_b", std::string("?"))
      << "\n";
  out << "verdict    " << model_test::to_string(r.verdict) << "\n";
  out << "confidence " << fixed(r.confidence, 4) << "\n";
  out << "p_simct    " << fmt(r.p_simct, 6) << " (" << model_test::to_string(r.reading) << " reading, alpha "
      << fmt(r.alpha) << ")\n";
  out << "p_equal    " << fmt(r.p_equal_means, 6) << "  t " << fmt(r.t_statistic, 6) << "  n " << r.n << "\n";
  if (!r.excluded_queries.empty()) {
    out << "excluded   ";
    for (std::size_t i = 0; i < r.excluded_queries.size(); ++i) out << (i ? ", " : "") << r.excluded_queries[i];
    out << "\n";
  }
  std::size_t width = 8;
  for (const auto& q : r.per_query) width = std::max(width, q.query_id.size());
  out << "\n" << std::left << std::setw(static_cast<int>(width)) << "query" << "  ct_ab   ct_aa   diff\n";
  for (const auto& q : r.per_query)
    out << std::left << std::setw(static_cast<int>(width)) << q.query_id << "  " << fixed(q.ct_ab, 4) << "  "
        << fixed(q.ct_aa, 4) << "  " << std::showpos << fixed(q.ct_ab - q.ct_aa, 4) << std::noshowpos << "\n";
  return r.verdict == model_test::Verdict::consistent ? kExitOk : kExitInconsistent;
}

// ---- simulator helpers --------------------------------------------------------

struct SimFlags {
  std::uint64_t family_seed = 1;
  double temperature = 0.7;
  double vocab_shift = 0.0;
  double flip_prob = 0.1;
  int verbosity = 40;

  void attach(CLI::App* app) {
    app->add_option("--family-seed", family_seed, "simulated model family");
    app->add_option("--temperature", temperature, "default temperature");
    app->add_option("--vocab-shift", vocab_shift, "phrase table drift in [0,1]");
    app->add_option("--flip-prob", flip_prob, "closed-end answer flip probability");
    app->add_option("--verbosity", verbosity, "open-end answer length");
  }

  sim::SyntheticModelSpec spec() const {
    sim::SyntheticModelSpec s;
    s.family_seed = family_seed;
    s.temperature_analog = temperature;
    s.vocab_shift = vocab_shift;
    s.closed_answer_flip_prob = flip_prob;
    s.verbosity = verbosity;
    return s;
  }
};

inline int cmd_serve_sim(const RunConfig& c, const SimFlags& flags, const std::string& host, int port,
                         std::uint64_t stream_id, const std::string& token_env, std::ostream& out) {
  std::vector<Query> queries;
  if (!c.paths.queries.empty()) queries = jsonl::read<Query>(c.paths.queries);
  sim::ServerOptions opt;
  opt.host = host;
  opt.port = port;
  opt.stream_id = stream_id;
  if (!token_env.empty()) {
    const auto token = http::env_token(token_env);
    if (!token) throw InvalidArgument("environment variable " + token_env + " is not set");
    opt.required_token = *token;
  }
  sim::SimServer server(flags.spec(), std::move(queries), opt);
  const int bound = server.start();
  out << "serving simulated model on http://" << host << ":" << bound << "/v1" << std::endl;
  server.wait();
  return kExitOk;
}

inline int cmd_sim_pairs(const RunConfig& c, const std::string& out_path, std::ostream& out) {
  bench::TrainingCraftConfig tc;
  tc.seed = c.seed;
  const auto pairs = bench::craft_training_pairs(tc);
  jsonl::write(require(out_path, "pairs output (--out)"), pairs);
  std::map<std::string, std::size_t> counts;
  for (const auto& p : pairs) ++counts[to_string(p.provenance)];
  out << "wrote " << pairs.size() << " pairs to " << out_path << "\n";
  for (const auto& [k, v] : counts) out << "  " << k << ": " << v << "\n";
  return kExitOk;
}

inline int cmd_bench(const RunConfig& c, int seeds, bool use_type, std::ostream& out) {
  if (seeds < 1) throw InvalidArgument("--seeds must be >= 1");
  double tsum = 0.0, hsum = 0.0;
  for (int k = 0; k < seeds; ++k) {
    bench::BenchmarkConfig bc;
    bc.master_seed = c.seed + static_cast<std::uint64_t>(k);
    bc.use_type = use_type;
    bc.test = c.test_options();
    bc.threshold.lambda_response = c.lambda;
    bc.params = c.gbdt_params();
    bc.provider = c.provider;
    const auto r = bench::run_benchmark(bc);
    out << "seed " << bc.master_seed << ": t-test " << fixed(r.ttest_accuracy(), 2) << ", threshold "
        << fixed(r.threshold_accuracy(), 2) << ", classifier AUC " << fixed(r.training_auc, 3) << "\n";
    tsum += r.ttest_accuracy();
    hsum += r.threshold_accuracy();
  }
  out << "mean accuracy: t-test " << fixed(tsum / seeds, 3) << ", threshold " << fixed(hsum / seeds, 3) << "\n";
  return kExitOk;
}

// ---- entry point ------------------------------------------------------------

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"SimCT consistency testing for deployed language models", "simct"};
  app.require_subcommand(1);
  app.set_version_flag("--version", SIMCT_VERSION);

  Overrides ov;
  std::string out_path, transcript_path, mode = "auto", pairs_path, scores_path;
  std::optional<std::string> recipe, sweep;
  std::optional<double> second_temperature;
  std::string host = "127.0.0.1", token_env;
  int port = 0, seeds = 5;
  std::uint64_t stream_id = 0;
  bool no_type = false;
  SimFlags sim_flags;

  auto* craft = app.add_subcommand("craft", "collect labeled response pairs");
  ov.attach(craft);
  craft->add_option("--recipe", recipe, "same_model_twice, different_models or temperature_shift");
  craft->add_option("--second-temperature", second_temperature, "temperature of the shifted twin");
  craft->add_option("--out", out_path, "pairs JSONL to write");
  craft->add_option("--transcript", transcript_path, "also persist raw responses here");

  auto* train = app.add_subcommand("train", "train the response-wise classifier");
  ov.attach(train);
  train->add_option("--pairs", pairs_path, "labeled pairs JSONL");

  auto* test = app.add_subcommand("test", "model-wise consistency test");
  ov.attach(test);
  test->add_option("--responses", transcript_path, "transcript JSONL (input offline, output live)");
  test->add_option("--mode", mode, "live, offline or auto")->check(CLI::IsMember({"live", "offline", "auto"}));

  auto* thr = app.add_subcommand("threshold", "threshold baseline over CT scores");
  ov.attach(thr);
  thr->add_option("--scores", scores_path, "CT score file or test report");
  thr->add_option("--sweep", sweep, "write the lambda sweep CSV here (- for stdout)")->expected(0, 1);

  auto* rep = app.add_subcommand("report", "render a test report");
  std::string report_in;
  rep->add_option("report", report_in, "report JSON")->required();

  auto* serve = app.add_subcommand("serve-sim", "serve a simulated model over the chat-completion API");
  ov.attach(serve);
  sim_flags.attach(serve);
  serve->add_option("--host", host, "bind address");
  serve->add_option("--port", port, "port, 0 picks one");
  serve->add_option("--stream-id", stream_id, "separates draws of servers sharing a spec");
  serve->add_option("--token-env", token_env, "require the bearer token held in this variable");

  auto* simpairs = app.add_subcommand("sim-pairs", "write the simulator training set");
  ov.attach(simpairs);
  simpairs->add_option("--out", out_path, "pairs JSONL to write")->required();

  auto* benchcmd = app.add_subcommand("bench", "run the simulator benchmark");
  ov.attach(benchcmd);
  benchcmd->add_option("--seeds", seeds, "number of master seeds");
  benchcmd->add_flag("--no-type", no_type, "drop the query type feature");

  auto* show = app.add_subcommand("config", "print the effective configuration");
  ov.attach(show);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (rep->parsed()) return cmd_report(report_in, out);
    RunConfig c = ov.resolve();
    if (craft->parsed()) {
      if (recipe) c.recipe = *recipe;
      if (second_temperature) c.second_temperature = *second_temperature;
      if (out_path.empty()) out_path = c.paths.pairs;
      return cmd_craft(c, out_path, transcript_path, out);
    }
    if (train->parsed()) {
      if (!pairs_path.empty()) c.paths.pairs = pairs_path;
      return cmd_train(c, out);
    }
    if (test->parsed()) {
      if (!transcript_path.empty()) c.paths.responses = transcript_path;
      return cmd_test(c, mode, out);
    }
    if (thr->parsed()) {
      if (!scores_path.empty()) c.paths.scores = scores_path;
      return cmd_threshold(c, sweep, out);
    }
    if (serve->parsed()) return cmd_serve_sim(c, sim_flags, host, port, stream_id, token_env, out);
    if (simpairs->parsed()) return cmd_sim_pairs(c, out_path, out);
    if (benchcmd->parsed()) return cmd_bench(c, seeds, !no_type, out);
    if (show->parsed()) {
      out << to_json(c).dump(2) << "\n";
      return kExitOk;
    }
  } catch (const std::exception& e) {
    err << "simct: error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace simct::cli

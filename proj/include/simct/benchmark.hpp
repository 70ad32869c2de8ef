// Copyright 2026 The SimCT Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

// Offline end-to-end run of the protocol on simulated model pairs: craft a
// labeled training set from simulated families, train the response-wise
// classifier, then judge every benchmark scenario with both the paired
// t-test and the threshold baseline.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "simct/collection_harness.hpp"
#include "simct/dense_similarity.hpp"
#include "simct/features.hpp"
#include "simct/gbdt.hpp"
#include "simct/model_test.hpp"
#include "simct/response_test.hpp"
#include "simct/simulator.hpp"

namespace simct::bench {

struct TrainingCraftConfig {
  std::uint64_t seed = 1;
  int families = 8;
  int queries = 250;
  // Pairs per query: same_model_twice, different_models, temperature_shift.
  int same_per_query = 4;
  int different_per_query = 2;
  int shift_per_query = 2;
};

// Labeled pairs from simulated families, crafted through the harness.
inline std::vector<LabeledPair> craft_training_pairs(const TrainingCraftConfig& cfg) {
  CounterRng rng(mix({cfg.seed, 0x7EA1}));
  std::vector<sim::SyntheticModelSpec> families;
  harness::SimulatedGenerator gen;
  std::vector<harness::ModelEndpoint> endpoints;
  for (int f = 0; f < cfg.families; ++f) {
    families.push_back(sim::random_spec(rng));
    harness::ModelEndpoint e;
    e.model_id = "train-family-" + std::to_string(f);
    e.base_url = "sim://";
    e.temperature = families.back().temperature_analog;
    gen.add(e.model_id, families.back());
    endpoints.push_back(e);
  }
  const auto queries = sim::synth_queries(static_cast<std::size_t>(cfg.queries),
                                          mix({cfg.seed, 0x7EA2}), 0.5, 0.0, "train");
  harness::CraftOptions opt;
  opt.request_parallelism = 1;
  std::vector<LabeledPair> out;
  const auto nf = static_cast<std::uint64_t>(cfg.families);
  for (const auto& q : queries) {
    const std::vector<Query> one{q};
    for (int k = 0; k < cfg.same_per_query; ++k) {
      const auto& e = endpoints[rng.below(nf)];
      auto r = harness::craft_pairs(one, {e}, harness::Recipe::same_model_twice, gen, opt);
      out.insert(out.end(), r.pairs.begin(), r.pairs.end());
    }
    for (int k = 0; k < cfg.different_per_query; ++k) {
      const auto i = rng.below(nf);
      const auto j = (i + 1 + rng.below(nf - 1)) % nf;
      auto r = harness::craft_pairs(one, {endpoints[i], endpoints[j]},
                                    harness::Recipe::different_models, gen, opt);
      out.insert(out.end(), r.pairs.begin(), r.pairs.end());
    }
    for (int k = 0; k < cfg.shift_per_query; ++k) {
      const auto& e = endpoints[rng.below(nf)];
      const double delta = 0.4 + 0.3 * rng.uniform();
      harness::CraftOptions shifted = opt;
      shifted.second_temperature =
          std::max(0.0, e.temperature > 0.65 ? e.temperature - delta : e.temperature + delta);
      auto r = harness::craft_pairs(one, {e}, harness::Recipe::temperature_shift, gen, shifted);
      out.insert(out.end(), r.pairs.begin(), r.pairs.end());
    }
  }
  return out;
}

inline gbdt::TrainingSet featurize(const std::vector<LabeledPair>& pairs,
                                   const dense::EmbeddingProvider& provider) {
  gbdt::TrainingSet data;
  for (const auto& p : pairs)
    data.add(extract_features(p.query, p.resp_x, p.resp_y, provider), p.label);
  return data;
}

struct BenchmarkConfig {
  std::uint64_t master_seed = 1;
  int n_consistent = 10;
  int n_inconsistent = 10;
  int queries_per_scenario = 100;
  bool use_type = true;
  model_test::TestOptions test;
  model_test::ThresholdConfig threshold;
  gbdt::Params params;
  double validation_fraction = 0.2;
  dense::ProviderConfig provider;
  TrainingCraftConfig training;
  int parallelism = 1;
};

struct ScenarioOutcome {
  sim::SimScenario scenario;
  model_test::TestReport report;
  model_test::ThresholdResult threshold;

  bool truth_consistent() const { return scenario.ground_truth == sim::GroundTruth::consistent; }
  bool ttest_correct() const {
    return (report.verdict == model_test::Verdict::consistent) == truth_consistent();
  }
  bool threshold_correct() const {
    return (threshold.verdict == model_test::Verdict::consistent) == truth_consistent();
  }
};

struct BenchmarkResult {
  double training_auc = 0.0;  // on the held-out validation rows
  std::vector<ScenarioOutcome> outcomes;

  double ttest_accuracy() const {
    if (outcomes.empty()) return 0.0;
    double hits = 0;
    for (const auto& o : outcomes) hits += o.ttest_correct() ? 1 : 0;
    return hits / static_cast<double>(outcomes.size());
  }
  double threshold_accuracy() const {
    if (outcomes.empty()) return 0.0;
    double hits = 0;
    for (const auto& o : outcomes) hits += o.threshold_correct() ? 1 : 0;
    return hits / static_cast<double>(outcomes.size());
  }
};

inline gbdt::Model train_for_benchmark(const BenchmarkConfig& cfg, const dense::EmbeddingProvider& provider,
                                       double* validation_auc = nullptr) {
  TrainingCraftConfig tc = cfg.training;
  tc.seed = mix({cfg.master_seed, 0xC4AF7});
  const auto data = featurize(craft_training_pairs(tc), provider);
  gbdt::Params params = cfg.params;
  if (!cfg.use_type) params.excluded_features = {static_cast<int>(kQtypeFeature)};
  gbdt::TrainReport rep;
  auto model = gbdt::train(data, params, cfg.validation_fraction, &rep);
  if (validation_auc) *validation_auc = rep.best_validation_auc;
  return model;
}

inline ScenarioOutcome evaluate_scenario(const sim::SimScenario& sc, std::size_t index,
                                         const std::vector<Query>& queries,
                                         const gbdt::Model& model,
                                         const dense::EmbeddingProvider& provider,
                                         const BenchmarkConfig& cfg) {
  harness::SimulatedGenerator gen;
  harness::CollectionPlan plan;
  plan.queries = queries;
  plan.endpoint_a.model_id = "scenario-" + std::to_string(index) + "-a";
  plan.endpoint_a.base_url = "sim://";
  plan.endpoint_a.temperature = sc.spec_a.temperature_analog;
  plan.endpoint_b.model_id = "scenario-" + std::to_string(index) + "-b";
  plan.endpoint_b.base_url = "sim://";
  plan.endpoint_b.temperature = sc.spec_b.temperature_analog;
  plan.request_parallelism = 1;
  gen.add(plan.endpoint_a.model_id, sc.spec_a);
  gen.add(plan.endpoint_b.model_id, sc.spec_b);
  const auto collected = harness::collect_triplets(plan, gen);
  const auto items = batch_response_ct(model, provider, collected.triplets, cfg.parallelism);
  std::vector<std::string> excluded;
  const auto scores = paired_scores(items, &excluded, collected.triplets);
  ScenarioOutcome out;
  out.scenario = sc;
  out.report = model_test::run_model_wise(scores, cfg.test);
  out.report.excluded_queries = excluded;
  std::vector<double> ab;
  for (const auto& s : scores) ab.push_back(s.ct_ab);
  out.threshold = model_test::threshold_consistency(ab, cfg.threshold);
  return out;
}

inline BenchmarkResult run_benchmark(const BenchmarkConfig& cfg) {
  const dense::EmbeddingProvider provider(cfg.provider);
  BenchmarkResult result;
  const auto model = train_for_benchmark(cfg, provider, &result.training_auc);
  const auto queries = sim::synth_queries(static_cast<std::size_t>(cfg.queries_per_scenario),
                                          mix({cfg.master_seed, 0xE7A1}), 0.5, 0.0, "bench");
  const auto scenarios = sim::generate_benchmark(cfg.n_consistent, cfg.n_inconsistent, queries,
                                                 mix({cfg.master_seed, 0xE7A2}));
  for (std::size_t i = 0; i < scenarios.size(); ++i)
    result.outcomes.push_back(evaluate_scenario(scenarios[i], i, queries, model, provider, cfg));
  return result;
}

}  // namespace simct::bench

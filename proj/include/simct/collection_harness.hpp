// Copyright 2026 The SimCT Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

// Response collection from model endpoints: reference triplets for the
// model-wise test, labeled training pairs, and the optional LLM judge.
//
// Endpoints speak the chat-completion shape:
//   POST <base_url>/chat/completions
//   {"model", "messages":[{"role":"user","content":<query>}], "temperature", "max_tokens"}
// with extra_params merged into the body and a bearer token read from the
// endpoint's auth_env_var.

#pragma once

#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <ctime>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "simct/error.hpp"
#include "simct/hash.hpp"
#include "simct/http.hpp"
#include "simct/records.hpp"
#include "simct/response_test.hpp"
#include "simct/simulator.hpp"

namespace simct::harness {

struct ModelEndpoint {
  std::string model_id;
  std::string base_url;
  double temperature = 0.7;
  int max_tokens = 512;
  nlohmann::json extra_params = nlohmann::json::object();
  std::string auth_env_var = "SIMCT_API_TOKEN";
  double timeout_s = 60.0;

  std::string describe() const { return "'" + model_id + "' (" + base_url + ")"; }
};

inline void validate(const ModelEndpoint& e) {
  if (e.model_id.empty()) throw InvalidArgument("endpoint model_id must not be empty");
  if (!std::isfinite(e.temperature) || e.temperature < 0.0)
    throw InvalidArgument("endpoint " + e.model_id + ": temperature must be finite and >= 0");
  if (e.max_tokens < 1) throw InvalidArgument("endpoint " + e.model_id + ": max_tokens must be >= 1");
  if (!e.extra_params.is_object())
    throw InvalidArgument("endpoint " + e.model_id + ": extra_params must be an object");
}

// Request parameters recorded alongside every persisted response.
inline nlohmann::json request_params(const ModelEndpoint& e) {
  nlohmann::json p = {{"temperature", e.temperature}, {"max_tokens", e.max_tokens}};
  for (const auto& [k, v] : e.extra_params.items()) p[k] = v;
  return p;
}

inline nlohmann::json chat_request_body(const ModelEndpoint& e, const std::string& prompt) {
  nlohmann::json body = {{"model", e.model_id},
                         {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
                         {"temperature", e.temperature},
                         {"max_tokens", e.max_tokens}};
  for (const auto& [k, v] : e.extra_params.items()) body[k] = v;
  return body;
}

// Source of model outputs. Implementations must be safe to call
// concurrently.
class Generator {
 public:
  virtual ~Generator() = default;
  // sample_index distinguishes repeated requests for the same query.
  virtual std::string generate(const ModelEndpoint& endpoint, const std::string& prompt,
                               const Query& query, int sample_index) = 0;
};

class ChatCompletionClient final : public Generator {
 public:
  std::string generate(const ModelEndpoint& e, const std::string& prompt, const Query&,
                       int) override {
    const auto url = http::join(e.base_url, "chat/completions");
    http::Response res;
    try {
      res = http::post_json(url, chat_request_body(e, prompt), http::env_token(e.auth_env_var),
                            e.timeout_s);
    } catch (const http::TransportError& err) {
      throw GenerationError("endpoint " + e.describe() + ": " + err.what());
    } catch (const InvalidArgument& err) {
      throw GenerationError("endpoint " + e.describe() + ": " + err.what());
    }
    if (res.status != 200)
      throw GenerationError("endpoint " + e.describe() + " returned HTTP " + std::to_string(res.status));
    try {
      const auto doc = nlohmann::json::parse(res.body);
      return doc.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& err) {
      throw GenerationError("endpoint " + e.describe() + ": malformed completion: " + err.what());
    }
  }
};

// In-process simulated endpoints keyed by model_id. The request
// temperature replaces the registered spec's temperature_analog, matching
// the behaviour of the loopback simulation server.
class SimulatedGenerator final : public Generator {
 public:
  void add(const std::string& model_id, sim::SyntheticModelSpec spec,
           std::set<std::string> failing_queries = {}) {
    std::lock_guard lock(mu_);
    models_[model_id] = Entry{spec, std::move(failing_queries)};
  }

  std::string generate(const ModelEndpoint& e, const std::string&, const Query& query,
                       int sample_index) override {
    Entry entry;
    {
      std::lock_guard lock(mu_);
      auto it = models_.find(e.model_id);
      // Temperature-shifted twins ("<id>@t=<tau>") share their base model.
      if (const auto at = e.model_id.rfind("@t="); it == models_.end() && at != std::string::npos)
        it = models_.find(e.model_id.substr(0, at));
      if (it == models_.end()) throw GenerationError("endpoint " + e.describe() + ": unknown simulated model");
      entry = it->second;
    }
    if (entry.failing.count(query.id))
      throw GenerationError("endpoint " + e.describe() + ": simulated failure for " + query.id);
    entry.spec.temperature_analog = e.temperature;
    const std::uint64_t draw = mix({fnv1a64(e.model_id), fnv1a64(query.id),
                                    static_cast<std::uint64_t>(sample_index),
                                    std::bit_cast<std::uint64_t>(e.temperature)});
    return sim::synth_text(entry.spec, query, draw);
  }

 private:
  struct Entry {
    sim::SyntheticModelSpec spec;
    std::set<std::string> failing;
  };
  std::mutex mu_;
  std::map<std::string, Entry> models_;
};

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Gap {
  std::string query_id;
  std::string model_id;
  int sample_index = 0;
  std::string error;
};

inline void to_json(nlohmann::json& j, const Gap& g) {
  j = {{"query_id", g.query_id}, {"model_id", g.model_id},
       {"sample_index", g.sample_index}, {"error", g.error}};
}

struct RetryPolicy {
  int retry_limit = 2;
  std::chrono::milliseconds initial_backoff{200};
};

// Shared plumbing: fetch one response with retries and persist it.
class Fetcher {
 public:
  Fetcher(Generator& gen, RetryPolicy retry, jsonl::AppendWriter* transcript)
      : gen_(gen), retry_(retry), transcript_(transcript) {}

  Response fetch(const ModelEndpoint& e, const Query& q, int sample_index) {
    std::string text = http::with_retries(
        [&] { return gen_.generate(e, q.text, q, sample_index); }, retry_.retry_limit,
        retry_.initial_backoff);
    Response r;
    r.query_id = q.id;
    r.model_id = e.model_id;
    r.sample_index = sample_index;
    r.text = std::move(text);
    r.params = request_params(e);
    r.timestamp = utc_timestamp();
    if (transcript_) transcript_->append(nlohmann::json(r));
    return r;
  }

 private:
  Generator& gen_;
  RetryPolicy retry_;
  jsonl::AppendWriter* transcript_;
};

// Runs fn(i) for i in [0, n) on up to `parallelism` threads.
inline void parallel_for(std::size_t n, int parallelism, const std::function<void(std::size_t)>& fn) {
  const auto workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, parallelism)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) fn(i);
    });
}

struct CollectionPlan {
  std::vector<Query> queries;
  ModelEndpoint endpoint_a;
  ModelEndpoint endpoint_b;
  // The triplet shape is fixed: two samples of A, one of B.
  static constexpr int samples_from_a = 2;
  static constexpr int samples_from_b = 1;
  int request_parallelism = 4;
  RetryPolicy retry;
};

struct CollectionResult {
  std::vector<Triplet> triplets;  // query order, gaps omitted
  std::vector<Gap> gaps;
};

inline void check_gap_budget(std::size_t gaps, std::size_t total, const std::vector<Gap>& list) {
  if (2 * gaps > total) {
    std::string msg = std::to_string(gaps) + " of " + std::to_string(total) +
                      " queries failed (more than half)";
    if (!list.empty()) msg += "; last error: " + list.back().error;
    throw RunError(msg);
  }
}

// Samples r_A, r̄_A, r_B per query in that order. Queries run concurrently up
// to request_parallelism. Every response is appended to `transcript` as it
// arrives; `gap_log` receives one record per failed query.
inline CollectionResult collect_triplets(const CollectionPlan& plan, Generator& gen,
                                         jsonl::AppendWriter* transcript = nullptr,
                                         jsonl::AppendWriter* gap_log = nullptr) {
  if (plan.queries.empty()) throw InvalidArgument("collection plan has no queries");
  validate(plan.endpoint_a);
  validate(plan.endpoint_b);
  if (plan.endpoint_a.model_id == plan.endpoint_b.model_id)
    throw InvalidArgument("endpoint model_ids must be unique within a run");
  std::set<std::string> ids;
  for (const auto& q : plan.queries)
    if (!ids.insert(q.id).second) throw InvalidArgument("duplicate query id " + q.id);

  Fetcher fetcher(gen, plan.retry, transcript);
  std::vector<std::optional<Triplet>> slots(plan.queries.size());
  std::vector<std::optional<Gap>> gap_slots(plan.queries.size());
  parallel_for(plan.queries.size(), plan.request_parallelism, [&](std::size_t i) {
    const Query& q = plan.queries[i];
    const ModelEndpoint* current = &plan.endpoint_a;
    int sample = 0;
    try {
      Triplet t;
      t.query = q;
      t.r_a = fetcher.fetch(plan.endpoint_a, q, 0);
      sample = 1;
      t.r_a_bar = fetcher.fetch(plan.endpoint_a, q, 1);
      current = &plan.endpoint_b;
      sample = 0;
      t.r_b = fetcher.fetch(plan.endpoint_b, q, 0);
      slots[i] = std::move(t);
    } catch (const Error& e) {
      gap_slots[i] = Gap{q.id, current->model_id, sample, e.what()};
    }
  });
  CollectionResult out;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i]) out.triplets.push_back(std::move(*slots[i]));
    if (gap_slots[i]) {
      if (gap_log) gap_log->append(nlohmann::json(*gap_slots[i]));
      out.gaps.push_back(std::move(*gap_slots[i]));
    }
  }
  check_gap_budget(out.gaps.size(), plan.queries.size(), out.gaps);
  return out;
}

// Rebuilds triplets from a persisted transcript. Queries missing any of the
// three responses are returned in `missing`.
inline std::vector<Triplet> triplets_from_responses(const std::vector<Query>& queries,
                                                    const std::vector<Response>& responses,
                                                    const std::string& model_a,
                                                    const std::string& model_b,
                                                    std::vector<std::string>* missing = nullptr) {
  std::map<std::tuple<std::string, std::string, int>, const Response*> index;
  for (const auto& r : responses) {
    if (!index.emplace(std::make_tuple(r.query_id, r.model_id, r.sample_index), &r).second)
      throw InvalidData("duplicate response for (" + r.query_id + ", " + r.model_id + ", " +
                        std::to_string(r.sample_index) + ")");
  }
  std::vector<Triplet> out;
  for (const auto& q : queries) {
    auto a0 = index.find({q.id, model_a, 0});
    auto a1 = index.find({q.id, model_a, 1});
    auto b0 = index.find({q.id, model_b, 0});
    if (a0 == index.end() || a1 == index.end() || b0 == index.end()) {
      if (missing) missing->push_back(q.id);
      continue;
    }
    out.push_back({q, *a0->second, *a1->second, *b0->second});
  }
  return out;
}

// Picks (A, B) model ids from a transcript: A is the model with a second
// sample. Throws when the transcript does not have exactly two models.
inline std::pair<std::string, std::string> infer_models(const std::vector<Response>& responses) {
  std::set<std::string> models, with_second;
  for (const auto& r : responses) {
    models.insert(r.model_id);
    if (r.sample_index == 1) with_second.insert(r.model_id);
  }
  if (models.size() != 2 || with_second.size() != 1)
    throw InvalidData("cannot infer model A/B from transcript; pass model ids explicitly");
  const std::string a = *with_second.begin();
  const std::string b = *models.begin() == a ? *models.rbegin() : *models.begin();
  return {a, b};
}

// ---- training pairs ---------------------------------------------------

enum class Recipe { same_model_twice, different_models, temperature_shift };

inline Recipe recipe_from_string(const std::string& s) {
  if (s == "same_model_twice") return Recipe::same_model_twice;
  if (s == "different_models") return Recipe::different_models;
  if (s == "temperature_shift") return Recipe::temperature_shift;
  throw InvalidArgument("unknown recipe: " + s);
}

struct CraftOptions {
  std::optional<double> second_temperature;  // temperature_shift only
  int request_parallelism = 4;
  RetryPolicy retry;
};

struct CraftResult {
  std::vector<LabeledPair> pairs;  // query order
  std::vector<Gap> gaps;
};

// The temperature-shifted twin of an endpoint, with a distinct model_id so
// transcript keys stay unique.
inline ModelEndpoint shifted_endpoint(const ModelEndpoint& e, double temperature) {
  ModelEndpoint s = e;
  s.temperature = temperature;
  std::ostringstream id;
  id << e.model_id << "@t=" << temperature;
  s.model_id = id.str();
  return s;
}

inline CraftResult craft_pairs(const std::vector<Query>& queries,
                               const std::vector<ModelEndpoint>& endpoints, Recipe recipe,
                               Generator& gen, const CraftOptions& opt = {},
                               jsonl::AppendWriter* transcript = nullptr) {
  if (queries.empty()) throw InvalidArgument("craft_pairs: no queries");
  ModelEndpoint x, y;
  int x_sample = 0, y_sample = 0;
  Provenance prov{};
  switch (recipe) {
    case Recipe::same_model_twice:
      if (endpoints.empty()) throw InvalidArgument("same_model_twice needs one endpoint");
      x = y = endpoints[0];
      y_sample = 1;
      prov = Provenance::same_model_twice;
      break;
    case Recipe::different_models:
      if (endpoints.size() < 2) throw InvalidArgument("different_models needs two endpoints");
      x = endpoints[0];
      y = endpoints[1];
      if (x.model_id == y.model_id) throw InvalidArgument("different_models needs distinct model_ids");
      prov = Provenance::different_models;
      break;
    case Recipe::temperature_shift:
      if (endpoints.empty() || !opt.second_temperature)
        throw InvalidArgument("temperature_shift needs one endpoint and a second temperature");
      if (*opt.second_temperature == endpoints[0].temperature)
        throw InvalidArgument("temperature_shift needs two different temperatures");
      x = endpoints[0];
      y = shifted_endpoint(x, *opt.second_temperature);
      prov = Provenance::temperature_shift;
      break;
  }
  validate(x);
  validate(y);
  Fetcher fetcher(gen, opt.retry, transcript);
  std::vector<std::optional<LabeledPair>> slots(queries.size());
  std::vector<std::optional<Gap>> gaps(queries.size());
  parallel_for(queries.size(), opt.request_parallelism, [&](std::size_t i) {
    const Query& q = queries[i];
    const ModelEndpoint* current = &x;
    int sample = x_sample;
    try {
      LabeledPair p;
      p.query = q;
      p.resp_x = fetcher.fetch(x, q, x_sample);
      current = &y;
      sample = y_sample;
      p.resp_y = fetcher.fetch(y, q, y_sample);
      p.provenance = prov;
      p.label = label_for(prov);
      slots[i] = std::move(p);
    } catch (const Error& e) {
      gaps[i] = Gap{q.id, current->model_id, sample, e.what()};
    }
  });
  CraftResult out;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    if (slots[i]) out.pairs.push_back(std::move(*slots[i]));
    if (gaps[i]) out.gaps.push_back(std::move(*gaps[i]));
  }
  check_gap_budget(out.gaps.size(), queries.size(), out.gaps);
  return out;
}

// ---- LLM judge ----------------------------------------------------------

inline constexpr const char* kJudgePrompt =
    "Now, here are two paragraphs for you. These two texts are two outputs generated by two "
    "models. These two models may be the same or different. Please confirm if the two models "
    "used to generate these two texts are the same, and give a score between \"0\" and \"1\", "
    "where \"0\" represents that the two models are different and \"1\" represents that the two "
    "models are the same, with the result rounded to three decimal places.\n"
    "Requirement: 1) The score cannot be equal to \"0\" or \"1\"! 2) Provide the reason for "
    "giving this score!\n"
    "You can use the following indicators as a basis for judgment:\n"
    "1. The semantic similarity between two paragraphs of text. Generally, the semantic "
    "similarity between replies obtained from the same question is relatively high.\n"
    "2. Differences in narrative logic between the two texts. Generally, there are significant "
    "differences in the narrative logic of different models, while the narrative logic of the "
    "same model is basically the same.\n"
    "3. The generation quality of two paragraphs of text generally varies among different "
    "models, and the generation quality of the same model is basically similar.\n"
    "4. The generation confidence of two paragraphs of text is generally different for "
    "different models, while the generation confidence of the same model is basically the "
    "same.";

inline std::string judge_prompt(const std::string& r_x, const std::string& r_y) {
  return std::string(kJudgePrompt) + "\n\nText 1:\n" + r_x + "\n\nText 2:\n" + r_y;
}

// First decimal number in the reply, rounded to three places; empty when
// there is none or it is not strictly inside (0,1).
inline std::optional<double> parse_judge_score(const std::string& reply) {
  static const std::regex number(R"((?:^|[^0-9.])(\d+(?:\.\d+)?|\.\d+))");
  std::smatch m;
  if (!std::regex_search(reply, m, number)) return std::nullopt;
  double v = 0.0;
  try {
    v = std::stod(m[1].str());
  } catch (const std::exception&) {
    return std::nullopt;
  }
  v = std::round(v * 1000.0) / 1000.0;
  if (!(v > 0.0 && v < 1.0)) return std::nullopt;
  return v;
}

// Asks the judge once, and once more if the first reply has no valid score.
inline double llm_judge_score(const ModelEndpoint& judge, Generator& gen, const std::string& r_x,
                              const std::string& r_y, RetryPolicy retry = {}) {
  validate(judge);
  const std::string prompt = judge_prompt(r_x, r_y);
  const Query q{"judge-" + std::to_string(fnv1a64(prompt)), prompt, QueryType::open_end};
  std::string last;
  for (int attempt = 0; attempt < 2; ++attempt) {
    try {
      last = http::with_retries([&] { return gen.generate(judge, prompt, q, attempt); },
                                retry.retry_limit, retry.initial_backoff);
    } catch (const Error& e) {
      throw JudgeError(std::string("judge request failed: ") + e.what());
    }
    if (auto score = parse_judge_score(last)) return *score;
  }
  throw JudgeError("judge reply has no score strictly between 0 and 1: '" + last.substr(0, 120) + "'");
}

}  // namespace simct::harness

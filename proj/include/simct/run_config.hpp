// Copyright 2026 The SimCT Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

// Run configuration for the command-line tool. The file is YAML (JSON is
// accepted too, being a subset); the same schema round-trips through JSON.
//
//   seed: 1
//   alpha: 0.05
//   lambda: 0.5
//   parallelism: 4
//   reading: equivalence        # or complement
//   equivalence_margin: 0.1
//   validation_fraction: 0.2
//   paths: {queries, responses, pairs, model, report, scores}
//   provider: {kind: builtin|remote, endpoint_url, ngram_order, dim,
//              max_in_flight, retry_limit, initial_backoff_ms, timeout_s, token_env}
//   endpoints:
//     a: {model_id, base_url, temperature, max_tokens, auth_env_var,
//         timeout_s, extra_params, simulated: {family_seed, ...}}
//     b: {...}
//   retry: {retry_limit, initial_backoff_ms}
//   craft: {recipe, second_temperature}
//   gbdt: {num_leaves, max_depth, ...}   # overrides of the defaults

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <yaml-cpp/yaml.h>
#include <json.hpp>

#include "simct/collection_harness.hpp"
#include "simct/dense_similarity.hpp"
#include "simct/error.hpp"
#include "simct/gbdt.hpp"
#include "simct/hash.hpp"
#include "simct/model_test.hpp"
#include "simct/simulator.hpp"

namespace simct::cli {

struct Paths {
  std::string queries;
  std::string responses;  // transcript JSONL
  std::string pairs;
  std::string model;
  std::string report;
  std::string scores;
};

struct EndpointConfig {
  harness::ModelEndpoint endpoint;
  // Served in-process by the simulator instead of over HTTP.
  std::optional<sim::SyntheticModelSpec> simulated;
};

struct RunConfig {
  Paths paths;
  dense::ProviderConfig provider;
  std::optional<EndpointConfig> endpoint_a;
  std::optional<EndpointConfig> endpoint_b;
  double alpha = 0.05;
  double lambda = 0.5;
  int parallelism = 4;
  std::uint64_t seed = 1;
  model_test::Reading reading = model_test::Reading::equivalence;
  double equivalence_margin = 0.1;
  double validation_fraction = 0.2;
  harness::RetryPolicy retry;
  std::string recipe = "same_model_twice";
  std::optional<double> second_temperature;
  nlohmann::json gbdt_overrides = nlohmann::json::object();

  model_test::TestOptions test_options() const {
    return {alpha, reading, equivalence_margin};
  }

  gbdt::Params gbdt_params() const {
    nlohmann::json j = gbdt::to_json(gbdt::Params{});
    for (const auto& [k, v] : gbdt_overrides.items()) {
      if (!j.contains(k)) throw InvalidArgument("unknown gbdt parameter: " + k);
      j[k] = v;
    }
    gbdt::Params p = gbdt::params_from_json(j);
    if (!gbdt_overrides.contains("seed")) p.seed = seed;
    p.validate();
    return p;
  }
};

// ---- JSON ---------------------------------------------------------------

inline nlohmann::json to_json(const dense::ProviderConfig& p) {
  nlohmann::json j = {
      {"kind", p.kind == dense::ProviderKind::builtin_hashed_ngram ? "builtin" : "remote"},
      {"ngram_order", p.ngram_order},
      {"dim", p.dim},
      {"max_in_flight", p.max_in_flight},
      {"retry_limit", p.retry_limit},
      {"initial_backoff_ms", p.initial_backoff.count()},
      {"timeout_s", p.timeout_s},
      {"token_env", p.token_env}};
  if (p.endpoint_url) j["endpoint_url"] = *p.endpoint_url;
  return j;
}

inline dense::ProviderConfig provider_from_json(const nlohmann::json& j) {
  dense::ProviderConfig p;
  const auto kind = j.value("kind", std::string("builtin"));
  if (kind == "builtin")
    p.kind = dense::ProviderKind::builtin_hashed_ngram;
  else if (kind == "remote")
    p.kind = dense::ProviderKind::remote_endpoint;
  else
    throw InvalidArgument("provider.kind must be builtin or remote");
  if (j.contains("endpoint_url")) p.endpoint_url = j.at("endpoint_url").get<std::string>();
  p.ngram_order = j.value("ngram_order", p.ngram_order);
  p.dim = j.value("dim", p.dim);
  p.max_in_flight = j.value("max_in_flight", p.max_in_flight);
  p.retry_limit = j.value("retry_limit", p.retry_limit);
  p.initial_backoff = std::chrono::milliseconds(j.value("initial_backoff_ms", 100));
  p.timeout_s = j.value("timeout_s", p.timeout_s);
  p.token_env = j.value("token_env", p.token_env);
  return p;
}

inline nlohmann::json to_json(const EndpointConfig& c) {
  const auto& e = c.endpoint;
  nlohmann::json j = {{"model_id", e.model_id},         {"base_url", e.base_url},
                      {"temperature", e.temperature},   {"max_tokens", e.max_tokens},
                      {"extra_params", e.extra_params}, {"auth_env_var", e.auth_env_var},
                      {"timeout_s", e.timeout_s}};
  if (c.simulated) j["simulated"] = sim::to_json(*c.simulated);
  return j;
}

inline EndpointConfig endpoint_from_json(const nlohmann::json& j, const std::string& fallback_id) {
  EndpointConfig c;
  auto& e = c.endpoint;
  e.model_id = j.value("model_id", fallback_id);
  e.base_url = j.value("base_url", std::string());
  e.temperature = j.value("temperature", e.temperature);
  e.max_tokens = j.value("max_tokens", e.max_tokens);
  e.extra_params = j.value("extra_params", nlohmann::json::object());
  e.auth_env_var = j.value("auth_env_var", e.auth_env_var);
  e.timeout_s = j.value("timeout_s", e.timeout_s);
  if (j.contains("simulated")) {
    c.simulated = sim::spec_from_json(j.at("simulated"));
    c.simulated->temperature_analog = e.temperature;
  }
  if (e.base_url.empty() && !c.simulated)
    throw InvalidArgument("endpoint " + e.model_id + ": base_url or simulated section required");
  harness::validate(e);
  return c;
}

inline nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json endpoints = nlohmann::json::object();
  if (c.endpoint_a) endpoints["a"] = to_json(*c.endpoint_a);
  if (c.endpoint_b) endpoints["b"] = to_json(*c.endpoint_b);
  nlohmann::json craft = {{"recipe", c.recipe}};
  if (c.second_temperature) craft["second_temperature"] = *c.second_temperature;
  return {{"seed", c.seed},
          {"alpha", c.alpha},
          {"lambda", c.lambda},
          {"parallelism", c.parallelism},
          {"reading", model_test::to_string(c.reading)},
          {"equivalence_margin", c.equivalence_margin},
          {"validation_fraction", c.validation_fraction},
          {"paths",
           {{"queries", c.paths.queries},
            {"responses", c.paths.responses},
            {"pairs", c.paths.pairs},
            {"model", c.paths.model},
            {"report", c.paths.report},
            {"scores", c.paths.scores}}},
          {"provider", to_json(c.provider)},
          {"endpoints", endpoints},
          {"retry",
           {{"retry_limit", c.retry.retry_limit},
            {"initial_backoff_ms", c.retry.initial_backoff.count()}}},
          {"craft", craft},
          {"gbdt", c.gbdt_overrides}};
}

inline RunConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidArgument("config must be a mapping");
  RunConfig c;
  try {
    c.seed = j.value("seed", c.seed);
    c.alpha = j.value("alpha", c.alpha);
    c.lambda = j.value("lambda", c.lambda);
    c.parallelism = j.value("parallelism", c.parallelism);
    c.reading = model_test::reading_from_string(j.value("reading", std::string("equivalence")));
    c.equivalence_margin = j.value("equivalence_margin", c.equivalence_margin);
    c.validation_fraction = j.value("validation_fraction", c.validation_fraction);
    if (j.contains("paths")) {
      const auto& p = j.at("paths");
      c.paths.queries = p.value("queries", std::string());
      c.paths.responses = p.value("responses", std::string());
      c.paths.pairs = p.value("pairs", std::string());
      c.paths.model = p.value("model", std::string());
      c.paths.report = p.value("report", std::string());
      c.paths.scores = p.value("scores", std::string());
    }
    if (j.contains("provider")) c.provider = provider_from_json(j.at("provider"));
    if (j.contains("endpoints")) {
      const auto& e = j.at("endpoints");
      if (e.contains("a")) c.endpoint_a = endpoint_from_json(e.at("a"), "model-a");
      if (e.contains("b")) c.endpoint_b = endpoint_from_json(e.at("b"), "model-b");
    }
    if (j.contains("retry")) {
      const auto& r = j.at("retry");
      c.retry.retry_limit = r.value("retry_limit", c.retry.retry_limit);
      c.retry.initial_backoff = std::chrono::milliseconds(r.value("initial_backoff_ms", 200));
    }
    if (j.contains("craft")) {
      const auto& k = j.at("craft");
      c.recipe = k.value("recipe", c.recipe);
      if (k.contains("second_temperature"))
        c.second_temperature = k.at("second_temperature").get<double>();
    }
    if (j.contains("gbdt")) c.gbdt_overrides = j.at("gbdt");
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("bad config: ") + e.what());
  }
  if (!(c.alpha >= 0.0 && c.alpha <= 1.0)) throw InvalidArgument("alpha must be in [0,1]");
  if (c.parallelism < 1) throw InvalidArgument("parallelism must be >= 1");
  return c;
}

// ---- YAML -----------------------------------------------------------------

namespace detail {

inline nlohmann::json yaml_scalar(const YAML::Node& n) {
  const std::string s = n.Scalar();
  if (n.Tag() == "!") return s;  // quoted
  if (s == "~" || s == "null" || s.empty()) return nullptr;
  if (s == "true" || s == "True") return true;
  if (s == "false" || s == "False") return false;
  std::size_t used = 0;
  try {
    if (s.find_first_of(".eE") == std::string::npos) {
      const long long v = std::stoll(s, &used);
      if (used == s.size()) return v >= 0 ? nlohmann::json(static_cast<std::uint64_t>(v)) : nlohmann::json(v);
    }
    const double d = std::stod(s, &used);
    if (used == s.size()) return d;
  } catch (const std::exception&) {
  }
  return s;
}

inline nlohmann::json yaml_to_json(const YAML::Node& n) {
  switch (n.Type()) {
    case YAML::NodeType::Map: {
      nlohmann::json j = nlohmann::json::object();
      for (const auto& kv : n) j[kv.first.as<std::string>()] = yaml_to_json(kv.second);
      return j;
    }
    case YAML::NodeType::Sequence: {
      nlohmann::json j = nlohmann::json::array();
      for (const auto& v : n) j.push_back(yaml_to_json(v));
      return j;
    }
    case YAML::NodeType::Scalar:
      return yaml_scalar(n);
    default:
      return nullptr;
  }
}

}  // namespace detail

inline nlohmann::json parse_config_text(const std::string& text) {
  try {
    const auto j = detail::yaml_to_json(YAML::Load(text));
    return j.is_null() ? nlohmann::json::object() : j;
  } catch (const YAML::Exception& e) {
    throw InvalidArgument(std::string("bad config: ") + e.what());
  }
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(parse_config_text(ss.str()));
}

// Hash of the effective configuration, for report metadata. The report
// destination is not part of it.
inline std::string config_hash(const RunConfig& c) {
  nlohmann::json j = to_json(c);
  j["paths"].erase("report");
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << fnv1a64(j.dump());
  return os.str();
}

}  // namespace simct::cli

// Copyright 2026 The SimCT Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

// Serves a synthetic model behind the chat-completion wire shape on
// loopback, so the real HTTP client path can be exercised end to end.

#pragma once

#include <bit>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "simct/error.hpp"
#include "simct/hash.hpp"
#include "simct/records.hpp"
#include "simct/simulator.hpp"

namespace simct::sim {

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 0;  // 0 picks a free port
  // Distinguishes the draw streams of two servers that share a spec.
  std::uint64_t stream_id = 0;
  std::optional<std::string> required_token;
  std::set<std::string> failing_queries;  // answered with HTTP 500
};

class SimServer {
 public:
  SimServer(SyntheticModelSpec spec, std::vector<Query> queries, ServerOptions opt = {})
      : spec_(spec), opt_(std::move(opt)) {
    for (auto& q : queries) by_text_.emplace(q.text, std::move(q));
    server_.Post(R"(.*/chat/completions)", [this](const httplib::Request& req, httplib::Response& res) {
      handle(req, res);
    });
  }

  SimServer(const SimServer&) = delete;
  SimServer& operator=(const SimServer&) = delete;
  ~SimServer() { stop(); }

  // Binds and serves on a background thread; returns the bound port.
  int start() {
    if (opt_.port == 0)
      port_ = server_.bind_to_any_port(opt_.host);
    else
      port_ = server_.bind_to_port(opt_.host, opt_.port) ? opt_.port : -1;
    if (port_ < 0) throw Error("simulation server cannot bind " + opt_.host);
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    return port_;
  }

  // Blocks serving on the calling thread.
  void serve() {
    if (opt_.port == 0)
      port_ = server_.bind_to_any_port(opt_.host);
    else
      port_ = server_.bind_to_port(opt_.host, opt_.port) ? opt_.port : -1;
    if (port_ < 0) throw Error("simulation server cannot bind " + opt_.host);
    server_.listen_after_bind();
  }

  // Blocks until stop() is called from elsewhere.
  void wait() {
    if (thread_.joinable()) thread_.join();
  }

  void stop() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  int port() const noexcept { return port_; }
  std::string base_url() const { return "http://" + opt_.host + ":" + std::to_string(port_) + "/v1"; }
  std::size_t requests_served() const {
    std::lock_guard lock(mu_);
    return served_;
  }

 private:
  void handle(const httplib::Request& req, httplib::Response& res) {
    if (opt_.required_token && req.get_header_value("Authorization") != "Bearer " + *opt_.required_token) {
      res.status = 401;
      res.set_content(R"({"error":{"message":"unauthorized"}})", "application/json");
      return;
    }
    nlohmann::json body;
    std::string content;
    try {
      body = nlohmann::json::parse(req.body);
      content = body.at("messages").back().at("content").get<std::string>();
    } catch (const nlohmann::json::exception&) {
      res.status = 400;
      res.set_content(R"({"error":{"message":"bad request"}})", "application/json");
      return;
    }
    Query q;
    if (auto it = by_text_.find(content); it != by_text_.end()) {
      q = it->second;
    } else {
      q = Query{"h" + std::to_string(fnv1a64(content)), content, QueryType::open_end};
    }
    if (opt_.failing_queries.count(q.id)) {
      res.status = 500;
      res.set_content(R"({"error":{"message":"simulated failure"}})", "application/json");
      return;
    }
    SyntheticModelSpec spec = spec_;
    if (body.contains("temperature") && body["temperature"].is_number())
      spec.temperature_analog = body["temperature"].get<double>();
    std::uint64_t counter = 0;
    {
      std::lock_guard lock(mu_);
      counter = counters_[{q.id, spec.temperature_analog}]++;
      ++served_;
    }
    const std::uint64_t draw = mix({opt_.stream_id, fnv1a64(q.id), counter,
                                    std::bit_cast<std::uint64_t>(spec.temperature_analog)});
    const nlohmann::json out = {
        {"object", "chat.completion"},
        {"model", body.value("model", std::string("simulated"))},
        {"choices", nlohmann::json::array({{{"index", 0},
                                            {"message", {{"role", "assistant"},
                                                         {"content", synth_text(spec, q, draw)}}},
                                            {"finish_reason", "stop"}}})}};
    res.set_content(out.dump(), "application/json");
  }

  SyntheticModelSpec spec_;
  ServerOptions opt_;
  std::map<std::string, Query> by_text_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = -1;
  mutable std::mutex mu_;
  std::map<std::pair<std::string, double>, std::uint64_t> counters_;
  std::size_t served_ = 0;
};

}  // namespace simct::sim

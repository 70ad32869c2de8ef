// Copyright 2026 The SimCT Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

// Minimal JSON-over-HTTP client helpers shared by the embedding provider,
// the chat-completion client and the judge.

#pragma once

#include <chrono>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "simct/error.hpp"

namespace simct::http {

class TransportError : public Error {
 public:
  using Error::Error;
};

struct Url {
  std::string origin;  // scheme://host[:port]
  std::string path;    // always starts with '/'
};

inline Url parse_url(std::string_view url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos)
    throw InvalidArgument("url without scheme: " + std::string(url));
  const auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https")
    throw InvalidArgument("unsupported url scheme: " + std::string(url));
  const auto rest = url.substr(scheme_end + 3);
  const auto slash = rest.find('/');
  Url out;
  out.origin = std::string(url.substr(0, scheme_end + 3)) +
               std::string(rest.substr(0, slash));
  out.path = slash == std::string_view::npos ? "/" : std::string(rest.substr(slash));
  if (out.origin.size() == scheme_end + 3)
    throw InvalidArgument("url without host: " + std::string(url));
  return out;
}

// Joins a base URL and a relative path with exactly one '/'.
inline std::string join(std::string_view base, std::string_view suffix) {
  std::string out(base);
  while (!out.empty() && out.back() == '/') out.pop_back();
  if (!suffix.empty() && suffix.front() != '/') out.push_back('/');
  out += suffix;
  return out;
}

inline std::optional<std::string> env_token(const std::string& var) {
  if (var.empty()) return std::nullopt;
  const char* v = std::getenv(var.c_str());
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::string(v);
}

struct Response {
  int status = 0;
  std::string body;
};

// POSTs `body` as JSON. Throws TransportError when no HTTP response arrives.
inline Response post_json(const std::string& url, const nlohmann::json& body,
                          const std::optional<std::string>& bearer,
                          double timeout_s = 60.0) {
  const Url u = parse_url(url);
  httplib::Client cli(u.origin);
  const auto secs = static_cast<time_t>(timeout_s);
  const auto usecs = static_cast<time_t>((timeout_s - static_cast<double>(secs)) * 1e6);
  cli.set_connection_timeout(secs, usecs);
  cli.set_read_timeout(secs, usecs);
  cli.set_write_timeout(secs, usecs);
  httplib::Headers headers;
  if (bearer) headers.emplace("Authorization", "Bearer " + *bearer);
  auto res = cli.Post(u.path, headers, body.dump(), "application/json");
  if (!res) {
    throw TransportError("POST " + url + " failed: " + httplib::to_string(res.error()));
  }
  return {res->status, res->body};
}

// Calls `fn` until it returns, retrying on simct::Error up to `retries`
// extra times with exponential backoff starting at `initial`.
template <typename Fn>
auto with_retries(Fn&& fn, int retries, std::chrono::milliseconds initial) {
  auto delay = initial;
  for (int attempt = 0;; ++attempt) {
    try {
      return fn();
    } catch (const Error&) {
      if (attempt >= retries) throw;
    }
    std::this_thread::sleep_for(delay);
    delay *= 2;
  }
}

}  // namespace simct::http

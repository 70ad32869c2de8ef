// Copyright 2026 The SimCT Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

// Records exchanged through the JSONL files:
//   queries    {"id","text","qtype":0|1}
//   responses  {"query_id","model_id","sample_index","text","params":{...},"timestamp"}
//   pairs      {"query":{...},"resp_x":{...},"resp_y":{...},"label","provenance"}

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "simct/error.hpp"

namespace simct {

enum class QueryType : int { closed_end = 0, open_end = 1 };

struct Query {
  std::string id;
  std::string text;
  QueryType qtype = QueryType::open_end;

  bool operator==(const Query&) const = default;
};

struct Response {
  std::string query_id;
  std::string model_id;
  int sample_index = 0;
  std::string text;
  nlohmann::json params = nlohmann::json::object();
  std::string timestamp;

  bool operator==(const Response&) const = default;
};

enum class Provenance { same_model_twice, different_models, temperature_shift };

inline const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::same_model_twice: return "same_model_twice";
    case Provenance::different_models: return "different_models";
    case Provenance::temperature_shift: return "temperature_shift";
  }
  return "?";
}

inline Provenance provenance_from_string(const std::string& s) {
  if (s == "same_model_twice") return Provenance::same_model_twice;
  if (s == "different_models") return Provenance::different_models;
  if (s == "temperature_shift") return Provenance::temperature_shift;
  throw InvalidData("unknown provenance: " + s);
}

inline int label_for(Provenance p) { return p == Provenance::same_model_twice ? 1 : 0; }

struct LabeledPair {
  Query query;
  Response resp_x;
  Response resp_y;
  int label = 0;  // 1 same model, 0 different
  Provenance provenance = Provenance::different_models;
};

inline void to_json(nlohmann::json& j, const Query& q) {
  j = {{"id", q.id}, {"text", q.text}, {"qtype", static_cast<int>(q.qtype)}};
}

inline void from_json(const nlohmann::json& j, Query& q) {
  q.id = j.at("id").get<std::string>();
  q.text = j.at("text").get<std::string>();
  const int t = j.at("qtype").get<int>();
  if (t != 0 && t != 1) throw InvalidData("qtype must be 0 or 1 for query " + q.id);
  q.qtype = static_cast<QueryType>(t);
}

inline void to_json(nlohmann::json& j, const Response& r) {
  j = {{"query_id", r.query_id}, {"model_id", r.model_id},
       {"sample_index", r.sample_index}, {"text", r.text},
       {"params", r.params}, {"timestamp", r.timestamp}};
}

inline void from_json(const nlohmann::json& j, Response& r) {
  r.query_id = j.at("query_id").get<std::string>();
  r.model_id = j.at("model_id").get<std::string>();
  r.sample_index = j.at("sample_index").get<int>();
  if (r.sample_index < 0) throw InvalidData("negative sample_index");
  r.text = j.at("text").get<std::string>();
  r.params = j.value("params", nlohmann::json::object());
  r.timestamp = j.value("timestamp", std::string());
}

inline void to_json(nlohmann::json& j, const LabeledPair& p) {
  j = {{"query", p.query}, {"resp_x", p.resp_x}, {"resp_y", p.resp_y},
       {"label", p.label}, {"provenance", to_string(p.provenance)}};
}

inline void from_json(const nlohmann::json& j, LabeledPair& p) {
  p.query = j.at("query").get<Query>();
  p.resp_x = j.at("resp_x").get<Response>();
  p.resp_y = j.at("resp_y").get<Response>();
  p.label = j.at("label").get<int>();
  p.provenance = provenance_from_string(j.at("provenance").get<std::string>());
  if (p.label != label_for(p.provenance))
    throw InvalidData("pair label contradicts provenance for query " + p.query.id);
}

namespace jsonl {

// Reads one JSON document per non-blank line.
template <typename T>
std::vector<T> read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidData("cannot open " + path.string());
  std::vector<T> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(nlohmann::json::parse(line).get<T>());
    } catch (const nlohmann::json::exception& e) {
      throw InvalidData(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

template <typename T>
void write(const std::filesystem::path& path, const std::vector<T>& items) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InvalidData("cannot write " + path.string());
  for (const auto& item : items) out << nlohmann::json(item).dump() << '\n';
  if (!out) throw InvalidData("write failed: " + path.string());
}

// Append-only, flushed-per-record writer; safe to share between threads.
class AppendWriter {
 public:
  explicit AppendWriter(const std::filesystem::path& path, bool truncate = true)
      : path_(path), out_(path, truncate ? std::ios::trunc : std::ios::app) {
    if (!out_) throw InvalidData("cannot write " + path.string());
  }

  void append(const nlohmann::json& record) {
    const std::string line = record.dump();
    std::lock_guard lock(mu_);
    out_ << line << '\n';
    out_.flush();
    if (!out_) throw InvalidData("write failed: " + path_.string());
  }

 private:
  std::filesystem::path path_;
  std::mutex mu_;
  std::ofstream out_;
};

}  // namespace jsonl
}  // namespace simct

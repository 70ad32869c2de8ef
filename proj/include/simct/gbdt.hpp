// Copyright 2026 The SimCT Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

// Histogram gradient-boosted decision trees with logistic loss.
//
// Features are discretized once into at most max_bin equal-frequency bins;
// a split on bin b sends x <= upper_bound[b] to the left child (ties go
// left). Trees grow leaf-wise: the leaf with the largest gain is split next
// until num_leaves is reached, no leaf below max_depth has a positive-gain
// split, or min_child_samples cannot be met. Row bagging and per-tree
// feature sampling draw from a counter-based generator keyed by
// (seed, round), so the same seed always yields the same model.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "simct/error.hpp"
#include "simct/features.hpp"
#include "simct/hash.hpp"

namespace simct::gbdt {

inline constexpr int kModelFormatVersion = 1;
inline constexpr const char* kModelFormat = "simct-gbdt";

struct Params {
  // objective is fixed: binary logistic
  int num_leaves = 20;
  int max_depth = 2;
  int max_bin = 40;
  double learning_rate = 0.1;
  double feature_fraction = 0.9;
  double bagging_fraction = 0.9;
  int min_child_samples = 1;
  std::uint64_t seed = 1;
  int num_rounds = 100;
  int early_stopping_rounds = 20;
  // Columns never used for splits (ablations).
  std::vector<int> excluded_features;
  double min_sum_hessian = 1e-3;
  double lambda_l2 = 0.0;

  void validate() const {
    if (!(learning_rate > 0.0 && learning_rate <= 1.0))
      throw InvalidArgument("learning_rate must be in (0,1]");
    if (!(feature_fraction > 0.0 && feature_fraction <= 1.0))
      throw InvalidArgument("feature_fraction must be in (0,1]");
    if (!(bagging_fraction > 0.0 && bagging_fraction <= 1.0))
      throw InvalidArgument("bagging_fraction must be in (0,1]");
    if (max_depth < 1) throw InvalidArgument("max_depth must be >= 1");
    if (num_leaves < 2) throw InvalidArgument("num_leaves must be >= 2");
    if (max_bin < 2 || max_bin > 65535) throw InvalidArgument("max_bin must be in [2,65535]");
    if (min_child_samples < 1) throw InvalidArgument("min_child_samples must be >= 1");
    if (num_rounds < 0) throw InvalidArgument("num_rounds must be >= 0");
    if (early_stopping_rounds < 1) throw InvalidArgument("early_stopping_rounds must be >= 1");
    if (!(min_sum_hessian >= 0.0) || !(lambda_l2 >= 0.0))
      throw InvalidArgument("regularization terms must be >= 0");
    for (int f : excluded_features)
      if (f < 0 || f >= static_cast<int>(kNumFeatures))
        throw InvalidArgument("excluded feature index out of range");
  }

  bool operator==(const Params&) const = default;
};

struct Node {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf output before shrinkage

  bool is_leaf() const noexcept { return feature < 0; }
};

struct Tree {
  std::vector<Node> nodes;

  double predict(std::span<const double> x) const {
    std::size_t i = 0;
    while (!nodes[i].is_leaf())
      i = static_cast<std::size_t>(x[static_cast<std::size_t>(nodes[i].feature)] <= nodes[i].threshold
                                       ? nodes[i].left
                                       : nodes[i].right);
    return nodes[i].value;
  }

  int leaf_count() const {
    return static_cast<int>(std::count_if(nodes.begin(), nodes.end(),
                                          [](const Node& n) { return n.is_leaf(); }));
  }

  int depth() const { return depth_from(0); }

 private:
  int depth_from(std::size_t i) const {
    if (nodes[i].is_leaf()) return 0;
    return 1 + std::max(depth_from(static_cast<std::size_t>(nodes[i].left)),
                        depth_from(static_cast<std::size_t>(nodes[i].right)));
  }
};

struct Model {
  Params params;
  std::string feature_layout_version = kFeatureLayoutVersion;
  std::vector<std::vector<double>> bin_upper_bounds;  // per feature, ascending
  std::vector<Tree> trees;
  double base_score = 0.0;  // log-odds of the positive prior

  double raw_score(std::span<const double> x) const {
    double sum = 0.0;
    for (const auto& t : trees) sum += t.predict(x);
    return base_score + params.learning_rate * sum;
  }
};

struct TrainingSet {
  std::vector<FeatureVector> rows;
  std::vector<int> labels;  // 1 same model, 0 different models

  void add(const FeatureVector& x, int label) {
    rows.push_back(x);
    labels.push_back(label);
  }
  std::size_t size() const noexcept { return rows.size(); }
};

struct TrainReport {
  int rounds_run = 0;
  int best_iteration = 0;
  bool early_stopping_active = false;
  std::size_t train_rows = 0;
  std::size_t validation_rows = 0;
  std::vector<double> train_loss;      // after each round
  std::vector<double> validation_auc;  // after each round (when active)
  double best_validation_auc = std::numeric_limits<double>::quiet_NaN();
};

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Keeps probabilities strictly inside (0,1).
inline double open_unit(double p) {
  constexpr double lo = std::numeric_limits<double>::min();
  const double hi = std::nextafter(1.0, 0.0);
  return std::clamp(p, lo, hi);
}

// Area under the ROC curve from the rank statistic; tied scores count half.
inline double auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw InvalidArgument("auc: size mismatch");
  const std::size_t n = scores.size();
  std::size_t pos = 0;
  for (int y : labels) pos += y == 1 ? 1 : 0;
  const std::size_t neg = n - pos;
  if (pos == 0 || neg == 0) throw InvalidData("auc requires both labels");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k)
      if (labels[order[k]] == 1) rank_sum += avg_rank;
    i = j + 1;
  }
  const double p = static_cast<double>(pos);
  const double q = static_cast<double>(neg);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * q);
}

namespace detail {

using Row = std::array<double, kNumFeatures>;

// Equal-frequency bin boundaries over the sorted values of one feature.
// Each boundary is the midpoint between two adjacent distinct values.
inline std::vector<double> bin_bounds(std::vector<double> values, int max_bin) {
  std::sort(values.begin(), values.end());
  std::vector<std::pair<double, std::size_t>> distinct;
  for (double v : values) {
    if (!distinct.empty() && distinct.back().first == v)
      ++distinct.back().second;
    else
      distinct.emplace_back(v, 1);
  }
  std::vector<double> bounds;
  if (distinct.size() <= 1) return bounds;
  const double n = static_cast<double>(values.size());
  const auto bins = static_cast<std::size_t>(max_bin);
  if (distinct.size() <= bins) {
    for (std::size_t k = 0; k + 1 < distinct.size(); ++k)
      bounds.push_back(0.5 * (distinct[k].first + distinct[k + 1].first));
    return bounds;
  }
  double cum = 0.0;
  for (std::size_t k = 0; k + 1 < distinct.size() && bounds.size() + 1 < bins; ++k) {
    cum += static_cast<double>(distinct[k].second);
    const double target = n * static_cast<double>(bounds.size() + 1) / static_cast<double>(bins);
    if (cum >= target) bounds.push_back(0.5 * (distinct[k].first + distinct[k + 1].first));
  }
  return bounds;
}

inline std::uint16_t bin_of(const std::vector<double>& bounds, double x) {
  return static_cast<std::uint16_t>(std::lower_bound(bounds.begin(), bounds.end(), x) -
                                    bounds.begin());
}

inline double log_loss(std::span<const double> raw, std::span<const int> y,
                       std::span<const std::uint32_t> idx) {
  double sum = 0.0;
  for (auto i : idx) {
    const double z = raw[i];
    // log(1 + exp(-z)) for y=1, log(1 + exp(z)) for y=0, computed stably
    const double s = y[i] == 1 ? -z : z;
    sum += s > 0.0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s));
  }
  return idx.empty() ? 0.0 : sum / static_cast<double>(idx.size());
}

struct Split {
  double gain = 0.0;
  int feature = -1;
  int bin = -1;
};

struct Leaf {
  int node = 0;
  int depth = 0;
  std::vector<std::uint32_t> rows;
  double sum_g = 0.0;
  double sum_h = 0.0;
  Split best;
};

class TreeBuilder {
 public:
  TreeBuilder(const Params& p, const std::vector<std::vector<std::uint16_t>>& bins,
              const std::vector<std::vector<double>>& bounds,
              std::span<const double> grad, std::span<const double> hess,
              std::vector<int> features)
      : p_(p), bins_(bins), bounds_(bounds), grad_(grad), hess_(hess),
        features_(std::move(features)) {}

  Tree build(std::vector<std::uint32_t> rows) {
    Tree tree;
    tree.nodes.emplace_back();
    std::vector<Leaf> leaves;
    leaves.push_back(make_leaf(0, 0, std::move(rows)));
    while (static_cast<int>(leaves.size()) < p_.num_leaves) {
      std::size_t pick = leaves.size();
      for (std::size_t k = 0; k < leaves.size(); ++k) {
        if (leaves[k].best.feature < 0) continue;
        if (pick == leaves.size() || leaves[k].best.gain > leaves[pick].best.gain) pick = k;
      }
      if (pick == leaves.size()) break;
      Leaf parent = std::move(leaves[pick]);
      const auto f = static_cast<std::size_t>(parent.best.feature);
      const auto b = static_cast<std::uint16_t>(parent.best.bin);
      std::vector<std::uint32_t> left_rows, right_rows;
      for (auto r : parent.rows) (bins_[f][r] <= b ? left_rows : right_rows).push_back(r);
      const int left = static_cast<int>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      Node& n = tree.nodes[static_cast<std::size_t>(parent.node)];
      n.feature = parent.best.feature;
      n.threshold = bounds_[f][b];
      n.left = left;
      n.right = left + 1;
      leaves[pick] = make_leaf(left, parent.depth + 1, std::move(left_rows));
      leaves.insert(leaves.begin() + static_cast<std::ptrdiff_t>(pick) + 1,
                    make_leaf(left + 1, parent.depth + 1, std::move(right_rows)));
    }
    for (const auto& leaf : leaves)
      tree.nodes[static_cast<std::size_t>(leaf.node)].value =
          -leaf.sum_g / (leaf.sum_h + p_.lambda_l2);
    return tree;
  }

 private:
  Leaf make_leaf(int node, int depth, std::vector<std::uint32_t> rows) {
    Leaf leaf;
    leaf.node = node;
    leaf.depth = depth;
    for (auto r : rows) {
      leaf.sum_g += grad_[r];
      leaf.sum_h += hess_[r];
    }
    leaf.rows = std::move(rows);
    if (depth < p_.max_depth) leaf.best = find_split(leaf);
    return leaf;
  }

  double score(double g, double h) const { return g * g / (h + p_.lambda_l2); }

  Split find_split(const Leaf& leaf) const {
    Split best;
    const auto min_count = static_cast<std::size_t>(p_.min_child_samples);
    if (leaf.rows.size() < 2 * min_count) return best;
    const double parent = score(leaf.sum_g, leaf.sum_h);
    for (int f : features_) {
      const auto& bounds = bounds_[static_cast<std::size_t>(f)];
      if (bounds.empty()) continue;
      const std::size_t nb = bounds.size() + 1;
      std::vector<double> hg(nb, 0.0), hh(nb, 0.0);
      std::vector<std::size_t> hc(nb, 0);
      const auto& col = bins_[static_cast<std::size_t>(f)];
      for (auto r : leaf.rows) {
        hg[col[r]] += grad_[r];
        hh[col[r]] += hess_[r];
        ++hc[col[r]];
      }
      double gl = 0.0, hl = 0.0;
      std::size_t cl = 0;
      for (std::size_t b = 0; b + 1 < nb; ++b) {
        gl += hg[b];
        hl += hh[b];
        cl += hc[b];
        const std::size_t cr = leaf.rows.size() - cl;
        if (cl < min_count) continue;
        if (cr < min_count) break;
        const double hr = leaf.sum_h - hl;
        if (hl < p_.min_sum_hessian || hr < p_.min_sum_hessian) continue;
        const double gain = score(gl, hl) + score(leaf.sum_g - gl, hr) - parent;
        if (gain > best.gain + 1e-15) {
          best.gain = gain;
          best.feature = f;
          best.bin = static_cast<int>(b);
        }
      }
    }
    return best;
  }

  const Params& p_;
  const std::vector<std::vector<std::uint16_t>>& bins_;
  const std::vector<std::vector<double>>& bounds_;
  std::span<const double> grad_;
  std::span<const double> hess_;
  std::vector<int> features_;
};

enum : std::uint64_t { kSplitKey = 0x53504c4954, kBagKey = 0x424147, kFeatureKey = 0x46454154 };

}  // namespace detail

inline Model train(const TrainingSet& data, const Params& params,
                   double validation_fraction = 0.2, TrainReport* report = nullptr) {
  params.validate();
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0))
    throw InvalidArgument("validation_fraction must be in [0,1)");
  if (data.rows.size() != data.labels.size()) throw InvalidData("rows/labels size mismatch");
  const std::size_t n = data.size();
  std::vector<detail::Row> x(n);
  std::size_t positives = 0;
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = data.rows[i].to_array();
    for (double v : x[i])
      if (!std::isfinite(v)) throw InvalidData("non-finite feature in training row " + std::to_string(i));
    if (data.labels[i] != 0 && data.labels[i] != 1)
      throw InvalidData("labels must be 0 or 1");
    positives += static_cast<std::size_t>(data.labels[i]);
  }
  if (positives == 0 || positives == n)
    throw TrainingError("training data must contain both labels");

  // Deterministic Fisher-Yates split into validation (front) and training.
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  CounterRng split_rng(mix({params.seed, detail::kSplitKey}));
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[split_rng.below(i)]);
  const auto n_val = static_cast<std::size_t>(std::floor(validation_fraction * static_cast<double>(n)));
  std::vector<std::uint32_t> val_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::vector<std::uint32_t> train_idx(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
  std::sort(val_idx.begin(), val_idx.end());
  std::sort(train_idx.begin(), train_idx.end());

  std::size_t train_pos = 0;
  for (auto i : train_idx) train_pos += static_cast<std::size_t>(data.labels[i]);
  if (train_pos == 0 || train_pos == train_idx.size())
    throw TrainingError("training split contains a single label; lower validation_fraction");
  std::size_t val_pos = 0;
  for (auto i : val_idx) val_pos += static_cast<std::size_t>(data.labels[i]);
  const bool early_stopping = val_pos > 0 && val_pos < val_idx.size();

  Model model;
  model.params = params;
  model.bin_upper_bounds.resize(kNumFeatures);
  std::vector<std::vector<std::uint16_t>> bins(kNumFeatures, std::vector<std::uint16_t>(n, 0));
  for (std::size_t f = 0; f < kNumFeatures; ++f) {
    std::vector<double> col;
    col.reserve(train_idx.size());
    for (auto i : train_idx) col.push_back(x[i][f]);
    model.bin_upper_bounds[f] = detail::bin_bounds(std::move(col), params.max_bin);
    for (std::size_t i = 0; i < n; ++i) bins[f][i] = detail::bin_of(model.bin_upper_bounds[f], x[i][f]);
  }

  const double pos = static_cast<double>(train_pos);
  model.base_score = std::log(pos / (static_cast<double>(train_idx.size()) - pos));

  std::vector<int> candidates;
  for (int f = 0; f < static_cast<int>(kNumFeatures); ++f)
    if (std::find(params.excluded_features.begin(), params.excluded_features.end(), f) ==
        params.excluded_features.end())
      candidates.push_back(f);
  const auto per_tree = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(params.feature_fraction * static_cast<double>(candidates.size()) + 0.5)));

  std::vector<double> raw(n, model.base_score);
  std::vector<double> grad(n, 0.0), hess(n, 0.0);
  TrainReport rep;
  rep.train_rows = train_idx.size();
  rep.validation_rows = val_idx.size();
  rep.early_stopping_active = early_stopping;
  double best_auc = -1.0;
  double best_loss = std::numeric_limits<double>::infinity();
  int best_iter = 0;
  std::vector<double> val_scores(val_idx.size());
  std::vector<int> val_labels;
  for (auto i : val_idx) val_labels.push_back(data.labels[i]);

  for (int round = 0; round < params.num_rounds; ++round) {
    const auto r = static_cast<std::uint64_t>(round);
    for (auto i : train_idx) {
      const double p = sigmoid(raw[i]);
      grad[i] = p - data.labels[i];
      hess[i] = p * (1.0 - p);
    }
    std::vector<std::uint32_t> bag;
    for (auto i : train_idx)
      if (params.bagging_fraction >= 1.0 ||
          to_unit(mix({params.seed, detail::kBagKey, r, i})) < params.bagging_fraction)
        bag.push_back(i);
    if (bag.empty()) bag = train_idx;

    std::vector<std::pair<std::uint64_t, int>> ranked;
    for (int f : candidates)
      ranked.emplace_back(mix({params.seed, detail::kFeatureKey, r, static_cast<std::uint64_t>(f)}), f);
    std::sort(ranked.begin(), ranked.end());
    std::vector<int> chosen;
    for (std::size_t k = 0; k < std::min(per_tree, ranked.size()); ++k) chosen.push_back(ranked[k].second);
    std::sort(chosen.begin(), chosen.end());

    detail::TreeBuilder builder(params, bins, model.bin_upper_bounds, grad, hess, chosen);
    Tree tree = builder.build(std::move(bag));
    for (std::size_t i = 0; i < n; ++i)
      raw[i] += params.learning_rate * tree.predict(x[i]);
    model.trees.push_back(std::move(tree));
    ++rep.rounds_run;
    rep.train_loss.push_back(detail::log_loss(raw, data.labels, train_idx));

    if (!early_stopping) {
      best_iter = round + 1;
      continue;
    }
    for (std::size_t k = 0; k < val_idx.size(); ++k) val_scores[k] = raw[val_idx[k]];
    const double a = auc(val_scores, val_labels);
    const double loss = detail::log_loss(raw, data.labels, val_idx);
    rep.validation_auc.push_back(a);
    // AUC saturates quickly; equal AUC with lower validation loss still counts.
    const bool improved = a > best_auc + 1e-12 || (std::abs(a - best_auc) <= 1e-12 && loss < best_loss);
    if (improved) {
      best_auc = std::max(a, best_auc);
      best_loss = loss;
      best_iter = round + 1;
    } else if (round + 1 - best_iter >= params.early_stopping_rounds) {
      break;
    }
  }
  model.trees.resize(static_cast<std::size_t>(best_iter));
  rep.best_iteration = best_iter;
  if (early_stopping && best_iter > 0) rep.best_validation_auc = rep.validation_auc[static_cast<std::size_t>(best_iter - 1)];
  if (report) *report = std::move(rep);
  return model;
}

inline double predict_proba(const Model& model, const FeatureVector& x) {
  if (model.feature_layout_version != kFeatureLayoutVersion)
    throw InvalidArgument("model feature layout '" + model.feature_layout_version +
                          "' does not match extractor layout '" + kFeatureLayoutVersion + "'");
  const auto row = x.to_array();
  for (double v : row)
    if (!std::isfinite(v)) throw InvalidArgument("non-finite feature value");
  return open_unit(sigmoid(model.raw_score(row)));
}

inline double evaluate_auc(const Model& model, const TrainingSet& data) {
  std::vector<double> scores;
  scores.reserve(data.size());
  for (const auto& row : data.rows) scores.push_back(predict_proba(model, row));
  return auc(scores, data.labels);
}

// ---- serialization ----------------------------------------------------

inline nlohmann::json to_json(const Params& p) {
  return {{"objective", "binary"},
          {"metric", "auc"},
          {"num_leaves", p.num_leaves},
          {"max_depth", p.max_depth},
          {"max_bin", p.max_bin},
          {"learning_rate", p.learning_rate},
          {"feature_fraction", p.feature_fraction},
          {"bagging_fraction", p.bagging_fraction},
          {"min_child_samples", p.min_child_samples},
          {"seed", p.seed},
          {"num_rounds", p.num_rounds},
          {"early_stopping_rounds", p.early_stopping_rounds},
          {"excluded_features", p.excluded_features},
          {"min_sum_hessian", p.min_sum_hessian},
          {"lambda_l2", p.lambda_l2}};
}

inline Params params_from_json(const nlohmann::json& j) {
  if (j.at("objective").get<std::string>() != "binary")
    throw SerializationError("unsupported objective");
  Params p;
  p.num_leaves = j.at("num_leaves").get<int>();
  p.max_depth = j.at("max_depth").get<int>();
  p.max_bin = j.at("max_bin").get<int>();
  p.learning_rate = j.at("learning_rate").get<double>();
  p.feature_fraction = j.at("feature_fraction").get<double>();
  p.bagging_fraction = j.at("bagging_fraction").get<double>();
  p.min_child_samples = j.at("min_child_samples").get<int>();
  p.seed = j.at("seed").get<std::uint64_t>();
  p.num_rounds = j.at("num_rounds").get<int>();
  p.early_stopping_rounds = j.at("early_stopping_rounds").get<int>();
  p.excluded_features = j.at("excluded_features").get<std::vector<int>>();
  p.min_sum_hessian = j.at("min_sum_hessian").get<double>();
  p.lambda_l2 = j.at("lambda_l2").get<double>();
  return p;
}

inline std::string serialize(const Model& m) {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : m.trees) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& node : t.nodes) {
      if (node.is_leaf())
        nodes.push_back({{"leaf", node.value}});
      else
        nodes.push_back({{"feature", node.feature}, {"threshold", node.threshold},
                         {"left", node.left}, {"right", node.right}});
    }
    trees.push_back({{"nodes", std::move(nodes)}});
  }
  nlohmann::json doc = {{"format", kModelFormat},
                        {"format_version", kModelFormatVersion},
                        {"feature_layout_version", m.feature_layout_version},
                        {"feature_names", kFeatureNames},
                        {"params", to_json(m.params)},
                        {"base_score", m.base_score},
                        {"bin_upper_bounds", m.bin_upper_bounds},
                        {"trees", std::move(trees)}};
  return doc.dump(1) + "\n";
}

inline Model deserialize(std::string_view text) {
  Model m;
  try {
    const auto doc = nlohmann::json::parse(text);
    if (doc.at("format").get<std::string>() != kModelFormat)
      throw SerializationError("not a simct-gbdt model");
    if (doc.at("format_version").get<int>() != kModelFormatVersion)
      throw SerializationError("unsupported model format_version " +
                               std::to_string(doc.at("format_version").get<int>()));
    m.feature_layout_version = doc.at("feature_layout_version").get<std::string>();
    m.params = params_from_json(doc.at("params"));
    m.params.validate();
    m.base_score = doc.at("base_score").get<double>();
    m.bin_upper_bounds = doc.at("bin_upper_bounds").get<std::vector<std::vector<double>>>();
    if (m.bin_upper_bounds.size() != kNumFeatures)
      throw SerializationError("bin_upper_bounds must list every feature");
    for (const auto& jt : doc.at("trees")) {
      Tree t;
      for (const auto& jn : jt.at("nodes")) {
        Node node;
        if (jn.contains("leaf")) {
          node.value = jn.at("leaf").get<double>();
        } else {
          node.feature = jn.at("feature").get<int>();
          node.threshold = jn.at("threshold").get<double>();
          node.left = jn.at("left").get<int>();
          node.right = jn.at("right").get<int>();
        }
        t.nodes.push_back(node);
      }
      // Children must point forward so traversal always terminates.
      const auto count = static_cast<int>(t.nodes.size());
      if (count == 0) throw SerializationError("empty tree");
      for (int i = 0; i < count; ++i) {
        const Node& node = t.nodes[static_cast<std::size_t>(i)];
        if (node.is_leaf()) continue;
        if (node.feature >= static_cast<int>(kNumFeatures) || node.left <= i ||
            node.right <= i || node.left >= count || node.right >= count)
          throw SerializationError("malformed tree node");
      }
      m.trees.push_back(std::move(t));
    }
  } catch (const nlohmann::json::exception& e) {
    throw SerializationError(std::string("corrupt model file: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw SerializationError(std::string("invalid model parameters: ") + e.what());
  }
  return m;
}

inline void save_model(const Model& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw SerializationError("cannot write model to " + path.string());
  out << serialize(m);
  if (!out) throw SerializationError("failed writing model to " + path.string());
}

inline Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SerializationError("cannot read model " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return deserialize(ss.str());
}

}  // namespace simct::gbdt

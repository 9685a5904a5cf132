// predictor.hpp
//
// Gradient-boosted regression trees (squared-error loss, exact greedy
// splits) trained on sliding windows of a station's position history.
// One model per coordinate.
//
// A model predicts  base_prediction + learning_rate * sum_k tree_k(x).
// Training keeps the per-row tree sum and applies the same formula, so
// in-training predictions and predict() agree bit for bit.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "uavnet/error.hpp"
#include "uavnet/geometry.hpp"
#include "uavnet/io.hpp"
#include "uavnet/mobility.hpp"
#include "uavnet/random.hpp"

namespace uavnet {

struct BoostParams {
  int max_depth = 6;
  double learning_rate = 0.1;
  double colsample = 1.0;
  double subsample = 1.0;
  int num_rounds = 100;
  // 0 disables early stopping.
  int early_stop_patience = 10;
  // Tail of each station's training rows held out for early stopping.
  double validation_fraction = 0.1;
  std::size_t min_samples_leaf = 2;
  std::uint64_t seed = 0;

  friend bool operator==(const BoostParams&, const BoostParams&) = default;

  void validate() const {
    if (max_depth < 1) throw ConfigError("max_depth must be >= 1");
    if (!(learning_rate > 0.0 && learning_rate <= 1.0)) throw ConfigError("learning_rate must be in (0, 1]");
    if (!(colsample > 0.0 && colsample <= 1.0)) throw ConfigError("colsample must be in (0, 1]");
    if (!(subsample > 0.0 && subsample <= 1.0)) throw ConfigError("subsample must be in (0, 1]");
    if (num_rounds < 0) throw ConfigError("num_rounds must be >= 0");
    if (early_stop_patience < 0) throw ConfigError("early_stop_patience must be >= 0");
    if (!(validation_fraction >= 0.0 && validation_fraction < 1.0))
      throw ConfigError("validation_fraction must be in [0, 1)");
    if (min_samples_leaf < 1) throw ConfigError("min_samples_leaf must be >= 1");
  }
};

// Feature layout: the h most recent positions (x_lag0, y_lag0, ...,
// x_lag{h-1}, y_lag{h-1}), then the last-step velocity (vx, vy). The target
// is the coordinate `horizon` samples after the most recent position.
struct FeatureWindow {
  std::size_t history = 5;
  std::size_t horizon = 1;

  friend bool operator==(const FeatureWindow&, const FeatureWindow&) = default;

  void validate() const {
    if (history < 1) throw ConfigError("history must be >= 1");
    if (horizon < 1) throw ConfigError("horizon must be >= 1");
  }

  std::size_t num_features() const { return 2 * history + 2; }

  std::vector<std::string> feature_names() const {
    std::vector<std::string> names;
    for (std::size_t lag = 0; lag < history; ++lag) {
      names.push_back("x_lag" + std::to_string(lag));
      names.push_back("y_lag" + std::to_string(lag));
    }
    names.push_back("vx");
    names.push_back("vy");
    return names;
  }

  // Rows one station contributes: anchors h .. N-1-horizon.
  std::size_t rows_per_station(std::size_t samples) const {
    return samples >= history + horizon + 1 ? samples - history - horizon : 0;
  }
};

enum class Axis { x, y };

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;

  bool is_leaf() const { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

// Node 0 is the root. A row goes left when x[feature] < threshold.
struct RegressionTree {
  std::vector<TreeNode> nodes;

  double evaluate(std::span<const double> x) const {
    int i = 0;
    while (!nodes[i].is_leaf()) {
      const auto& n = nodes[i];
      i = x[n.feature] < n.threshold ? n.left : n.right;
    }
    return nodes[i].value;
  }

  int depth() const {
    std::vector<std::pair<int, int>> stack{{0, 0}};
    int best = 0;
    while (!stack.empty()) {
      auto [i, d] = stack.back();
      stack.pop_back();
      best = std::max(best, d);
      if (!nodes[i].is_leaf()) {
        stack.push_back({nodes[i].left, d + 1});
        stack.push_back({nodes[i].right, d + 1});
      }
    }
    return best;
  }

  friend bool operator==(const RegressionTree&, const RegressionTree&) = default;
};

struct BoostedModel {
  double base_prediction = 0.0;
  std::vector<RegressionTree> trees;
  BoostParams params;
  FeatureWindow window;
  std::vector<std::string> feature_schema;
  // Diagnostics, one entry per kept round.
  std::vector<double> train_rmse;
  std::vector<double> valid_rmse;

  friend bool operator==(const BoostedModel&, const BoostedModel&) = default;
};

struct SupervisedRows {
  std::vector<std::string> feature_names;
  std::vector<double> features;  // row-major
  std::vector<double> target_x;
  std::vector<double> target_y;
  // Most recent observed position, i.e. the persistence forecast.
  std::vector<double> last_x;
  std::vector<double> last_y;
  std::vector<std::size_t> station_id;
  std::vector<double> time;  // timestamp of the target

  std::size_t size() const { return station_id.size(); }
  std::size_t num_features() const { return feature_names.size(); }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(features).subspan(i * num_features(), num_features());
  }
  std::span<const double> target(Axis a) const { return a == Axis::x ? target_x : target_y; }
  std::span<const double> last(Axis a) const { return a == Axis::x ? last_x : last_y; }
};

struct Dataset {
  FeatureWindow window;
  SupervisedRows train;
  SupervisedRows test;
};

namespace detail {

inline void window_features(std::span<const TraceSample> station, std::size_t anchor,
                            const FeatureWindow& w, double interval, std::vector<double>& out) {
  for (std::size_t lag = 0; lag < w.history; ++lag) {
    out.push_back(station[anchor - lag].x);
    out.push_back(station[anchor - lag].y);
  }
  out.push_back((station[anchor].x - station[anchor - 1].x) / interval);
  out.push_back((station[anchor].y - station[anchor - 1].y) / interval);
}

inline void append_row(SupervisedRows& rows, std::span<const TraceSample> station, std::size_t anchor,
                       const FeatureWindow& w, double interval) {
  window_features(station, anchor, w, interval, rows.features);
  const auto& target = station[anchor + w.horizon];
  rows.target_x.push_back(target.x);
  rows.target_y.push_back(target.y);
  rows.last_x.push_back(station[anchor].x);
  rows.last_y.push_back(station[anchor].y);
  rows.station_id.push_back(target.station_id);
  rows.time.push_back(target.time);
}

// Running mean; exact for constant input.
inline double stable_mean(std::span<const double> v) {
  double m = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) m += (v[i] - m) / static_cast<double>(i + 1);
  return m;
}

}  // namespace detail

// Chronological split per station: the first train_fraction of each
// station's rows train, the rest test.
inline Dataset build_dataset(const Trace& trace, const FeatureWindow& window, double train_fraction = 0.8) {
  window.validate();
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw DatasetError("train_fraction must be in (0, 1)");
  if (trace.num_stations == 0) throw DatasetError("trace has no stations");
  const std::size_t per_station = window.rows_per_station(trace.samples_per_station);
  if (per_station == 0)
    throw DatasetError("trace too short: need at least " + std::to_string(window.history + window.horizon + 1) +
                       " samples per station, have " + std::to_string(trace.samples_per_station));
  const double interval = trace.sample_interval();

  Dataset ds;
  ds.window = window;
  ds.train.feature_names = window.feature_names();
  ds.test.feature_names = ds.train.feature_names;
  const auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(per_station)));
  for (std::size_t s = 0; s < trace.num_stations; ++s) {
    const auto station = trace.station(s);
    for (std::size_t r = 0; r < per_station; ++r) {
      const std::size_t anchor = window.history + r;
      detail::append_row(r < n_train ? ds.train : ds.test, station, anchor, window, interval);
    }
  }
  return ds;
}

namespace detail {

class TreeBuilder {
 public:
  TreeBuilder(const std::vector<std::vector<double>>& columns, const std::vector<double>& residual,
              std::size_t min_leaf, int max_depth)
      : columns_(columns), residual_(residual), min_leaf_(min_leaf), max_depth_(max_depth),
        goes_left_(residual.size(), 0) {}

  // sorted[f] lists the rows of the node ordered by feature features[f].
  RegressionTree build(std::vector<std::vector<std::uint32_t>> sorted, const std::vector<int>& features) {
    features_ = &features;
    tree_ = RegressionTree{};
    grow(std::move(sorted), 0);
    return std::move(tree_);
  }

 private:
  int grow(std::vector<std::vector<std::uint32_t>> sorted, int depth) {
    const auto& rows = sorted.front();
    const std::size_t n = rows.size();
    double sum = 0.0;
    for (auto r : rows) sum += residual_[r];

    const int self = static_cast<int>(tree_.nodes.size());
    tree_.nodes.push_back(TreeNode{});
    tree_.nodes[self].value = sum / static_cast<double>(n);
    if (depth >= max_depth_ || n < 2 * min_leaf_) return self;

    // Ties in gain keep the first candidate: lowest feature, lowest threshold.
    const double parent = sum * sum / static_cast<double>(n);
    double best_gain = 0.0;
    int best_slot = -1;
    double best_threshold = 0.0;
    for (std::size_t slot = 0; slot < sorted.size(); ++slot) {
      const auto& col = columns_[(*features_)[slot]];
      const auto& order = sorted[slot];
      double left_sum = 0.0;
      for (std::size_t k = 0; k + 1 < n; ++k) {
        left_sum += residual_[order[k]];
        const double v = col[order[k]];
        const double v_next = col[order[k + 1]];
        if (v == v_next) continue;
        const std::size_t n_left = k + 1;
        const std::size_t n_right = n - n_left;
        if (n_left < min_leaf_ || n_right < min_leaf_) continue;
        const double right_sum = sum - left_sum;
        const double gain = left_sum * left_sum / static_cast<double>(n_left) +
                            right_sum * right_sum / static_cast<double>(n_right) - parent;
        if (gain > best_gain) {
          best_gain = gain;
          best_slot = static_cast<int>(slot);
          double mid = v + (v_next - v) / 2.0;
          if (!(mid > v)) mid = v_next;
          best_threshold = mid;
        }
      }
    }
    if (best_slot < 0) return self;

    const int feature = (*features_)[best_slot];
    const auto& col = columns_[feature];
    for (auto r : rows) goes_left_[r] = col[r] < best_threshold ? 1 : 0;

    std::vector<std::vector<std::uint32_t>> left(sorted.size()), right(sorted.size());
    for (std::size_t slot = 0; slot < sorted.size(); ++slot) {
      for (auto r : sorted[slot]) (goes_left_[r] ? left[slot] : right[slot]).push_back(r);
    }
    sorted.clear();
    sorted.shrink_to_fit();

    const int l = grow(std::move(left), depth + 1);
    const int r = grow(std::move(right), depth + 1);
    auto& node = tree_.nodes[self];
    node.feature = feature;
    node.threshold = best_threshold;
    node.left = l;
    node.right = r;
    node.value = 0.0;
    return self;
  }

  const std::vector<std::vector<double>>& columns_;
  const std::vector<double>& residual_;
  std::size_t min_leaf_;
  int max_depth_;
  std::vector<char> goes_left_;
  const std::vector<int>* features_ = nullptr;
  RegressionTree tree_;
};

inline double rmse_of(std::span<const double> residual) {
  if (residual.empty()) return 0.0;
  double ss = 0.0;
  for (double r : residual) ss += r * r;
  return std::sqrt(ss / static_cast<double>(residual.size()));
}

}  // namespace detail

// Fits one boosted model to `target`. Rows are expected grouped by
// station in chronological order (as build_dataset produces them); the
// early-stopping slice is the tail of each station's block.
inline BoostedModel train(const SupervisedRows& rows, std::span<const double> target, const BoostParams& params) {
  params.validate();
  const std::size_t n = rows.size();
  if (n == 0) throw TrainingError("empty training set");
  if (target.size() != n) throw TrainingError("target length does not match row count");
  const std::size_t p = rows.num_features();
  if (p == 0) throw TrainingError("no features");

  // Partition rows into fit and validation sets.
  std::vector<std::size_t> fit, valid;
  for (std::size_t begin = 0; begin < n;) {
    std::size_t end = begin;
    while (end < n && rows.station_id[end] == rows.station_id[begin]) ++end;
    const std::size_t block = end - begin;
    const auto held = static_cast<std::size_t>(std::floor(params.validation_fraction * static_cast<double>(block)));
    const std::size_t held_out = params.early_stop_patience > 0 ? std::min(held, block - 1) : 0;
    for (std::size_t i = begin; i < end - held_out; ++i) fit.push_back(i);
    for (std::size_t i = end - held_out; i < end; ++i) valid.push_back(i);
    begin = end;
  }
  const bool early_stopping = params.early_stop_patience > 0 && !valid.empty();

  BoostedModel model;
  model.params = params;
  model.feature_schema = rows.feature_names;

  const std::size_t nf = fit.size();
  std::vector<double> fit_target(nf);
  for (std::size_t i = 0; i < nf; ++i) fit_target[i] = target[fit[i]];
  model.base_prediction = detail::stable_mean(fit_target);

  std::vector<std::vector<double>> columns(p, std::vector<double>(nf));
  for (std::size_t i = 0; i < nf; ++i) {
    auto x = rows.row(fit[i]);
    for (std::size_t f = 0; f < p; ++f) columns[f][i] = x[f];
  }
  std::vector<std::vector<std::uint32_t>> presorted(p, std::vector<std::uint32_t>(nf));
  for (std::size_t f = 0; f < p; ++f) {
    auto& order = presorted[f];
    std::iota(order.begin(), order.end(), 0u);
    const auto& col = columns[f];
    std::stable_sort(order.begin(), order.end(), [&col](std::uint32_t a, std::uint32_t b) { return col[a] < col[b]; });
  }

  const double lr = params.learning_rate;
  std::vector<double> fit_sum(nf, 0.0), residual(nf);
  std::vector<double> valid_sum(valid.size(), 0.0), valid_residual(valid.size());
  auto refresh = [&](std::size_t i) { residual[i] = fit_target[i] - (model.base_prediction + lr * fit_sum[i]); };
  for (std::size_t i = 0; i < nf; ++i) refresh(i);

  double best_valid = std::numeric_limits<double>::infinity();
  std::size_t best_rounds = 0;
  detail::TreeBuilder builder(columns, residual, params.min_samples_leaf, params.max_depth);

  for (int round = 0; round < params.num_rounds; ++round) {
    auto rng = make_engine(params.seed, {static_cast<std::uint64_t>(round)});

    std::vector<int> features(p);
    std::iota(features.begin(), features.end(), 0);
    if (params.colsample < 1.0) {
      std::shuffle(features.begin(), features.end(), rng);
      const auto keep = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(params.colsample * p)));
      features.resize(keep);
      std::sort(features.begin(), features.end());
    }

    std::vector<std::vector<std::uint32_t>> sorted;
    sorted.reserve(features.size());
    if (params.subsample < 1.0) {
      std::vector<std::uint32_t> pick(nf);
      std::iota(pick.begin(), pick.end(), 0u);
      std::shuffle(pick.begin(), pick.end(), rng);
      const auto keep = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(params.subsample * nf)));
      std::vector<char> in(nf, 0);
      for (std::size_t i = 0; i < keep; ++i) in[pick[i]] = 1;
      for (int f : features) {
        std::vector<std::uint32_t> order;
        order.reserve(keep);
        for (auto r : presorted[f])
          if (in[r]) order.push_back(r);
        sorted.push_back(std::move(order));
      }
    } else {
      for (int f : features) sorted.push_back(presorted[f]);
    }

    RegressionTree tree = builder.build(std::move(sorted), features);
    for (std::size_t i = 0; i < nf; ++i) {
      fit_sum[i] += tree.evaluate(rows.row(fit[i]));
      refresh(i);
    }
    model.trees.push_back(std::move(tree));
    model.train_rmse.push_back(detail::rmse_of(residual));

    if (early_stopping) {
      for (std::size_t i = 0; i < valid.size(); ++i) {
        valid_sum[i] += model.trees.back().evaluate(rows.row(valid[i]));
        valid_residual[i] = target[valid[i]] - (model.base_prediction + lr * valid_sum[i]);
      }
      const double v = detail::rmse_of(valid_residual);
      model.valid_rmse.push_back(v);
      if (v < best_valid) {
        best_valid = v;
        best_rounds = model.trees.size();
      } else if (model.trees.size() - best_rounds >= static_cast<std::size_t>(params.early_stop_patience)) {
        break;
      }
    }
  }

  if (early_stopping && best_rounds < model.trees.size()) {
    model.trees.resize(best_rounds);
    model.train_rmse.resize(best_rounds);
    model.valid_rmse.resize(best_rounds);
  }
  return model;
}

inline BoostedModel train(const Dataset& ds, Axis axis, const BoostParams& params) {
  auto model = train(ds.train, ds.train.target(axis), params);
  model.window = ds.window;
  return model;
}

inline double predict(const BoostedModel& model, std::span<const double> features) {
  if (features.size() != model.feature_schema.size())
    throw PredictionError("feature vector has " + std::to_string(features.size()) + " values, model expects " +
                          std::to_string(model.feature_schema.size()));
  double sum = 0.0;
  for (const auto& tree : model.trees) sum += tree.evaluate(features);
  return model.base_prediction + model.params.learning_rate * sum;
}

inline double rmse(std::span<const double> predicted, std::span<const double> actual) {
  if (predicted.size() != actual.size()) throw EvaluationError("length mismatch");
  if (predicted.empty()) throw EvaluationError("empty evaluation set");
  double ss = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double e = predicted[i] - actual[i];
    ss += e * e;
  }
  return std::sqrt(ss / static_cast<double>(predicted.size()));
}

struct RmseReport {
  double model = 0.0;
  double persistence = 0.0;
};

inline RmseReport evaluate_rmse(const BoostedModel& model, const SupervisedRows& split, Axis axis) {
  if (split.size() == 0) throw EvaluationError("empty evaluation split");
  std::vector<double> pred(split.size());
  for (std::size_t i = 0; i < split.size(); ++i) pred[i] = predict(model, split.row(i));
  return {rmse(pred, split.target(axis)), rmse(split.last(axis), split.target(axis))};
}

struct StationPrediction {
  std::size_t station_id = 0;
  Vec2 position;

  friend bool operator==(const StationPrediction&, const StationPrediction&) = default;
};

// Position of every station at `at_time`, predicted from the history that
// ends `horizon` samples earlier, clamped into the arena.
inline std::vector<StationPrediction> predict_positions(const BoostedModel& model_x, const BoostedModel& model_y,
                                                        const Trace& trace, double width, double height,
                                                        double at_time) {
  if (!(model_x.window == model_y.window)) throw PredictionError("x and y models use different feature windows");
  const auto& w = model_x.window;
  const double interval = trace.sample_interval();
  std::vector<StationPrediction> out;
  out.reserve(trace.num_stations);
  std::vector<double> features;
  for (std::size_t s = 0; s < trace.num_stations; ++s) {
    const auto station = trace.station(s);
    const double tol = 1e-9 * std::max(1.0, std::abs(at_time));
    auto it = std::find_if(station.begin(), station.end(),
                           [&](const TraceSample& t) { return std::abs(t.time - at_time) <= tol; });
    if (it == station.end()) throw PredictionError("no sample at time " + io::format_double(at_time));
    const auto index = static_cast<std::size_t>(it - station.begin());
    if (index < w.history + w.horizon)
      throw PredictionError("insufficient history before time " + io::format_double(at_time));
    features.clear();
    detail::window_features(station, index - w.horizon, w, interval, features);
    const double x = predict(model_x, features);
    const double y = predict(model_y, features);
    out.push_back({s, {std::clamp(x, 0.0, width), std::clamp(y, 0.0, height)}});
  }
  return out;
}

// ---- serialization -------------------------------------------------------

inline nlohmann::ordered_json to_json(const BoostParams& p) {
  return {{"max_depth", p.max_depth},
          {"learning_rate", p.learning_rate},
          {"colsample", p.colsample},
          {"subsample", p.subsample},
          {"num_rounds", p.num_rounds},
          {"early_stop_patience", p.early_stop_patience},
          {"validation_fraction", p.validation_fraction},
          {"min_samples_leaf", p.min_samples_leaf},
          {"seed", p.seed}};
}

inline nlohmann::ordered_json to_json(const BoostedModel& m) {
  nlohmann::ordered_json j;
  j["params"] = to_json(m.params);
  j["window"] = {{"history", m.window.history}, {"horizon", m.window.horizon}};
  j["base_prediction"] = m.base_prediction;
  j["feature_schema"] = m.feature_schema;
  j["train_rmse"] = m.train_rmse;
  j["valid_rmse"] = m.valid_rmse;
  auto trees = nlohmann::ordered_json::array();
  for (const auto& t : m.trees) {
    std::vector<int> feature, left, right;
    std::vector<double> threshold, value;
    for (const auto& n : t.nodes) {
      feature.push_back(n.feature);
      threshold.push_back(n.threshold);
      left.push_back(n.left);
      right.push_back(n.right);
      value.push_back(n.value);
    }
    trees.push_back({{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right}, {"value", value}});
  }
  j["trees"] = std::move(trees);
  return j;
}

inline BoostedModel model_from_json(const nlohmann::json& j) {
  try {
    BoostedModel m;
    const auto& p = j.at("params");
    m.params.max_depth = p.at("max_depth").get<int>();
    m.params.learning_rate = p.at("learning_rate").get<double>();
    m.params.colsample = p.at("colsample").get<double>();
    m.params.subsample = p.at("subsample").get<double>();
    m.params.num_rounds = p.at("num_rounds").get<int>();
    m.params.early_stop_patience = p.at("early_stop_patience").get<int>();
    m.params.validation_fraction = p.at("validation_fraction").get<double>();
    m.params.min_samples_leaf = p.at("min_samples_leaf").get<std::size_t>();
    m.params.seed = p.at("seed").get<std::uint64_t>();
    m.window.history = j.at("window").at("history").get<std::size_t>();
    m.window.horizon = j.at("window").at("horizon").get<std::size_t>();
    m.base_prediction = j.at("base_prediction").get<double>();
    m.feature_schema = j.at("feature_schema").get<std::vector<std::string>>();
    m.train_rmse = j.at("train_rmse").get<std::vector<double>>();
    m.valid_rmse = j.at("valid_rmse").get<std::vector<double>>();
    for (const auto& t : j.at("trees")) {
      const auto feature = t.at("feature").get<std::vector<int>>();
      const auto threshold = t.at("threshold").get<std::vector<double>>();
      const auto left = t.at("left").get<std::vector<int>>();
      const auto right = t.at("right").get<std::vector<int>>();
      const auto value = t.at("value").get<std::vector<double>>();
      const std::size_t count = feature.size();
      if (threshold.size() != count || left.size() != count || right.size() != count || value.size() != count ||
          count == 0)
        throw ParseError(0, "tree node arrays differ in length");
      RegressionTree tree;
      for (std::size_t i = 0; i < count; ++i) {
        TreeNode node{feature[i], threshold[i], left[i], right[i], value[i]};
        const int c = static_cast<int>(count);
        if (!node.is_leaf() && (node.left <= static_cast<int>(i) || node.right <= static_cast<int>(i) ||
                                node.left >= c || node.right >= c ||
                                node.feature >= static_cast<int>(m.feature_schema.size())))
          throw ParseError(0, "invalid tree node " + std::to_string(i));
        tree.nodes.push_back(node);
      }
      m.trees.push_back(std::move(tree));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("malformed model: ") + e.what());
  }
}

inline void write_model(const BoostedModel& m, const std::filesystem::path& path) {
  io::write_file_atomic(path, to_json(m).dump(2) + "\n");
}

inline BoostedModel read_model(const std::filesystem::path& path) {
  io::require_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

inline constexpr const char* kPredictionsHeader = "station_id,pred_x,pred_y";

inline void write_predictions(const std::vector<StationPrediction>& preds, const std::filesystem::path& path) {
  std::string out = kPredictionsHeader;
  out += '\n';
  for (const auto& p : preds) {
    out += std::to_string(p.station_id) + ',' + io::format_double(p.position.x) + ',' +
           io::format_double(p.position.y) + '\n';
  }
  io::write_file_atomic(path, out);
}

inline std::vector<StationPrediction> read_predictions(const std::filesystem::path& path) {
  io::require_file(path);
  const auto lines = io::read_lines(path);
  if (lines.empty() || lines[0] != kPredictionsHeader)
    throw ParseError(1, std::string("expected header '") + kPredictionsHeader + "'");
  std::vector<StationPrediction> preds;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    if (lines[n].empty()) continue;
    auto f = io::split_fields(lines[n]);
    if (f.size() != 3) throw ParseError(n + 1, "expected 3 columns");
    auto id = io::parse_uint(f[0]);
    auto x = io::parse_double(f[1]);
    auto y = io::parse_double(f[2]);
    if (!id || !x || !y) throw ParseError(n + 1, "non-numeric field");
    if (*id != preds.size()) throw ParseError(n + 1, "station ids must be 0..N-1 in order");
    preds.push_back({static_cast<std::size_t>(*id), {*x, *y}});
  }
  return preds;
}

}  // namespace uavnet

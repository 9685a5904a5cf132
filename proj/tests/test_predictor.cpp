#include <gtest/gtest.h>

#include <cmath>

#include "temp_dir.hpp"
#include "uavnet/mobility.hpp"
#include "uavnet/predictor.hpp"

using namespace uavnet;

namespace {

// Trace where station s follows pos(s, i) at t = i.
template <typename Fn>
Trace make_trace(std::size_t stations, std::size_t samples, Fn pos) {
  Trace t;
  t.num_stations = stations;
  t.samples_per_station = samples;
  for (std::size_t s = 0; s < stations; ++s)
    for (std::size_t i = 0; i < samples; ++i) {
      const Vec2 p = pos(s, i);
      t.samples.push_back({static_cast<double>(i), s, p.x, p.y});
    }
  return t;
}

SupervisedRows one_feature_rows(const std::vector<double>& x) {
  SupervisedRows r;
  r.feature_names = {"f0"};
  for (std::size_t i = 0; i < x.size(); ++i) {
    r.features.push_back(x[i]);
    r.station_id.push_back(0);
  }
  return r;
}

// Independent recursive walk of a tree.
double walk(const RegressionTree& t, std::size_t node, std::span<const double> x) {
  const auto& n = t.nodes[node];
  if (n.feature < 0) return n.value;
  return walk(t, static_cast<std::size_t>(x[n.feature] < n.threshold ? n.left : n.right), x);
}

BoostParams fast_params() {
  BoostParams p;
  p.num_rounds = 20;
  return p;
}

}  // namespace

TEST(BoostParams, Validation) {
  BoostParams p;
  EXPECT_NO_THROW(p.validate());
  p.max_depth = 0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = {};
  p.learning_rate = 0.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = {};
  p.learning_rate = 1.5;
  EXPECT_THROW(p.validate(), ConfigError);
  p = {};
  p.colsample = 0.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = {};
  p.subsample = 1.1;
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(Dataset, RowCountMatchesWindowFormula) {
  ArenaConfig c;
  const auto trace = simulate_random_waypoint(c);
  const auto ds = build_dataset(trace, FeatureWindow{5, 1});
  EXPECT_EQ(ds.train.size() + ds.test.size(), 25u * (3601u - 6u));
  EXPECT_EQ(ds.train.size(), 25u * static_cast<std::size_t>(std::floor(0.8 * 3595)));
  EXPECT_EQ(ds.train.num_features(), 12u);
}

TEST(Dataset, ChronologicalSplitPerStation) {
  const auto trace = simulate_random_waypoint([] {
    ArenaConfig c;
    c.duration = 100;
    c.num_stations = 3;
    return c;
  }());
  const auto ds = build_dataset(trace, FeatureWindow{});
  for (std::size_t s = 0; s < 3; ++s) {
    double last_train = -1, first_test = 1e300;
    for (std::size_t i = 0; i < ds.train.size(); ++i)
      if (ds.train.station_id[i] == s) last_train = std::max(last_train, ds.train.time[i]);
    for (std::size_t i = 0; i < ds.test.size(); ++i)
      if (ds.test.station_id[i] == s) first_test = std::min(first_test, ds.test.time[i]);
    EXPECT_LT(last_train, first_test);
  }
}

TEST(Dataset, StationaryStationFeaturesEqualTarget) {
  const auto trace = make_trace(1, 20, [](std::size_t, std::size_t) { return Vec2{7.0, 9.0}; });
  const auto ds = build_dataset(trace, FeatureWindow{3, 2});
  for (std::size_t i = 0; i < ds.train.size(); ++i) {
    const auto row = ds.train.row(i);
    for (std::size_t f = 0; f < 6; ++f) EXPECT_EQ(row[f], f % 2 == 0 ? 7.0 : 9.0);
    EXPECT_EQ(row[6], 0.0);
    EXPECT_EQ(row[7], 0.0);
    EXPECT_EQ(ds.train.target_x[i], 7.0);
    EXPECT_EQ(ds.train.target_y[i], 9.0);
  }
}

TEST(Dataset, ConstantVelocityTargetClosedForm) {
  const double v = 2.0;
  const std::size_t horizon = 3;
  const auto trace =
      make_trace(1, 30, [&](std::size_t, std::size_t i) { return Vec2{v * static_cast<double>(i), 5.0}; });
  const auto ds = build_dataset(trace, FeatureWindow{4, horizon});
  for (const auto* split : {&ds.train, &ds.test})
    for (std::size_t i = 0; i < split->size(); ++i) {
      EXPECT_EQ(split->target_x[i], split->last_x[i] + static_cast<double>(horizon) * 1.0 * v);
      EXPECT_EQ(split->row(i)[8], v);  // vx
    }
}

TEST(Dataset, TooShortTraceIsRejected) {
  const auto trace = make_trace(2, 6, [](std::size_t, std::size_t i) { return Vec2{double(i), 0.0}; });
  EXPECT_THROW(build_dataset(trace, FeatureWindow{5, 1}), DatasetError);
  EXPECT_NO_THROW(build_dataset(make_trace(2, 7, [](std::size_t, std::size_t i) { return Vec2{double(i), 0.0}; }),
                                FeatureWindow{5, 1}));
}

TEST(Train, ConstantTargetIsReproducedExactly) {
  const auto rows = one_feature_rows({1, 2, 3, 4, 5, 6, 7, 8});
  const std::vector<double> target(8, 3.7);
  const auto m = train(rows, target, fast_params());
  EXPECT_EQ(m.base_prediction, 3.7);
  for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_EQ(predict(m, rows.row(i)), 3.7);
  for (const auto& t : m.trees) EXPECT_EQ(t.nodes.size(), 1u);
}

TEST(Train, TwoPointResidualShrinksGeometrically) {
  const auto rows = one_feature_rows({0.0, 1.0});
  const std::vector<double> target{0.0, 1.0};
  for (int n : {1, 5, 20, 60}) {
    BoostParams p;
    p.max_depth = 1;
    p.min_samples_leaf = 1;
    p.num_rounds = n;
    p.early_stop_patience = 0;
    const auto m = train(rows, target, p);
    ASSERT_EQ(m.trees.size(), static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < 2; ++i) {
      const double initial = std::abs(target[i] - 0.5);
      const double err = std::abs(target[i] - predict(m, rows.row(i)));
      EXPECT_NEAR(err, initial * std::pow(0.9, n), 1e-9) << "rounds " << n;
    }
  }
}

TEST(Train, TrainingRmseNonIncreasingWithFullSampling) {
  ArenaConfig c;
  c.duration = 300;
  c.num_stations = 5;
  const auto ds = build_dataset(simulate_random_waypoint(c), FeatureWindow{});
  BoostParams p;
  p.num_rounds = 40;
  p.early_stop_patience = 0;
  const auto m = train(ds, Axis::x, p);
  ASSERT_EQ(m.train_rmse.size(), 40u);
  for (std::size_t i = 1; i < m.train_rmse.size(); ++i) EXPECT_LE(m.train_rmse[i], m.train_rmse[i - 1]);
}

TEST(Train, TreesRespectDepthAndLeafSize) {
  ArenaConfig c;
  c.duration = 200;
  c.num_stations = 4;
  const auto ds = build_dataset(simulate_random_waypoint(c), FeatureWindow{});
  BoostParams p = fast_params();
  p.max_depth = 3;
  const auto m = train(ds, Axis::y, p);
  for (const auto& t : m.trees) {
    EXPECT_LE(t.depth(), 3);
    for (const auto& n : t.nodes) {
      EXPECT_TRUE(std::isfinite(n.value));
      if (!n.is_leaf()) {
        EXPECT_GE(n.left, 0);
        EXPECT_GE(n.right, 0);
      }
    }
  }
}

TEST(Train, PredictionsMatchIndependentTreeWalk) {
  ArenaConfig c;
  c.duration = 200;
  c.num_stations = 4;
  const auto ds = build_dataset(simulate_random_waypoint(c), FeatureWindow{});
  const auto m = train(ds, Axis::x, fast_params());
  for (std::size_t i = 0; i < ds.train.size(); ++i) {
    double sum = 0.0;
    for (const auto& t : m.trees) sum += walk(t, 0, ds.train.row(i));
    ASSERT_EQ(predict(m, ds.train.row(i)), m.base_prediction + m.params.learning_rate * sum);
  }
}

TEST(Train, TiedSplitsPreferLowestFeature) {
  SupervisedRows r;
  r.feature_names = {"a", "b"};
  const std::vector<double> x{1, 2, 3, 4};
  for (double v : x) {
    r.features.push_back(v);
    r.features.push_back(v);
    r.station_id.push_back(0);
  }
  BoostParams p;
  p.max_depth = 1;
  p.min_samples_leaf = 1;
  p.num_rounds = 1;
  p.early_stop_patience = 0;
  const auto m = train(r, std::vector<double>{0, 0, 10, 10}, p);
  ASSERT_EQ(m.trees[0].nodes.size(), 3u);
  EXPECT_EQ(m.trees[0].nodes[0].feature, 0);
  EXPECT_EQ(m.trees[0].nodes[0].threshold, 2.5);
}

TEST(Train, EqualSeedsGiveIdenticalModels) {
  ArenaConfig c;
  c.duration = 150;
  c.num_stations = 3;
  const auto ds = build_dataset(simulate_random_waypoint(c), FeatureWindow{});
  BoostParams p = fast_params();
  p.colsample = 0.5;
  p.subsample = 0.7;
  p.seed = 99;
  EXPECT_EQ(train(ds, Axis::x, p), train(ds, Axis::x, p));
  BoostParams q = p;
  q.seed = 100;
  EXPECT_NE(train(ds, Axis::x, p), train(ds, Axis::x, q));
}

TEST(Train, EmptyDatasetIsRejected) {
  SupervisedRows r;
  r.feature_names = {"f0"};
  EXPECT_THROW(train(r, std::vector<double>{}, BoostParams{}), TrainingError);
}

TEST(Predict, EmptyEnsembleAndSingleStump) {
  BoostedModel m;
  m.base_prediction = 4.0;
  m.feature_schema = {"f0"};
  const std::vector<double> x{1.0};
  EXPECT_EQ(predict(m, x), 4.0);

  RegressionTree stump;
  stump.nodes = {{0, 2.0, 1, 2, 0.0}, {-1, 0.0, -1, -1, -3.0}, {-1, 0.0, -1, -1, 5.0}};
  m.trees.push_back(stump);
  EXPECT_EQ(predict(m, x), 4.0 + 0.1 * -3.0);
  EXPECT_EQ(predict(m, std::vector<double>{2.0}), 4.0 + 0.1 * 5.0);
}

TEST(Predict, SchemaMismatchIsRejected) {
  BoostedModel m;
  m.feature_schema = {"a", "b"};
  EXPECT_THROW(predict(m, std::vector<double>{1.0}), PredictionError);
}

TEST(EvaluateRmse, PerfectAndConstantOffset) {
  const std::vector<double> a{1, 2, 3}, b{1.5, 2.5, 3.5};
  EXPECT_EQ(rmse(a, a), 0.0);
  EXPECT_DOUBLE_EQ(rmse(b, a), 0.5);
  EXPECT_THROW(evaluate_rmse(BoostedModel{}, SupervisedRows{}, Axis::x), EvaluationError);
}

TEST(EvaluateRmse, ModelBeatsPersistenceOnRandomWaypoint) {
  ArenaConfig c;
  c.duration = 600;
  c.num_stations = 10;
  const auto ds = build_dataset(simulate_random_waypoint(c), FeatureWindow{});
  BoostParams p;
  p.num_rounds = 50;
  for (Axis a : {Axis::x, Axis::y}) {
    const auto r = evaluate_rmse(train(ds, a, p), ds.test, a);
    EXPECT_LE(r.model, r.persistence);
  }
}

TEST(PredictPositions, ClampsIntoArena) {
  BoostedModel mx, my;
  mx.base_prediction = -3.0;
  my.base_prediction = 250.0;
  mx.feature_schema = my.feature_schema = FeatureWindow{}.feature_names();
  const auto trace = make_trace(1, 10, [](std::size_t, std::size_t) { return Vec2{1.0, 1.0}; });
  const auto p = predict_positions(mx, my, trace, 500, 500, 9.0);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p[0].position, (Vec2{0.0, 250.0}));
}

TEST(PredictPositions, StationaryFleetPredictsCurrentPosition) {
  const auto trace = make_trace(1, 40, [](std::size_t, std::size_t) { return Vec2{120.0, 330.0}; });
  const auto ds = build_dataset(trace, FeatureWindow{});
  const auto mx = train(ds, Axis::x, fast_params());
  const auto my = train(ds, Axis::y, fast_params());
  const auto p = predict_positions(mx, my, trace, 500, 500, 39.0);
  EXPECT_EQ(p[0].position, (Vec2{120.0, 330.0}));
  EXPECT_EQ(predict_positions(mx, my, trace, 500, 500, 39.0), p);
}

TEST(PredictPositions, InsufficientHistoryOrMissingTime) {
  BoostedModel m;
  m.feature_schema = FeatureWindow{}.feature_names();
  const auto trace = make_trace(1, 10, [](std::size_t, std::size_t) { return Vec2{1.0, 1.0}; });
  EXPECT_THROW(predict_positions(m, m, trace, 500, 500, 5.0), PredictionError);
  EXPECT_THROW(predict_positions(m, m, trace, 500, 500, 99.0), PredictionError);
}

TEST(ModelFile, RoundTripPreservesPredictionsBitExactly) {
  ArenaConfig c;
  c.duration = 150;
  c.num_stations = 3;
  const auto ds = build_dataset(simulate_random_waypoint(c), FeatureWindow{});
  const auto m = train(ds, Axis::x, fast_params());
  TempDir dir;
  write_model(m, dir / "m.json");
  const auto back = read_model(dir / "m.json");
  EXPECT_EQ(back, m);
  for (std::size_t i = 0; i < ds.test.size(); ++i) ASSERT_EQ(predict(back, ds.test.row(i)), predict(m, ds.test.row(i)));
}

TEST(ModelFile, MalformedModelIsRejected) {
  TempDir dir;
  io::write_file_atomic(dir / "bad.json", "{\"params\": 3}");
  EXPECT_THROW(read_model(dir / "bad.json"), ParseError);
  io::write_file_atomic(dir / "junk.json", "not json");
  EXPECT_THROW(read_model(dir / "junk.json"), ParseError);
}

TEST(PredictionsFile, RoundTrip) {
  TempDir dir;
  const std::vector<StationPrediction> p{{0, {1.25, 2.5}}, {1, {499.0, 0.1}}};
  write_predictions(p, dir / "p.csv");
  EXPECT_EQ(read_predictions(dir / "p.csv"), p);
}

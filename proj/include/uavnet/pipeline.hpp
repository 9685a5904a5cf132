// pipeline.hpp
//
// The end-to-end workflow as file-to-file stages: mobility trace ->
// position models -> predicted positions -> clusters -> heads -> scenario
// runs -> comparison. Each stage reads only its predecessors' artifacts and
// writes config.ini beside its outputs.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "uavnet/bench.hpp"
#include "uavnet/clustering.hpp"
#include "uavnet/config.hpp"
#include "uavnet/headselect.hpp"
#include "uavnet/metrics.hpp"
#include "uavnet/mobility.hpp"
#include "uavnet/netsim.hpp"
#include "uavnet/predictor.hpp"
#include "uavnet/traffic.hpp"

namespace uavnet {

namespace fs = std::filesystem;

namespace artifact {
inline constexpr const char* trace = "trace.csv";
inline constexpr const char* model_x = "model_x.json";
inline constexpr const char* model_y = "model_y.json";
inline constexpr const char* train_report = "train_report.json";
inline constexpr const char* predictions = "predictions.csv";
inline constexpr const char* clusters = "clusters.json";
inline constexpr const char* heads = "heads.json";
inline constexpr const char* sweep = "weight_sweep.csv";
inline constexpr const char* workload = "workload.csv";
inline constexpr const char* config = "config.ini";
}  // namespace artifact

struct Scenario {
  TopologyMode mode = TopologyMode::centralized;
  bool clustered = true;

  std::string clustering_label() const { return clustered ? "on" : "off"; }
  std::string name() const { return std::string(to_string(mode)) + "_" + clustering_label(); }
};

inline const std::vector<Scenario>& all_scenarios() {
  static const std::vector<Scenario> s = {{TopologyMode::centralized, false},
                                          {TopologyMode::centralized, true},
                                          {TopologyMode::decentralized, false},
                                          {TopologyMode::decentralized, true}};
  return s;
}

inline fs::path records_file(const Scenario& s) { return "records_" + s.name() + ".csv"; }
inline fs::path report_json_file(const Scenario& s) { return "report_" + s.name() + ".json"; }
inline fs::path report_csv_file(const Scenario& s) { return "report_" + s.name() + ".csv"; }

inline void prepare_output(const PipelineConfig& cfg, const fs::path& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw IoError("cannot create output directory " + out.string() + ": " + ec.message());
  write_config(cfg, out / artifact::config);
}

inline std::vector<Vec2> positions_of(const std::vector<StationPrediction>& preds) {
  std::vector<Vec2> pos(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i].station_id != i) throw DatasetError("predictions must list stations 0..n-1 in order");
    pos[i] = preds[i].position;
  }
  return pos;
}

// ---- in-memory stage bodies ------------------------------------------------

struct TrainedModels {
  BoostedModel x, y;
  RmseReport rmse_x, rmse_y;
};

inline TrainedModels train_models(const PipelineConfig& cfg, const Trace& trace) {
  const auto c = cfg.seeded();
  const auto ds = build_dataset(trace, c.window, c.train_fraction);
  TrainedModels m;
  m.x = train(ds, Axis::x, c.boost);
  m.y = train(ds, Axis::y, c.boost);
  m.rmse_x = evaluate_rmse(m.x, ds.test, Axis::x);
  m.rmse_y = evaluate_rmse(m.y, ds.test, Axis::y);
  return m;
}

// Positions at the final trace timestamp.
inline std::vector<StationPrediction> predict_final(const PipelineConfig& cfg, const Trace& trace,
                                                    const BoostedModel& mx, const BoostedModel& my) {
  if (trace.samples_per_station == 0) throw DatasetError("empty trace");
  const double t_end = trace.samples[trace.samples_per_station - 1].time;
  return predict_positions(mx, my, trace, cfg.arena.width, cfg.arena.height, t_end);
}

struct HeadStage {
  std::vector<StationRadio> radios;
  HeadSelection heads;
  std::vector<std::pair<std::size_t, WeightSweep>> sweeps;
};

inline HeadStage choose_heads(const PipelineConfig& cfg, std::span<const Vec2> positions,
                              const ClusterAssignment& clusters) {
  HeadStage h;
  h.radios = assign_radios(positions, cfg.min_power_dbm, cfg.max_power_dbm, cfg.radio_seed());
  h.heads = select_heads(clusters, h.radios, cfg.heads);
  for (std::size_t c = 0; c < clusters.k; ++c) {
    std::vector<StationRadio> members;
    for (std::size_t i : clusters.members(c)) members.push_back(h.radios[i]);
    if (members.size() >= 2)
      h.sweeps.emplace_back(c, weight_sweep(build_pairwise(members, cfg.heads.path_loss), cfg.sweep_grid,
                                            cfg.sweep_objective));
  }
  return h;
}

struct ScenarioRun {
  std::vector<DeliveryRecord> records;
  RunReport report;
};

// Throughput uses the run's active window (first send to last delivery),
// falling back to the horizon when nothing was delivered.
inline ScenarioRun run_scenario(const PipelineConfig& cfg, const Scenario& scenario, std::span<const Vec2> positions,
                                const ClusterAssignment* clusters, const HeadSelection* heads,
                                std::span<const Packet> workload) {
  TopologyConfig tc;
  tc.mode = scenario.mode;
  tc.clustered = scenario.clustered;
  tc.link = cfg.link;
  tc.arena_center = cfg.arena.center();
  const auto topo = build_topology(tc, positions, clusters, heads);
  ScenarioRun run;
  run.records = run_sim(topo, workload, cfg.horizon_s);
  conservation_check(run.records, workload, topo, cfg.horizon_s);
  double duration = active_window(run.records);
  if (!(duration > 0.0)) duration = cfg.horizon_s;
  run.report = compute_report(run.records, duration, to_string(scenario.mode), scenario.clustering_label());
  return run;
}

struct PipelineResult {
  TrainedModels models;
  std::vector<StationPrediction> predictions;
  ClusterAssignment clusters;
  HeadStage heads;
  std::vector<Packet> workload;
  std::vector<ScenarioRun> runs;  // all_scenarios() order
};

inline PipelineResult run_pipeline_in_memory(const PipelineConfig& cfg) {
  cfg.validate();
  const auto c = cfg.seeded();
  PipelineResult r;
  const auto trace = simulate_random_waypoint(c.arena);
  r.models = train_models(cfg, trace);
  r.predictions = predict_final(cfg, trace, r.models.x, r.models.y);
  const auto positions = positions_of(r.predictions);
  r.clusters = create_clusters(positions, cfg.clustering, cfg.clustering_seed());
  r.heads = choose_heads(cfg, positions, r.clusters);
  r.workload = generate_workload(positions.size(), c.traffic);
  for (const auto& s : all_scenarios())
    r.runs.push_back(run_scenario(cfg, s, positions, &r.clusters, &r.heads.heads, r.workload));
  return r;
}

// ---- file stages -------------------------------------------------------------

inline void stage_mobility(const PipelineConfig& cfg, const fs::path& out) {
  cfg.validate();
  prepare_output(cfg, out);
  write_trace(simulate_random_waypoint(cfg.seeded().arena), out / artifact::trace);
}

inline void stage_train(const PipelineConfig& cfg, const fs::path& trace_path, const fs::path& out) {
  cfg.validate();
  const auto trace = read_trace(trace_path);
  prepare_output(cfg, out);
  const auto m = train_models(cfg, trace);
  write_model(m.x, out / artifact::model_x);
  write_model(m.y, out / artifact::model_y);
  nlohmann::ordered_json rep;
  for (const auto& [axis, r] : {std::pair{"x", m.rmse_x}, std::pair{"y", m.rmse_y}})
    rep[axis] = {{"test_rmse_model", r.model}, {"test_rmse_persistence", r.persistence}};
  io::write_file_atomic(out / artifact::train_report, rep.dump(2) + "\n");
}

inline void stage_predict(const PipelineConfig& cfg, const fs::path& trace_path, const fs::path& model_x_path,
                          const fs::path& model_y_path, const fs::path& out) {
  cfg.validate();
  const auto trace = read_trace(trace_path);
  const auto mx = read_model(model_x_path);
  const auto my = read_model(model_y_path);
  prepare_output(cfg, out);
  write_predictions(predict_final(cfg, trace, mx, my), out / artifact::predictions);
}

inline void stage_cluster(const PipelineConfig& cfg, const fs::path& predictions_path, const fs::path& out) {
  cfg.validate();
  const auto positions = positions_of(read_predictions(predictions_path));
  prepare_output(cfg, out);
  write_clusters(create_clusters(positions, cfg.clustering, cfg.clustering_seed()), out / artifact::clusters);
}

inline void stage_heads(const PipelineConfig& cfg, const fs::path& predictions_path, const fs::path& clusters_path,
                        const fs::path& out) {
  cfg.validate();
  const auto positions = positions_of(read_predictions(predictions_path));
  const auto clusters = read_clusters(clusters_path);
  if (clusters.assignment.size() != positions.size())
    throw SelectionError("clusters and predictions cover different station counts");
  prepare_output(cfg, out);
  const auto h = choose_heads(cfg, positions, clusters);
  write_heads(h.heads, h.radios, out / artifact::heads);
  io::write_file_atomic(out / artifact::sweep, format_sweep_csv(h.sweeps));
}

// clusters_path / heads_path are required only when the scenario uses them.
inline RunReport stage_run(const PipelineConfig& cfg, const Scenario& scenario, const fs::path& predictions_path,
                           const std::optional<fs::path>& clusters_path, const std::optional<fs::path>& heads_path,
                           const fs::path& out) {
  cfg.validate();
  const auto positions = positions_of(read_predictions(predictions_path));
  std::optional<ClusterAssignment> clusters;
  std::optional<HeadsFile> heads;
  if (scenario.clustered || scenario.mode == TopologyMode::decentralized) {
    if (!clusters_path) throw IoError("missing input artifact: clusters file");
    clusters = read_clusters(*clusters_path);
  }
  if (scenario.clustered) {
    if (!heads_path) throw IoError("missing input artifact: heads file");
    heads = read_heads(*heads_path);
  }
  const auto workload = generate_workload(positions.size(), cfg.seeded().traffic);
  auto run = run_scenario(cfg, scenario, positions, clusters ? &*clusters : nullptr, heads ? &heads->heads : nullptr,
                          workload);
  prepare_output(cfg, out);
  write_workload(workload, out / artifact::workload);
  write_records(run.records, out / records_file(scenario));
  write_report(run.report, out / report_json_file(scenario), out / report_csv_file(scenario));
  return run.report;
}

inline void stage_compare(const std::vector<fs::path>& report_paths, const fs::path& out,
                          const std::optional<PipelineConfig>& cfg = std::nullopt) {
  if (report_paths.size() < 2 || report_paths.size() > 4)
    throw ComparisonError("compare takes 2 to 4 reports");
  std::vector<RunReport> reports;
  for (const auto& p : report_paths) reports.push_back(read_report(p));
  const auto comparisons = compare_all_pairs(reports);

  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw IoError("cannot create output directory " + out.string() + ": " + ec.message());
  if (cfg) write_config(*cfg, out / artifact::config);
  auto arr = nlohmann::ordered_json::array();
  for (const auto& c : comparisons) arr.push_back(to_json(c));
  io::write_file_atomic(out / "comparison.json", nlohmann::ordered_json{{"comparisons", arr}}.dump(2) + "\n");
  io::write_file_atomic(out / "summary.csv", format_summary_csv(reports));
  for (Metric m : kMetrics) {
    io::write_file_atomic(out / (std::string("plot_") + metric_name(m) + ".csv"), format_metric_table(reports, m));
    io::write_file_atomic(out / (std::string("plot_") + metric_name(m) + ".svg"), format_summary_svg(reports, m));
  }
}

inline BenchResult stage_bench(const PipelineConfig& cfg, const std::vector<std::size_t>& m_values,
                               const fs::path& out) {
  cfg.validate();
  BenchOptions opt;
  opt.k = cfg.heads.knn_k;
  opt.arena = cfg.arena.width;
  opt.seed = derive_seed(cfg.seed, Stream::bench);
  const auto r = bench_ch(m_values, opt);
  prepare_output(cfg, out);
  io::write_file_atomic(out / "bench.csv", format_bench_csv(r));
  io::write_file_atomic(out / "bench_reference.csv", format_reference_csv(m_values, opt.k));
  nlohmann::ordered_json j{{"pairwise_slope", r.pairwise_slope},
                           {"knn_slope", r.knn_slope},
                           {"k", opt.k},
                           {"total_seconds", r.total_seconds}};
  io::write_file_atomic(out / "bench_summary.json", j.dump(2) + "\n");
  return r;
}

// Every stage in order, all four scenarios, then the comparison.
inline void stage_pipeline(const PipelineConfig& cfg, const fs::path& out) {
  stage_mobility(cfg, out);
  stage_train(cfg, out / artifact::trace, out);
  stage_predict(cfg, out / artifact::trace, out / artifact::model_x, out / artifact::model_y, out);
  stage_cluster(cfg, out / artifact::predictions, out);
  stage_heads(cfg, out / artifact::predictions, out / artifact::clusters, out);
  std::vector<fs::path> reports;
  for (const auto& s : all_scenarios()) {
    stage_run(cfg, s, out / artifact::predictions, out / artifact::clusters, out / artifact::heads, out);
    reports.push_back(out / report_json_file(s));
  }
  stage_compare(reports, out, cfg);
}

}  // namespace uavnet

// uavnet: command-line front end for the clustering pipeline.
//
// Exit status: 0 success, 1 usage error, 2 data or validation error.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "uavnet/pipeline.hpp"

namespace fs = std::filesystem;
using namespace uavnet;

namespace {

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
};

PipelineConfig load_config(const Globals& g) {
  PipelineConfig cfg = g.config_path.empty() ? PipelineConfig{} : read_config(g.config_path);
  if (g.seed) cfg.seed = *g.seed;
  if (!g.out.empty()) cfg.output_dir = g.out;
  cfg.validate();
  return cfg;
}

// An input flag left empty resolves to the standard artifact name in the
// output directory.
fs::path input_or_default(const std::string& flag, const PipelineConfig& cfg, const char* name) {
  return flag.empty() ? fs::path(cfg.output_dir) / name : fs::path(flag);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UAV network clustering pipeline"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "INI configuration file");
  app.add_option("--seed", g.seed, "master seed (overrides the config)");
  app.add_option("--out", g.out, "output directory (overrides the config)");

  std::string trace, model_x, model_y, predictions, clusters, heads;
  std::string mode = "centralized", clustering = "on";
  std::vector<std::string> reports;
  std::vector<std::size_t> m_values{128, 256, 512, 1024, 2048, 4096};

  auto* mobility = app.add_subcommand("mobility", "generate the random-waypoint trace");
  auto* train_cmd = app.add_subcommand("train", "train the x/y position models");
  train_cmd->add_option("--trace", trace, "trace CSV");
  auto* predict_cmd = app.add_subcommand("predict", "predict station positions at the final timestamp");
  predict_cmd->add_option("--trace", trace, "trace CSV");
  predict_cmd->add_option("--model-x", model_x, "x model JSON");
  predict_cmd->add_option("--model-y", model_y, "y model JSON");
  auto* cluster_cmd = app.add_subcommand("cluster", "k-means clusters of the predicted positions");
  cluster_cmd->add_option("--predictions", predictions, "predictions CSV");
  auto* heads_cmd = app.add_subcommand("heads", "select one head per cluster");
  heads_cmd->add_option("--predictions", predictions, "predictions CSV");
  heads_cmd->add_option("--clusters", clusters, "clusters JSON");
  auto* run_cmd = app.add_subcommand("run", "simulate one scenario");
  run_cmd->add_option("--mode", mode, "centralized | decentralized")
      ->check(CLI::IsMember({"centralized", "decentralized"}));
  run_cmd->add_option("--clustering", clustering, "on | off")->check(CLI::IsMember({"on", "off"}));
  run_cmd->add_option("--predictions", predictions, "predictions CSV");
  run_cmd->add_option("--clusters", clusters, "clusters JSON");
  run_cmd->add_option("--heads", heads, "heads JSON");
  auto* compare_cmd = app.add_subcommand("compare", "compare 2 to 4 run reports");
  compare_cmd->add_option("--reports", reports, "report JSON files")->required()->expected(2, 4);
  auto* bench_cmd = app.add_subcommand("bench", "head-selection scaling benchmark");
  bench_cmd->add_option("--m", m_values, "cluster sizes");
  auto* pipeline_cmd = app.add_subcommand("pipeline", "run every stage and all four scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    const auto cfg = load_config(g);
    const fs::path out = cfg.output_dir;
    if (mobility->parsed()) {
      stage_mobility(cfg, out);
    } else if (train_cmd->parsed()) {
      stage_train(cfg, input_or_default(trace, cfg, artifact::trace), out);
    } else if (predict_cmd->parsed()) {
      stage_predict(cfg, input_or_default(trace, cfg, artifact::trace),
                    input_or_default(model_x, cfg, artifact::model_x),
                    input_or_default(model_y, cfg, artifact::model_y), out);
    } else if (cluster_cmd->parsed()) {
      stage_cluster(cfg, input_or_default(predictions, cfg, artifact::predictions), out);
    } else if (heads_cmd->parsed()) {
      stage_heads(cfg, input_or_default(predictions, cfg, artifact::predictions),
                  input_or_default(clusters, cfg, artifact::clusters), out);
    } else if (run_cmd->parsed()) {
      const Scenario s{topology_mode_from_string(mode), clustering == "on"};
      const auto rep = stage_run(cfg, s, input_or_default(predictions, cfg, artifact::predictions),
                                 input_or_default(clusters, cfg, artifact::clusters),
                                 input_or_default(heads, cfg, artifact::heads), out);
      std::cout << s.name() << ": delay " << rep.delay.mean << " ms, jitter " << rep.jitter.mean
                << " ms, throughput " << rep.throughput.mean << " B/s\n";
    } else if (compare_cmd->parsed()) {
      std::vector<fs::path> paths(reports.begin(), reports.end());
      stage_compare(paths, out, cfg);
    } else if (bench_cmd->parsed()) {
      const auto r = stage_bench(cfg, m_values, out);
      std::cout << "pairwise slope " << r.pairwise_slope << ", knn slope " << r.knn_slope << "\n";
    } else if (pipeline_cmd->parsed()) {
      stage_pipeline(cfg, out);
    }
  } catch (const uavnet::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

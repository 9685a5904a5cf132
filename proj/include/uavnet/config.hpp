// config.hpp
//
// Pipeline configuration as an INI file, one section per stage. Every key is
// optional (defaults reproduce the reference scenario), unknown sections or
// keys are rejected, and format_config() writes a complete file that parses
// back to an identical PipelineConfig.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "uavnet/clustering.hpp"
#include "uavnet/error.hpp"
#include "uavnet/headselect.hpp"
#include "uavnet/io.hpp"
#include "uavnet/mobility.hpp"
#include "uavnet/netsim.hpp"
#include "uavnet/predictor.hpp"
#include "uavnet/random.hpp"
#include "uavnet/traffic.hpp"

namespace uavnet {

inline const char* to_string(SweepObjective m) { return m == SweepObjective::literal ? "literal" : "convex"; }

inline SweepObjective sweep_objective_from_string(const std::string& s) {
  if (s == "literal") return SweepObjective::literal;
  if (s == "convex") return SweepObjective::convex;
  throw ConfigError("unknown sweep objective '" + s + "'");
}

// Module seeds are not configured directly; they are derived from
// global.seed by seeded() so one number reproduces the whole run.
struct PipelineConfig {
  std::uint64_t seed = 1;
  std::string output_dir = "out";

  ArenaConfig arena;
  BoostParams boost;
  FeatureWindow window;
  double train_fraction = 0.8;
  ClusteringParams clustering;
  HeadSelectOptions heads;
  double min_power_dbm = 60.0;
  double max_power_dbm = 80.0;
  std::size_t sweep_grid = 11;
  SweepObjective sweep_objective = SweepObjective::literal;
  TrafficParams traffic;
  LinkParams link;
  double horizon_s = 3600.0;
  SimConfig environment;

  PipelineConfig seeded() const {
    PipelineConfig c = *this;
    c.arena.seed = derive_seed(seed, Stream::mobility);
    c.boost.seed = derive_seed(seed, Stream::predictor);
    c.traffic.seed = derive_seed(seed, Stream::traffic);
    return c;
  }
  std::uint64_t clustering_seed() const { return derive_seed(seed, Stream::clustering); }
  std::uint64_t radio_seed() const { return derive_seed(seed, Stream::radios); }

  void validate() const {
    arena.validate();
    boost.validate();
    window.validate();
    clustering.validate();
    traffic.validate();
    link.validate();
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ConfigError("train_fraction must be in (0, 1)");
    if (!(min_power_dbm <= max_power_dbm)) throw ConfigError("min_power must not exceed max_power");
    if (!(heads.w >= 0.0)) throw ConfigError("w must be non-negative");
    if (heads.knn_k < 1) throw ConfigError("knn_k must be >= 1");
    if (!(heads.path_loss.exponent > 0.0) || !(heads.path_loss.reference_m > 0.0))
      throw ConfigError("path loss exponent and reference distance must be positive");
    if (sweep_grid < 2) throw ConfigError("sweep_grid must be >= 2");
    if (!(horizon_s > 0.0)) throw ConfigError("horizon must be positive");
  }
};

namespace detail {

struct ConfigField {
  const char* section;
  const char* key;
  std::function<std::string(const PipelineConfig&)> get;
  std::function<void(PipelineConfig&, const std::string&)> set;
};

inline double to_number(const std::string& v, const char* key) {
  if (auto d = io::parse_double(v)) return *d;
  throw ConfigError(std::string("key '") + key + "': expected a number, got '" + v + "'");
}

inline std::uint64_t to_count(const std::string& v, const char* key) {
  if (auto u = io::parse_uint(v)) return *u;
  throw ConfigError(std::string("key '") + key + "': expected a non-negative integer, got '" + v + "'");
}

template <typename T>
ConfigField real(const char* section, const char* key, T PipelineConfig::*group, double T::*member) {
  return {section, key, [=](const PipelineConfig& c) { return io::format_double(c.*group.*member); },
          [=](PipelineConfig& c, const std::string& v) { c.*group.*member = to_number(v, key); }};
}

inline ConfigField real(const char* section, const char* key, double PipelineConfig::*member) {
  return {section, key, [=](const PipelineConfig& c) { return io::format_double(c.*member); },
          [=](PipelineConfig& c, const std::string& v) { c.*member = to_number(v, key); }};
}

template <typename T, typename U>
ConfigField count(const char* section, const char* key, T PipelineConfig::*group, U T::*member) {
  return {section, key, [=](const PipelineConfig& c) { return std::to_string(c.*group.*member); },
          [=](PipelineConfig& c, const std::string& v) {
            const auto n = to_count(v, key);
            if (n > static_cast<std::uint64_t>(std::numeric_limits<U>::max()))
              throw ConfigError(std::string("key '") + key + "' is out of range");
            c.*group.*member = static_cast<U>(n);
          }};
}

template <typename T>
ConfigField text(const char* section, const char* key, T PipelineConfig::*group, std::string T::*member) {
  return {section, key, [=](const PipelineConfig& c) { return c.*group.*member; },
          [=](PipelineConfig& c, const std::string& v) { c.*group.*member = v; }};
}

inline const std::vector<ConfigField>& config_fields() {
  using C = PipelineConfig;
  static const std::vector<ConfigField> fields = {
      {"global", "seed", [](const C& c) { return std::to_string(c.seed); },
       [](C& c, const std::string& v) { c.seed = to_count(v, "seed"); }},
      {"global", "output_dir", [](const C& c) { return c.output_dir; },
       [](C& c, const std::string& v) { c.output_dir = v; }},

      real("arena", "width", &C::arena, &ArenaConfig::width),
      real("arena", "height", &C::arena, &ArenaConfig::height),
      count("arena", "num_stations", &C::arena, &ArenaConfig::num_stations),
      real("arena", "min_speed", &C::arena, &ArenaConfig::min_speed),
      real("arena", "max_speed", &C::arena, &ArenaConfig::max_speed),
      real("arena", "pause_time", &C::arena, &ArenaConfig::pause_time),
      real("arena", "sample_interval", &C::arena, &ArenaConfig::sample_interval),
      real("arena", "duration", &C::arena, &ArenaConfig::duration),

      count("predictor", "max_depth", &C::boost, &BoostParams::max_depth),
      real("predictor", "learning_rate", &C::boost, &BoostParams::learning_rate),
      real("predictor", "colsample", &C::boost, &BoostParams::colsample),
      real("predictor", "subsample", &C::boost, &BoostParams::subsample),
      count("predictor", "num_rounds", &C::boost, &BoostParams::num_rounds),
      count("predictor", "early_stop_patience", &C::boost, &BoostParams::early_stop_patience),
      real("predictor", "validation_fraction", &C::boost, &BoostParams::validation_fraction),
      count("predictor", "min_samples_leaf", &C::boost, &BoostParams::min_samples_leaf),
      count("predictor", "history", &C::window, &FeatureWindow::history),
      count("predictor", "horizon", &C::window, &FeatureWindow::horizon),
      real("predictor", "train_fraction", &C::train_fraction),

      count("clustering", "k_max", &C::clustering, &ClusteringParams::k_max),
      count("clustering", "fixed_k", &C::clustering, &ClusteringParams::fixed_k),
      count("clustering", "restarts", &C::clustering, &ClusteringParams::restarts),
      count("clustering", "max_iters", &C::clustering, &ClusteringParams::max_iters),
      real("clustering", "tol", &C::clustering, &ClusteringParams::tol),

      {"headselect", "method", [](const C& c) { return std::string(to_string(c.heads.method)); },
       [](C& c, const std::string& v) {
         try {
           c.heads.method = head_method_from_string(v);
         } catch (const Error& e) {
           throw ConfigError(e.what());
         }
       }},
      real("headselect", "w", &C::heads, &HeadSelectOptions::w),
      count("headselect", "knn_k", &C::heads, &HeadSelectOptions::knn_k),
      {"headselect", "path_loss_exponent", [](const C& c) { return io::format_double(c.heads.path_loss.exponent); },
       [](C& c, const std::string& v) { c.heads.path_loss.exponent = to_number(v, "path_loss_exponent"); }},
      {"headselect", "reference_distance",
       [](const C& c) { return io::format_double(c.heads.path_loss.reference_m); },
       [](C& c, const std::string& v) { c.heads.path_loss.reference_m = to_number(v, "reference_distance"); }},
      real("headselect", "min_power", &C::min_power_dbm),
      real("headselect", "max_power", &C::max_power_dbm),
      {"headselect", "sweep_grid", [](const C& c) { return std::to_string(c.sweep_grid); },
       [](C& c, const std::string& v) { c.sweep_grid = to_count(v, "sweep_grid"); }},
      {"headselect", "sweep_objective", [](const C& c) { return std::string(to_string(c.sweep_objective)); },
       [](C& c, const std::string& v) { c.sweep_objective = sweep_objective_from_string(v); }},

      real("traffic", "mean_size", &C::traffic, &TrafficParams::mean_size),
      real("traffic", "size_sigma", &C::traffic, &TrafficParams::size_sigma),
      count("traffic", "min_size", &C::traffic, &TrafficParams::min_size),
      count("traffic", "max_size", &C::traffic, &TrafficParams::max_size),
      real("traffic", "mean_interarrival", &C::traffic, &TrafficParams::mean_interarrival),
      count("traffic", "packets_per_station", &C::traffic, &TrafficParams::packets_per_station),

      real("topology", "bitrate", &C::link, &LinkParams::bitrate_bps),
      real("topology", "processing_delay", &C::link, &LinkParams::processing_s),
      count("topology", "queue_capacity", &C::link, &LinkParams::queue_capacity),
      real("topology", "propagation_speed", &C::link, &LinkParams::propagation_mps),
      real("topology", "radio_range", &C::link, &LinkParams::radio_range_m),
      real("topology", "horizon", &C::horizon_s),

      text("environment", "interference", &C::environment, &SimConfig::interference),
      text("environment", "modulation", &C::environment, &SimConfig::modulation),
      text("environment", "mobility", &C::environment, &SimConfig::mobility_model),
      text("environment", "antenna", &C::environment, &SimConfig::antenna),
      text("environment", "battery", &C::environment, &SimConfig::battery),
      real("environment", "hello_interval", &C::environment, &SimConfig::hello_interval_s),
      real("environment", "expire_time", &C::environment, &SimConfig::expire_time_s),
      real("environment", "initial_q", &C::environment, &SimConfig::initial_q),
      real("environment", "sinr_weight", &C::environment, &SimConfig::sinr_weight),
      real("environment", "latency_threshold", &C::environment, &SimConfig::latency_threshold_s),
      count("environment", "qnoise_lookback", &C::environment, &SimConfig::qnoise_lookback),
      real("environment", "alpha", &C::environment, &SimConfig::alpha),
      real("environment", "epsilon", &C::environment, &SimConfig::epsilon),
  };
  return fields;
}

}  // namespace detail

inline PipelineConfig parse_config(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  const auto& fields = detail::config_fields();
  PipelineConfig cfg;
  for (const auto& [section, entries] : tree) {
    if (entries.empty() && !entries.data().empty())
      throw ConfigError("config key '" + section + "' outside a section");
    bool known_section = false;
    for (const auto& f : fields) known_section = known_section || section == f.section;
    if (!known_section) throw ConfigError("unknown config section [" + section + "]");
    for (const auto& [key, value] : entries) {
      const detail::ConfigField* match = nullptr;
      for (const auto& f : fields)
        if (section == f.section && key == f.key) match = &f;
      if (match == nullptr) throw ConfigError("unknown config key '" + key + "' in [" + section + "]");
      match->set(cfg, value.data());
    }
  }
  cfg.validate();
  return cfg;
}

inline PipelineConfig read_config(const std::filesystem::path& path) {
  io::require_file(path);
  return parse_config(io::read_file(path));
}

inline std::string format_config(const PipelineConfig& cfg) {
  std::string out;
  std::string section;
  for (const auto& f : detail::config_fields()) {
    if (section != f.section) {
      section = f.section;
      out += (out.empty() ? "[" : "\n[") + section + "]\n";
    }
    out += std::string(f.key) + " = " + f.get(cfg) + '\n';
  }
  return out;
}

inline void write_config(const PipelineConfig& cfg, const std::filesystem::path& path) {
  io::write_file_atomic(path, format_config(cfg));
}

}  // namespace uavnet

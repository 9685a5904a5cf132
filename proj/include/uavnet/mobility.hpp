// mobility.hpp
//
// Random-waypoint traces for the station fleet, and their CSV form
// (`time,station_id,x,y`, rows sorted by station then time).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "uavnet/error.hpp"
#include "uavnet/geometry.hpp"
#include "uavnet/io.hpp"
#include "uavnet/random.hpp"

namespace uavnet {

// Arena and fleet parameters. Defaults follow the reference deployment:
// 500 x 500 m, 25 stations, speeds in [0, 15] m/s, one hour of flight.
// pause_time and sample_interval have no reference value; 0 s and 1 s are
// our defaults.
struct ArenaConfig {
  double width = 500.0;
  double height = 500.0;
  std::size_t num_stations = 25;
  double min_speed = 0.0;
  double max_speed = 15.0;
  double pause_time = 0.0;
  double sample_interval = 1.0;
  double duration = 3600.0;
  std::uint64_t seed = 1;

  friend bool operator==(const ArenaConfig&, const ArenaConfig&) = default;

  void validate() const {
    if (!(width > 0.0) || !(height > 0.0)) throw ConfigError("arena width and height must be positive");
    if (!(min_speed >= 0.0) || !(max_speed >= min_speed))
      throw ConfigError("speeds must satisfy 0 <= min_speed <= max_speed");
    if (!(pause_time >= 0.0)) throw ConfigError("pause_time must be non-negative");
    if (!(sample_interval > 0.0)) throw ConfigError("sample_interval must be positive");
    if (!(duration >= sample_interval)) throw ConfigError("duration must be at least one sample_interval");
  }

  std::size_t samples_per_station() const {
    return static_cast<std::size_t>(std::floor(duration / sample_interval + 1e-9)) + 1;
  }

  Vec2 center() const { return {width / 2.0, height / 2.0}; }
};

struct TraceSample {
  double time = 0.0;
  std::size_t station_id = 0;
  double x = 0.0;
  double y = 0.0;

  Vec2 position() const { return {x, y}; }
  friend bool operator==(const TraceSample&, const TraceSample&) = default;
};

// Samples grouped by station: station s occupies
// samples[s * samples_per_station, (s + 1) * samples_per_station).
struct Trace {
  std::size_t num_stations = 0;
  std::size_t samples_per_station = 0;
  std::vector<TraceSample> samples;

  std::span<const TraceSample> station(std::size_t s) const {
    return std::span<const TraceSample>(samples).subspan(s * samples_per_station, samples_per_station);
  }

  double sample_interval() const {
    if (samples_per_station < 2) return 0.0;
    return samples[1].time - samples[0].time;
  }

  friend bool operator==(const Trace&, const Trace&) = default;
};

namespace detail {

// Piecewise-linear random-waypoint walker for one station.
class WaypointWalker {
 public:
  static constexpr double kMinLegSpeed = 0.01;

  WaypointWalker(const ArenaConfig& cfg, Engine& rng)
      : cfg_(cfg), rng_(rng), moving_(cfg.max_speed > 0.0) {
    pos_ = uniform_point();
    if (moving_) start_leg();
  }

  Vec2 position() const { return pos_; }

  void advance(double dt) {
    if (!moving_) return;
    double remaining = dt;
    while (remaining > 0.0) {
      if (pause_left_ > 0.0) {
        const double p = std::min(pause_left_, remaining);
        pause_left_ -= p;
        remaining -= p;
        if (pause_left_ <= 0.0) {
          pause_left_ = 0.0;
          start_leg();
        }
        continue;
      }
      const double dist = distance(pos_, target_);
      const double reach = speed_ * remaining;
      if (reach >= dist) {
        pos_ = target_;
        remaining -= dist / speed_;
        if (cfg_.pause_time > 0.0) {
          pause_left_ = cfg_.pause_time;
        } else {
          start_leg();
        }
      } else {
        const double f = reach / dist;
        pos_.x += (target_.x - pos_.x) * f;
        pos_.y += (target_.y - pos_.y) * f;
        remaining = 0.0;
      }
      pos_.x = std::clamp(pos_.x, 0.0, cfg_.width);
      pos_.y = std::clamp(pos_.y, 0.0, cfg_.height);
    }
  }

 private:
  Vec2 uniform_point() {
    std::uniform_real_distribution<double> ux(0.0, cfg_.width);
    std::uniform_real_distribution<double> uy(0.0, cfg_.height);
    const double x = ux(rng_);
    return {x, uy(rng_)};
  }

  void start_leg() {
    target_ = uniform_point();
    std::uniform_real_distribution<double> us(cfg_.min_speed, cfg_.max_speed);
    // A near-zero draw would park the station for the rest of the run.
    speed_ = std::max(us(rng_), std::min(kMinLegSpeed, cfg_.max_speed));
  }

  const ArenaConfig& cfg_;
  Engine& rng_;
  bool moving_;
  Vec2 pos_;
  Vec2 target_;
  double speed_ = 0.0;
  double pause_left_ = 0.0;
};

}  // namespace detail

inline Trace simulate_random_waypoint(const ArenaConfig& cfg) {
  cfg.validate();
  Trace trace;
  trace.num_stations = cfg.num_stations;
  trace.samples_per_station = cfg.samples_per_station();
  trace.samples.reserve(trace.num_stations * trace.samples_per_station);
  for (std::size_t s = 0; s < cfg.num_stations; ++s) {
    auto rng = make_engine(cfg.seed, {s});
    detail::WaypointWalker walker(cfg, rng);
    for (std::size_t i = 0; i < trace.samples_per_station; ++i) {
      if (i > 0) walker.advance(cfg.sample_interval);
      const Vec2 p = walker.position();
      trace.samples.push_back({static_cast<double>(i) * cfg.sample_interval, s, p.x, p.y});
    }
  }
  return trace;
}

inline constexpr const char* kTraceHeader = "time,station_id,x,y";

inline std::string format_trace(const Trace& trace) {
  std::string out = kTraceHeader;
  out += '\n';
  for (const auto& s : trace.samples) {
    out += io::format_double(s.time);
    out += ',';
    out += std::to_string(s.station_id);
    out += ',';
    out += io::format_double(s.x);
    out += ',';
    out += io::format_double(s.y);
    out += '\n';
  }
  return out;
}

inline void write_trace(const Trace& trace, const std::filesystem::path& path) {
  io::write_file_atomic(path, format_trace(trace));
}

inline Trace parse_trace(const std::vector<std::string>& lines) {
  if (lines.empty() || lines[0] != kTraceHeader)
    throw ParseError(1, std::string("expected header '") + kTraceHeader + "'");

  Trace trace;
  std::vector<std::size_t> counts;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    const std::size_t line_no = n + 1;
    if (lines[n].empty()) {
      if (n + 1 == lines.size()) break;
      throw ParseError(line_no, "empty row");
    }
    auto fields = io::split_fields(lines[n]);
    if (fields.size() != 4)
      throw ParseError(line_no, "expected 4 columns, got " + std::to_string(fields.size()));
    auto t = io::parse_double(fields[0]);
    auto id = io::parse_uint(fields[1]);
    auto x = io::parse_double(fields[2]);
    auto y = io::parse_double(fields[3]);
    if (!t || !id || !x || !y) throw ParseError(line_no, "non-numeric field");

    const TraceSample sample{*t, static_cast<std::size_t>(*id), *x, *y};
    if (trace.samples.empty()) {
      if (sample.station_id != 0) throw ParseError(line_no, "first station must be 0");
      counts.push_back(0);
    } else {
      const auto& prev = trace.samples.back();
      if (sample.station_id == prev.station_id) {
        if (!(sample.time > prev.time)) throw ParseError(line_no, "timestamps must be strictly increasing");
      } else if (sample.station_id == prev.station_id + 1) {
        counts.push_back(0);
      } else {
        throw ParseError(line_no, "station ids must be contiguous and sorted");
      }
    }
    ++counts.back();
    trace.samples.push_back(sample);
  }

  trace.num_stations = counts.size();
  trace.samples_per_station = counts.empty() ? 0 : counts.front();
  for (std::size_t s = 0; s < counts.size(); ++s) {
    if (counts[s] != trace.samples_per_station)
      throw ParseError(0, "station " + std::to_string(s) + " has " + std::to_string(counts[s]) +
                              " samples, expected " + std::to_string(trace.samples_per_station));
  }
  return trace;
}

inline Trace read_trace(const std::filesystem::path& path) {
  io::require_file(path);
  return parse_trace(io::read_lines(path));
}

}  // namespace uavnet

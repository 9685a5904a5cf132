// traffic.hpp
//
// Video-style UDP workload: per-station packet streams with truncated
// Normal sizes and exponential inter-arrival times (a Poisson process).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "uavnet/error.hpp"
#include "uavnet/io.hpp"
#include "uavnet/random.hpp"

namespace uavnet {

// size_sigma is the standard deviation of the Normal size draw; draws
// outside [min_size, max_size] are resampled.
struct TrafficParams {
  double mean_size = 1024.0;
  double size_sigma = 256.0;
  std::uint32_t min_size = 256;
  std::uint32_t max_size = 2048;
  double mean_interarrival = 0.030;
  std::size_t packets_per_station = 100;
  std::uint64_t seed = 0;

  friend bool operator==(const TrafficParams&, const TrafficParams&) = default;

  void validate() const {
    if (!(mean_size > 0.0)) throw ConfigError("mean_size must be positive");
    if (!(size_sigma >= 0.0)) throw ConfigError("size_sigma must be non-negative");
    if (!(min_size > 0 && min_size <= mean_size && mean_size <= max_size))
      throw ConfigError("sizes must satisfy 0 < min_size <= mean_size <= max_size");
    if (!(mean_interarrival > 0.0)) throw ConfigError("mean_interarrival must be positive");
  }
};

struct Packet {
  std::uint64_t packet_id = 0;
  std::size_t src_station = 0;
  std::uint32_t size = 0;  // bytes
  double creation_time = 0.0;

  friend bool operator==(const Packet&, const Packet&) = default;
};

// Packet ids are station_id * packets_per_station + sequence number.
inline std::vector<Packet> generate_flow(std::size_t station_id, const TrafficParams& params) {
  params.validate();
  auto rng = make_engine(params.seed, {static_cast<std::uint64_t>(Stream::traffic), station_id});
  std::exponential_distribution<double> gap(1.0 / params.mean_interarrival);
  std::normal_distribution<double> size(params.mean_size, params.size_sigma > 0.0 ? params.size_sigma : 1.0);

  std::vector<Packet> flow;
  flow.reserve(params.packets_per_station);
  double t = 0.0;
  for (std::size_t i = 0; i < params.packets_per_station; ++i) {
    double dt = 0.0;
    do {
      dt = gap(rng);
    } while (!(dt > 0.0) || !(t + dt > t));
    t += dt;
    std::int64_t bytes = std::llround(params.mean_size);
    if (params.size_sigma > 0.0) {
      do {
        bytes = std::llround(size(rng));
      } while (bytes < params.min_size || bytes > params.max_size);
    }
    flow.push_back({station_id * params.packets_per_station + i, station_id, static_cast<std::uint32_t>(bytes), t});
  }
  return flow;
}

// All stations' flows concatenated in station order.
inline std::vector<Packet> generate_workload(std::size_t num_stations, const TrafficParams& params) {
  std::vector<Packet> all;
  all.reserve(num_stations * params.packets_per_station);
  for (std::size_t s = 0; s < num_stations; ++s) {
    auto flow = generate_flow(s, params);
    all.insert(all.end(), flow.begin(), flow.end());
  }
  return all;
}

inline std::string format_workload(const std::vector<Packet>& packets) {
  std::string out = "packet_id,src,size,creation_time\n";
  for (const auto& p : packets)
    out += std::to_string(p.packet_id) + ',' + std::to_string(p.src_station) + ',' + std::to_string(p.size) + ',' +
           io::format_double(p.creation_time) + '\n';
  return out;
}

inline void write_workload(const std::vector<Packet>& packets, const std::filesystem::path& path) {
  io::write_file_atomic(path, format_workload(packets));
}

}  // namespace uavnet

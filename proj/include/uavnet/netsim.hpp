// netsim.hpp
//
// Discrete-event packet delivery over static relay topologies:
// {centralized, decentralized} x {clustered, non-clustered}.
//
// Every station and relay owns one FIFO transmit queue served by a single
// channel. A hop costs size*8/bitrate of transmission, distance/speed of
// propagation and a fixed processing delay at the receiver. Servers only
// receive.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "uavnet/clustering.hpp"
#include "uavnet/error.hpp"
#include "uavnet/geometry.hpp"
#include "uavnet/headselect.hpp"
#include "uavnet/io.hpp"
#include "uavnet/traffic.hpp"

namespace uavnet {

enum class TopologyMode { centralized, decentralized };

inline const char* to_string(TopologyMode m) {
  return m == TopologyMode::centralized ? "centralized" : "decentralized";
}

inline TopologyMode topology_mode_from_string(const std::string& s) {
  if (s == "centralized") return TopologyMode::centralized;
  if (s == "decentralized") return TopologyMode::decentralized;
  throw ConfigError("unknown topology mode '" + s + "'");
}

struct LinkParams {
  double bitrate_bps = 10e6;
  double processing_s = 1e-4;
  std::size_t queue_capacity = 1000;  // waiting packets, excluding the one on the channel
  double propagation_mps = 3e8;
  double radio_range_m = 500.0;

  friend bool operator==(const LinkParams&, const LinkParams&) = default;

  void validate() const {
    if (!(bitrate_bps > 0.0)) throw ConfigError("bitrate must be positive");
    if (!(processing_s >= 0.0)) throw ConfigError("processing delay must be non-negative");
    if (!(propagation_mps > 0.0)) throw ConfigError("propagation speed must be positive");
    if (!(radio_range_m > 0.0)) throw ConfigError("radio range must be positive");
  }
};

// Routing-protocol and radio settings of the reference deployment. They are
// validated and echoed into every output for provenance; static relay
// forwarding does not read them.
struct SimConfig {
  std::string interference = "orthogonal";
  std::string modulation = "bpsk";
  std::string mobility_model = "random_waypoint";
  std::string antenna = "omnidirectional";
  std::string battery = "linear";
  double hello_interval_s = 0.100;
  double expire_time_s = 0.300;
  double initial_q = 0.0;
  double sinr_weight = 0.7;
  double latency_threshold_s = 0.010;
  std::size_t qnoise_lookback = 10;
  double alpha = 0.2;
  double epsilon = 0.2;

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

struct TopologyConfig {
  TopologyMode mode = TopologyMode::centralized;
  bool clustered = true;
  LinkParams link;
  Vec2 arena_center{250.0, 250.0};
};

// Nodes 0 .. num_stations-1 are stations, the rest are servers.
struct Topology {
  TopologyMode mode = TopologyMode::centralized;
  bool clustered = false;
  LinkParams link;
  std::size_t num_stations = 0;
  std::vector<Vec2> positions;
  std::vector<int> next_hop;  // -1 at servers

  std::size_t num_nodes() const { return positions.size(); }
  std::size_t num_servers() const { return num_nodes() - num_stations; }
  bool is_server(std::size_t node) const { return node >= num_stations; }

  std::vector<std::size_t> path(std::size_t station) const {
    std::vector<std::size_t> p{station};
    while (next_hop[p.back()] >= 0) p.push_back(static_cast<std::size_t>(next_hop[p.back()]));
    return p;
  }
};

// Centralized: one server at the arena center. Decentralized: one server per
// cluster at its centroid. Clustered: members -> head -> server; heads send
// straight to the server. Non-clustered: every station -> its server (the
// only one, or the nearest one).
inline Topology build_topology(const TopologyConfig& cfg, std::span<const Vec2> positions,
                               const ClusterAssignment* clusters, const HeadSelection* heads) {
  cfg.link.validate();
  const std::size_t n = positions.size();
  if (n == 0) throw TopologyError("no stations");
  if ((cfg.clustered || cfg.mode == TopologyMode::decentralized) && clusters == nullptr)
    throw TopologyError("this topology needs cluster assignments");
  if (cfg.clustered && heads == nullptr) throw TopologyError("clustered topology needs cluster heads");
  if (clusters != nullptr && clusters->assignment.size() != n)
    throw TopologyError("cluster assignment does not cover every station");

  Topology t;
  t.mode = cfg.mode;
  t.clustered = cfg.clustered;
  t.link = cfg.link;
  t.num_stations = n;
  t.positions.assign(positions.begin(), positions.end());
  if (cfg.mode == TopologyMode::centralized) {
    t.positions.push_back(cfg.arena_center);
  } else {
    for (const auto& c : clusters->centroids) t.positions.push_back(c);
  }
  t.next_hop.assign(t.positions.size(), -1);

  auto server_of_cluster = [&](std::size_t c) {
    return static_cast<int>(n + (cfg.mode == TopologyMode::centralized ? 0 : c));
  };
  if (cfg.clustered) {
    if (heads->clusters.size() != clusters->k) throw TopologyError("one head per cluster required");
    for (std::size_t c = 0; c < clusters->k; ++c) {
      const std::size_t h = heads->clusters[c].head_id;
      if (h >= n || clusters->assignment[h] != c)
        throw TopologyError("head " + std::to_string(h) + " is not a member of cluster " + std::to_string(c));
    }
    for (std::size_t s = 0; s < n; ++s) {
      const std::size_t c = clusters->assignment[s];
      const std::size_t h = heads->clusters[c].head_id;
      t.next_hop[s] = s == h ? server_of_cluster(c) : static_cast<int>(h);
    }
  } else if (cfg.mode == TopologyMode::centralized) {
    for (std::size_t s = 0; s < n; ++s) t.next_hop[s] = static_cast<int>(n);
  } else {
    for (std::size_t s = 0; s < n; ++s) {
      std::size_t best = n;
      for (std::size_t v = n; v < t.positions.size(); ++v)
        if (squared_distance(positions[s], t.positions[v]) < squared_distance(positions[s], t.positions[best]))
          best = v;
      t.next_hop[s] = static_cast<int>(best);
    }
  }

  for (std::size_t s = 0; s < n; ++s) {
    const double d = distance(t.positions[s], t.positions[static_cast<std::size_t>(t.next_hop[s])]);
    if (d > cfg.link.radio_range_m)
      throw TopologyError("hop from station " + std::to_string(s) + " spans " + io::format_double(d) +
                          " m, beyond the radio range");
  }
  return t;
}

enum class EventKind { arrival, service_start, service_end, delivery, drop };

struct SimEvent {
  double time = 0.0;
  std::uint64_t sequence = 0;
  EventKind kind = EventKind::arrival;
  std::size_t packet = 0;  // index into the workload
  std::size_t node = 0;
};

struct DeliveryRecord {
  std::uint64_t packet_id = 0;
  std::size_t src = 0;
  std::uint32_t size = 0;
  std::vector<std::size_t> path;
  double send_time = 0.0;
  std::optional<double> delivery_time;  // empty when dropped
  bool dropped = false;

  std::size_t hops() const { return path.empty() ? 0 : path.size() - 1; }
  friend bool operator==(const DeliveryRecord&, const DeliveryRecord&) = default;
};

using SimObserver = std::function<void(const SimEvent&)>;

// Runs until the event queue drains or the next event lies past `horizon`.
// Packets created after the horizon are never sent; packets still in the
// network at the horizon are recorded as dropped. Records come back in
// workload order.
inline std::vector<DeliveryRecord> run_sim(const Topology& topo, std::span<const Packet> workload, double horizon,
                                           const SimObserver& observer = {}) {
  topo.link.validate();
  for (const auto& p : workload)
    if (p.src_station >= topo.num_stations)
      throw TopologyError("packet " + std::to_string(p.packet_id) + " comes from an unknown station");

  auto later = [](const SimEvent& a, const SimEvent& b) {
    return a.time > b.time || (a.time == b.time && a.sequence > b.sequence);
  };
  std::priority_queue<SimEvent, std::vector<SimEvent>, decltype(later)> events(later);
  std::uint64_t seq = 0;
  double now = 0.0;
  auto schedule = [&](double time, EventKind kind, std::size_t packet, std::size_t node) {
    if (time < now) throw std::logic_error("event scheduled in the past");
    events.push({time, seq++, kind, packet, node});
  };
  auto notify = [&](EventKind kind, std::size_t packet, std::size_t node) {
    if (observer) observer({now, seq++, kind, packet, node});
  };

  std::vector<DeliveryRecord> records(workload.size());
  std::vector<char> sent(workload.size(), 0), resolved(workload.size(), 0);
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < workload.size(); ++i) {
    const auto& p = workload[i];
    records[i].packet_id = p.packet_id;
    records[i].src = p.src_station;
    records[i].size = p.size;
    records[i].send_time = p.creation_time;
    if (p.creation_time <= horizon) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return workload[a].creation_time < workload[b].creation_time ||
           (workload[a].creation_time == workload[b].creation_time && workload[a].packet_id < workload[b].packet_id);
  });
  for (auto i : order) {
    sent[i] = 1;
    schedule(workload[i].creation_time, EventKind::arrival, i, workload[i].src_station);
  }

  struct NodeState {
    std::deque<std::size_t> queue;
    std::optional<std::size_t> in_service;
  };
  std::vector<NodeState> nodes(topo.num_nodes());
  auto tx_time = [&](std::size_t i) { return static_cast<double>(workload[i].size) * 8.0 / topo.link.bitrate_bps; };
  auto start_service = [&](std::size_t node, std::size_t i) {
    nodes[node].in_service = i;
    notify(EventKind::service_start, i, node);
    schedule(now + tx_time(i), EventKind::service_end, i, node);
  };

  while (!events.empty()) {
    const SimEvent ev = events.top();
    if (ev.time > horizon) break;
    events.pop();
    now = ev.time;
    if (observer) observer(ev);

    if (ev.kind == EventKind::arrival) {
      auto& rec = records[ev.packet];
      rec.path.push_back(ev.node);
      if (topo.is_server(ev.node)) {
        rec.delivery_time = now;
        resolved[ev.packet] = 1;
        notify(EventKind::delivery, ev.packet, ev.node);
        continue;
      }
      auto& st = nodes[ev.node];
      if (!st.in_service) {
        start_service(ev.node, ev.packet);
      } else if (st.queue.size() < topo.link.queue_capacity) {
        st.queue.push_back(ev.packet);
      } else {
        rec.dropped = true;
        resolved[ev.packet] = 1;
        notify(EventKind::drop, ev.packet, ev.node);
      }
    } else if (ev.kind == EventKind::service_end) {
      auto& st = nodes[ev.node];
      const auto next = static_cast<std::size_t>(topo.next_hop[ev.node]);
      const double delay =
          distance(topo.positions[ev.node], topo.positions[next]) / topo.link.propagation_mps + topo.link.processing_s;
      schedule(now + delay, EventKind::arrival, ev.packet, next);
      st.in_service.reset();
      if (!st.queue.empty()) {
        const std::size_t i = st.queue.front();
        st.queue.pop_front();
        start_service(ev.node, i);
      }
    }
  }

  std::vector<DeliveryRecord> out;
  out.reserve(order.size());
  for (std::size_t i = 0; i < workload.size(); ++i) {
    if (!sent[i]) continue;
    if (!resolved[i]) records[i].dropped = true;
    out.push_back(std::move(records[i]));
  }
  return out;
}

struct ConservationReport {
  std::size_t sent = 0;
  std::size_t delivered = 0;
  std::size_t dropped = 0;
};

// sent == delivered + dropped, one record per sent packet, and every
// delivered path follows the topology from its source to a server.
inline ConservationReport conservation_check(std::span<const DeliveryRecord> records, std::span<const Packet> workload,
                                             const Topology& topo, double horizon) {
  ConservationReport r;
  std::vector<const Packet*> expected;
  for (const auto& p : workload)
    if (p.creation_time <= horizon) expected.push_back(&p);
  r.sent = expected.size();
  if (records.size() != expected.size())
    throw ConservationError("sent " + std::to_string(expected.size()) + " packets but found " +
                            std::to_string(records.size()) + " records");
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    const auto& pkt = *expected[i];
    if (rec.packet_id != pkt.packet_id) throw ConservationError("record order does not match the workload");
    if (rec.dropped == rec.delivery_time.has_value())
      throw ConservationError("packet " + std::to_string(rec.packet_id) + " is neither delivered nor dropped");
    if (rec.dropped) {
      ++r.dropped;
      continue;
    }
    ++r.delivered;
    if (*rec.delivery_time < rec.send_time)
      throw ConservationError("packet " + std::to_string(rec.packet_id) + " delivered before it was sent");
    if (rec.path != topo.path(pkt.src_station))
      throw ConservationError("packet " + std::to_string(rec.packet_id) + " took an invalid path");
  }
  if (r.sent != r.delivered + r.dropped) throw ConservationError("sent != delivered + dropped");
  return r;
}

inline std::string format_records(std::span<const DeliveryRecord> records) {
  std::string out = "packet_id,src,hops,send_time,delivery_time,dropped\n";
  for (const auto& r : records) {
    out += std::to_string(r.packet_id) + ',' + std::to_string(r.src) + ',' + std::to_string(r.hops()) + ',' +
           io::format_double(r.send_time) + ',' + (r.delivery_time ? io::format_double(*r.delivery_time) : "") + ',' +
           (r.dropped ? "1" : "0") + '\n';
  }
  return out;
}

inline void write_records(std::span<const DeliveryRecord> records, const std::filesystem::path& path) {
  io::write_file_atomic(path, format_records(records));
}

}  // namespace uavnet

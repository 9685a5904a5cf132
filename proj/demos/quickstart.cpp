// Cluster a short random-waypoint snapshot, pick heads, and compare the
// centralized topology with and without clustering.

#include <iostream>

#include "uavnet/pipeline.hpp"

int main() {
  using namespace uavnet;

  ArenaConfig arena;
  arena.duration = 60.0;
  const auto trace = simulate_random_waypoint(arena);

  std::vector<Vec2> positions;
  for (std::size_t s = 0; s < trace.num_stations; ++s) {
    const auto& last = trace.station(s).back();
    positions.push_back({last.x, last.y});
  }

  const auto clusters = create_clusters(positions, ClusteringParams{}, 42);
  const auto radios = assign_radios(positions, 60.0, 80.0, 42);
  const auto heads = select_heads(clusters, radios);
  std::cout << "k = " << clusters.k << "\n";
  for (const auto& h : heads.clusters)
    std::cout << "  cluster " << h.cluster << ": head " << h.head_id << "\n";

  TrafficParams traffic;
  traffic.seed = 42;
  const auto workload = generate_workload(positions.size(), traffic);

  PipelineConfig cfg;
  for (bool clustered : {false, true}) {
    const auto run = run_scenario(cfg, {TopologyMode::centralized, clustered}, positions, &clusters, &heads, workload);
    std::cout << run.report.label() << ": delay " << run.report.delay.mean << " ms, jitter "
              << run.report.jitter.mean << " ms\n";
  }
}

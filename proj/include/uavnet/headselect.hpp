// headselect.hpp
//
// Cluster-head election. For a cluster of M stations with pairwise
// distances d_ij and received powers p_ij:
//
//   heuristic   Score_i = mean_{j!=i} p_ij - mean_{j!=i} d_ij, head = argmax
//   exact       argmin_i  sum_{j!=i} d_ij - w * sum_{j!=i} p_ij
//               (the one-head-per-cluster 0/1 program, solved by enumerating
//               the M feasible assignments)
//   sweep       J_i(w) = sum_{j!=i} (dn_ij - w * pn_ij) on min-max normalized
//               tables, over a grid of w in [0, 1]
//   knn         the heuristic score restricted to each candidate's k nearest
//               neighbours, found with a k-d tree
//
// Ties always go to the lowest station id. Members inside a cluster are kept
// in ascending station-id order, so "lowest index" and "lowest id" coincide.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "uavnet/clustering.hpp"
#include "uavnet/error.hpp"
#include "uavnet/geometry.hpp"
#include "uavnet/io.hpp"
#include "uavnet/kdtree.hpp"
#include "uavnet/random.hpp"

namespace uavnet {

struct StationRadio {
  std::size_t station_id = 0;
  Vec2 position;
  double base_power_dbm = 70.0;

  friend bool operator==(const StationRadio&, const StationRadio&) = default;
};

// Log-distance path loss: p = P_tx - 10 n log10(max(d, d0) / d0).
struct PathLoss {
  double exponent = 2.0;
  double reference_m = 1.0;

  friend bool operator==(const PathLoss&, const PathLoss&) = default;
};

inline double received_power_at(double base_power_dbm, double d, PathLoss model = {}) {
  return base_power_dbm - 10.0 * model.exponent * std::log10(std::max(d, model.reference_m) / model.reference_m);
}

inline double received_power(const StationRadio& tx, const StationRadio& rx, PathLoss model = {}) {
  return received_power_at(tx.base_power_dbm, distance(tx.position, rx.position), model);
}

// Uniform transmit powers in [power_min, power_max] dBm, one per station.
inline std::vector<StationRadio> assign_radios(std::span<const Vec2> positions, double power_min, double power_max,
                                               std::uint64_t seed) {
  if (!(power_min <= power_max)) throw ConfigError("power_min must not exceed power_max");
  auto rng = make_engine(seed);
  std::uniform_real_distribution<double> power(power_min, power_max);
  std::vector<StationRadio> radios;
  radios.reserve(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) radios.push_back({i, positions[i], power(rng)});
  return radios;
}

// Row-major M x M tables; distance(i, i) = 0 and power(i, i) is unused.
struct PairwiseTables {
  std::vector<std::size_t> station_ids;
  std::vector<double> distances;
  std::vector<double> powers;

  std::size_t size() const { return station_ids.size(); }
  double d(std::size_t i, std::size_t j) const { return distances[i * size() + j]; }
  double p(std::size_t i, std::size_t j) const { return powers[i * size() + j]; }
};

inline PairwiseTables build_pairwise(std::span<const StationRadio> members, PathLoss model = {}) {
  if (members.empty()) throw SelectionError("cluster has no members");
  const std::size_t m = members.size();
  PairwiseTables t;
  t.station_ids.reserve(m);
  for (const auto& r : members) t.station_ids.push_back(r.station_id);
  t.distances.assign(m * m, 0.0);
  t.powers.assign(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j) continue;
      const double dij = distance(members[i].position, members[j].position);
      t.distances[i * m + j] = dij;
      t.powers[i * m + j] = received_power_at(members[i].base_power_dbm, dij, model);
    }
  }
  return t;
}

namespace detail {

// Index of the maximum (or minimum) with ties to the lowest index.
inline std::size_t argmax_first(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

inline std::size_t argmin_first(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] < v[best]) best = i;
  return best;
}

inline double literal_score(double sum_p, double sum_d, std::size_t count) {
  const double inv = 1.0 / static_cast<double>(count);
  return inv * sum_p - inv * sum_d;
}

}  // namespace detail

// Score_i for each member; a singleton cluster scores 0.
inline std::vector<double> heuristic_score(const PairwiseTables& t) {
  const std::size_t m = t.size();
  std::vector<double> scores(m, 0.0);
  if (m < 2) return scores;
  for (std::size_t i = 0; i < m; ++i) {
    double sum_p = 0.0, sum_d = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      sum_p += t.p(i, j);
      sum_d += t.d(i, j);
    }
    scores[i] = detail::literal_score(sum_p, sum_d, m - 1);
  }
  return scores;
}

// Same scores as heuristic_score(build_pairwise(members)) without
// materializing the tables: O(M^2) time, O(M) space for the score table.
inline std::vector<double> streaming_heuristic_score(std::span<const StationRadio> members, PathLoss model = {}) {
  const std::size_t m = members.size();
  std::vector<double> scores(m, 0.0);
  if (m < 2) return scores;
  for (std::size_t i = 0; i < m; ++i) {
    double sum_p = 0.0, sum_d = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      const double dij = distance(members[i].position, members[j].position);
      sum_p += received_power_at(members[i].base_power_dbm, dij, model);
      sum_d += dij;
    }
    scores[i] = detail::literal_score(sum_p, sum_d, m - 1);
  }
  return scores;
}

// Per-candidate value of the weighted objective on raw tables.
inline std::vector<double> exact_objective(const PairwiseTables& t, double w) {
  const std::size_t m = t.size();
  std::vector<double> obj(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double sum_d = 0.0, sum_p = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      sum_d += t.d(i, j);
      sum_p += t.p(i, j);
    }
    obj[i] = sum_d - w * sum_p;
  }
  return obj;
}

inline std::size_t exact_head(const PairwiseTables& t, double w) {
  if (t.size() == 0) throw SelectionError("cluster has no members");
  if (!(w >= 0.0)) throw ParameterError("w must be non-negative");
  const auto obj = exact_objective(t, w);
  return t.station_ids[detail::argmin_first(obj)];
}

enum class SweepObjective {
  literal,  // J = sum dn - w sum pn
  convex,   // J = (1 - w) sum dn - w sum pn
};

// J_i(w) = intercept_i + slope_i * w for every candidate.
struct WeightSweep {
  std::vector<std::size_t> station_ids;
  std::vector<double> grid;
  std::vector<double> intercept;  // sum_j dn_ij
  std::vector<double> slope;      // -sum_j pn_ij (literal) or -(sum dn + sum pn) (convex)
  std::vector<std::vector<double>> objective;  // [grid point][candidate]
  std::vector<std::size_t> argmin;             // station id per grid point
  std::vector<double> norm_distances;          // row-major M x M, diagonal 0
  std::vector<double> norm_powers;
};

namespace detail {

// Min-max over all off-diagonal entries jointly; a constant table maps to 0.
inline std::vector<double> normalize_off_diagonal(std::span<const double> table, std::size_t m) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (i != j) {
        lo = std::min(lo, table[i * m + j]);
        hi = std::max(hi, table[i * m + j]);
      }
  std::vector<double> out(m * m, 0.0);
  const double span = hi - lo;
  if (!(span > 0.0)) return out;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (i != j) out[i * m + j] = (table[i * m + j] - lo) / span;
  return out;
}

}  // namespace detail

inline WeightSweep weight_sweep(const PairwiseTables& t, std::size_t grid_size,
                                SweepObjective mode = SweepObjective::literal) {
  const std::size_t m = t.size();
  if (m < 2) throw SelectionError("weight sweep needs at least 2 stations");
  if (grid_size < 2) throw ParameterError("grid_size must be >= 2");
  WeightSweep s;
  s.station_ids = t.station_ids;
  s.norm_distances = detail::normalize_off_diagonal(t.distances, m);
  s.norm_powers = detail::normalize_off_diagonal(t.powers, m);
  s.intercept.assign(m, 0.0);
  s.slope.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double a = 0.0, b = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      a += s.norm_distances[i * m + j];
      b += s.norm_powers[i * m + j];
    }
    s.intercept[i] = a;
    s.slope[i] = mode == SweepObjective::literal ? -b : -(a + b);
  }
  for (std::size_t g = 0; g < grid_size; ++g) {
    const double w = static_cast<double>(g) / static_cast<double>(grid_size - 1);
    s.grid.push_back(w);
    std::vector<double> row(m);
    for (std::size_t i = 0; i < m; ++i) row[i] = s.intercept[i] + s.slope[i] * w;
    s.argmin.push_back(s.station_ids[detail::argmin_first(row)]);
    s.objective.push_back(std::move(row));
  }
  return s;
}

// Heuristic score over each candidate's k nearest neighbours. Neighbour
// sums run in ascending member order, so with k = M - 1 the result matches
// streaming_heuristic_score bit for bit.
inline std::vector<double> knn_scores(std::span<const StationRadio> members, std::size_t k, PathLoss model = {}) {
  const std::size_t m = members.size();
  if (m < 2) {
    if (k != 0) throw ParameterError("k must be 0 for a singleton cluster");
    return std::vector<double>(m, 0.0);
  }
  if (k < 1 || k > m - 1)
    throw ParameterError("k must be in [1, " + std::to_string(m - 1) + "], got " + std::to_string(k));
  std::vector<Vec2> pts;
  pts.reserve(m);
  for (const auto& r : members) pts.push_back(r.position);
  const KdTree2 tree(pts);
  std::vector<double> scores(m);
  for (std::size_t i = 0; i < m; ++i) {
    auto nbrs = tree.nearest_to_member(i, k);
    std::sort(nbrs.begin(), nbrs.end());
    double sum_p = 0.0, sum_d = 0.0;
    for (auto j : nbrs) {
      const double dij = distance(members[i].position, members[j].position);
      sum_p += received_power_at(members[i].base_power_dbm, dij, model);
      sum_d += dij;
    }
    scores[i] = detail::literal_score(sum_p, sum_d, k);
  }
  return scores;
}

inline std::size_t knn_head(std::span<const StationRadio> members, std::size_t k, PathLoss model = {}) {
  if (members.empty()) throw SelectionError("cluster has no members");
  const auto scores = knn_scores(members, k, model);
  return members[detail::argmax_first(scores)].station_id;
}

enum class HeadMethod { heuristic, exact, knn };

inline const char* to_string(HeadMethod m) {
  switch (m) {
    case HeadMethod::heuristic: return "heuristic";
    case HeadMethod::exact: return "exact";
    case HeadMethod::knn: return "knn";
  }
  return "?";
}

inline HeadMethod head_method_from_string(const std::string& s) {
  if (s == "heuristic") return HeadMethod::heuristic;
  if (s == "exact") return HeadMethod::exact;
  if (s == "knn") return HeadMethod::knn;
  throw ConfigError("unknown head selection method '" + s + "'");
}

struct CandidateScore {
  std::size_t station_id = 0;
  double score = 0.0;
};

struct ClusterHead {
  std::size_t cluster = 0;
  std::size_t head_id = 0;
  HeadMethod method = HeadMethod::heuristic;
  std::optional<double> w;
  std::optional<std::size_t> k;
  // Heuristic and knn report Score_i (higher wins); exact reports the raw
  // objective (lower wins).
  std::vector<CandidateScore> scores;
};

struct HeadSelection {
  std::vector<ClusterHead> clusters;

  std::size_t head_of(std::size_t cluster) const { return clusters.at(cluster).head_id; }
};

struct HeadSelectOptions {
  HeadMethod method = HeadMethod::heuristic;
  double w = 0.5;
  std::size_t knn_k = 16;
  PathLoss path_loss;
};

// One head per cluster. radios[i] must describe station i.
inline HeadSelection select_heads(const ClusterAssignment& clusters, std::span<const StationRadio> radios,
                                  const HeadSelectOptions& options = {}) {
  if (radios.size() != clusters.assignment.size())
    throw SelectionError("radio table covers " + std::to_string(radios.size()) + " stations, clusters cover " +
                         std::to_string(clusters.assignment.size()));
  HeadSelection out;
  std::vector<StationRadio> members;
  for (std::size_t c = 0; c < clusters.k; ++c) {
    members.clear();
    for (std::size_t i = 0; i < clusters.assignment.size(); ++i)
      if (clusters.assignment[i] == c) members.push_back(radios[i]);
    if (members.empty()) throw SelectionError("cluster " + std::to_string(c) + " is empty");

    ClusterHead head;
    head.cluster = c;
    head.method = options.method;
    std::vector<double> values;
    std::size_t pick = 0;
    switch (options.method) {
      case HeadMethod::heuristic:
        values = streaming_heuristic_score(members, options.path_loss);
        pick = detail::argmax_first(values);
        break;
      case HeadMethod::exact:
        head.w = options.w;
        values = exact_objective(build_pairwise(members, options.path_loss), options.w);
        pick = detail::argmin_first(values);
        break;
      case HeadMethod::knn: {
        const std::size_t k = members.size() < 2 ? 0 : std::min(options.knn_k, members.size() - 1);
        head.k = k;
        values = knn_scores(members, k, options.path_loss);
        pick = detail::argmax_first(values);
        break;
      }
    }
    head.head_id = members[pick].station_id;
    for (std::size_t i = 0; i < members.size(); ++i) head.scores.push_back({members[i].station_id, values[i]});
    out.clusters.push_back(std::move(head));
  }
  return out;
}

// ---- serialization -------------------------------------------------------

inline nlohmann::ordered_json to_json(const HeadSelection& h, std::span<const StationRadio> radios) {
  nlohmann::ordered_json j;
  auto clusters = nlohmann::ordered_json::array();
  for (const auto& c : h.clusters) {
    nlohmann::ordered_json e;
    e["cluster"] = c.cluster;
    e["head_id"] = c.head_id;
    e["method"] = to_string(c.method);
    e["w"] = c.w ? nlohmann::ordered_json(*c.w) : nlohmann::ordered_json(nullptr);
    e["k"] = c.k ? nlohmann::ordered_json(*c.k) : nlohmann::ordered_json(nullptr);
    auto scores = nlohmann::ordered_json::array();
    for (const auto& s : c.scores) scores.push_back({{"station_id", s.station_id}, {"score", s.score}});
    e["scores"] = std::move(scores);
    clusters.push_back(std::move(e));
  }
  j["clusters"] = std::move(clusters);
  auto r = nlohmann::ordered_json::array();
  for (const auto& radio : radios)
    r.push_back({{"station_id", radio.station_id},
                 {"x", radio.position.x},
                 {"y", radio.position.y},
                 {"base_power_dbm", radio.base_power_dbm}});
  j["radios"] = std::move(r);
  return j;
}

struct HeadsFile {
  HeadSelection heads;
  std::vector<StationRadio> radios;
};

inline HeadsFile heads_from_json(const nlohmann::json& j) {
  try {
    HeadsFile f;
    for (const auto& e : j.at("clusters")) {
      ClusterHead c;
      c.cluster = e.at("cluster").get<std::size_t>();
      c.head_id = e.at("head_id").get<std::size_t>();
      c.method = head_method_from_string(e.at("method").get<std::string>());
      if (!e.at("w").is_null()) c.w = e.at("w").get<double>();
      if (!e.at("k").is_null()) c.k = e.at("k").get<std::size_t>();
      for (const auto& s : e.at("scores"))
        c.scores.push_back({s.at("station_id").get<std::size_t>(), s.at("score").get<double>()});
      f.heads.clusters.push_back(std::move(c));
    }
    for (const auto& r : j.at("radios"))
      f.radios.push_back({r.at("station_id").get<std::size_t>(),
                          {r.at("x").get<double>(), r.at("y").get<double>()},
                          r.at("base_power_dbm").get<double>()});
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("malformed heads file: ") + e.what());
  }
}

inline void write_heads(const HeadSelection& h, std::span<const StationRadio> radios,
                        const std::filesystem::path& path) {
  io::write_file_atomic(path, to_json(h, radios).dump(2) + "\n");
}

inline HeadsFile read_heads(const std::filesystem::path& path) {
  io::require_file(path);
  try {
    return heads_from_json(nlohmann::json::parse(io::read_file(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(0, path.string() + ": " + e.what());
  }
}

// Long-form sweep table: cluster,station_id,w,objective.
inline std::string format_sweep_csv(const std::vector<std::pair<std::size_t, WeightSweep>>& sweeps) {
  std::string out = "cluster,station_id,w,objective\n";
  for (const auto& [cluster, s] : sweeps)
    for (std::size_t g = 0; g < s.grid.size(); ++g)
      for (std::size_t i = 0; i < s.station_ids.size(); ++i)
        out += std::to_string(cluster) + ',' + std::to_string(s.station_ids[i]) + ',' + io::format_double(s.grid[g]) +
               ',' + io::format_double(s.objective[g][i]) + '\n';
  return out;
}

}  // namespace uavnet

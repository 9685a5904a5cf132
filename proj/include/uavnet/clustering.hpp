// clustering.hpp
//
// k-means (k-means++ seeding, Lloyd iterations) and automatic selection of
// k from the elbow curve by the chord-distance knee criterion.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "uavnet/error.hpp"
#include "uavnet/geometry.hpp"
#include "uavnet/io.hpp"
#include "uavnet/random.hpp"

namespace uavnet {

struct ClusterAssignment {
  std::size_t k = 0;
  std::vector<std::size_t> assignment;  // station -> cluster
  std::vector<Vec2> centroids;
  double wcss = 0.0;
  std::vector<double> wcss_curve;  // WCSS for k = 1 .. wcss_curve.size()
  bool knee_found = false;
  // WCSS after each Lloyd iteration of the run that produced this result.
  std::vector<double> iteration_wcss;

  std::vector<std::size_t> members(std::size_t cluster) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignment.size(); ++i)
      if (assignment[i] == cluster) out.push_back(i);
    return out;
  }
};

struct ClusteringParams {
  std::size_t k_max = 0;    // 0: min(10, n - 1)
  std::size_t fixed_k = 0;  // 0: choose k at the knee
  std::size_t restarts = 10;
  std::size_t max_iters = 100;
  double tol = 1e-6;

  friend bool operator==(const ClusteringParams&, const ClusteringParams&) = default;

  void validate() const {
    if (restarts < 1) throw ConfigError("restarts must be >= 1");
    if (max_iters < 1) throw ConfigError("max_iters must be >= 1");
    if (!(tol >= 0.0)) throw ConfigError("tol must be non-negative");
  }
};

inline std::size_t count_distinct(std::span<const Vec2> points) {
  std::vector<Vec2> sorted(points.begin(), points.end());
  auto less = [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); };
  std::sort(sorted.begin(), sorted.end(), less);
  return static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
}

inline double compute_wcss(std::span<const Vec2> points, std::span<const std::size_t> assignment,
                           std::span<const Vec2> centroids) {
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) total += squared_distance(points[i], centroids[assignment[i]]);
  return total;
}

namespace detail {

inline std::vector<Vec2> kmeanspp_init(std::span<const Vec2> points, std::size_t k, Engine& rng) {
  const std::size_t n = points.size();
  std::vector<Vec2> centers;
  std::uniform_int_distribution<std::size_t> first(0, n - 1);
  centers.push_back(points[first(rng)]);
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(points[i], centers[0]);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (centers.size() < k) {
    double total = 0.0;
    for (double v : d2) total += v;
    if (!(total > 0.0)) throw ClusteringError("not enough distinct points for k-means++ seeding");
    const double target = unit(rng) * total;
    std::size_t pick = n;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (d2[i] <= 0.0) continue;
      acc += d2[i];
      pick = i;
      if (acc > target) break;
    }
    centers.push_back(points[pick]);
    for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], squared_distance(points[i], centers.back()));
  }
  return centers;
}

// Nearest centroid with ties to the lowest cluster index. Returns whether
// any assignment changed.
inline bool assign_nearest(std::span<const Vec2> points, std::span<const Vec2> centroids,
                           std::vector<std::size_t>& assignment) {
  bool changed = false;
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::size_t best = 0;
    double best_d = squared_distance(points[i], centroids[0]);
    for (std::size_t c = 1; c < centroids.size(); ++c) {
      const double d = squared_distance(points[i], centroids[c]);
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    if (assignment[i] != best) {
      assignment[i] = best;
      changed = true;
    }
  }
  return changed;
}

// Moves the point farthest from its own centroid into each empty cluster.
inline bool repair_empty(std::span<const Vec2> points, std::vector<Vec2>& centroids,
                         std::vector<std::size_t>& assignment) {
  const std::size_t k = centroids.size();
  bool repaired = false;
  std::vector<std::size_t> sizes(k, 0);
  for (auto a : assignment) ++sizes[a];
  for (std::size_t c = 0; c < k; ++c) {
    if (sizes[c] > 0) continue;
    std::size_t far = points.size();
    double far_d = -1.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (sizes[assignment[i]] < 2) continue;
      const double d = squared_distance(points[i], centroids[assignment[i]]);
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    if (far == points.size()) throw ClusteringError("cannot repair empty cluster");
    --sizes[assignment[far]];
    assignment[far] = c;
    sizes[c] = 1;
    centroids[c] = points[far];
    repaired = true;
  }
  return repaired;
}

inline std::vector<Vec2> member_means(std::span<const Vec2> points, std::span<const std::size_t> assignment,
                                      std::size_t k) {
  std::vector<Vec2> sums(k);
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    sums[assignment[i]].x += points[i].x;
    sums[assignment[i]].y += points[i].y;
    ++counts[assignment[i]];
  }
  for (std::size_t c = 0; c < k; ++c) {
    sums[c].x /= static_cast<double>(counts[c]);
    sums[c].y /= static_cast<double>(counts[c]);
  }
  return sums;
}

}  // namespace detail

// One k-means run, k-means++ seeded. Stops when the assignment stops
// changing (the centroids then move by exactly 0, below any `tol`) or after
// max_iters updates.
inline ClusterAssignment kmeans(std::span<const Vec2> points, std::size_t k, std::uint64_t seed,
                                std::size_t max_iters = 100, [[maybe_unused]] double tol = 1e-6) {
  if (k < 1) throw ClusteringError("k must be >= 1");
  if (count_distinct(points) < k)
    throw ClusteringError("need at least " + std::to_string(k) + " distinct points, have " +
                          std::to_string(count_distinct(points)));
  auto rng = make_engine(seed);
  ClusterAssignment result;
  result.k = k;
  result.centroids = detail::kmeanspp_init(points, k, rng);
  result.assignment.assign(points.size(), 0);
  detail::assign_nearest(points, result.centroids, result.assignment);
  detail::repair_empty(points, result.centroids, result.assignment);

  for (std::size_t iter = 0; iter < max_iters; ++iter) {
    auto updated = detail::member_means(points, result.assignment, k);
    result.centroids = std::move(updated);
    result.iteration_wcss.push_back(compute_wcss(points, result.assignment, result.centroids));

    bool changed = detail::assign_nearest(points, result.centroids, result.assignment);
    changed = detail::repair_empty(points, result.centroids, result.assignment) || changed;
    if (!changed) break;
  }
  // A run cut off by max_iters may leave centroids one update behind.
  result.centroids = detail::member_means(points, result.assignment, k);
  result.wcss = compute_wcss(points, result.assignment, result.centroids);
  return result;
}

// Best (lowest WCSS) of `restarts` k-means runs; ties keep the earliest.
inline ClusterAssignment kmeans_best_of(std::span<const Vec2> points, std::size_t k, std::uint64_t seed,
                                        std::size_t restarts, std::size_t max_iters = 100, double tol = 1e-6) {
  ClusterAssignment best;
  for (std::size_t r = 0; r < restarts; ++r) {
    auto e = make_engine(seed, {k, r});
    auto run = kmeans(points, k, e(), max_iters, tol);
    if (r == 0 || run.wcss < best.wcss) best = std::move(run);
  }
  return best;
}

// WCSS for k = 1 .. k_max, each the best of `restarts` runs, then made
// non-increasing by taking prefix minima.
inline std::vector<double> elbow_curve(std::span<const Vec2> points, std::size_t k_max, std::uint64_t seed,
                                       std::size_t restarts = 10, std::size_t max_iters = 100, double tol = 1e-6) {
  if (k_max < 1) throw ClusteringError("k_max must be >= 1");
  if (k_max > count_distinct(points)) throw ClusteringError("k_max exceeds the number of distinct points");
  std::vector<double> curve;
  for (std::size_t k = 1; k <= k_max; ++k) {
    const double w = kmeans_best_of(points, k, seed, restarts, max_iters, tol).wcss;
    curve.push_back(curve.empty() ? w : std::min(curve.back(), w));
  }
  return curve;
}

struct Knee {
  std::size_t k = 1;
  bool found = false;
};

// Normalizes k and WCSS to [0, 1] and picks the point farthest below the
// chord joining the curve's endpoints. Ties go to the smaller k; a curve
// that never drops more than 1e-6 below the chord has no knee (k = 1).
inline Knee knee_point(std::span<const double> curve) {
  const std::size_t n = curve.size();
  if (n < 3) throw ClusteringError("knee detection needs at least 3 curve points");
  const auto [lo_it, hi_it] = std::minmax_element(curve.begin(), curve.end());
  const double lo = *lo_it;
  const double span = *hi_it - lo;
  if (!(span > 0.0)) return {1, false};

  auto nx = [n](std::size_t i) { return static_cast<double>(i) / static_cast<double>(n - 1); };
  auto ny = [&](std::size_t i) { return (curve[i] - lo) / span; };
  const double x0 = nx(0), y0 = ny(0);
  const double dx = nx(n - 1) - x0, dy = ny(n - 1) - y0;
  const double len = std::hypot(dx, dy);

  double best = -std::numeric_limits<double>::infinity();
  std::size_t best_i = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double below = -(dx * (ny(i) - y0) - dy * (nx(i) - x0)) / len;
    if (below > best) {
      best = below;
      best_i = i;
    }
  }
  if (best < 1e-6) return {1, false};
  return {best_i + 1, true};
}

inline ClusterAssignment create_clusters(std::span<const Vec2> points, const ClusteringParams& params,
                                         std::uint64_t seed) {
  params.validate();
  const std::size_t n = points.size();
  if (n == 0) throw ClusteringError("no points to cluster");
  const std::size_t distinct = count_distinct(points);
  std::size_t k_max = params.k_max != 0 ? params.k_max : std::min<std::size_t>(10, n > 1 ? n - 1 : 1);
  k_max = std::min(k_max, distinct);

  std::vector<double> curve = elbow_curve(points, k_max, seed, params.restarts, params.max_iters, params.tol);
  std::size_t k = params.fixed_k;
  bool knee_found = false;
  if (k == 0) {
    const Knee knee = knee_point(curve);
    k = knee.k;
    knee_found = knee.found;
  }
  if (k > distinct) throw ClusteringError("fixed_k exceeds the number of distinct points");
  auto result = kmeans_best_of(points, k, seed, params.restarts, params.max_iters, params.tol);
  result.wcss_curve = std::move(curve);
  result.knee_found = knee_found;
  return result;
}

// ---- serialization -------------------------------------------------------

inline nlohmann::ordered_json to_json(const ClusterAssignment& c) {
  nlohmann::ordered_json j;
  j["k"] = c.k;
  j["knee_found"] = c.knee_found;
  j["wcss"] = c.wcss;
  j["wcss_curve"] = c.wcss_curve;
  auto centroids = nlohmann::ordered_json::array();
  for (const auto& p : c.centroids) centroids.push_back({p.x, p.y});
  j["centroids"] = std::move(centroids);
  nlohmann::ordered_json assignment = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < c.assignment.size(); ++i) assignment[std::to_string(i)] = c.assignment[i];
  j["assignment"] = std::move(assignment);
  return j;
}

inline ClusterAssignment clusters_from_json(const nlohmann::json& j) {
  try {
    ClusterAssignment c;
    c.k = j.at("k").get<std::size_t>();
    c.knee_found = j.at("knee_found").get<bool>();
    c.wcss = j.at("wcss").get<double>();
    c.wcss_curve = j.at("wcss_curve").get<std::vector<double>>();
    for (const auto& p : j.at("centroids")) c.centroids.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    const auto& a = j.at("assignment");
    c.assignment.assign(a.size(), 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
      const auto cluster = a.at(std::to_string(i)).get<std::size_t>();
      if (cluster >= c.k) throw ParseError(0, "station " + std::to_string(i) + " assigned to unknown cluster");
      c.assignment[i] = cluster;
    }
    if (c.centroids.size() != c.k) throw ParseError(0, "centroid count differs from k");
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("malformed clusters file: ") + e.what());
  }
}

inline void write_clusters(const ClusterAssignment& c, const std::filesystem::path& path) {
  io::write_file_atomic(path, to_json(c).dump(2) + "\n");
}

inline ClusterAssignment read_clusters(const std::filesystem::path& path) {
  io::require_file(path);
  try {
    return clusters_from_json(nlohmann::json::parse(io::read_file(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(0, path.string() + ": " + e.what());
  }
}

}  // namespace uavnet

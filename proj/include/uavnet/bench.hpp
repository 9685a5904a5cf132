// bench.hpp
//
// Scaling benchmark for per-cluster head selection: all-pairs scoring
// versus k-d tree + kNN scoring, with a least-squares fit of
// log(time) against log(M).

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "uavnet/error.hpp"
#include "uavnet/headselect.hpp"
#include "uavnet/io.hpp"
#include "uavnet/random.hpp"

namespace uavnet {

struct BenchRow {
  std::string method;  // "pairwise" | "knn"
  std::size_t m = 0;
  double median_ns = 0.0;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  double pairwise_slope = 0.0;
  double knn_slope = 0.0;
  double total_seconds = 0.0;
  // Sum of the selected head indices; keeps the timed calls observable.
  std::size_t checksum = 0;
};

struct BenchOptions {
  std::size_t repetitions = 9;
  std::size_t k = 16;
  // Each timing sample repeats the operation until at least this long has
  // elapsed and reports the per-call mean.
  double min_sample_seconds = 0.02;
  double arena = 500.0;
  std::uint64_t seed = 7;
};

// Slope of the least-squares line through (log x, log y).
inline double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw BenchmarkError("need at least two points for a slope fit");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (!(denom > 0.0)) throw BenchmarkError("degenerate x values in slope fit");
  return (n * sxy - sx * sy) / denom;
}

inline std::vector<StationRadio> random_cluster(std::size_t m, double arena, Engine& rng) {
  std::uniform_real_distribution<double> pos(0.0, arena);
  std::uniform_real_distribution<double> power(60.0, 80.0);
  std::vector<StationRadio> members;
  members.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double x = pos(rng);
    const double y = pos(rng);
    members.push_back({i, {x, y}, power(rng)});
  }
  return members;
}

namespace detail {

template <typename Fn>
double time_per_call_ns(Fn&& fn, double min_seconds, std::size_t& sink) {
  using clock = std::chrono::steady_clock;
  std::size_t calls = 0;
  const auto start = clock::now();
  double elapsed = 0.0;
  do {
    sink += fn();
    ++calls;
    elapsed = std::chrono::duration<double>(clock::now() - start).count();
  } while (elapsed < min_seconds);
  return elapsed * 1e9 / static_cast<double>(calls);
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

}  // namespace detail

inline BenchResult bench_ch(std::span<const std::size_t> m_values, const BenchOptions& opt = {}) {
  std::vector<std::size_t> distinct(m_values.begin(), m_values.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 3) throw BenchmarkError("need at least 3 distinct M values");
  if (distinct.front() < 64) throw BenchmarkError("every M must be >= 64");
  if (opt.repetitions < 1) throw BenchmarkError("repetitions must be >= 1");
  if (opt.k < 1 || opt.k >= distinct.front()) throw BenchmarkError("k must be in [1, min M - 1]");

  const auto start = std::chrono::steady_clock::now();
  BenchResult result;
  std::vector<double> ms, pairwise_ns, knn_ns;
  std::size_t sink = 0;
  for (std::size_t m : distinct) {
    auto rng = make_engine(opt.seed, {m});
    const auto members = random_cluster(m, opt.arena, rng);
    std::vector<double> pw, kn;
    // Untimed warm-up so first-touch costs stay out of the samples.
    sink += detail::argmax_first(streaming_heuristic_score(members)) + knn_head(members, opt.k);
    for (std::size_t r = 0; r < opt.repetitions; ++r) {
      pw.push_back(detail::time_per_call_ns(
          [&] {
            const auto s = streaming_heuristic_score(members);
            return static_cast<std::size_t>(detail::argmax_first(s));
          },
          opt.min_sample_seconds, sink));
      kn.push_back(detail::time_per_call_ns([&] { return knn_head(members, opt.k); }, opt.min_sample_seconds, sink));
    }
    result.rows.push_back({"pairwise", m, detail::median(pw)});
    result.rows.push_back({"knn", m, detail::median(kn)});
    ms.push_back(static_cast<double>(m));
    pairwise_ns.push_back(result.rows[result.rows.size() - 2].median_ns);
    knn_ns.push_back(result.rows.back().median_ns);
  }
  result.checksum = sink;
  result.pairwise_slope = loglog_slope(ms, pairwise_ns);
  result.knn_slope = loglog_slope(ms, knn_ns);
  result.total_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

inline std::string format_bench_csv(const BenchResult& r) {
  std::string out = "method,M,median_ns\n";
  for (const auto& row : r.rows)
    out += row.method + ',' + std::to_string(row.m) + ',' + io::format_double(row.median_ns) + '\n';
  return out;
}

// Analytic growth curves for the complexity figure, as log10(operation
// count). Only the pairwise and knn series correspond to implemented
// algorithms; the others are reference shapes.
inline std::string format_reference_csv(std::span<const std::size_t> m_values, std::size_t k) {
  constexpr double kMetaheuristicIterations = 200.0;
  constexpr double kMetaheuristicPopulation = 50.0;
  std::string out = "series,M,log10_ops\n";
  for (std::size_t mi : m_values) {
    const double m = static_cast<double>(mi);
    auto row = [&](const char* name, double log10_ops) {
      out += std::string(name) + ',' + std::to_string(mi) + ',' + io::format_double(log10_ops) + '\n';
    };
    row("pairwise_M2", 2.0 * std::log10(m));
    row("knn_MlogM_kM", std::log10(m * std::log2(m) + static_cast<double>(k) * m));
    row("metaheuristic_linear", std::log10(kMetaheuristicIterations * kMetaheuristicPopulation * m));
    row("exhaustive_factorial", std::lgamma(m + 1.0) / std::log(10.0));
  }
  return out;
}

}  // namespace uavnet

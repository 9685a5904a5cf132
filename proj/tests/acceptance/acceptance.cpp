// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Each check rebuilds its expectation independently of the
// library code it exercises.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "uavnet/bench.hpp"
#include "uavnet/clustering.hpp"
#include "uavnet/headselect.hpp"
#include "uavnet/netsim.hpp"
#include "uavnet/pipeline.hpp"
#include "uavnet/predictor.hpp"
#include "uavnet/traffic.hpp"

using namespace uavnet;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<StationRadio> random_members(std::size_t m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(0.0, 500.0), pw(60.0, 80.0);
  std::vector<StationRadio> r;
  for (std::size_t i = 0; i < m; ++i) {
    const double x = pos(rng), y = pos(rng);
    r.push_back({i, {x, y}, pw(rng)});
  }
  return r;
}

// Literal maximisation of Score_i = mean_j P_ij - mean_j d_ij.
std::size_t argmax_score_oracle(const std::vector<StationRadio>& m) {
  std::size_t best = 0;
  double best_s = -INFINITY;
  for (std::size_t i = 0; i < m.size(); ++i) {
    double sp = 0, sd = 0;
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (j == i) continue;
      const double d = std::hypot(m[i].position.x - m[j].position.x, m[i].position.y - m[j].position.y);
      sd += d;
      sp += m[i].base_power_dbm - 20.0 * std::log10(std::max(d, 1.0));
    }
    const double s = (sp - sd) / static_cast<double>(m.size() - 1);
    if (s > best_s) {
      best_s = s;
      best = i;
    }
  }
  return best;
}

Outcome ac1() {
  Outcome o;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<std::size_t> msize(2, 12);
  std::size_t agree = 0, oracle_agree = 0;
  for (int c = 0; c < 1000; ++c) {
    const auto members = random_members(msize(rng), rng);
    const auto t = build_pairwise(members);
    const auto scores = heuristic_score(t);
    const std::size_t h = t.station_ids[detail::argmax_first(scores)];
    if (h == exact_head(t, 1.0)) ++agree;
    if (h == argmax_score_oracle(members)) ++oracle_agree;
  }
  const double secs = seconds_since(t0);
  o.detail << agree << "/1000 heuristic == exact(w=1), " << oracle_agree << "/1000 vs independent scorer, " << secs
           << " s";
  o.require(agree == 1000, "identity");
  o.require(oracle_agree >= 990, "independent scorer");
  o.require(secs < 5.0, "runtime");
  return o;
}

Outcome ac2() {
  Outcome o;
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<std::size_t> msize(2, 10);
  std::size_t mismatches = 0, checks = 0;
  for (int inst = 0; inst < 200; ++inst) {
    const auto members = random_members(msize(rng), rng);
    const auto t = build_pairwise(members);
    const std::size_t n = t.size();
    for (double w : {0.0, 0.25, 0.5, 1.0}) {
      // Every binary vector x with exactly one 1; objective sum_i x_i sum_j (d_ij - w P_ij).
      double best = INFINITY;
      std::size_t best_i = 0;
      for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
        if (std::popcount(mask) != 1) continue;
        double obj = 0;
        for (std::size_t i = 0; i < n; ++i) {
          if (!((mask >> i) & 1u)) continue;
          double sd = 0, sp = 0;
          for (std::size_t j = 0; j < n; ++j)
            if (j != i) {
              sd += t.d(i, j);
              sp += t.p(i, j);
            }
          obj += sd - w * sp;
        }
        if (obj < best) {
          best = obj;
          best_i = static_cast<std::size_t>(std::countr_zero(mask));
        }
      }
      ++checks;
      if (exact_head(t, w) != t.station_ids[best_i]) ++mismatches;
    }
  }
  o.detail << mismatches << " mismatches in " << checks << " (instance, w) pairs";
  o.require(mismatches == 0, "enumeration");
  return o;
}

Outcome ac3() {
  Outcome o;
  std::mt19937_64 rng(303);
  double worst = 0.0;
  for (int inst = 0; inst < 100; ++inst) {
    const auto t = build_pairwise(random_members(2 + inst % 11, rng));
    for (auto mode : {SweepObjective::literal, SweepObjective::convex}) {
      const auto s = weight_sweep(t, 11, mode);
      for (std::size_t i = 0; i < t.size(); ++i) {
        const double j0 = s.objective.front()[i], j1 = s.objective.back()[i];
        for (std::size_t g = 0; g < 11; ++g) {
          const double w = static_cast<double>(g) / 10.0;
          worst = std::max(worst, std::abs(s.objective[g][i] - (j0 + w * (j1 - j0))));
        }
      }
    }
  }
  // Dominance: a central high-power station among low-power corner stations.
  const std::vector<StationRadio> dom{
      {0, {0, 0}, 60}, {1, {100, 0}, 60}, {2, {0, 100}, 60}, {3, {50, 50}, 80}, {4, {100, 100}, 60}};
  const auto s = weight_sweep(build_pairwise(dom), 11);
  const bool single = std::all_of(s.argmin.begin(), s.argmin.end(), [](std::size_t h) { return h == 3; });
  o.detail << "max deviation from the chord " << worst << ", dominance argmin station 3 at all 11 weights: "
           << (single ? "yes" : "no");
  o.require(worst <= 1e-12, "collinearity");
  o.require(single, "dominance");
  return o;
}

Outcome ac4() {
  Outcome o;
  const std::vector<std::size_t> ms{128, 256, 512, 1024, 2048, 4096};
  const auto t0 = Clock::now();
  BenchOptions opt;
  opt.k = 16;
  const auto r = bench_ch(ms, opt);
  const double secs = seconds_since(t0);
  o.detail << "pairwise slope " << r.pairwise_slope << ", kNN slope " << r.knn_slope << ", " << secs << " s";
  o.require(r.pairwise_slope >= 1.8 && r.pairwise_slope <= 2.2, "pairwise slope");
  o.require(r.knn_slope <= 1.4, "kNN slope");
  o.require(secs < 60.0, "runtime");
  return o;
}

Outcome ac5() {
  Outcome o;
  const auto t0 = Clock::now();
  TrafficParams p;
  p.packets_per_station = 1000000;
  p.seed = 505;
  const auto flow = generate_flow(0, p);
  double bytes = 0.0;
  for (const auto& pk : flow) bytes += pk.size;
  const double mean_size = bytes / static_cast<double>(flow.size());
  const double mean_gap = flow.back().creation_time / static_cast<double>(flow.size());
  const double secs = seconds_since(t0);
  const double size_err = std::abs(mean_size - 1024.0) / 1024.0;
  const double gap_err = std::abs(mean_gap - 0.030) / 0.030;
  o.detail << flow.size() << " packets, mean size " << mean_size << " B (" << 100 * size_err << "%), mean gap "
           << mean_gap * 1e3 << " ms (" << 100 * gap_err << "%), " << secs << " s";
  o.require(flow.size() == 1000000, "sample count");
  o.require(size_err <= 0.01, "size");
  o.require(gap_err <= 0.01, "inter-arrival");
  o.require(secs < 5.0, "runtime");
  return o;
}

double exhaustive_wcss(const std::vector<Vec2>& pts, std::size_t k) {
  const std::size_t n = pts.size();
  std::vector<std::size_t> label(n, 0);
  double best = INFINITY;
  while (true) {
    std::vector<double> sx(k, 0), sy(k, 0), cnt(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      sx[label[i]] += pts[i].x;
      sy[label[i]] += pts[i].y;
      cnt[label[i]] += 1;
    }
    if (std::all_of(cnt.begin(), cnt.end(), [](double c) { return c > 0; })) {
      double w = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const double mx = sx[label[i]] / cnt[label[i]], my = sy[label[i]] / cnt[label[i]];
        w += (pts[i].x - mx) * (pts[i].x - mx) + (pts[i].y - my) * (pts[i].y - my);
      }
      best = std::min(best, w);
    }
    std::size_t d = 0;
    while (d < n && ++label[d] == k) label[d++] = 0;
    if (d == n) break;
  }
  return best;
}

std::vector<Vec2> uniform_points(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 500.0);
  std::vector<Vec2> p(n);
  for (auto& v : p) {
    v.x = u(rng);
    v.y = u(rng);
  }
  return p;
}

Outcome ac6() {
  Outcome o;
  std::mt19937_64 rng(606);
  std::size_t monotone = 0;
  for (int d = 0; d < 100; ++d) {
    const auto p = uniform_points(30 + d % 40, rng);
    const auto r = kmeans(p, 2 + d % 8, static_cast<std::uint64_t>(d));
    bool ok = true;
    for (std::size_t i = 1; i < r.iteration_wcss.size(); ++i) ok = ok && r.iteration_wcss[i] <= r.iteration_wcss[i - 1];
    monotone += ok;
  }
  std::size_t optimal = 0, cases = 0;
  double worst = 0.0;
  for (int d = 0; d < 60; ++d) {
    const auto p = uniform_points(3 + d % 7, rng);
    for (std::size_t k = 1; k <= 3; ++k) {
      const double gap = std::abs(kmeans_best_of(p, k, static_cast<std::uint64_t>(d), 20).wcss - exhaustive_wcss(p, k));
      worst = std::max(worst, gap);
      ++cases;
      optimal += gap <= 1e-9;
    }
  }
  std::size_t knees = 0;
  const std::vector<Vec2> centers{{100, 100}, {400, 100}, {250, 400}};
  for (std::uint64_t s = 0; s < 100; ++s) {
    std::mt19937_64 g(7000 + s);
    std::normal_distribution<double> noise(0.0, 15.0);
    std::vector<Vec2> p;
    for (const auto& c : centers)
      for (int i = 0; i < 10; ++i) {
        const double x = c.x + noise(g), y = c.y + noise(g);
        p.push_back({x, y});
      }
    knees += create_clusters(p, ClusteringParams{}, s).k == 3;
  }
  o.detail << monotone << "/100 monotone runs, " << optimal << "/" << cases << " best-of-20 runs at the exhaustive optimum "
           << "(worst gap " << worst << "), knee k=3 in " << knees << "/100";
  o.require(monotone == 100, "monotone");
  o.require(optimal == cases, "exhaustive");
  o.require(knees >= 95, "knee");
  return o;
}

SupervisedRows single_feature(const std::vector<double>& x) {
  SupervisedRows r;
  r.feature_names = {"f0"};
  for (double v : x) {
    r.features.push_back(v);
    r.station_id.push_back(0);
  }
  return r;
}

Outcome ac7() {
  Outcome o;
  const auto rows = single_feature({1, 2, 3, 4, 5, 6, 7, 8});
  const std::vector<double> flat(8, 3.7);
  const auto mc = train(rows, flat, BoostParams{});
  double const_err = 0.0;
  for (std::size_t i = 0; i < 8; ++i) const_err = std::max(const_err, std::abs(predict(mc, rows.row(i)) - 3.7));

  const auto two = single_feature({0.0, 1.0});
  const std::vector<double> target{0.0, 1.0};
  double shrink_err = 0.0;
  for (int n : {1, 2, 5, 10, 30, 100}) {
    BoostParams p;
    p.max_depth = 1;
    p.min_samples_leaf = 1;
    p.num_rounds = n;
    p.early_stop_patience = 0;
    const auto m = train(two, target, p);
    for (std::size_t i = 0; i < 2; ++i)
      shrink_err = std::max(shrink_err,
                            std::abs(std::abs(target[i] - predict(m, two.row(i))) - 0.5 * std::pow(0.9, n)));
  }

  const PipelineConfig cfg;
  const auto trace = simulate_random_waypoint(cfg.seeded().arena);
  const auto models = train_models(cfg, trace);
  o.detail << "constant-target error " << const_err << ", shrinkage deviation " << shrink_err << ", test RMSE x "
           << models.rmse_x.model << " (persistence " << models.rmse_x.persistence << "), y " << models.rmse_y.model
           << " (persistence " << models.rmse_y.persistence << ")";
  o.require(const_err == 0.0, "constant target");
  o.require(shrink_err <= 1e-9, "shrinkage");
  o.require(models.rmse_x.model <= models.rmse_x.persistence && models.rmse_y.model <= models.rmse_y.persistence,
            "persistence");
  return o;
}

Outcome ac8() {
  Outcome o;
  PipelineConfig cfg;
  cfg.arena.duration = 600;
  std::size_t runs = 0, conserved = 0;
  for (std::size_t cap : {std::size_t{1}, std::size_t{2}, std::size_t{1000}}) {
    for (std::uint64_t seed : {1, 2, 3}) {
      cfg.seed = seed;
      cfg.link.queue_capacity = cap;
      auto tight = cfg;
      if (cap == 1) tight.traffic.mean_interarrival = 0.001;
      const auto c = tight.seeded();
      const auto trace = simulate_random_waypoint(c.arena);
      std::vector<Vec2> pos;
      for (std::size_t s = 0; s < trace.num_stations; ++s) {
        const auto st = trace.station(s);
        pos.push_back({st.back().x, st.back().y});
      }
      const auto clusters = create_clusters(pos, tight.clustering, tight.clustering_seed());
      const auto heads = choose_heads(tight, pos, clusters);
      const auto workload = generate_workload(pos.size(), c.traffic);
      for (const auto& sc : all_scenarios()) {
        TopologyConfig tc{sc.mode, sc.clustered, tight.link, tight.arena.center()};
        const auto topo = build_topology(tc, pos, &clusters, &heads.heads);
        const auto rec = run_sim(topo, workload, tight.horizon_s);
        ++runs;
        std::size_t delivered = 0, dropped = 0;
        for (const auto& r : rec) (r.dropped ? dropped : delivered) += 1;
        std::size_t sent = 0;
        for (const auto& p : workload) sent += p.creation_time <= tight.horizon_s;
        bool ok = sent == delivered + dropped && rec.size() == sent;
        try {
          conservation_check(rec, workload, topo, tight.horizon_s);
        } catch (const Error&) {
          ok = false;
        }
        conserved += ok;
      }
    }
  }

  // One station, one hop to the server at the arena centre.
  TopologyConfig tc;
  tc.clustered = false;
  const std::vector<Vec2> one{{250.0 - 120.0, 250.0 + 160.0}};
  const auto topo = build_topology(tc, one, nullptr, nullptr);
  double worst = 0.0;
  for (std::uint32_t size : {64u, 1024u, 1500u, 2048u}) {
    const std::vector<Packet> w{{0, 0, size, 0.5}};
    const auto rec = run_sim(topo, w, 10.0);
    const double expected = size * 8.0 / 10e6 + 200.0 / 3e8 + 1e-4;
    worst = std::max(worst, rec.size() == 1 && rec[0].delivery_time ? std::abs(*rec[0].delivery_time - 0.5 - expected)
                                                                     : INFINITY);
  }

  // Replay: the full run twice, compared as serialized bytes.
  PipelineConfig rc;
  rc.arena.duration = 900;
  auto serialize = [&] {
    const auto r = run_pipeline_in_memory(rc);
    std::string s;
    for (const auto& run : r.runs) s += format_records(run.records) + format_report_csv(run.report);
    return s;
  };
  const bool identical = serialize() == serialize();

  o.detail << conserved << "/" << runs << " runs conserve packets (capacities 1, 2, 1000), closed-form deviation "
           << worst << " s, replay " << (identical ? "byte-identical" : "differs");
  o.require(conserved == runs, "conservation");
  o.require(worst <= 1e-9, "closed form");
  o.require(identical, "replay");
  return o;
}

// a < b, where values equal to within 1e-9 relative count as not less.
bool clearly_less(double a, double b) {
  return a < b && std::abs(a - b) > 1e-9 * std::max(std::abs(a), std::abs(b));
}

double pct_change(double from, double to) { return 100.0 * (to - from) / from; }

Outcome ac9() {
  Outcome o;
  const auto t0 = Clock::now();
  int a = 0, b = 0, c = 0;
  const int seeds = 10;
  double sum_a = 0, sum_jit = 0, sum_cd = 0, sum_ct = 0, sum_dd = 0, sum_dt = 0;
  for (int seed = 1; seed <= seeds; ++seed) {
    PipelineConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(seed);
    const auto r = run_pipeline_in_memory(cfg);
    // all_scenarios(): centralized/off, centralized/on, decentralized/off, decentralized/on
    const auto& c_off = r.runs[0].report;
    const auto& c_on = r.runs[1].report;
    const auto& d_off = r.runs[2].report;
    const auto& d_on = r.runs[3].report;
    const bool ok_a = clearly_less(d_on.delay.mean, c_on.delay.mean);
    const bool ok_b = clearly_less(c_on.delay.mean, c_off.delay.mean) &&
                      clearly_less(d_on.delay.mean, d_off.delay.mean) &&
                      clearly_less(c_off.throughput.mean, c_on.throughput.mean) &&
                      clearly_less(d_off.throughput.mean, d_on.throughput.mean);
    const bool ok_c = clearly_less(d_on.jitter.mean, c_on.jitter.mean);
    a += ok_a;
    b += ok_b;
    c += ok_c;
    sum_a += pct_change(c_on.delay.mean, d_on.delay.mean);
    sum_jit += pct_change(c_on.jitter.mean, d_on.jitter.mean);
    sum_cd += pct_change(c_off.delay.mean, c_on.delay.mean);
    sum_ct += pct_change(c_off.throughput.mean, c_on.throughput.mean);
    sum_dd += pct_change(d_off.delay.mean, d_on.delay.mean);
    sum_dt += pct_change(d_off.throughput.mean, d_on.throughput.mean);
    std::printf("  seed %2d  delay ms c/off %.6f c/on %.6f d/off %.6f d/on %.6f | jitter ms c/on %.9f d/on %.9f | "
                "throughput B/s c/off %.2f c/on %.2f d/off %.2f d/on %.2f\n",
                seed, c_off.delay.mean, c_on.delay.mean, d_off.delay.mean, d_on.delay.mean, c_on.jitter.mean,
                d_on.jitter.mean, c_off.throughput.mean, c_on.throughput.mean, d_off.throughput.mean,
                d_on.throughput.mean);
  }
  const double secs = seconds_since(t0);
  std::printf("  informational, mean over seeds (published figures in brackets):\n");
  std::printf("    decentralized vs centralized, clustered: delay %+.2f%% [-16.3%%], jitter %+.2f%% [-51%%]\n",
              sum_a / seeds, sum_jit / seeds);
  std::printf("    clustering, centralized: delay %+.2f%%, throughput %+.2f%% [table: -11.5%% / +9.8%%]\n", sum_cd / seeds,
              sum_ct / seeds);
  std::printf("    clustering, decentralized: delay %+.2f%%, throughput %+.2f%% [table: -18.4%% / +11.7%%; text: "
              "-16.3%% / +15.5%%]\n",
              sum_dd / seeds, sum_dt / seeds);
  std::printf("    the published text and summary table give different decentralized magnitudes; none is enforced here\n");
  o.detail << "(a) " << a << "/10, (b) " << b << "/10, (c) " << c << "/10, " << secs << " s";
  o.require(a >= 9, "(a) decentralized delay");
  o.require(b >= 9, "(b) clustering gain");
  o.require(c >= 9, "(c) decentralized jitter");
  o.require(secs < 600.0, "runtime");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"AC1 head-selection identity", ac1}, {"AC2 one-hot enumeration", ac2}, {"AC3 weight sweep", ac3},
      {"AC4 complexity slopes", ac4},       {"AC5 traffic statistics", ac5},  {"AC6 clustering", ac6},
      {"AC7 predictor", ac7},               {"AC8 simulator soundness", ac8}, {"AC9 directional reproduction", ac9},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail.str() << std::endl;
    failed += !o.pass;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}

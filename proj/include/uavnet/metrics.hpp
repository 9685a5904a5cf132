// metrics.hpp
//
// Per-station and aggregate delay, jitter and throughput from delivery
// records, plus signed-percentage comparisons between runs.
//
// Jitter is the mean absolute difference of consecutive end-to-end delays in
// a station's delivery-ordered flow (0 with fewer than two deliveries).
// Dropped packets count toward the drop column only.

#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "uavnet/error.hpp"
#include "uavnet/io.hpp"
#include "uavnet/netsim.hpp"

namespace uavnet {

struct StationMetrics {
  std::size_t station_id = 0;
  // Absent when the station delivered nothing.
  std::optional<double> delay_ms;
  std::optional<double> jitter_ms;
  std::optional<double> throughput_Bps;
  std::size_t delivered = 0;
  std::size_t dropped = 0;

  friend bool operator==(const StationMetrics&, const StationMetrics&) = default;
};

// Unweighted mean and population standard deviation over the stations that
// have the metric.
struct Aggregate {
  double mean = 0.0;
  double std = 0.0;
  std::size_t count = 0;

  friend bool operator==(const Aggregate&, const Aggregate&) = default;
};

enum class Metric { delay, jitter, throughput };
inline constexpr Metric kMetrics[] = {Metric::delay, Metric::jitter, Metric::throughput};

inline const char* metric_name(Metric m) {
  switch (m) {
    case Metric::delay: return "delay_ms";
    case Metric::jitter: return "jitter_ms";
    case Metric::throughput: return "throughput_Bps";
  }
  return "";
}

inline const std::optional<double>& metric_value(const StationMetrics& s, Metric m) {
  switch (m) {
    case Metric::delay: return s.delay_ms;
    case Metric::jitter: return s.jitter_ms;
    default: return s.throughput_Bps;
  }
}

struct RunReport {
  std::string mode;        // "centralized" | "decentralized"
  std::string clustering;  // "on" | "off"
  double duration_s = 0.0;
  std::vector<StationMetrics> stations;  // ascending station id
  Aggregate delay, jitter, throughput;

  std::string label() const { return mode + "/" + clustering; }
  const Aggregate& aggregate(Metric m) const {
    return m == Metric::delay ? delay : m == Metric::jitter ? jitter : throughput;
  }
  Aggregate& aggregate(Metric m) { return const_cast<Aggregate&>(std::as_const(*this).aggregate(m)); }

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

inline Aggregate aggregate_of(std::span<const StationMetrics> stations, Metric m) {
  Aggregate a;
  double sum = 0.0;
  for (const auto& s : stations)
    if (const auto& v = metric_value(s, m)) {
      sum += *v;
      ++a.count;
    }
  if (a.count == 0) return a;
  a.mean = sum / static_cast<double>(a.count);
  double ss = 0.0;
  for (const auto& s : stations)
    if (const auto& v = metric_value(s, m)) ss += (*v - a.mean) * (*v - a.mean);
  a.std = std::sqrt(ss / static_cast<double>(a.count));
  return a;
}

// Time from the first send to the last delivery.
inline double active_window(std::span<const DeliveryRecord> records) {
  double first = 0.0, last = 0.0;
  bool any_sent = false, any_delivered = false;
  for (const auto& r : records) {
    if (!any_sent || r.send_time < first) first = r.send_time;
    any_sent = true;
    if (r.delivery_time && (!any_delivered || *r.delivery_time > last)) last = *r.delivery_time;
    any_delivered = any_delivered || r.delivery_time.has_value();
  }
  return any_delivered ? last - first : 0.0;
}

inline RunReport compute_report(std::span<const DeliveryRecord> records, double duration, std::string mode = "",
                                std::string clustering = "") {
  if (!(duration > 0.0)) throw EvaluationError("report duration must be positive");
  RunReport rep;
  rep.mode = std::move(mode);
  rep.clustering = std::move(clustering);
  rep.duration_s = duration;

  std::map<std::size_t, std::vector<const DeliveryRecord*>> by_station;
  for (const auto& r : records) by_station[r.src].push_back(&r);
  for (auto& [station, recs] : by_station) {
    StationMetrics s;
    s.station_id = station;
    std::vector<const DeliveryRecord*> delivered;
    for (const auto* r : recs) {
      if (r->delivery_time) {
        if (*r->delivery_time < r->send_time) throw EvaluationError("delivery before send");
        delivered.push_back(r);
      } else {
        ++s.dropped;
      }
    }
    s.delivered = delivered.size();
    if (!delivered.empty()) {
      std::stable_sort(delivered.begin(), delivered.end(), [](const auto* a, const auto* b) {
        return *a->delivery_time < *b->delivery_time ||
               (*a->delivery_time == *b->delivery_time && a->packet_id < b->packet_id);
      });
      double delay_sum = 0.0, jitter_sum = 0.0, bytes = 0.0, prev = 0.0;
      for (std::size_t i = 0; i < delivered.size(); ++i) {
        const double d = (*delivered[i]->delivery_time - delivered[i]->send_time) * 1000.0;
        delay_sum += d;
        if (i > 0) jitter_sum += std::abs(d - prev);
        prev = d;
        bytes += delivered[i]->size;
      }
      const double n = static_cast<double>(delivered.size());
      s.delay_ms = delay_sum / n;
      s.jitter_ms = delivered.size() < 2 ? 0.0 : jitter_sum / (n - 1.0);
      s.throughput_Bps = bytes / duration;
    }
    rep.stations.push_back(s);
  }
  for (Metric m : kMetrics) rep.aggregate(m) = aggregate_of(rep.stations, m);
  return rep;
}

inline std::string format_report_csv(const RunReport& rep) {
  auto opt = [](const std::optional<double>& v) { return v ? io::format_double(*v) : std::string(); };
  std::string out = "station_id,delay_ms,jitter_ms,throughput_Bps,delivered,dropped\n";
  for (const auto& s : rep.stations)
    out += std::to_string(s.station_id) + ',' + opt(s.delay_ms) + ',' + opt(s.jitter_ms) + ',' +
           opt(s.throughput_Bps) + ',' + std::to_string(s.delivered) + ',' + std::to_string(s.dropped) + '\n';
  return out;
}

namespace detail {

inline nlohmann::ordered_json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

inline std::optional<double> optional_from_json(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const RunReport& rep) {
  nlohmann::ordered_json j;
  j["mode"] = rep.mode;
  j["clustering"] = rep.clustering;
  j["duration_s"] = rep.duration_s;
  nlohmann::ordered_json agg;
  for (Metric m : kMetrics) {
    const auto& a = rep.aggregate(m);
    agg[metric_name(m)] = {{"mean", a.mean}, {"std", a.std}, {"count", a.count}};
  }
  j["aggregates"] = agg;
  auto stations = nlohmann::ordered_json::array();
  for (const auto& s : rep.stations) {
    nlohmann::ordered_json row;
    row["station_id"] = s.station_id;
    for (Metric m : kMetrics) row[metric_name(m)] = detail::optional_json(metric_value(s, m));
    row["delivered"] = s.delivered;
    row["dropped"] = s.dropped;
    stations.push_back(row);
  }
  j["stations"] = stations;
  return j;
}

inline RunReport report_from_json(const nlohmann::json& j) {
  try {
    RunReport rep;
    rep.mode = j.at("mode").get<std::string>();
    rep.clustering = j.at("clustering").get<std::string>();
    rep.duration_s = j.at("duration_s").get<double>();
    for (const auto& row : j.at("stations")) {
      StationMetrics s;
      s.station_id = row.at("station_id").get<std::size_t>();
      s.delay_ms = detail::optional_from_json(row.at("delay_ms"));
      s.jitter_ms = detail::optional_from_json(row.at("jitter_ms"));
      s.throughput_Bps = detail::optional_from_json(row.at("throughput_Bps"));
      s.delivered = row.at("delivered").get<std::size_t>();
      s.dropped = row.at("dropped").get<std::size_t>();
      rep.stations.push_back(s);
    }
    for (Metric m : kMetrics) {
      const auto& a = j.at("aggregates").at(metric_name(m));
      rep.aggregate(m) = {a.at("mean").get<double>(), a.at("std").get<double>(), a.at("count").get<std::size_t>()};
    }
    return rep;
  } catch (const nlohmann::json::exception& e) {
    throw EvaluationError(std::string("malformed report: ") + e.what());
  }
}

inline void write_report(const RunReport& rep, const std::filesystem::path& json_path,
                         const std::filesystem::path& csv_path) {
  io::write_file_atomic(json_path, to_json(rep).dump(2) + "\n");
  io::write_file_atomic(csv_path, format_report_csv(rep));
}

inline RunReport read_report(const std::filesystem::path& path) {
  io::require_file(path);
  try {
    return report_from_json(nlohmann::json::parse(io::read_file(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw EvaluationError(path.string() + ": " + e.what());
  }
}

struct Delta {
  std::optional<double> a, b;
  std::optional<double> difference;  // b - a
  std::optional<double> percent;     // 100 (b - a) / a; absent when a == 0 or missing

  friend bool operator==(const Delta&, const Delta&) = default;
};

inline Delta make_delta(std::optional<double> a, std::optional<double> b) {
  Delta d{a, b, std::nullopt, std::nullopt};
  if (a && b) {
    d.difference = *b - *a;
    if (*a != 0.0) d.percent = 100.0 * (*b - *a) / *a;
  }
  return d;
}

struct StationDelta {
  std::size_t station_id = 0;
  Delta delay, jitter, throughput;
};

struct Comparison {
  std::string label_a, label_b;
  Delta delay, jitter, throughput;  // on the aggregate means
  std::vector<StationDelta> stations;

  const Delta& delta(Metric m) const { return m == Metric::delay ? delay : m == Metric::jitter ? jitter : throughput; }
};

inline Comparison compare(const RunReport& a, const RunReport& b) {
  if (a.stations.size() != b.stations.size())
    throw ComparisonError("reports " + a.label() + " and " + b.label() + " cover different station sets");
  for (std::size_t i = 0; i < a.stations.size(); ++i)
    if (a.stations[i].station_id != b.stations[i].station_id)
      throw ComparisonError("reports " + a.label() + " and " + b.label() + " cover different station sets");
  Comparison c;
  c.label_a = a.label();
  c.label_b = b.label();
  c.delay = make_delta(a.delay.mean, b.delay.mean);
  c.jitter = make_delta(a.jitter.mean, b.jitter.mean);
  c.throughput = make_delta(a.throughput.mean, b.throughput.mean);
  for (std::size_t i = 0; i < a.stations.size(); ++i) {
    const auto& sa = a.stations[i];
    const auto& sb = b.stations[i];
    c.stations.push_back({sa.station_id, make_delta(sa.delay_ms, sb.delay_ms),
                          make_delta(sa.jitter_ms, sb.jitter_ms), make_delta(sa.throughput_Bps, sb.throughput_Bps)});
  }
  return c;
}

// Every unordered pair (i < j), i as the baseline.
inline std::vector<Comparison> compare_all_pairs(std::span<const RunReport> reports) {
  std::vector<Comparison> out;
  for (std::size_t i = 0; i < reports.size(); ++i)
    for (std::size_t j = i + 1; j < reports.size(); ++j) out.push_back(compare(reports[i], reports[j]));
  return out;
}

inline nlohmann::ordered_json to_json(const Delta& d) {
  return {{"a", detail::optional_json(d.a)},
          {"b", detail::optional_json(d.b)},
          {"difference", detail::optional_json(d.difference)},
          {"percent", detail::optional_json(d.percent)},
          {"percent_defined", d.percent.has_value()}};
}

inline nlohmann::ordered_json to_json(const Comparison& c) {
  nlohmann::ordered_json j;
  j["baseline"] = c.label_a;
  j["candidate"] = c.label_b;
  nlohmann::ordered_json agg;
  for (Metric m : kMetrics) agg[metric_name(m)] = to_json(c.delta(m));
  j["aggregates"] = agg;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& s : c.stations) {
    nlohmann::ordered_json row;
    row["station_id"] = s.station_id;
    row["delay_ms"] = to_json(s.delay);
    row["jitter_ms"] = to_json(s.jitter);
    row["throughput_Bps"] = to_json(s.throughput);
    rows.push_back(row);
  }
  j["stations"] = rows;
  return j;
}

// One column per report: station_id,<label>,<label>,...
inline std::string format_metric_table(std::span<const RunReport> reports, Metric m) {
  std::string out = "station_id";
  for (const auto& r : reports) out += ',' + r.label();
  out += '\n';
  if (reports.empty()) return out;
  for (std::size_t i = 0; i < reports.front().stations.size(); ++i) {
    out += std::to_string(reports.front().stations[i].station_id);
    for (const auto& r : reports) {
      const auto& v = metric_value(r.stations[i], m);
      out += ',' + (v ? io::format_double(*v) : std::string());
    }
    out += '\n';
  }
  return out;
}

inline std::string format_summary_csv(std::span<const RunReport> reports) {
  std::string out = "scenario,metric,mean,std,stations\n";
  for (const auto& r : reports)
    for (Metric m : kMetrics) {
      const auto& a = r.aggregate(m);
      out += r.label() + ',' + metric_name(m) + ',' + io::format_double(a.mean) + ',' + io::format_double(a.std) +
             ',' + std::to_string(a.count) + '\n';
    }
  return out;
}

// Bar chart of one metric's mean per scenario with +-1 std whiskers.
inline std::string format_summary_svg(std::span<const RunReport> reports, Metric m) {
  constexpr double kWidth = 480, kHeight = 320, kLeft = 60, kBottom = 40, kTop = 30;
  double top = 0.0;
  for (const auto& r : reports) top = std::max(top, r.aggregate(m).mean + r.aggregate(m).std);
  if (!(top > 0.0)) top = 1.0;
  const double plot_h = kHeight - kBottom - kTop;
  const double slot = reports.empty() ? 0.0 : (kWidth - kLeft - 20) / static_cast<double>(reports.size());
  auto fmt = [](double v) { return io::format_double(std::round(v * 100.0) / 100.0); };
  auto y_of = [&](double v) { return kTop + plot_h * (1.0 - v / top); };

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth) + "\" height=\"" +
                    fmt(kHeight) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg += "<text x=\"" + fmt(kWidth / 2) + "\" y=\"18\" text-anchor=\"middle\">" + metric_name(m) + "</text>\n";
  svg += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(kTop) + "\" x2=\"" + fmt(kLeft) + "\" y2=\"" +
         fmt(kHeight - kBottom) + "\" stroke=\"black\"/>\n";
  svg += "<text x=\"" + fmt(kLeft - 4) + "\" y=\"" + fmt(kTop + 4) + "\" text-anchor=\"end\">" + fmt(top) +
         "</text>\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& a = reports[i].aggregate(m);
    const double x = kLeft + slot * static_cast<double>(i) + slot * 0.2;
    const double w = slot * 0.6;
    svg += "<rect x=\"" + fmt(x) + "\" y=\"" + fmt(y_of(a.mean)) + "\" width=\"" + fmt(w) + "\" height=\"" +
           fmt(kHeight - kBottom - y_of(a.mean)) + "\" fill=\"steelblue\"/>\n";
    svg += "<line x1=\"" + fmt(x + w / 2) + "\" y1=\"" + fmt(y_of(a.mean + a.std)) + "\" x2=\"" + fmt(x + w / 2) +
           "\" y2=\"" + fmt(y_of(std::max(0.0, a.mean - a.std))) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + fmt(x + w / 2) + "\" y=\"" + fmt(kHeight - kBottom + 16) + "\" text-anchor=\"middle\">" +
           reports[i].label() + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace uavnet

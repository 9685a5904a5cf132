#include <gtest/gtest.h>

#include <cmath>

#include "temp_dir.hpp"
#include "uavnet/mobility.hpp"

using namespace uavnet;

namespace {

ArenaConfig short_config(std::uint64_t seed) {
  ArenaConfig c;
  c.duration = 200.0;
  c.seed = seed;
  return c;
}

}  // namespace

TEST(ArenaConfig, Validation) {
  ArenaConfig c;
  EXPECT_NO_THROW(c.validate());
  c.width = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.min_speed = 5;
  c.max_speed = 4;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.sample_interval = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.duration = 0.5;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_THROW(simulate_random_waypoint(c), ConfigError);
}

TEST(RandomWaypoint, ReferenceScenarioShape) {
  const auto t = simulate_random_waypoint(ArenaConfig{});
  EXPECT_EQ(t.num_stations, 25u);
  EXPECT_EQ(t.samples_per_station, 3601u);
  ASSERT_EQ(t.samples.size(), 25u * 3601u);
  for (const auto& s : t.samples) {
    ASSERT_GE(s.x, 0.0);
    ASSERT_LE(s.x, 500.0);
    ASSERT_GE(s.y, 0.0);
    ASSERT_LE(s.y, 500.0);
  }
  for (std::size_t s = 0; s < t.num_stations; ++s) {
    const auto st = t.station(s);
    for (std::size_t i = 0; i < st.size(); ++i) {
      EXPECT_EQ(st[i].station_id, s);
      EXPECT_EQ(st[i].time, static_cast<double>(i));
    }
  }
}

TEST(RandomWaypoint, ZeroSpeedStationsNeverMove) {
  ArenaConfig c = short_config(9);
  c.max_speed = 0.0;
  const auto t = simulate_random_waypoint(c);
  for (std::size_t s = 0; s < t.num_stations; ++s) {
    const auto st = t.station(s);
    for (const auto& p : st) {
      EXPECT_EQ(p.x, st[0].x);
      EXPECT_EQ(p.y, st[0].y);
    }
  }
}

TEST(RandomWaypoint, BoundsAndSpeedLimitOverManyConfigs) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 10000; ++trial) {
    ArenaConfig c;
    c.width = 1.0 + 999.0 * u(rng);
    c.height = 1.0 + 999.0 * u(rng);
    c.num_stations = 1;
    c.max_speed = 40.0 * u(rng);
    c.min_speed = c.max_speed * u(rng);
    c.pause_time = u(rng) < 0.5 ? 0.0 : 5.0 * u(rng);
    c.sample_interval = 0.1 + 2.0 * u(rng);
    c.duration = c.sample_interval * 20.0;
    c.seed = rng();
    const auto t = simulate_random_waypoint(c);
    for (std::size_t i = 0; i < t.samples.size(); ++i) {
      const auto& p = t.samples[i];
      ASSERT_TRUE(p.x >= 0.0 && p.x <= c.width && p.y >= 0.0 && p.y <= c.height) << "trial " << trial;
      if (i > 0) {
        const double step = std::hypot(p.x - t.samples[i - 1].x, p.y - t.samples[i - 1].y);
        ASSERT_LE(step, c.max_speed * c.sample_interval + 1e-9) << "trial " << trial;
      }
    }
  }
}

TEST(RandomWaypoint, SeedDeterminism) {
  EXPECT_EQ(simulate_random_waypoint(short_config(1)), simulate_random_waypoint(short_config(1)));
  for (std::uint64_t s : {1u, 2u, 3u})
    EXPECT_NE(simulate_random_waypoint(short_config(s)), simulate_random_waypoint(short_config(s + 100)));
}

TEST(RandomWaypoint, StationsMoveIndependently) {
  const auto t = simulate_random_waypoint(short_config(4));
  EXPECT_NE(t.station(0)[0].x, t.station(1)[0].x);
}

TEST(TraceFile, RoundTripIsExact) {
  TempDir dir;
  const auto t = simulate_random_waypoint(short_config(7));
  write_trace(t, dir / "trace.csv");
  const auto back = read_trace(dir / "trace.csv");
  EXPECT_EQ(back, t);
  write_trace(back, dir / "again.csv");
  EXPECT_EQ(io::read_file(dir / "trace.csv"), io::read_file(dir / "again.csv"));
}

TEST(TraceFile, EmptyTraceIsHeaderOnly) {
  Trace t;
  EXPECT_EQ(format_trace(t), "time,station_id,x,y\n");
  EXPECT_EQ(parse_trace({"time,station_id,x,y"}), t);
}

TEST(TraceFile, ErrorsNameTheLine) {
  auto expect_line = [](const std::vector<std::string>& lines, std::size_t line) {
    try {
      parse_trace(lines);
      ADD_FAILURE() << "no error";
    } catch (const ParseError& e) {
      EXPECT_EQ(e.line(), line) << e.what();
    }
  };
  const std::string h = "time,station_id,x,y";
  expect_line({h, "0,0,1,1", "1,0,2,2", "0.5,0,3,3"}, 4);  // decreasing time
  expect_line({h, "0,0,1,1", "1,0,2"}, 3);                  // column count
  expect_line({h, "0,0,1,abc"}, 2);
  expect_line({"t,id,x,y"}, 1);
  expect_line({h, "0,0,1,1", "0,2,1,1"}, 3);  // skipped station id
}

TEST(TraceFile, MissingFileIsIoError) { EXPECT_THROW(read_trace("/nonexistent/trace.csv"), IoError); }

#include <doctest.h>

#include <cmath>
#include <random>

#include "lobfacts/flow.hpp"
#include "lobfacts/synth.hpp"
#include "lobfacts/types.hpp"
#include "oracles.hpp"

using namespace lobfacts;
using oracle::book;

namespace {

InstrumentSpec spec_with_tick(double tick) {
  InstrumentSpec s;
  s.symbol = "T";
  s.tick_size = tick;
  return s;
}

Ticks ticks(const InstrumentSpec& s, double price) { return *s.to_ticks(price); }

}  // namespace

TEST_CASE("mid price of a one-tick book") {
  const auto s = spec_with_tick(0.01);
  const auto b = book(0, {{ticks(s, 170.00), 10}}, {{ticks(s, 170.01), 5}});
  CHECK(mid_price(b, s.tick_size) == doctest::Approx(170.005).epsilon(1e-12));
}

TEST_CASE("mid price of a symmetric book") {
  const auto s = spec_with_tick(0.5);
  const auto b = book(0, {{ticks(s, 99.5), 1}}, {{ticks(s, 100.5), 1}});
  CHECK(mid_price(b, s.tick_size) == 100.0);
}

TEST_CASE("mid price with an empty side throws") {
  const auto b = book(0, {{100, 1}}, {});
  CHECK_THROWS_AS(mid_price(b, 0.01), EmptySide);
  CHECK_THROWS_AS(spread_ticks(b), EmptySide);
}

TEST_CASE("spread in ticks") {
  const auto s1 = spec_with_tick(0.01);
  CHECK(spread_ticks(book(0, {{ticks(s1, 170.00), 1}}, {{ticks(s1, 170.01), 1}})) == 1);
  const auto s2 = spec_with_tick(0.02);
  CHECK(spread_ticks(book(0, {{ticks(s2, 134.52), 1}}, {{ticks(s2, 134.56), 1}})) == 2);
  CHECK_THROWS_AS(spread_ticks(book(0, {{10000, 1}}, {{10000, 1}})), NonPositiveSpread);
}

TEST_CASE("spread is invariant under a common price shift") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<Ticks> base(100, 100000), width(1, 9), shift(-50, 50);
  for (int i = 0; i < 500; ++i) {
    const Ticks b = base(rng), w = width(rng), k = shift(rng);
    const auto x = book(0, {{b, 3}, {b - 2, 4}}, {{b + w, 5}});
    const auto y = book(0, {{b + k, 3}, {b - 2 + k, 4}}, {{b + w + k, 5}});
    CHECK(spread_ticks(x) == spread_ticks(y));
  }
}

TEST_CASE("tick conversion rejects off-grid prices") {
  const auto s = spec_with_tick(0.005);
  CHECK(s.to_ticks(134.565) == Ticks{26913});
  CHECK_FALSE(s.to_ticks(134.5651).has_value());
  CHECK(s.format_price(26913) == "134.565");
  CHECK(spec_with_tick(0.01).format_price(-5) == "-0.05");
}

TEST_CASE("spec invariants") {
  auto s = spec_with_tick(0.0);
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = spec_with_tick(0.01);
  s.levels = 0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = spec_with_tick(0.01);
  s.session_end = s.session_start;
  CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("snapshot invariants") {
  CHECK_FALSE(check_snapshot(book(0, {{100, 1}, {99, 1}}, {{101, 1}})).has_value());
  CHECK(check_snapshot(book(0, {{100, 1}}, {{100, 1}})).has_value());
  CHECK(check_snapshot(book(0, {{100, 0}}, {{101, 1}})).has_value());
  CHECK(check_snapshot(book(0, {{99, 1}, {100, 1}}, {{101, 1}})).has_value());
}

TEST_CASE("tick-by-tick log return of one change") {
  const MidSeries m({1, 2}, {100.0, 100.0 * std::exp(0.001)});
  const auto r = log_returns(m, TickByTick{});
  REQUIRE(r.size() == 1);
  CHECK(r[0] == doctest::Approx(0.001).epsilon(1e-12));
}

TEST_CASE("constant mids give no tick-by-tick returns") {
  const MidSeries m({1, 2, 3, 4}, {100.0, 100.0, 100.0, 100.0});
  CHECK(log_returns(m, TickByTick{}).empty());
}

TEST_CASE("log returns need two observations") {
  CHECK_THROWS_AS(log_returns(MidSeries({1}, {100.0}), TickByTick{}), TooShort);
}

TEST_CASE("calendar log returns match a high-precision recomputation") {
  // Irregular random walk in ticks, sampled on a 1s grid.
  std::mt19937_64 rng(11);
  std::exponential_distribution<double> gap(4.0);
  std::uniform_int_distribution<int> step(-1, 1);
  std::vector<TimeNs> ts;
  std::vector<double> mids;
  TimeNs t = 9 * 3600 * kNsPerSecond;
  Ticks m = 20000;
  for (int i = 0; i < 20000; ++i) {
    t += 1 + static_cast<TimeNs>(gap(rng) * 1e9);
    m += step(rng);
    ts.push_back(t);
    mids.push_back(static_cast<double>(m) * 0.005);
  }
  const MidSeries series(ts, mids);
  const auto got = log_returns(series, Calendar{kNsPerSecond, ts.front()});

  // Independent LOCF sampling followed by 50-digit logarithms.
  std::vector<double> sampled;
  std::size_t j = 0;
  for (TimeNs g = ts.front(); g <= ts.back(); g += kNsPerSecond) {
    while (j + 1 < ts.size() && ts[j + 1] <= g) ++j;
    sampled.push_back(mids[j]);
  }
  const auto want = oracle::precise_log_diffs(sampled);
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - want[i]) <= 1e-12);
}

TEST_CASE("tick-by-tick returns telescope to the last mid") {
  const auto gen = generate(oracle::small_config(5, 300));
  const auto series = mid_series(gen.data.snapshots, gen.data.spec.tick_size);
  const auto r = log_returns(series, TickByTick{});
  double sum = 0.0;
  for (double x : r) sum += x;
  const double first = series.mids().front();
  const double last = series.mids().back();
  CHECK(std::abs(std::exp(sum) * first - last) / last <= 1e-9);
}

TEST_CASE("seq is a bijection onto 0..N-1") {
  const auto gen = generate(oracle::small_config(6, 300));
  const auto ext = extract_session(gen.data);
  std::vector<bool> seen(ext.flow.size(), false);
  for (const auto& e : ext.flow) {
    REQUIRE(e.seq < seen.size());
    CHECK_FALSE(seen[e.seq]);
    seen[e.seq] = true;
  }
}

TEST_CASE("calendar sampling carries the last observation forward") {
  const MidSeries m({10, 25, 40}, {1.0, 2.0, 3.0});
  const auto s = sample_calendar(m, 10, 0);
  REQUIRE(s.grid == std::vector<TimeNs>{10, 20, 30, 40});
  CHECK(s.mids == std::vector<double>{1.0, 1.0, 2.0, 3.0});
  CHECK(m.at(9) == std::nullopt);
  CHECK(m.at(30) == 2.0);
}

TEST_CASE("dates and times of day round-trip") {
  const TimeNs d = parse_date("2021-03-01");
  CHECK(format_date(d + 5 * kNsPerSecond) == "2021-03-01");
  CHECK(format_date(parse_date("1999-12-31")) == "1999-12-31");
  CHECK(parse_time_of_day("09:00:01.5") == 9 * 3600 * kNsPerSecond + 1500 * kNsPerMs);
  CHECK(format_time_of_day(parse_time_of_day("17:45:00")) == "17:45:00");
  CHECK_THROWS_AS(parse_date("2021-13-01"), ConfigError);
}

#include <doctest.h>

#include <sstream>

#include "lobfacts/ingest.hpp"
#include "lobfacts/synth.hpp"
#include "oracles.hpp"

using namespace lobfacts;

namespace {

InstrumentSpec one_level_spec() {
  InstrumentSpec s;
  s.symbol = "T";
  s.tick_size = 0.01;
  s.levels = 1;
  return s;
}

const TimeNs kDay = parse_date("2021-03-01");

std::string at(const char* tod) { return std::to_string(kDay + parse_time_of_day(tod)); }

std::string snapshot_csv(const std::vector<std::string>& rows) {
  std::string s = "ts_ns,bp1,bq1,ap1,aq1\n";
  for (const auto& r : rows) s += r + "\n";
  return s;
}

void check_accounting(const IngestReport& r) {
  CHECK(r.retained + r.dropped() + r.rejected.size() == r.total_rows);
}

}  // namespace

TEST_CASE("three well-formed snapshot rows") {
  std::istringstream in(snapshot_csv({at("09:00:00") + ",170.00,10,170.01,5",
                                      at("09:00:01") + ",170.00,11,170.01,5",
                                      at("09:00:02") + ",170.00,11,170.01,6"}));
  const auto load = read_snapshots(in, one_level_spec());
  CHECK(load.snapshots.size() == 3);
  CHECK(load.report.rejected.empty());
  CHECK(load.snapshots[0].bids[0] == Level{17000, 10});
  check_accounting(load.report);
}

TEST_CASE("crossed snapshot row names its row") {
  std::istringstream in(snapshot_csv({at("09:00:00") + ",170.00,10,170.01,5",
                                      at("09:00:01") + ",170.02,10,170.01,5"}));
  try {
    (void)read_snapshots(in, one_level_spec());
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.row() == 3);
  }
}

TEST_CASE("lenient load records the rejected row") {
  std::istringstream in(snapshot_csv({at("09:00:00") + ",170.00,10,170.01,5",
                                      at("09:00:01") + ",170.02,10,170.01,5",
                                      at("09:00:02") + ",170.00,12,170.01,5"}));
  LoadOptions opts;
  opts.strict = false;
  const auto load = read_snapshots(in, one_level_spec(), opts);
  CHECK(load.snapshots.size() == 2);
  REQUIRE(load.report.rejected.size() == 1);
  CHECK(load.report.rejected[0].row == 3);
  check_accounting(load.report);
}

TEST_CASE("session filter keeps only in-session rows") {
  std::istringstream in(snapshot_csv({at("08:59:59") + ",170.00,10,170.01,5",
                                      at("09:00:01") + ",170.00,10,170.01,6"}));
  const auto load = read_snapshots(in, one_level_spec());
  CHECK(load.snapshots.size() == 1);
  CHECK(load.report.dropped_out_of_session == 1);
  check_accounting(load.report);
}

TEST_CASE("identical consecutive books are collapsed") {
  std::istringstream in(snapshot_csv({at("09:00:00") + ",170.00,10,170.01,5",
                                      at("09:00:01") + ",170.00,10,170.01,5",
                                      at("09:00:02") + ",170.00,9,170.01,5"}));
  const auto load = read_snapshots(in, one_level_spec());
  CHECK(load.snapshots.size() == 2);
  CHECK(load.report.dropped_duplicate == 1);
  check_accounting(load.report);
}

TEST_CASE("non-increasing timestamps are rejected") {
  std::istringstream in(snapshot_csv({at("09:00:01") + ",170.00,10,170.01,5",
                                      at("09:00:00") + ",170.00,9,170.01,5"}));
  CHECK_THROWS_AS(read_snapshots(in, one_level_spec()), ParseError);
}

TEST_CASE("off-grid price and empty file") {
  std::istringstream bad(snapshot_csv({at("09:00:00") + ",170.005,10,170.01,5"}));
  CHECK_THROWS_AS(read_snapshots(bad, one_level_spec()), ParseError);
  std::istringstream empty("");
  CHECK_THROWS_AS(read_snapshots(empty, one_level_spec()), EmptyFile);
  std::istringstream header_only("ts_ns,bp1,bq1,ap1,aq1\n");
  CHECK_THROWS_AS(read_snapshots(header_only, one_level_spec()), EmptyFile);
}

TEST_CASE("off-book trades are dropped") {
  std::istringstream in("ts_ns,price,size,aggressor,onbook\n" + at("09:00:00") + ",170.01,5,B,1\n" +
                        at("09:00:01") + ",170.01,7,B,0\n" + at("09:00:02") + ",170.00,3,A,1\n");
  const auto load = read_trades(in, one_level_spec());
  CHECK(load.trades.size() == 2);
  CHECK(load.report.dropped_off_book == 1);
  check_accounting(load.report);
}

TEST_CASE("zero trade size is a parse error") {
  std::istringstream in("ts_ns,price,size,aggressor,onbook\n" + at("09:00:00") + ",170.01,0,B,1\n");
  CHECK_THROWS_AS(read_trades(in, one_level_spec()), ParseError);
}

TEST_CASE("unsorted trades come back sorted and stable") {
  std::istringstream in("ts_ns,price,size,aggressor,onbook\n" + at("09:00:02") + ",170.01,1,B,1\n" +
                        at("09:00:01") + ",170.01,2,B,1\n" + at("09:00:02") + ",170.01,3,B,1\n" +
                        at("09:00:01") + ",170.01,4,B,1\n");
  const auto t = read_trades(in, one_level_spec()).trades;
  REQUIRE(t.size() == 4);
  CHECK(t[0].size == 2);
  CHECK(t[1].size == 4);
  CHECK(t[2].size == 1);
  CHECK(t[3].size == 3);
}

TEST_CASE("trade aggressor column is optional") {
  std::istringstream in("ts_ns,price,size\n" + at("09:00:00") + ",170.01,5\n");
  const auto t = read_trades(in, one_level_spec()).trades;
  REQUIRE(t.size() == 1);
  CHECK(t[0].aggressor == Aggressor::Unknown);
}

TEST_CASE("accounting holds on a mixed lenient file") {
  std::istringstream in("ts_ns,price,size,aggressor,onbook\n" + at("08:00:00") + ",170.01,5,B,1\n" +
                        at("09:00:00") + ",170.01,5,X,1\n" + at("09:00:01") + ",170.01,5,B,0\n" +
                        at("09:00:02") + ",170.01,-1,B,1\n" + at("09:00:03") + ",170.01,5,B,1\n");
  LoadOptions opts;
  opts.strict = false;
  const auto load = read_trades(in, one_level_spec(), opts);
  CHECK(load.report.total_rows == 5);
  CHECK(load.report.retained == 1);
  CHECK(load.report.rejected.size() == 2);
  check_accounting(load.report);
}

TEST_CASE("write then read is the identity on generated sessions") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto gen = generate(oracle::small_config(seed, 200));
    const auto& data = gen.data;
    std::stringstream snaps, trades, flow;
    write_snapshots(snaps, data.snapshots, data.spec);
    write_trades(trades, data.trades, data.spec);
    write_flow(flow, gen.truth_flow, data.spec);
    const auto s = read_snapshots(snaps, data.spec);
    const auto t = read_trades(trades, data.spec);
    CHECK(s.snapshots == data.snapshots);
    CHECK(t.trades == data.trades);
    CHECK(read_flow(flow, data.spec) == gen.truth_flow);
  }
}

TEST_CASE("instrument spec parsing") {
  const auto s = parse_instrument_spec(
      R"({"symbol":"X","tick_size":0.02,"levels":5,"session_start":"09:00:00","session_end":"18:00:00",)"
      R"("reference":{"mean_spread_ticks":1.355}})");
  CHECK(s.symbol == "X");
  CHECK(s.tick_size == 0.02);
  CHECK(s.reference_mean_spread_ticks == 1.355);
  CHECK_THROWS_AS(parse_instrument_spec(R"({"symbol":"X","tick_size":-1})"), ConfigError);
  CHECK_THROWS_AS(parse_instrument_spec("{"), ConfigError);
}

TEST_CASE("shipped instrument files carry the reference tick sizes and spreads") {
  struct Row {
    const char* file;
    const char* symbol;
    double tick;
    double spread;
  };
  const Row rows[] = {{"fgbs", "FGBS", 0.005, 1.004},
                      {"fgbm", "FGBM", 0.01, 1.005},
                      {"fgbl", "FGBL", 0.01, 1.018},
                      {"fgbx", "FGBX", 0.02, 1.355}};
  for (const auto& r : rows) {
    const auto s = load_instrument_spec(std::string(LOBFACTS_SOURCE_DIR) + "/instruments/" + r.file + ".json");
    CHECK(s.symbol == r.symbol);
    CHECK(s.tick_size == r.tick);
    REQUIRE(s.reference_mean_spread_ticks.has_value());
    CHECK(*s.reference_mean_spread_ticks == r.spread);
    CHECK(s.levels == 5);
    CHECK(s.session_start == parse_time_of_day("09:00:00"));
    CHECK(s.session_end == parse_time_of_day("18:00:00"));
  }
}

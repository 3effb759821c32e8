#include <doctest.h>

#include <map>
#include <random>
#include <sstream>

#include "lobfacts/flow.hpp"
#include "lobfacts/replay.hpp"
#include "lobfacts/synth.hpp"
#include "oracles.hpp"

using namespace lobfacts;
using oracle::book;
using oracle::event;

namespace {

constexpr TimeNs ms = kNsPerMs;

Trade trade(TimeNs ts, Ticks price, Qty size, Aggressor a = Aggressor::Unknown) {
  return Trade{ts, price, size, a};
}

}  // namespace

TEST_CASE("diff of a single quantity update") {
  const auto prev = book(0, {{17000, 8}}, {{17001, 10}});
  const auto next = book(1, {{17000, 8}}, {{17001, 15}});
  const auto d = diff_by_price(prev, next);
  REQUIRE(d.size() == 1);
  CHECK(d[0] == PriceDiff{Side::Ask, 17001, 5});
}

TEST_CASE("diff when a level moves deeper") {
  const auto prev = book(0, {{17000, 8}}, {{17001, 10}});
  const auto next = book(1, {{16995, 8}}, {{17001, 10}});
  const auto d = diff_by_price(prev, next);
  REQUIRE(d.size() == 2);
  // Deep-to-interior order within a side.
  CHECK(d[0] == PriceDiff{Side::Bid, 16995, 8});
  CHECK(d[1] == PriceDiff{Side::Bid, 17000, -8});
  const auto ev = classify_update(d, prev, next);
  CHECK(apply_event(apply_event(prev, ev[0]), ev[1]).same_book(next));
}

TEST_CASE("identical snapshots have no diff") {
  const auto b = book(0, {{17000, 8}, {16999, 2}}, {{17001, 10}});
  CHECK(diff_by_price(b, b).empty());
}

TEST_CASE("diff ordering puts bids first and runs toward the interior") {
  const auto prev = book(0, {{100, 1}, {99, 1}, {98, 1}}, {{101, 1}, {102, 1}, {103, 1}});
  const auto next = book(1, {{100, 2}, {99, 2}, {98, 2}}, {{101, 2}, {102, 2}, {103, 2}});
  const auto d = diff_by_price(prev, next);
  REQUIRE(d.size() == 6);
  const Ticks want[] = {98, 99, 100, 103, 102, 101};
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(d[i].price == want[i]);
    CHECK(d[i].side == (i < 3 ? Side::Bid : Side::Ask));
  }
}

TEST_CASE("quantity increase at depth two is a limit at level two") {
  const auto prev = book(0, {{16999, 4}}, {{17000, 3}, {17001, 10}});
  const auto next = book(1, {{16999, 4}}, {{17000, 3}, {17001, 15}});
  const auto d = diff_by_price(prev, next);
  const auto ev = classify_update(d, prev, next);
  REQUIRE(ev.size() == 1);
  CHECK(ev[0].kind == EventKind::Limit);
  CHECK(ev[0].side == Side::Ask);
  CHECK(ev[0].price == 17001);
  CHECK(ev[0].size == 5);
  CHECK(ev[0].level == 2);
  CHECK(classify_scenario(prev, next, d) == UpdateScenario::QuantityOnly);
}

TEST_CASE("removed best ask replaced inside the spread") {
  const auto prev = book(0, {{17000, 5}}, {{17002, 6}, {17003, 9}});
  const auto next = book(1, {{17000, 5}}, {{17001, 4}, {17003, 9}});
  const auto d = diff_by_price(prev, next);
  const auto ev = classify_update(d, prev, next);
  REQUIRE(ev.size() == 2);
  CHECK(ev[0].kind == EventKind::Cancel);
  CHECK(ev[0].price == 17002);
  CHECK(ev[0].size == 6);
  CHECK(ev[0].level == 1);
  CHECK(ev[1].kind == EventKind::Limit);
  CHECK(ev[1].price == 17001);
  CHECK(ev[1].level == -1);
  CHECK(classify_scenario(prev, next, d) == UpdateScenario::SameSideShift);
}

TEST_CASE("aggressive buy sweeping the ask with a residual bid inside the spread") {
  const auto prev = book(0, {{17000, 5}}, {{17002, 10}, {17003, 7}});
  const auto next = book(1, {{17002, 3}, {17000, 5}}, {{17003, 7}});
  const auto d = diff_by_price(prev, next);
  const auto ev = classify_update(d, prev, next);
  REQUIRE(ev.size() == 2);
  CHECK(ev[0].kind == EventKind::Cancel);
  CHECK(ev[0].side == Side::Ask);
  CHECK(ev[0].size == 10);
  CHECK(ev[1].kind == EventKind::Limit);
  CHECK(ev[1].side == Side::Bid);
  CHECK(ev[1].size == 3);
  CHECK(ev[1].level == -2);
  CHECK(classify_scenario(prev, next, d) == UpdateScenario::BothSidesShift);
}

TEST_CASE("inconsistent diffs raise with the snapshot index") {
  const auto b = book(0, {{17000, 5}}, {{17001, 5}});
  const std::vector<PriceDiff> bogus{{Side::Ask, 17001, 5}};
  try {
    (void)classify_update(bogus, b, b, 42);
    FAIL("expected InconsistentUpdate");
  } catch (const InconsistentUpdate& e) {
    CHECK(e.snapshot_index() == 42);
  }
}

TEST_CASE("unique cancel candidate becomes a market order") {
  std::vector<FlowEvent> temp{event(EventKind::Cancel, Side::Ask, 17001, 5, 100 * ms)};
  const std::vector<Trade> trades{trade(103 * ms, 17001, 5)};
  const auto r = match_trades(temp, trades);
  CHECK(r.flow[0].kind == EventKind::Market);
  CHECK(r.report.match_rate == 1.0);
  CHECK(r.report.matched == 1);
}

TEST_CASE("closest candidate in time wins") {
  std::vector<FlowEvent> temp{event(EventKind::Cancel, Side::Ask, 17001, 5, 93 * ms),
                              event(EventKind::Cancel, Side::Ask, 17001, 5, 102 * ms)};
  const std::vector<Trade> trades{trade(100 * ms, 17001, 5)};
  const auto r = match_trades(temp, trades);
  CHECK(r.flow[0].kind == EventKind::Cancel);
  CHECK(r.flow[1].kind == EventKind::Market);
}

TEST_CASE("equidistant candidates go to the earlier event") {
  std::vector<FlowEvent> temp{event(EventKind::Cancel, Side::Ask, 17001, 5, 96 * ms),
                              event(EventKind::Cancel, Side::Ask, 17001, 5, 104 * ms)};
  const std::vector<Trade> trades{trade(100 * ms, 17001, 5)};
  const auto r = match_trades(temp, trades);
  CHECK(r.flow[0].kind == EventKind::Market);
  CHECK(r.flow[1].kind == EventKind::Cancel);
}

TEST_CASE("trade without a matching cancel stays unmatched") {
  std::vector<FlowEvent> temp{event(EventKind::Cancel, Side::Ask, 17001, 5, 100 * ms),
                              event(EventKind::Cancel, Side::Ask, 17001, 4, 101 * ms),
                              event(EventKind::Cancel, Side::Ask, 17001, 6, 130 * ms)};
  const std::vector<Trade> trades{trade(119 * ms, 17001, 6)};
  const auto r = match_trades(temp, trades);
  CHECK(r.flow == temp);
  CHECK(r.report.matched == 0);
  REQUIRE(r.report.unmatched_trades.size() == 1);
  CHECK(r.report.match_rate == 0.0);
}

TEST_CASE("aggressor restricts the resting side") {
  std::vector<FlowEvent> temp{event(EventKind::Cancel, Side::Bid, 17001, 5, 100 * ms),
                              event(EventKind::Cancel, Side::Ask, 17001, 5, 105 * ms)};
  const std::vector<Trade> trades{trade(100 * ms, 17001, 5, Aggressor::Bid)};
  const auto r = match_trades(temp, trades);
  CHECK(r.flow[0].kind == EventKind::Cancel);
  CHECK(r.flow[1].kind == EventKind::Market);
}

TEST_CASE("each cancel is matched at most once") {
  std::vector<FlowEvent> temp{event(EventKind::Cancel, Side::Ask, 17001, 5, 100 * ms)};
  const std::vector<Trade> trades{trade(100 * ms, 17001, 5), trade(101 * ms, 17001, 5)};
  const auto r = match_trades(temp, trades);
  CHECK(r.report.matched == 1);
  CHECK(r.report.unmatched_trades.size() == 1);
  CHECK(r.report.match_rate == 0.5);
}

TEST_CASE("matcher agrees with the brute-force reference on random fixtures") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<TimeNs> when(0, 200 * ms);
  std::uniform_int_distribution<Ticks> price(100, 103);
  std::uniform_int_distribution<Qty> size(1, 3);
  std::uniform_int_distribution<int> coin(0, 2);
  for (int round = 0; round < 300; ++round) {
    std::vector<FlowEvent> temp;
    for (int i = 0; i < 40; ++i)
      temp.push_back(event(coin(rng) == 0 ? EventKind::Limit : EventKind::Cancel,
                           coin(rng) == 0 ? Side::Bid : Side::Ask, price(rng), size(rng), when(rng)));
    std::sort(temp.begin(), temp.end(), [](const FlowEvent& a, const FlowEvent& b) { return a.ts < b.ts; });
    std::vector<Trade> trades;
    for (int i = 0; i < 15; ++i) {
      const int a = coin(rng);
      trades.push_back(trade(when(rng), price(rng), size(rng),
                             a == 0 ? Aggressor::Bid : (a == 1 ? Aggressor::Ask : Aggressor::Unknown)));
    }
    std::size_t want_matched = 0;
    const auto want = oracle::brute_force_match(temp, trades, 10 * ms, &want_matched);
    const auto got = match_trades(temp, trades, 10 * ms);
    CHECK(got.flow == want);
    CHECK(got.report.matched == want_matched);
    const double denom = static_cast<double>(got.report.matched + got.report.unmatched_trades.size());
    CHECK(got.report.match_rate == doctest::Approx(static_cast<double>(got.report.matched) / denom));
    std::size_t markets = 0;
    for (const auto& e : got.flow) markets += e.kind == EventKind::Market;
    CHECK(markets <= trades.size());
  }
}

TEST_CASE("extraction recovers the generator's flow") {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    auto cfg = oracle::small_config(seed, 400);
    if (seed % 2 == 0) cfg.queue_target = QueueTargetLaw{2.0, 30.0, 0.0};
    const auto gen = generate(cfg);
    const auto ext = extract_session(gen.data);
    CHECK(ext.flow == gen.truth_flow);
    CHECK(ext.report.match_rate == 1.0);
  }
}

TEST_CASE("identical snapshots and no trades give an empty flow") {
  SessionData data;
  data.spec.symbol = "T";
  const auto b = book(1, {{100, 1}}, {{101, 1}});
  data.snapshots = {b, b, b};
  data.snapshots[1].ts = 2;
  data.snapshots[2].ts = 3;
  const auto ext = extract_session(data);
  CHECK(ext.flow.empty());
  CHECK(ext.report.no_trades);
  CHECK(ext.report.match_rate == 1.0);
}

TEST_CASE("jittered synthetic trades still match at least 99 percent") {
  auto cfg = oracle::small_config(8, 1200);
  cfg.trade_jitter_ns = 2 * ms;
  const auto gen = generate(cfg);
  REQUIRE(gen.data.trades.size() >= 1000);
  const auto ext = extract_session(gen.data);
  CHECK(ext.report.match_rate >= 0.99);
}

TEST_CASE("replay closure and conservation on every generated update") {
  const auto gen = generate(oracle::small_config(12, 300));
  const auto& s = gen.data.snapshots;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const auto d = diff_by_price(s[i], s[i + 1]);
    const auto ev = classify_update(d, s[i], s[i + 1], i + 1);
    BookSnapshot live = s[i];
    std::map<std::pair<Side, Ticks>, Qty> net;
    for (const auto& e : ev) {
      live = apply_event(live, e);
      net[{e.side, e.price}] += e.kind == EventKind::Limit ? e.size : -e.size;
    }
    REQUIRE(live.same_book(s[i + 1]));
    for (const auto& x : d) CHECK(net[{x.side, x.price}] == x.delta_qty);
    CHECK(net.size() == d.size());
  }
}

TEST_CASE("extraction is deterministic byte for byte") {
  const auto gen = generate(oracle::small_config(13, 200));
  std::ostringstream a, b;
  write_flow(a, extract_session(gen.data).flow, gen.data.spec);
  write_flow(b, extract_session(gen.data).flow, gen.data.spec);
  CHECK(a.str() == b.str());
}

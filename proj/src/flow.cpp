#include "lobfacts/flow.hpp"

#include <algorithm>
#include <map>

#include "lobfacts/replay.hpp"

namespace lobfacts {

namespace {

// 1-based depth of `price` on one side, 0 when absent.
int depth_of(const std::vector<Level>& lv, Ticks price) {
  for (std::size_t i = 0; i < lv.size(); ++i)
    if (lv[i].price == price) return static_cast<int>(i) + 1;
  return 0;
}

void diff_side(Side s, const std::vector<Level>& a, const std::vector<Level>& b,
               std::vector<PriceDiff>& out) {
  // Walk both sides from the deepest visible price toward the interior.
  auto deeper = [s](Ticks x, Ticks y) { return s == Side::Bid ? x < y : x > y; };
  auto i = a.rbegin();
  auto j = b.rbegin();
  while (i != a.rend() || j != b.rend()) {
    if (j == b.rend() || (i != a.rend() && deeper(i->price, j->price))) {
      out.push_back({s, i->price, -i->qty});
      ++i;
    } else if (i == a.rend() || deeper(j->price, i->price)) {
      out.push_back({s, j->price, j->qty});
      ++j;
    } else {
      if (i->qty != j->qty) out.push_back({s, i->price, j->qty - i->qty});
      ++i;
      ++j;
    }
  }
}

}  // namespace

std::vector<PriceDiff> diff_by_price(const BookSnapshot& prev, const BookSnapshot& next) {
  std::vector<PriceDiff> out;
  diff_side(Side::Bid, prev.bids, next.bids, out);
  diff_side(Side::Ask, prev.asks, next.asks, out);
  return out;
}

const char* scenario_name(UpdateScenario s) {
  switch (s) {
    case UpdateScenario::NoChange: return "no_change";
    case UpdateScenario::QuantityOnly: return "quantity_only";
    case UpdateScenario::SameSideShift: return "same_side_shift";
    case UpdateScenario::CrossSideRemoval: return "cross_side_removal";
    case UpdateScenario::OneSideMidShift: return "one_side_mid_shift";
    case UpdateScenario::OneSideDepth: return "one_side_depth";
    case UpdateScenario::BothSidesShift: return "both_sides_shift";
    case UpdateScenario::Other: return "other";
  }
  return "?";
}

UpdateScenario classify_scenario(const BookSnapshot& prev, const BookSnapshot& next,
                                 std::span<const PriceDiff> diffs) {
  if (diffs.empty()) return UpdateScenario::NoChange;
  const bool bid_moved = prev.best(Side::Bid) != next.best(Side::Bid);
  const bool ask_moved = prev.best(Side::Ask) != next.best(Side::Ask);
  std::size_t n_bid = 0, n_ask = 0;
  bool all_negative = true;
  bool prices_changed = false;
  for (const auto& d : diffs) {
    (d.side == Side::Bid ? n_bid : n_ask)++;
    all_negative = all_negative && d.delta_qty < 0;
    if (depth_of(prev.side(d.side), d.price) == 0 || depth_of(next.side(d.side), d.price) == 0)
      prices_changed = true;
  }
  const bool both_sides = n_bid > 0 && n_ask > 0;
  const bool opposite_pair =
      diffs.size() == 2 && !both_sides && (diffs[0].delta_qty > 0) != (diffs[1].delta_qty > 0);

  if (bid_moved && ask_moved) return UpdateScenario::BothSidesShift;
  if (both_sides) return all_negative ? UpdateScenario::CrossSideRemoval : UpdateScenario::Other;
  if (opposite_pair) return UpdateScenario::SameSideShift;
  if (bid_moved || ask_moved) return UpdateScenario::OneSideMidShift;
  if (prices_changed) return UpdateScenario::OneSideDepth;
  return diffs.size() == 1 ? UpdateScenario::QuantityOnly : UpdateScenario::Other;
}

std::vector<FlowEvent> classify_update(std::span<const PriceDiff> diffs, const BookSnapshot& prev,
                                       const BookSnapshot& next, std::size_t snapshot_index,
                                       std::size_t max_levels) {
  std::vector<FlowEvent> events;
  events.reserve(diffs.size());
  for (const auto& d : diffs) {
    if (d.delta_qty >= 0) continue;
    FlowEvent e;
    e.ts = next.ts;
    e.kind = EventKind::Cancel;
    e.side = d.side;
    e.price = d.price;
    e.size = -d.delta_qty;
    e.level = depth_of(prev.side(d.side), d.price);
    events.push_back(e);
  }
  for (const auto& d : diffs) {
    if (d.delta_qty <= 0) continue;
    FlowEvent e;
    e.ts = next.ts;
    e.kind = EventKind::Limit;
    e.side = d.side;
    e.price = d.price;
    e.size = d.delta_qty;
    const auto prev_best = prev.best(d.side);
    const Ticks improvement =
        prev_best ? (d.side == Side::Bid ? d.price - *prev_best : *prev_best - d.price) : 0;
    e.level = improvement > 0 ? -static_cast<int>(improvement) : depth_of(next.side(d.side), d.price);
    events.push_back(e);
  }

  const std::size_t cap = std::max({max_levels, prev.bids.size(), prev.asks.size(), next.bids.size(),
                                    next.asks.size()});
  BookSnapshot book = prev;
  try {
    for (const auto& e : events) apply_event_in_place(book, e, cap);
  } catch (const ReplayError& err) {
    throw InconsistentUpdate(snapshot_index, err.what());
  }
  if (!book.same_book(next)) throw InconsistentUpdate(snapshot_index, "events do not reproduce the next snapshot");
  return events;
}

MatchResult match_trades(std::vector<FlowEvent> temp, std::span<const Trade> trades, TimeNs window) {
  MatchResult out;
  // Cancel indices grouped by (price, size), in event order.
  std::map<std::pair<Ticks, Qty>, std::vector<std::size_t>> by_key;
  for (std::size_t i = 0; i < temp.size(); ++i)
    if (temp[i].kind == EventKind::Cancel) by_key[{temp[i].price, temp[i].size}].push_back(i);

  std::vector<std::size_t> order(trades.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return trades[a].ts < trades[b].ts; });

  std::vector<bool> taken(temp.size(), false);
  for (std::size_t ti : order) {
    const Trade& t = trades[ti];
    auto it = by_key.find({t.price, t.size});
    std::size_t best = temp.size();
    TimeNs best_dt = 0;
    if (it != by_key.end()) {
      const auto& cand = it->second;
      auto lo = std::lower_bound(cand.begin(), cand.end(), t.ts - window,
                                 [&](std::size_t idx, TimeNs v) { return temp[idx].ts < v; });
      for (auto c = lo; c != cand.end() && temp[*c].ts <= t.ts + window; ++c) {
        const auto& e = temp[*c];
        if (taken[*c]) continue;
        if (t.aggressor == Aggressor::Bid && e.side != Side::Ask) continue;
        if (t.aggressor == Aggressor::Ask && e.side != Side::Bid) continue;
        const TimeNs dt = e.ts > t.ts ? e.ts - t.ts : t.ts - e.ts;
        if (best == temp.size() || dt < best_dt) {
          best = *c;
          best_dt = dt;
        }
      }
    }
    if (best == temp.size()) {
      out.report.unmatched_trades.push_back(t);
    } else {
      taken[best] = true;
      temp[best].kind = EventKind::Market;
      ++out.report.matched;
    }
  }
  const std::size_t denom = out.report.matched + out.report.unmatched_trades.size();
  out.report.no_trades = denom == 0;
  out.report.match_rate =
      denom == 0 ? 1.0 : static_cast<double>(out.report.matched) / static_cast<double>(denom);
  out.flow = std::move(temp);
  return out;
}

Extraction extract_session(const SessionData& data, const ExtractOptions& opts) {
  Extraction out;
  std::vector<FlowEvent> temp;
  const auto levels = static_cast<std::size_t>(data.spec.levels);
  const auto& snaps = data.snapshots;
  for (std::size_t i = 0; i + 1 < snaps.size(); ++i) {
    const auto diffs = diff_by_price(snaps[i], snaps[i + 1]);
    ++out.scenario_counts[static_cast<std::size_t>(classify_scenario(snaps[i], snaps[i + 1], diffs))];
    if (diffs.empty()) continue;
    auto ev = classify_update(diffs, snaps[i], snaps[i + 1], i + 1, levels);
    temp.insert(temp.end(), ev.begin(), ev.end());
  }
  auto matched = match_trades(std::move(temp), data.trades, opts.match_window);
  out.flow = std::move(matched.flow);
  out.report = std::move(matched.report);
  for (std::size_t i = 0; i < out.flow.size(); ++i) out.flow[i].seq = i;
  return out;
}

}  // namespace lobfacts

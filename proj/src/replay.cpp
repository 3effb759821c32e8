#include "lobfacts/replay.hpp"

#include <algorithm>
#include <set>

namespace lobfacts {

namespace {

// Bids sort descending, asks ascending: `better(a, b)` means a is nearer the
// top of the book than b.
bool better(Side s, Ticks a, Ticks b) { return s == Side::Bid ? a > b : a < b; }

std::vector<Level>::iterator find_level(std::vector<Level>& lv, Side s, Ticks price) {
  return std::lower_bound(lv.begin(), lv.end(), price,
                          [s](const Level& l, Ticks p) { return better(s, l.price, p); });
}

}  // namespace

void apply_event_in_place(BookSnapshot& book, const FlowEvent& e, std::size_t max_levels) {
  auto& lv = book.side(e.side);
  if (e.size <= 0) throw ReplayError(e.seq, "non-positive size");
  switch (e.kind) {
    case EventKind::Limit: {
      const auto& opp = book.side(opposite(e.side));
      if (!opp.empty() &&
          (e.side == Side::Bid ? e.price >= opp.front().price : e.price <= opp.front().price))
        throw BadLimit(e.seq, "limit crosses the opposite side");
      auto it = find_level(lv, e.side, e.price);
      if (it != lv.end() && it->price == e.price) {
        it->qty += e.size;
      } else {
        lv.insert(it, Level{e.price, e.size});
        if (lv.size() > max_levels) lv.resize(max_levels);
      }
      break;
    }
    case EventKind::Cancel: {
      auto it = find_level(lv, e.side, e.price);
      if (it == lv.end() || it->price != e.price) throw BadCancel(e.seq, "no level at cancel price");
      if (it->qty < e.size) throw BadCancel(e.seq, "cancel exceeds resting quantity");
      it->qty -= e.size;
      if (it->qty == 0) lv.erase(it);
      break;
    }
    case EventKind::Market: {
      if (lv.empty() || lv.front().price != e.price) throw BadMarket(e.seq, "market event not at best price");
      if (lv.front().qty < e.size) throw BadMarket(e.seq, "market event exceeds best quantity");
      lv.front().qty -= e.size;
      if (lv.front().qty == 0) lv.erase(lv.begin());
      break;
    }
  }
}

BookSnapshot apply_event(BookSnapshot book, const FlowEvent& event, std::size_t max_levels) {
  apply_event_in_place(book, event, max_levels);
  book.ts = std::max(book.ts, event.ts);
  return book;
}

std::vector<Mismatch> compare_books(const BookSnapshot& expected, const BookSnapshot& got,
                                    std::size_t snapshot_index) {
  std::vector<Mismatch> out;
  for (Side s : {Side::Bid, Side::Ask}) {
    const auto& a = expected.side(s);
    const auto& b = got.side(s);
    std::size_t i = 0, j = 0;
    // Merge walk over two price-sorted sides.
    while (i < a.size() || j < b.size()) {
      if (j == b.size() || (i < a.size() && better(s, a[i].price, b[j].price))) {
        out.push_back({snapshot_index, s, a[i].price, a[i].qty, 0});
        ++i;
      } else if (i == a.size() || better(s, b[j].price, a[i].price)) {
        out.push_back({snapshot_index, s, b[j].price, 0, b[j].qty});
        ++j;
      } else {
        if (a[i].qty != b[j].qty) out.push_back({snapshot_index, s, a[i].price, a[i].qty, b[j].qty});
        ++i;
        ++j;
      }
    }
  }
  return out;
}

ReplayOutcome replay_and_verify(const BookSnapshot& initial, std::span<const FlowEvent> flow,
                                std::span<const BookSnapshot> snapshots, const ReplayOptions& opts) {
  ReplayOutcome out;
  BookSnapshot live = initial;
  std::size_t k = 0;
  if (!snapshots.empty())
    while (k < flow.size() && flow[k].ts <= snapshots.front().ts) apply_event_in_place(live, flow[k++], opts.max_levels);
  std::size_t bad_snapshots = 0;
  for (std::size_t i = 0; i + 1 < snapshots.size(); ++i) {
    const auto& next = snapshots[i + 1];
    while (k < flow.size() && flow[k].ts <= next.ts) apply_event_in_place(live, flow[k++], opts.max_levels);
    ++out.checked;
    auto diffs = compare_books(next, live, i + 1);
    if (!diffs.empty()) {
      ++bad_snapshots;
      out.mismatches.insert(out.mismatches.end(), diffs.begin(), diffs.end());
      if (opts.resync_on_mismatch) {
        live.bids = next.bids;
        live.asks = next.asks;
      }
    }
  }
  out.match_fraction =
      out.checked == 0 ? 1.0 : 1.0 - static_cast<double>(bad_snapshots) / static_cast<double>(out.checked);
  return out;
}

}  // namespace lobfacts

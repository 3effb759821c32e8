#pragma once

#include <array>
#include <span>
#include <vector>

#include "lobfacts/ingest.hpp"
#include "lobfacts/types.hpp"

namespace lobfacts {

/// Change of aggregate visible quantity at one price between two snapshots.
struct PriceDiff {
  Side side = Side::Bid;
  Ticks price = 0;
  Qty delta_qty = 0;

  friend bool operator==(const PriceDiff&, const PriceDiff&) = default;
};

/// One PriceDiff per price whose visible quantity changed. Bid diffs come
/// first, then ask diffs; within a side, prices run from deep toward the
/// book interior.
std::vector<PriceDiff> diff_by_price(const BookSnapshot& prev, const BookSnapshot& next);

/// Shape of a snapshot-to-snapshot update.
enum class UpdateScenario : std::uint8_t {
  NoChange,
  QuantityOnly,      // one price changes size, no best price moves
  SameSideShift,     // two opposite-sign changes on one side (cancel then limit)
  CrossSideRemoval,  // removals on both sides (cancel then market)
  OneSideMidShift,   // only one side's prices change and the mid moves
  OneSideDepth,      // a deeper price appears or disappears, mid unchanged
  BothSidesShift,    // both sides' best prices move
  Other,
};
inline constexpr std::size_t kScenarioCount = 8;
const char* scenario_name(UpdateScenario s);

UpdateScenario classify_scenario(const BookSnapshot& prev, const BookSnapshot& next,
                                 std::span<const PriceDiff> diffs);

/// Turns the diffs of one update into Limit/Cancel events stamped with
/// next.ts. Cancels precede Limits. Levels: a Cancel carries the depth of its
/// price in `prev`; a Limit strictly better than prev's best on its side
/// carries minus the improvement in ticks; any other Limit carries the depth
/// of its price in `next`. Throws InconsistentUpdate(snapshot_index) if the
/// events do not replay `prev` into `next`.
std::vector<FlowEvent> classify_update(std::span<const PriceDiff> diffs, const BookSnapshot& prev,
                                       const BookSnapshot& next, std::size_t snapshot_index = 0,
                                       std::size_t max_levels = 5);

struct MatchReport {
  std::size_t matched = 0;
  std::vector<Trade> unmatched_trades;
  /// matched / (matched + unmatched); 1.0 with `no_trades` set when there
  /// were no trades at all.
  double match_rate = 1.0;
  bool no_trades = false;
};

struct MatchResult {
  std::vector<FlowEvent> flow;
  MatchReport report;
};

inline constexpr TimeNs kDefaultMatchWindow = 10 * kNsPerMs;

/// Relabels as Market the Cancel closest in time to each trade among those
/// with equal size and price, a side consistent with the trade's aggressor,
/// and |dt| <= window. Equidistant candidates go to the earlier event; each
/// Cancel is matched at most once. Trades are processed in time order.
MatchResult match_trades(std::vector<FlowEvent> temp, std::span<const Trade> trades,
                         TimeNs window = kDefaultMatchWindow);

struct ExtractOptions {
  TimeNs match_window = kDefaultMatchWindow;
};

struct Extraction {
  std::vector<FlowEvent> flow;
  MatchReport report;
  std::array<std::size_t, kScenarioCount> scenario_counts{};
};

/// Full order-flow construction for one session: diff and classify every
/// consecutive snapshot pair, then match trades. seq is assigned 0..N-1.
Extraction extract_session(const SessionData& data, const ExtractOptions& opts = {});

}  // namespace lobfacts

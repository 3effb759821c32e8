#pragma once

#include <span>
#include <vector>

#include "lobfacts/types.hpp"

namespace lobfacts {

/// Applies one event the way a matching engine reflects it into an L2 book:
/// a Limit adds size at its price (the level is created if absent and the
/// side is re-truncated to `max_levels`), a Cancel removes size at its price,
/// a Market removes size from the best of its side. Levels reaching zero are
/// deleted. Throws BadCancel, BadMarket or BadLimit.
void apply_event_in_place(BookSnapshot& book, const FlowEvent& event, std::size_t max_levels = 5);

BookSnapshot apply_event(BookSnapshot book, const FlowEvent& event, std::size_t max_levels = 5);

struct Mismatch {
  std::size_t snapshot_index = 0;
  Side side = Side::Bid;
  Ticks price = 0;
  Qty expected_qty = 0;
  Qty got_qty = 0;

  friend bool operator==(const Mismatch&, const Mismatch&) = default;
};

struct ReplayOutcome {
  std::size_t checked = 0;
  std::vector<Mismatch> mismatches;
  /// 1 - (distinct mismatching snapshots) / checked; 1.0 when nothing was checked.
  double match_fraction = 1.0;
};

struct ReplayOptions {
  std::size_t max_levels = 5;
  /// Reset the live book to the recorded snapshot after a mismatch.
  bool resync_on_mismatch = false;
};

/// Every level-by-price difference between two books, as seen from `expected`.
std::vector<Mismatch> compare_books(const BookSnapshot& expected, const BookSnapshot& got,
                                    std::size_t snapshot_index);

/// Replays `flow` from `initial`. Events with ts in (snapshots[i].ts,
/// snapshots[i+1].ts] belong to pair i; after applying them the live book is
/// compared with snapshots[i+1]. Events at or before snapshots[0].ts are
/// applied before the first comparison.
ReplayOutcome replay_and_verify(const BookSnapshot& initial, std::span<const FlowEvent> flow,
                                std::span<const BookSnapshot> snapshots,
                                const ReplayOptions& opts = {});

}  // namespace lobfacts

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lobfacts/errors.hpp"

namespace lobfacts {

using Ticks = std::int64_t;   // price as an integer multiple of the tick size
using Qty = std::int64_t;     // contracts
using TimeNs = std::int64_t;  // nanoseconds since epoch, exchange timezone

inline constexpr TimeNs kNsPerSecond = 1'000'000'000;
inline constexpr TimeNs kNsPerMs = 1'000'000;
inline constexpr TimeNs kNsPerDay = 86'400 * kNsPerSecond;

enum class Side : std::uint8_t { Bid = 0, Ask = 1 };
enum class EventKind : std::uint8_t { Limit = 0, Cancel = 1, Market = 2 };

/// Side that initiated a trade. A Bid aggressor (buyer) consumes ask liquidity.
enum class Aggressor : std::uint8_t { Bid, Ask, Unknown };

constexpr Side opposite(Side s) { return s == Side::Bid ? Side::Ask : Side::Bid; }

char to_char(Side s);
char to_char(EventKind k);
char to_char(Aggressor a);
std::optional<Side> side_from_char(char c);
std::optional<EventKind> kind_from_char(char c);
std::optional<Aggressor> aggressor_from_char(char c);

/// Nanoseconds since midnight for an "HH:MM:SS[.fraction]" string.
TimeNs parse_time_of_day(std::string_view text);
std::string format_time_of_day(TimeNs tod);

constexpr TimeNs time_of_day(TimeNs ts) {
  const TimeNs r = ts % kNsPerDay;
  return r < 0 ? r + kNsPerDay : r;
}

constexpr TimeNs day_start(TimeNs ts) { return ts - time_of_day(ts); }

/// ISO date (YYYY-MM-DD) of the calendar day containing `ts`.
std::string format_date(TimeNs ts);
/// Midnight of an ISO date, in nanoseconds since epoch.
TimeNs parse_date(std::string_view iso);

struct InstrumentSpec {
  std::string symbol;
  double tick_size = 0.01;
  int levels = 5;
  TimeNs session_start = 9 * 3600 * kNsPerSecond;
  TimeNs session_end = 18 * 3600 * kNsPerSecond;
  std::optional<double> reference_mean_spread_ticks;

  /// Throws ConfigError when an invariant does not hold.
  void validate() const;

  double to_price(Ticks t) const { return static_cast<double>(t) * tick_size; }
  double to_price(double ticks) const { return ticks * tick_size; }

  /// Tick count for a price, or nullopt when the price is not a multiple of
  /// the tick size within 1e-9 relative tolerance.
  std::optional<Ticks> to_ticks(double price) const;

  /// Decimal text of a tick count, exact to the tick size's decimals.
  std::string format_price(Ticks t) const;

  bool in_session(TimeNs ts) const {
    const TimeNs tod = time_of_day(ts);
    return tod >= session_start && tod <= session_end;
  }
};

struct Level {
  Ticks price = 0;
  Qty qty = 0;

  friend bool operator==(const Level&, const Level&) = default;
};

/// L2 state. Bids strictly decreasing, asks strictly increasing in price.
struct BookSnapshot {
  TimeNs ts = 0;
  std::vector<Level> bids;
  std::vector<Level> asks;

  std::vector<Level>& side(Side s) { return s == Side::Bid ? bids : asks; }
  const std::vector<Level>& side(Side s) const { return s == Side::Bid ? bids : asks; }

  std::optional<Ticks> best(Side s) const {
    const auto& lv = side(s);
    if (lv.empty()) return std::nullopt;
    return lv.front().price;
  }

  /// Same levels on both sides, timestamps ignored.
  bool same_book(const BookSnapshot& o) const { return bids == o.bids && asks == o.asks; }

  friend bool operator==(const BookSnapshot&, const BookSnapshot&) = default;
};

/// Reason the snapshot violates the book invariants, or nullopt if valid.
std::optional<std::string> check_snapshot(const BookSnapshot& snap);

struct Trade {
  TimeNs ts = 0;
  Ticks price = 0;
  Qty size = 0;
  Aggressor aggressor = Aggressor::Unknown;

  friend bool operator==(const Trade&, const Trade&) = default;
};

/// One labeled order-flow event. `level` is the 1-based depth of the price,
/// or minus the tick improvement over the previous best for a limit placed
/// inside the spread. `seq` is the event-time index.
struct FlowEvent {
  TimeNs ts = 0;
  EventKind kind = EventKind::Limit;
  Side side = Side::Bid;
  Ticks price = 0;
  Qty size = 0;
  int level = 1;
  std::uint64_t seq = 0;

  friend bool operator==(const FlowEvent&, const FlowEvent&) = default;
};

/// Mid prices (price units) on strictly increasing timestamps.
class MidSeries {
 public:
  MidSeries() = default;
  MidSeries(std::vector<TimeNs> timestamps, std::vector<double> mids);

  const std::vector<TimeNs>& timestamps() const { return ts_; }
  const std::vector<double>& mids() const { return mids_; }
  std::size_t size() const { return ts_.size(); }
  bool empty() const { return ts_.empty(); }

  /// Last mid at or before `t`; nullopt before the first observation.
  std::optional<double> at(TimeNs t) const;

 private:
  std::vector<TimeNs> ts_;
  std::vector<double> mids_;
};

/// Mid series of a snapshot stream. Snapshots with an empty side are skipped;
/// for repeated timestamps the last snapshot wins.
MidSeries mid_series(std::span<const BookSnapshot> snapshots, double tick_size);

/// (best_bid + best_ask) / 2 in ticks. Throws EmptySide.
double mid_price_ticks(const BookSnapshot& snap);
/// (best_bid + best_ask) / 2 in price units. Throws EmptySide.
double mid_price(const BookSnapshot& snap, double tick_size);
/// Spread as a positive tick count. Throws EmptySide or NonPositiveSpread.
Ticks spread_ticks(const BookSnapshot& snap);

struct TickByTick {};
struct Calendar {
  TimeNs dt = kNsPerSecond;
  /// First grid point; defaults to the first timestamp of the series.
  std::optional<TimeNs> origin;
};
using Sampling = std::variant<TickByTick, Calendar>;

struct SampledMids {
  std::vector<TimeNs> grid;
  std::vector<double> mids;
};

/// Last-observation-carried-forward samples on origin + k*dt. Grid points
/// before the first observation are skipped.
SampledMids sample_calendar(const MidSeries& series, TimeNs dt, std::optional<TimeNs> origin = {});

/// Log returns ln m(t+dt) - ln m(t). Tick-by-tick mode uses consecutive
/// distinct mids. Throws TooShort for fewer than two observations.
std::vector<double> log_returns(const MidSeries& series, const Sampling& sampling);

}  // namespace lobfacts

#include "lobfacts/types.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace lobfacts {

char to_char(Side s) { return s == Side::Bid ? 'B' : 'A'; }

char to_char(EventKind k) {
  switch (k) {
    case EventKind::Limit: return 'L';
    case EventKind::Cancel: return 'C';
    case EventKind::Market: return 'M';
  }
  return '?';
}

char to_char(Aggressor a) {
  switch (a) {
    case Aggressor::Bid: return 'B';
    case Aggressor::Ask: return 'A';
    case Aggressor::Unknown: return 'U';
  }
  return '?';
}

std::optional<Side> side_from_char(char c) {
  if (c == 'B') return Side::Bid;
  if (c == 'A') return Side::Ask;
  return std::nullopt;
}

std::optional<EventKind> kind_from_char(char c) {
  if (c == 'L') return EventKind::Limit;
  if (c == 'C') return EventKind::Cancel;
  if (c == 'M') return EventKind::Market;
  return std::nullopt;
}

std::optional<Aggressor> aggressor_from_char(char c) {
  if (c == 'B') return Aggressor::Bid;
  if (c == 'A') return Aggressor::Ask;
  if (c == 'U') return Aggressor::Unknown;
  return std::nullopt;
}

TimeNs parse_time_of_day(std::string_view text) {
  int h = 0, m = 0;
  double s = 0.0;
  const std::string copy(text);
  if (std::sscanf(copy.c_str(), "%d:%d:%lf", &h, &m, &s) != 3 || h < 0 || h > 24 || m < 0 ||
      m > 59 || s < 0.0 || s >= 61.0) {
    throw ConfigError("bad time of day '" + copy + "', expected HH:MM:SS");
  }
  return (static_cast<TimeNs>(h) * 3600 + m * 60) * kNsPerSecond +
         static_cast<TimeNs>(std::llround(s * 1e9));
}

std::string format_time_of_day(TimeNs tod) {
  const TimeNs secs = tod / kNsPerSecond;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%02lld:%02lld:%02lld", static_cast<long long>(secs / 3600),
                static_cast<long long>((secs / 60) % 60), static_cast<long long>(secs % 60));
  return buf;
}

namespace {

// Proleptic Gregorian day counts.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m > 2 ? m - 3 : m + 9) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp < 10 ? mp + 3 : mp - 9;
  y = static_cast<std::int64_t>(yoe) + era * 400 + (m <= 2);
}

}  // namespace

std::string format_date(TimeNs ts) {
  std::int64_t y;
  unsigned m, d;
  civil_from_days(day_start(ts) / kNsPerDay, y, m, d);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04lld-%02u-%02u", static_cast<long long>(y), m, d);
  return buf;
}

TimeNs parse_date(std::string_view iso) {
  int y = 0;
  unsigned m = 0, d = 0;
  const std::string copy(iso);
  if (std::sscanf(copy.c_str(), "%d-%u-%u", &y, &m, &d) != 3 || m < 1 || m > 12 || d < 1 ||
      d > 31) {
    throw ConfigError("bad date '" + copy + "', expected YYYY-MM-DD");
  }
  return days_from_civil(y, m, d) * kNsPerDay;
}

void InstrumentSpec::validate() const {
  if (!(tick_size > 0.0) || !std::isfinite(tick_size)) throw ConfigError("tick_size must be > 0");
  if (levels < 1) throw ConfigError("levels must be >= 1");
  if (!(session_start < session_end)) throw ConfigError("session_start must precede session_end");
  if (session_start < 0 || session_end > kNsPerDay) throw ConfigError("session hours out of range");
}

std::optional<Ticks> InstrumentSpec::to_ticks(double price) const {
  if (!std::isfinite(price)) return std::nullopt;
  const double q = price / tick_size;
  const double r = std::round(q);
  if (std::abs(q - r) > 1e-9 * std::max(1.0, std::abs(q))) return std::nullopt;
  return static_cast<Ticks>(r);
}

std::string InstrumentSpec::format_price(Ticks t) const {
  // Smallest decimal count that represents the tick size exactly.
  int decimals = 0;
  double scaled = tick_size;
  while (decimals < 9 && std::abs(scaled - std::round(scaled)) > 1e-9 * std::max(1.0, scaled)) {
    scaled *= 10.0;
    ++decimals;
  }
  const std::int64_t unit = std::llround(scaled);
  const std::int64_t v = t * unit;
  std::int64_t pow10 = 1;
  for (int i = 0; i < decimals; ++i) pow10 *= 10;
  const std::int64_t mag = v < 0 ? -v : v;
  std::string out = v < 0 ? "-" : "";
  out += std::to_string(mag / pow10);
  if (decimals > 0) {
    std::string frac = std::to_string(mag % pow10);
    out += '.';
    out.append(static_cast<std::size_t>(decimals) - frac.size(), '0');
    out += frac;
  }
  return out;
}

std::optional<std::string> check_snapshot(const BookSnapshot& snap) {
  for (Side s : {Side::Bid, Side::Ask}) {
    const auto& lv = snap.side(s);
    for (std::size_t i = 0; i < lv.size(); ++i) {
      if (lv[i].qty <= 0) return std::string("non-positive quantity");
      if (i > 0) {
        const bool ordered =
            s == Side::Bid ? lv[i].price < lv[i - 1].price : lv[i].price > lv[i - 1].price;
        if (!ordered) return std::string(s == Side::Bid ? "bid prices not strictly decreasing"
                                                        : "ask prices not strictly increasing");
      }
    }
  }
  if (!snap.bids.empty() && !snap.asks.empty() && snap.bids.front().price >= snap.asks.front().price)
    return std::string("crossed book (bid >= ask)");
  return std::nullopt;
}

MidSeries::MidSeries(std::vector<TimeNs> timestamps, std::vector<double> mids)
    : ts_(std::move(timestamps)), mids_(std::move(mids)) {
  if (ts_.size() != mids_.size()) throw ConfigError("MidSeries: length mismatch");
  for (std::size_t i = 1; i < ts_.size(); ++i)
    if (ts_[i] <= ts_[i - 1]) throw ConfigError("MidSeries: timestamps not strictly increasing");
}

std::optional<double> MidSeries::at(TimeNs t) const {
  auto it = std::upper_bound(ts_.begin(), ts_.end(), t);
  if (it == ts_.begin()) return std::nullopt;
  return mids_[static_cast<std::size_t>(it - ts_.begin()) - 1];
}

MidSeries mid_series(std::span<const BookSnapshot> snapshots, double tick_size) {
  std::vector<TimeNs> ts;
  std::vector<double> mids;
  ts.reserve(snapshots.size());
  mids.reserve(snapshots.size());
  for (const auto& s : snapshots) {
    if (s.bids.empty() || s.asks.empty()) continue;
    const double m = mid_price(s, tick_size);
    if (!ts.empty() && ts.back() == s.ts) {
      mids.back() = m;
    } else {
      ts.push_back(s.ts);
      mids.push_back(m);
    }
  }
  return MidSeries(std::move(ts), std::move(mids));
}

double mid_price_ticks(const BookSnapshot& snap) {
  if (snap.bids.empty() || snap.asks.empty()) throw EmptySide();
  return 0.5 * static_cast<double>(snap.bids.front().price + snap.asks.front().price);
}

double mid_price(const BookSnapshot& snap, double tick_size) {
  return mid_price_ticks(snap) * tick_size;
}

Ticks spread_ticks(const BookSnapshot& snap) {
  if (snap.bids.empty() || snap.asks.empty()) throw EmptySide();
  const Ticks s = snap.asks.front().price - snap.bids.front().price;
  if (s <= 0) throw NonPositiveSpread();
  return s;
}

SampledMids sample_calendar(const MidSeries& series, TimeNs dt, std::optional<TimeNs> origin) {
  if (dt <= 0) throw ConfigError("sampling interval must be positive");
  SampledMids out;
  if (series.empty()) return out;
  const auto& ts = series.timestamps();
  const auto& mids = series.mids();
  TimeNs t0 = origin.value_or(ts.front());
  if (t0 < ts.front()) {
    const TimeNs skip = (ts.front() - t0 + dt - 1) / dt;
    t0 += skip * dt;
  }
  std::size_t j = 0;
  for (TimeNs t = t0; t <= ts.back(); t += dt) {
    while (j + 1 < ts.size() && ts[j + 1] <= t) ++j;
    out.grid.push_back(t);
    out.mids.push_back(mids[j]);
  }
  return out;
}

std::vector<double> log_returns(const MidSeries& series, const Sampling& sampling) {
  if (series.size() < 2) throw TooShort("log_returns needs at least two observations");
  std::vector<double> out;
  if (std::holds_alternative<TickByTick>(sampling)) {
    const auto& m = series.mids();
    double last = m.front();
    for (std::size_t i = 1; i < m.size(); ++i) {
      if (m[i] != last) {
        out.push_back(std::log(m[i]) - std::log(last));
        last = m[i];
      }
    }
    return out;
  }
  const auto& cal = std::get<Calendar>(sampling);
  const SampledMids s = sample_calendar(series, cal.dt, cal.origin);
  if (s.mids.size() >= 2) out.reserve(s.mids.size() - 1);
  for (std::size_t i = 1; i < s.mids.size(); ++i)
    out.push_back(std::log(s.mids[i]) - std::log(s.mids[i - 1]));
  return out;
}

}  // namespace lobfacts

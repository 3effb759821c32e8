#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lobfacts/distfit.hpp"
#include "lobfacts/ingest.hpp"
#include "lobfacts/types.hpp"

namespace lobfacts {

inline constexpr TimeNs kSecond = kNsPerSecond;
inline constexpr TimeNs kMinute = 60 * kNsPerSecond;
inline constexpr TimeNs kHour = 3600 * kNsPerSecond;

struct AcfResult {
  std::vector<int> lags;  // 1..max_lag
  std::vector<double> rho;
  double conf_band = 0.0;  // 1.96 / sqrt(n)
  std::size_t n = 0;
};

/// Sample ACF with the 1/n covariance denominator.
/// Throws TooShort (n < max_lag + 2) or ZeroVariance.
AcfResult acf(std::span<const double> series, int max_lag);

struct ReturnAcf {
  std::string label;  // "tick" or the sampling interval, e.g. "10s"
  std::optional<TimeNs> dt;
  std::optional<AcfResult> result;
  std::string error;
};

std::vector<TimeNs> default_return_dts();

/// Return ACF in tick time plus one entry per calendar interval. Intervals
/// without enough data carry an error message instead of a result.
std::vector<ReturnAcf> return_acf_report(const MidSeries& mids, std::span<const TimeNs> dts,
                                         int max_lag = 20);

/// Human-readable duration label ("500ms", "10s", "1min", "2h").
std::string duration_label(TimeNs dt);

enum class VolVolMode {
  AcrossWindows,  // one correlation of (sigma_tau, V_tau) over the windows of each day
  WithinWindow,   // one correlation of (|return|, volume) over the sub-intervals of each window
};

struct CorrDistribution {
  std::vector<double> per_window_corr;
  double mean = 0.0;
  double median = 0.0;
  TimeNs window = 0;
  TimeNs dt = 0;
  VolVolMode mode = VolVolMode::AcrossWindows;
  std::size_t windows = 0;
  /// Groups whose correlation is undefined (a constant side).
  std::size_t skipped = 0;
};

/// Windows of tau = window_mult * dt aligned to the session open. Volatility
/// is the sample standard deviation of the dt log returns inside a window;
/// volume is the summed size of the trades inside it. Throws TooShort.
CorrDistribution volume_volatility(const SessionData& data, TimeNs dt, int window_mult = 100,
                                   VolVolMode mode = VolVolMode::AcrossWindows);
CorrDistribution volume_volatility(std::span<const SessionData> sessions, TimeNs dt,
                                   int window_mult = 100, VolVolMode mode = VolVolMode::AcrossWindows);

struct LrdResult {
  PowerLawFit fit;
  AcfResult acf;
  /// Lags left out of the log-log fit because their ACF was not positive.
  std::size_t excluded_lags = 0;
};

/// Power-law fit rho_k ~ c k^-alpha over lags 1..max_lag of the series ACF.
/// Throws DegenerateSample when fewer than 3 lags are positive.
LrdResult acf_powerlaw_fit(std::span<const double> series, int max_lag);

/// acf_powerlaw_fit on absolute dt log returns of the mid.
LrdResult long_range_dependence(const MidSeries& mids, TimeNs dt = kSecond, int max_lag = 100,
                                std::optional<TimeNs> origin = {});

struct Histogram {
  std::vector<double> edges;  // bins [edges[i], edges[i+1]), last bin closed
  std::vector<std::size_t> counts;
};

Histogram make_histogram(std::span<const double> samples, std::size_t bins = 50);

struct QueueGamma {
  Side side = Side::Ask;
  int level = 1;
  GammaFit fit;
  Histogram histogram;
};

/// Gamma fit of the quantity at `level` over all snapshots holding that
/// level (one sample per snapshot). Throws TooShort below 100 snapshots.
QueueGamma queue_gamma(std::span<const BookSnapshot> snapshots, Side side, int level = 1);

/// |Market| / (|Market| + |Cancel|). Throws EmptyFlow without any.
double market_ratio(std::span<const FlowEvent> flow);

struct FlowStats {
  std::size_t limits = 0;
  std::size_t cancels = 0;
  std::size_t markets = 0;
  double market_ratio = 0.0;
  /// Size -> number of orders over the fitted kinds.
  std::map<Qty, std::size_t> size_counts;
  std::optional<PowerLawFit> size_powerlaw;
  std::string size_powerlaw_error;
  std::vector<Qty> round_number_peaks;
};

struct FlowStatsOptions {
  /// Kinds whose sizes enter the size distribution.
  bool sizes_limit = false;
  bool sizes_cancel = false;
  bool sizes_market = true;
  Qty round_multiple = 10;
};

/// Order mix, size power law (log-log fit of the empirical pmf over sizes
/// with a nonzero count) and round-number peaks. Throws EmptyFlow when no
/// Cancel or Market is present.
FlowStats flow_stats(std::span<const FlowEvent> flow, const FlowStatsOptions& opts = {});

/// Multiples of `multiple` whose count beats both neighbours.
std::vector<Qty> round_number_peaks(const std::map<Qty, std::size_t>& size_counts, Qty multiple = 10);

struct WindowActivity {
  TimeNs window = 0;
  std::vector<TimeNs> starts;
  std::vector<double> counts;
  std::vector<double> volumes;
  std::optional<ModelSelection> count_model;
  std::optional<ModelSelection> volume_model;
  std::string count_error;
  std::string volume_error;
};

/// Event counts and volumes per complete window, windows aligned to the
/// session open of each day present in the flow; Gamma and LogNormal are
/// fitted to both. Throws TooShort below 10 complete windows.
WindowActivity window_activity(std::span<const FlowEvent> flow, const InstrumentSpec& spec,
                               TimeNs window = 5 * kMinute);

enum class TimeType { Calendar, Event };
const char* time_type_name(TimeType t);

struct DayFit {
  std::string date;
  std::size_t gaps = 0;
  std::optional<WeibullFit> fit;
};

struct InterarrivalResult {
  TimeType time_type = TimeType::Calendar;
  WeibullFit fit;
  std::size_t gaps = 0;
  std::size_t zero_gaps = 0;
  std::vector<DayFit> per_day;
  /// Summaries of the per-day shapes and scales (nullopt without day fits).
  std::optional<double> day_k_median;
  std::optional<double> day_lambda_median;
};

/// Weibull fit of the gaps between consecutive Market events of the same day.
/// Calendar gaps are in seconds with zero gaps set to half of `resolution`;
/// event gaps are differences of seq. Throws TooShort below 100 gaps.
InterarrivalResult interarrival_fit(std::span<const FlowEvent> flow, TimeType type,
                                    TimeNs resolution = 1);

/// Event classes in matrix order: Ca, Cb, La, Lb, Ma, Mb.
inline constexpr std::size_t kEventClasses = 6;
const char* event_class_name(std::size_t i);
std::size_t event_class(const FlowEvent& e);

using ClassMatrix = std::array<std::array<std::optional<double>, kEventClasses>, kEventClasses>;

struct ExcitationResult {
  /// transition[i][j] = P(next = j | previous = i); rows of unseen classes are absent.
  ClassMatrix transition;
  /// transition / marginal of the column; Ma|Ma and Mb|Mb absent when masked.
  ClassMatrix excitation;
  /// Class frequencies over the whole flow.
  std::array<double, kEventClasses> marginals{};
  bool mm_diagonal_masked = true;
  std::size_t pairs = 0;
};

/// Throws EmptyFlow for fewer than two events.
ExcitationResult excitation(std::span<const FlowEvent> flow, bool mask_mm = true);
/// Same computation on a raw class sequence (values 0..5).
ExcitationResult excitation_from_classes(std::span<const std::uint8_t> classes, bool mask_mm = true);

struct SignatureResult {
  std::vector<TimeNs> lags;
  std::vector<double> sigma2;  // price^2 per second
  std::vector<double> normalized;
  std::vector<std::size_t> n;
};

std::vector<TimeNs> default_signature_lags();

/// Variance of m(t+h) - m(t) on the grid origin + k*h, divided by h in
/// seconds. Throws TooShort when the series spans less than 10 times the
/// largest lag.
SignatureResult signature(const MidSeries& mids, std::span<const TimeNs> lags,
                          std::optional<TimeNs> origin = {});

struct DurationSummary {
  std::size_t episodes = 0;
  double p5 = 0.0, p25 = 0.0, median = 0.0, p75 = 0.0, p95 = 0.0;
  double mean = 0.0;
  double total = 0.0;
};

/// Linear-interpolation percentiles of an unsorted sample.
DurationSummary summarize(std::vector<double> values);
double percentile_sorted(std::span<const double> sorted, double q);

struct SpreadStats {
  /// Spread in ticks -> share of time.
  std::map<Ticks, double> frequency;
  /// Dwell times of maximal constant-spread runs, in seconds.
  std::map<Ticks, DurationSummary> duration_calendar;
  /// Same runs measured in book updates.
  std::map<Ticks, DurationSummary> duration_event;
  double mean_spread_ticks = 0.0;
  /// Seconds covered by books with both sides present.
  double observed_seconds = 0.0;
};

/// Time-weighted spread statistics; snapshot i is held until snapshot i+1.
/// Books with an empty side are not weighted and end a run. Throws TooShort.
SpreadStats spread_stats(std::span<const BookSnapshot> snapshots);

struct VolLiquidity {
  TimeNs window = 0;
  TimeNs dt = 0;
  std::vector<TimeNs> starts;
  std::vector<double> ratios;
  std::size_t skipped_zero_volume = 0;
  DurationSummary summary;  // percentiles of the ratios
};

/// sigma_{tau,dt} / sqrt(V_tau * tick_size) per complete window aligned to
/// the session open. Throws TooShort when no window qualifies.
VolLiquidity vol_liquidity_ratio(const SessionData& data, TimeNs tau = kHour, TimeNs dt = kMinute);

struct ShapeProfile {
  std::vector<double> bid_avg_qty;
  std::vector<double> ask_avg_qty;
};

/// Time-weighted mean quantity per depth, missing levels counting as 0.
ShapeProfile book_shape(std::span<const BookSnapshot> snapshots, int levels = 5);

struct IntradayProfile {
  TimeNs bucket = 0;
  std::vector<TimeNs> bucket_start;  // time of day
  std::vector<double> norm_volume;
  std::vector<double> norm_count;
};

/// Counts and sizes per time-of-day bucket over the session, each
/// normalized to sum 1. Events outside the session are ignored.
/// Throws EmptyFlow when nothing falls inside the session.
IntradayProfile intraday_profile(std::span<const FlowEvent> flow, const InstrumentSpec& spec,
                                 TimeNs bucket = 15 * kMinute);

/// Pearson correlation; nullopt when either side is constant.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

}  // namespace lobfacts

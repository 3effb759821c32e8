#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "lobfacts/flow.hpp"
#include "lobfacts/metrics.hpp"

namespace lobfacts {

struct Range {
  double min = 0.0;
  double max = 0.0;
};

/// Named reference ranges, e.g. {"weibull.k": {"min": 0.4, "max": 0.9}}.
/// A two-element array [min, max] is accepted as well. Throws ConfigError.
std::map<std::string, Range> parse_ranges(const std::string& json_text);
std::map<std::string, Range> load_ranges(const std::filesystem::path& path);

/// Metric names accepted by ReportConfig::metrics.
const std::vector<std::string>& metric_names();

struct ReportConfig {
  /// Metrics to compute; empty means all.
  std::set<std::string> metrics;
  std::vector<TimeNs> return_dts = default_return_dts();
  int acf_max_lag = 20;
  TimeNs volvol_dt = kSecond;
  int volvol_window_mult = 100;
  VolVolMode volvol_mode = VolVolMode::AcrossWindows;
  TimeNs lrd_dt = kSecond;
  int lrd_max_lag = 100;
  TimeNs activity_window = 5 * kMinute;
  std::vector<TimeNs> signature_lags = default_signature_lags();
  TimeNs vol_liquidity_tau = kHour;
  TimeNs vol_liquidity_dt = kMinute;
  TimeNs intraday_bucket = 15 * kMinute;
  bool mask_mm = true;
  std::map<std::string, Range> ranges;
  /// Evaluate metrics on worker threads.
  bool parallel = true;
};

struct CheckResult {
  std::optional<double> value;
  Range range;
  bool pass = false;
};

struct RealismReport {
  std::string instrument;
  std::string date;

  std::optional<std::vector<ReturnAcf>> returns_acf;
  std::optional<CorrDistribution> volume_volatility;
  std::optional<LrdResult> long_range_dependence;
  std::optional<QueueGamma> queue_gamma_bid;
  std::optional<QueueGamma> queue_gamma_ask;
  std::optional<FlowStats> flow_stats;
  std::optional<WindowActivity> window_activity;
  std::optional<InterarrivalResult> interarrival_calendar;
  std::optional<InterarrivalResult> interarrival_event;
  std::optional<ExcitationResult> excitation;
  std::optional<SignatureResult> signature;
  std::optional<SpreadStats> spread;
  std::optional<VolLiquidity> vol_liquidity;
  std::optional<ShapeProfile> book_shape;
  std::optional<IntradayProfile> intraday;
  std::optional<MatchReport> extraction;
  std::optional<double> reference_mean_spread_ticks;

  /// metric name -> error message for metrics that could not be computed.
  std::map<std::string, std::string> errors;
  /// Flat scalar view used by the range checks.
  std::map<std::string, double> scalars;
  std::map<std::string, CheckResult> checks;

  bool all_checks_pass() const;
  std::vector<std::string> failed_checks() const;
};

/// Computes every selected metric. Failures are recorded per metric.
RealismReport build_report(const SessionData& data, std::span<const FlowEvent> flow,
                           const ReportConfig& config, const MatchReport* extraction = nullptr);

/// Evaluates `ranges` against report.scalars; a missing value fails.
void apply_checks(RealismReport& report, const std::map<std::string, Range>& ranges);

nlohmann::json to_json(const RealismReport& report);

/// One CSV per computed metric; returns the file names written.
std::vector<std::string> write_metric_csvs(const RealismReport& report, const std::filesystem::path& dir);

}  // namespace lobfacts

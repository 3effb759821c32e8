#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "lobfacts/ingest.hpp"
#include "lobfacts/types.hpp"

namespace lobfacts {

/// P(size = x) proportional to x^-alpha on 1..max_size, multiplied by
/// round_boost when x is a multiple of round_multiple.
struct PowerLawSizes {
  double alpha = 1.8;
  int max_size = 500;
  double round_boost = 1.0;
  int round_multiple = 10;
};
struct ConstantSizes {
  Qty size = 1;
};
/// Gamma draws rounded to the nearest integer, at least 1.
struct GammaSizes {
  double shape = 2.0;
  double scale = 5.0;
};
using SizeLaw = std::variant<PowerLawSizes, ConstantSizes, GammaSizes>;

/// Poisson event clock whose rate is the current total intensity.
struct ExponentialGaps {};
/// Renewal clock with Weibull(k, lambda) gaps in seconds, divided by the
/// regime multiplier.
struct WeibullGaps {
  double shape = 1.0;
  double scale_seconds = 0.1;
};
using InterarrivalLaw = std::variant<ExponentialGaps, WeibullGaps>;

/// Queue sizes re-drawn from Gamma(shape, scale * depth^depth_exponent) on
/// every limit/cancel update.
struct QueueTargetLaw {
  double shape = 2.0;
  double scale = 30.0;
  double depth_exponent = 0.0;
};

/// Two-state intensity regime; the high state multiplies every intensity.
struct RegimeSwitching {
  double high_multiplier = 1.0;
  double switch_rate = 0.0;  // per second, both directions
};

struct GenConfig {
  std::uint64_t seed = 1;
  InstrumentSpec spec = [] {
    InstrumentSpec s;
    s.symbol = "SYN";
    return s;
  }();
  std::string date = "2021-03-01";
  double duration_seconds = 3600.0;
  std::optional<std::size_t> max_events;
  double initial_mid = 100.0;

  // Events per second.
  double limit_intensity = 10.0;
  double cancel_intensity = 7.0;
  double market_intensity = 3.0;

  SizeLaw size_law = PowerLawSizes{};
  InterarrivalLaw interarrival = ExponentialGaps{};
  /// When set, limit and cancel events become queue updates toward a fresh
  /// Gamma target and their kind follows the sign of the change.
  std::optional<QueueTargetLaw> queue_target;
  /// Limit intensity multiplier while the spread is wider than one tick; the
  /// extra limits are placed inside the spread.
  double spread_closing_intensity_multiplier = 1.0;
  /// Chance that an ordinary limit lands inside a wide spread.
  double inspread_probability = 0.5;
  /// Chance that a cancel removes a whole level.
  double level_clear_probability = 0.05;
  RegimeSwitching regime;

  /// Uniform trade timestamp noise in [-jitter, +jitter].
  TimeNs trade_jitter_ns = 0;
  /// Fraction of trades stamped late by a delay in [late_delay_min, late_delay_max].
  double late_trade_fraction = 0.0;
  TimeNs late_delay_min_ns = 11 * kNsPerMs;
  TimeNs late_delay_max_ns = 50 * kNsPerMs;

  /// Throws ConfigError.
  void validate() const;
};

/// Generator config from JSON text (see README for the keys).
GenConfig parse_gen_config(const std::string& json_text);

struct GenStats {
  std::size_t limits = 0;
  std::size_t cancels = 0;
  std::size_t markets = 0;
  std::size_t inspread_limits = 0;
  /// Deep levels cancelled to make room for an in-spread limit.
  std::size_t evictions = 0;
  /// Cancels or markets that had to become limits to keep both sides alive.
  std::size_t conversions = 0;
};

struct Generated {
  SessionData data;
  std::vector<FlowEvent> truth_flow;
  GenStats stats;
};

/// Event-driven zero-intelligence session. One snapshot per event (plus the
/// initial book), one trade per Market event. Each side holds at most
/// spec.levels prices so the L2 view loses nothing. Deterministic in seed.
Generated generate(const GenConfig& config);

/// Draws order sizes from a SizeLaw.
class SizeSampler {
 public:
  explicit SizeSampler(const SizeLaw& law);
  Qty operator()(std::mt19937_64& rng);
  double mean() const { return mean_; }

 private:
  SizeLaw law_;
  std::discrete_distribution<int> table_;
  double mean_ = 1.0;
};

struct BounceConfig {
  std::uint64_t seed = 1;
  std::size_t n_trades = 100'000;
  double tick_size = 0.01;
  double initial_price = 100.0;
  Ticks spread_ticks = 1;
  /// Per-trade chance that the quotes move by one tick (either direction).
  double mid_move_probability = 0.01;
  /// Per-trade chance that the execution side is drawn afresh (uniformly);
  /// otherwise it repeats the previous side.
  double flip_probability = 1.0;
};

/// Trade prices bouncing between bid and ask around a slow random walk.
/// With no quote moves, lag-1 return autocorrelation is -flip/2.
std::vector<double> generate_bounce_trades(const BounceConfig& config);

}  // namespace lobfacts

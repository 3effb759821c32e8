#include "lobfacts/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace lobfacts {

namespace {

double seconds(TimeNs t) { return static_cast<double>(t) * 1e-9; }

double sample_sd(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return percentile_sorted(v, 0.5);
}

// First window start at or after `from`, on the grid open + k*step.
TimeNs first_aligned(TimeNs open, TimeNs step, TimeNs from) {
  if (from <= open) return open;
  return open + (from - open + step - 1) / step * step;
}

}  // namespace

AcfResult acf(std::span<const double> series, int max_lag) {
  if (max_lag < 1) throw ConfigError("acf: max_lag must be >= 1");
  const std::size_t n = series.size();
  if (n < static_cast<std::size_t>(max_lag) + 2) throw TooShort("acf: series shorter than max_lag + 2");
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
  std::vector<double> d(n);
  double c0 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = series[i] - mean;
    c0 += d[i] * d[i];
  }
  const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
  if (*lo == *hi || !(c0 > 0.0)) throw ZeroVariance("acf: series has zero variance");
  AcfResult r;
  r.n = n;
  r.conf_band = 1.96 / std::sqrt(static_cast<double>(n));
  for (int k = 1; k <= max_lag; ++k) {
    double ck = 0.0;
    for (std::size_t i = static_cast<std::size_t>(k); i < n; ++i) ck += d[i] * d[i - static_cast<std::size_t>(k)];
    r.lags.push_back(k);
    r.rho.push_back(std::clamp(ck / c0, -1.0, 1.0));
  }
  return r;
}

std::string duration_label(TimeNs dt) {
  auto whole = [&](TimeNs unit, const char* suffix) -> std::optional<std::string> {
    if (dt % unit == 0) return std::to_string(dt / unit) + suffix;
    return std::nullopt;
  };
  if (dt >= kHour)
    if (auto s = whole(kHour, "h")) return *s;
  if (dt >= kMinute)
    if (auto s = whole(kMinute, "min")) return *s;
  if (auto s = whole(kSecond, "s")) return *s;
  if (auto s = whole(kNsPerMs, "ms")) return *s;
  return std::to_string(dt) + "ns";
}

std::vector<TimeNs> default_return_dts() { return {kSecond, 10 * kSecond, kMinute}; }

std::vector<ReturnAcf> return_acf_report(const MidSeries& mids, std::span<const TimeNs> dts, int max_lag) {
  std::vector<ReturnAcf> out;
  auto run = [&](ReturnAcf entry, const Sampling& s) {
    try {
      const auto r = log_returns(mids, s);
      entry.result = acf(r, max_lag);
    } catch (const Error& e) {
      entry.error = e.what();
    }
    out.push_back(std::move(entry));
  };
  run(ReturnAcf{"tick", std::nullopt, std::nullopt, {}}, TickByTick{});
  for (TimeNs dt : dts) run(ReturnAcf{duration_label(dt), dt, std::nullopt, {}}, Calendar{dt, std::nullopt});
  return out;
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 2) return std::nullopt;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

namespace {

struct WindowData {
  std::vector<TimeNs> starts;
  // Per window: window_mult log returns and matching sub-interval volumes.
  std::vector<std::vector<double>> returns;
  std::vector<std::vector<double>> volumes;
};

WindowData cut_windows(const SessionData& data, TimeNs dt, int mult) {
  if (dt <= 0 || mult < 2) throw ConfigError("volume_volatility: dt > 0 and window_mult >= 2 required");
  WindowData w;
  const MidSeries mids = mid_series(data.snapshots, data.spec.tick_size);
  if (mids.size() < 2) return w;
  const TimeNs tau = dt * mult;
  const TimeNs first = mids.timestamps().front();
  const TimeNs last = mids.timestamps().back();
  std::size_t ti = 0;
  const auto& trades = data.trades;
  for (TimeNs s = first_aligned(data.session_open(), tau, first); s + tau <= last; s += tau) {
    std::vector<double> r(static_cast<std::size_t>(mult));
    std::vector<double> v(static_cast<std::size_t>(mult), 0.0);
    double prev = std::log(*mids.at(s));
    for (int j = 1; j <= mult; ++j) {
      const double cur = std::log(*mids.at(s + j * dt));
      r[static_cast<std::size_t>(j - 1)] = cur - prev;
      prev = cur;
    }
    while (ti < trades.size() && trades[ti].ts < s) ++ti;
    for (std::size_t k = ti; k < trades.size() && trades[k].ts < s + tau; ++k)
      v[static_cast<std::size_t>((trades[k].ts - s) / dt)] += static_cast<double>(trades[k].size);
    w.starts.push_back(s);
    w.returns.push_back(std::move(r));
    w.volumes.push_back(std::move(v));
  }
  return w;
}

void finish(CorrDistribution& c) {
  if (c.per_window_corr.empty()) throw ZeroVariance("volume_volatility: every correlation is undefined");
  c.mean = std::accumulate(c.per_window_corr.begin(), c.per_window_corr.end(), 0.0) /
           static_cast<double>(c.per_window_corr.size());
  c.median = median_of(c.per_window_corr);
}

void add_session(CorrDistribution& c, const SessionData& data) {
  const WindowData w = cut_windows(data, c.dt, static_cast<int>(c.window / c.dt));
  c.windows += w.starts.size();
  if (c.mode == VolVolMode::AcrossWindows) {
    if (w.starts.size() < 2) return;
    std::vector<double> sig, vol;
    for (std::size_t i = 0; i < w.starts.size(); ++i) {
      sig.push_back(sample_sd(w.returns[i]));
      vol.push_back(std::accumulate(w.volumes[i].begin(), w.volumes[i].end(), 0.0));
    }
    if (auto r = pearson(sig, vol)) c.per_window_corr.push_back(*r);
    else ++c.skipped;
  } else {
    for (std::size_t i = 0; i < w.starts.size(); ++i) {
      std::vector<double> absr(w.returns[i].size());
      for (std::size_t j = 0; j < absr.size(); ++j) absr[j] = std::abs(w.returns[i][j]);
      if (auto r = pearson(absr, w.volumes[i])) c.per_window_corr.push_back(*r);
      else ++c.skipped;
    }
  }
}

}  // namespace

CorrDistribution volume_volatility(const SessionData& data, TimeNs dt, int window_mult, VolVolMode mode) {
  return volume_volatility(std::span<const SessionData>(&data, 1), dt, window_mult, mode);
}

CorrDistribution volume_volatility(std::span<const SessionData> sessions, TimeNs dt, int window_mult,
                                   VolVolMode mode) {
  if (dt <= 0 || window_mult < 2) throw ConfigError("volume_volatility: dt > 0 and window_mult >= 2 required");
  CorrDistribution c;
  c.dt = dt;
  c.window = dt * window_mult;
  c.mode = mode;
  std::size_t usable = 0;
  for (const auto& s : sessions) {
    const std::size_t before = c.windows;
    add_session(c, s);
    if (c.windows - before >= 2) ++usable;
  }
  if (usable == 0) throw TooShort("volume_volatility: need at least two complete windows in a session");
  finish(c);
  return c;
}

LrdResult acf_powerlaw_fit(std::span<const double> series, int max_lag) {
  LrdResult out;
  out.acf = acf(series, max_lag);
  std::vector<double> x, y;
  for (std::size_t i = 0; i < out.acf.rho.size(); ++i) {
    if (out.acf.rho[i] > 0.0) {
      x.push_back(out.acf.lags[i]);
      y.push_back(out.acf.rho[i]);
    } else {
      ++out.excluded_lags;
    }
  }
  if (x.size() < 3) throw DegenerateSample("long_range_dependence: fewer than 3 positive ACF values");
  out.fit = fit_powerlaw_loglog(x, y);
  return out;
}

LrdResult long_range_dependence(const MidSeries& mids, TimeNs dt, int max_lag, std::optional<TimeNs> origin) {
  auto r = log_returns(mids, Calendar{dt, origin});
  for (double& v : r) v = std::abs(v);
  return acf_powerlaw_fit(r, max_lag);
}

Histogram make_histogram(std::span<const double> samples, std::size_t bins) {
  Histogram h;
  if (samples.empty() || bins == 0) return h;
  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  double lo = *lo_it, hi = *hi_it;
  if (hi == lo) hi = lo + 1.0;
  const double w = (hi - lo) / static_cast<double>(bins);
  for (std::size_t i = 0; i <= bins; ++i) h.edges.push_back(lo + w * static_cast<double>(i));
  h.edges.back() = hi;
  h.counts.assign(bins, 0);
  for (double x : samples) {
    auto b = static_cast<std::size_t>((x - lo) / w);
    ++h.counts[std::min(b, bins - 1)];
  }
  return h;
}

QueueGamma queue_gamma(std::span<const BookSnapshot> snapshots, Side side, int level) {
  if (level < 1) throw ConfigError("queue_gamma: level must be >= 1");
  if (snapshots.size() < 100) throw TooShort("queue_gamma: need at least 100 snapshots");
  std::vector<double> q;
  q.reserve(snapshots.size());
  for (const auto& s : snapshots) {
    const auto& lv = s.side(side);
    if (lv.size() >= static_cast<std::size_t>(level)) q.push_back(static_cast<double>(lv[level - 1].qty));
  }
  QueueGamma out;
  out.side = side;
  out.level = level;
  out.fit = fit_gamma_mle(q);
  out.histogram = make_histogram(q);
  return out;
}

double market_ratio(std::span<const FlowEvent> flow) {
  std::size_t m = 0, c = 0;
  for (const auto& e : flow) {
    if (e.kind == EventKind::Market) ++m;
    else if (e.kind == EventKind::Cancel) ++c;
  }
  if (m + c == 0) throw EmptyFlow("market_ratio: no cancel or market events");
  return static_cast<double>(m) / static_cast<double>(m + c);
}

std::vector<Qty> round_number_peaks(const std::map<Qty, std::size_t>& counts, Qty multiple) {
  std::vector<Qty> peaks;
  auto count = [&](Qty s) {
    auto it = counts.find(s);
    return it == counts.end() ? std::size_t{0} : it->second;
  };
  for (const auto& [s, c] : counts)
    if (s % multiple == 0 && c > std::max(count(s - 1), count(s + 1))) peaks.push_back(s);
  return peaks;
}

FlowStats flow_stats(std::span<const FlowEvent> flow, const FlowStatsOptions& opts) {
  FlowStats st;
  for (const auto& e : flow) {
    bool take = false;
    switch (e.kind) {
      case EventKind::Limit: ++st.limits; take = opts.sizes_limit; break;
      case EventKind::Cancel: ++st.cancels; take = opts.sizes_cancel; break;
      case EventKind::Market: ++st.markets; take = opts.sizes_market; break;
    }
    if (take) ++st.size_counts[e.size];
  }
  if (st.cancels + st.markets == 0) throw EmptyFlow("flow_stats: no cancel or market events");
  st.market_ratio = static_cast<double>(st.markets) / static_cast<double>(st.markets + st.cancels);
  std::size_t total = 0;
  for (const auto& kv : st.size_counts) total += kv.second;
  std::vector<double> x, y;
  for (const auto& [s, c] : st.size_counts) {
    x.push_back(static_cast<double>(s));
    y.push_back(static_cast<double>(c) / static_cast<double>(total));
  }
  try {
    st.size_powerlaw = fit_powerlaw_loglog(x, y);
  } catch (const Error& e) {
    st.size_powerlaw_error = e.what();
  }
  st.round_number_peaks = round_number_peaks(st.size_counts, opts.round_multiple);
  return st;
}

WindowActivity window_activity(std::span<const FlowEvent> flow, const InstrumentSpec& spec, TimeNs window) {
  if (window <= 0) throw ConfigError("window_activity: window must be positive");
  WindowActivity out;
  out.window = window;
  // Per day, windows run from the session open up to the last in-session
  // event; a window counts only if it ends by then.
  std::map<TimeNs, TimeNs> last_of_day;
  for (const auto& e : flow) {
    if (!spec.in_session(e.ts)) continue;
    auto& last = last_of_day[day_start(e.ts)];
    last = std::max(last, e.ts);
  }
  std::map<TimeNs, std::pair<double, double>> by_window;  // start -> (count, volume)
  for (const auto& [day, last] : last_of_day) {
    const TimeNs end = std::min(last, day + spec.session_end);
    for (TimeNs s = day + spec.session_start; s + window <= end; s += window) by_window[s] = {0.0, 0.0};
  }
  for (const auto& e : flow) {
    if (!spec.in_session(e.ts)) continue;
    const TimeNs open = day_start(e.ts) + spec.session_start;
    auto it = by_window.find(open + (e.ts - open) / window * window);
    if (it == by_window.end()) continue;
    it->second.first += 1.0;
    it->second.second += static_cast<double>(e.size);
  }
  for (const auto& [s, cv] : by_window) {
    out.starts.push_back(s);
    out.counts.push_back(cv.first);
    out.volumes.push_back(cv.second);
  }
  if (out.starts.size() < 10) throw TooShort("window_activity: need at least 10 complete windows");
  const std::set<Family> fams{Family::Gamma, Family::LogNormal};
  try {
    out.count_model = select_model(out.counts, fams);
  } catch (const Error& e) {
    out.count_error = e.what();
  }
  try {
    out.volume_model = select_model(out.volumes, fams);
  } catch (const Error& e) {
    out.volume_error = e.what();
  }
  return out;
}

const char* time_type_name(TimeType t) { return t == TimeType::Calendar ? "calendar" : "event"; }

InterarrivalResult interarrival_fit(std::span<const FlowEvent> flow, TimeType type, TimeNs resolution) {
  if (resolution <= 0) throw ConfigError("interarrival_fit: resolution must be positive");
  InterarrivalResult out;
  out.time_type = type;
  std::map<TimeNs, std::vector<double>> by_day;
  const FlowEvent* prev = nullptr;
  for (const auto& e : flow) {
    if (e.kind != EventKind::Market) continue;
    if (prev && day_start(prev->ts) == day_start(e.ts)) {
      double gap = 0.0;
      if (type == TimeType::Calendar) {
        TimeNs g = e.ts - prev->ts;
        if (g <= 0) {
          ++out.zero_gaps;
          gap = 0.5 * seconds(resolution);
        } else {
          gap = seconds(g);
        }
      } else {
        gap = static_cast<double>(e.seq) - static_cast<double>(prev->seq);
        if (gap <= 0.0) {
          ++out.zero_gaps;
          gap = 0.5;
        }
      }
      by_day[day_start(e.ts)].push_back(gap);
    }
    prev = &e;
  }
  std::vector<double> all;
  for (const auto& [d, g] : by_day) all.insert(all.end(), g.begin(), g.end());
  out.gaps = all.size();
  if (all.size() < 100) throw TooShort("interarrival_fit: need at least 100 gaps");
  out.fit = fit_weibull_mle(all);
  std::vector<double> ks, lambdas;
  for (const auto& [d, g] : by_day) {
    DayFit df;
    df.date = format_date(d);
    df.gaps = g.size();
    if (g.size() >= 100) {
      try {
        df.fit = fit_weibull_mle(g);
        ks.push_back(df.fit->shape);
        lambdas.push_back(df.fit->scale);
      } catch (const Error&) {
      }
    }
    out.per_day.push_back(std::move(df));
  }
  if (!ks.empty()) {
    out.day_k_median = median_of(ks);
    out.day_lambda_median = median_of(lambdas);
  }
  return out;
}

const char* event_class_name(std::size_t i) {
  static constexpr const char* names[kEventClasses] = {"Ca", "Cb", "La", "Lb", "Ma", "Mb"};
  return i < kEventClasses ? names[i] : "?";
}

std::size_t event_class(const FlowEvent& e) {
  const std::size_t side = e.side == Side::Ask ? 0 : 1;
  switch (e.kind) {
    case EventKind::Cancel: return side;
    case EventKind::Limit: return 2 + side;
    case EventKind::Market: return 4 + side;
  }
  return 0;
}

ExcitationResult excitation_from_classes(std::span<const std::uint8_t> classes, bool mask_mm) {
  if (classes.size() < 2) throw EmptyFlow("excitation: need at least two events");
  std::array<std::array<std::size_t, kEventClasses>, kEventClasses> counts{};
  std::array<std::size_t, kEventClasses> freq{};
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (classes[i] >= kEventClasses) throw ConfigError("excitation: class out of range");
    ++freq[classes[i]];
    if (i > 0) ++counts[classes[i - 1]][classes[i]];
  }
  ExcitationResult r;
  r.mm_diagonal_masked = mask_mm;
  r.pairs = classes.size() - 1;
  const double n = static_cast<double>(classes.size());
  for (std::size_t j = 0; j < kEventClasses; ++j) r.marginals[j] = static_cast<double>(freq[j]) / n;
  for (std::size_t i = 0; i < kEventClasses; ++i) {
    const std::size_t row = std::accumulate(counts[i].begin(), counts[i].end(), std::size_t{0});
    if (row == 0) continue;
    for (std::size_t j = 0; j < kEventClasses; ++j) {
      const double p = static_cast<double>(counts[i][j]) / static_cast<double>(row);
      r.transition[i][j] = p;
      if (r.marginals[j] > 0.0 && !(mask_mm && i == j && i >= 4)) r.excitation[i][j] = p / r.marginals[j];
    }
  }
  return r;
}

ExcitationResult excitation(std::span<const FlowEvent> flow, bool mask_mm) {
  std::vector<std::uint8_t> c(flow.size());
  for (std::size_t i = 0; i < flow.size(); ++i) c[i] = static_cast<std::uint8_t>(event_class(flow[i]));
  return excitation_from_classes(c, mask_mm);
}

std::vector<TimeNs> default_signature_lags() {
  std::vector<TimeNs> v;
  for (int j = 0; j < 8; ++j) v.push_back(kSecond << j);
  return v;
}

SignatureResult signature(const MidSeries& mids, std::span<const TimeNs> lags, std::optional<TimeNs> origin) {
  if (lags.empty()) throw ConfigError("signature: no lags");
  if (mids.size() < 2) throw TooShort("signature: need at least two mids");
  const TimeNs span = mids.timestamps().back() - mids.timestamps().front();
  const TimeNs hmax = *std::max_element(lags.begin(), lags.end());
  if (span < 10 * hmax) throw TooShort("signature: series spans less than 10 times the largest lag");
  SignatureResult out;
  for (TimeNs h : lags) {
    if (h <= 0) throw ConfigError("signature: lags must be positive");
    const SampledMids s = sample_calendar(mids, h, origin);
    std::vector<double> inc;
    for (std::size_t i = 1; i < s.mids.size(); ++i) inc.push_back(s.mids[i] - s.mids[i - 1]);
    if (inc.size() < 2) throw TooShort("signature: fewer than two increments at lag " + duration_label(h));
    const double m = std::accumulate(inc.begin(), inc.end(), 0.0) / static_cast<double>(inc.size());
    double ss = 0.0;
    for (double v : inc) ss += (v - m) * (v - m);
    out.lags.push_back(h);
    out.sigma2.push_back(ss / static_cast<double>(inc.size()) / seconds(h));
    out.n.push_back(inc.size());
  }
  const double mx = *std::max_element(out.sigma2.begin(), out.sigma2.end());
  for (double v : out.sigma2) out.normalized.push_back(mx > 0.0 ? v / mx : 0.0);
  return out;
}

double percentile_sorted(std::span<const double> v, double q) {
  if (v.empty()) return 0.0;
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

DurationSummary summarize(std::vector<double> values) {
  DurationSummary s;
  s.episodes = values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  s.p5 = percentile_sorted(values, 0.05);
  s.p25 = percentile_sorted(values, 0.25);
  s.median = percentile_sorted(values, 0.5);
  s.p75 = percentile_sorted(values, 0.75);
  s.p95 = percentile_sorted(values, 0.95);
  s.total = std::accumulate(values.begin(), values.end(), 0.0);
  s.mean = s.total / static_cast<double>(values.size());
  return s;
}

SpreadStats spread_stats(std::span<const BookSnapshot> snapshots) {
  if (snapshots.size() < 2) throw TooShort("spread_stats: need at least two snapshots");
  SpreadStats st;
  std::map<Ticks, double> time_at;
  std::map<Ticks, std::vector<double>> cal, evt;
  std::optional<Ticks> run_spread;
  double run_time = 0.0, run_events = 0.0;
  auto close_run = [&] {
    if (run_spread && (run_time > 0.0 || run_events > 0.0)) {
      cal[*run_spread].push_back(run_time);
      evt[*run_spread].push_back(run_events);
    }
    run_spread.reset();
    run_time = run_events = 0.0;
  };
  for (std::size_t i = 0; i + 1 < snapshots.size(); ++i) {
    const auto& s = snapshots[i];
    if (s.bids.empty() || s.asks.empty()) {
      close_run();
      continue;
    }
    const Ticks sp = spread_ticks(s);
    const double dt = seconds(snapshots[i + 1].ts - s.ts);
    if (run_spread != sp) {
      close_run();
      run_spread = sp;
    }
    run_time += dt;
    run_events += 1.0;
    time_at[sp] += dt;
  }
  close_run();
  double total = 0.0, weighted = 0.0;
  for (const auto& [sp, t] : time_at) {
    total += t;
    weighted += static_cast<double>(sp) * t;
  }
  if (!(total > 0.0)) throw TooShort("spread_stats: snapshots cover no time");
  for (const auto& [sp, t] : time_at) st.frequency[sp] = t / total;
  for (auto& [sp, v] : cal) st.duration_calendar[sp] = summarize(std::move(v));
  for (auto& [sp, v] : evt) st.duration_event[sp] = summarize(std::move(v));
  st.mean_spread_ticks = weighted / total;
  st.observed_seconds = total;
  return st;
}

VolLiquidity vol_liquidity_ratio(const SessionData& data, TimeNs tau, TimeNs dt) {
  if (dt <= 0 || tau < 2 * dt || tau % dt != 0) throw ConfigError("vol_liquidity_ratio: tau must be a multiple of dt");
  VolLiquidity out;
  out.window = tau;
  out.dt = dt;
  const WindowData w = cut_windows(data, dt, static_cast<int>(tau / dt));
  for (std::size_t i = 0; i < w.starts.size(); ++i) {
    const double v = std::accumulate(w.volumes[i].begin(), w.volumes[i].end(), 0.0);
    if (!(v > 0.0)) {
      ++out.skipped_zero_volume;
      continue;
    }
    out.starts.push_back(w.starts[i]);
    out.ratios.push_back(sample_sd(w.returns[i]) / std::sqrt(v * data.spec.tick_size));
  }
  if (out.ratios.empty()) throw TooShort("vol_liquidity_ratio: no complete window with traded volume");
  out.summary = summarize(out.ratios);
  return out;
}

ShapeProfile book_shape(std::span<const BookSnapshot> snapshots, int levels) {
  if (snapshots.size() < 2) throw TooShort("book_shape: need at least two snapshots");
  if (levels < 1) throw ConfigError("book_shape: levels must be >= 1");
  ShapeProfile p;
  p.bid_avg_qty.assign(static_cast<std::size_t>(levels), 0.0);
  p.ask_avg_qty.assign(static_cast<std::size_t>(levels), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < snapshots.size(); ++i) {
    const double dt = seconds(snapshots[i + 1].ts - snapshots[i].ts);
    total += dt;
    for (Side s : {Side::Bid, Side::Ask}) {
      auto& acc = s == Side::Bid ? p.bid_avg_qty : p.ask_avg_qty;
      const auto& lv = snapshots[i].side(s);
      for (std::size_t d = 0; d < lv.size() && d < acc.size(); ++d) acc[d] += dt * static_cast<double>(lv[d].qty);
    }
  }
  if (!(total > 0.0)) throw TooShort("book_shape: snapshots cover no time");
  for (auto* v : {&p.bid_avg_qty, &p.ask_avg_qty})
    for (double& x : *v) x /= total;
  return p;
}

IntradayProfile intraday_profile(std::span<const FlowEvent> flow, const InstrumentSpec& spec, TimeNs bucket) {
  if (bucket <= 0) throw ConfigError("intraday_profile: bucket must be positive");
  IntradayProfile p;
  p.bucket = bucket;
  const TimeNs len = spec.session_end - spec.session_start;
  const auto nb = static_cast<std::size_t>((len + bucket - 1) / bucket);
  for (std::size_t i = 0; i < nb; ++i) p.bucket_start.push_back(spec.session_start + static_cast<TimeNs>(i) * bucket);
  p.norm_count.assign(nb, 0.0);
  p.norm_volume.assign(nb, 0.0);
  double n = 0.0, v = 0.0;
  for (const auto& e : flow) {
    if (!spec.in_session(e.ts)) continue;
    const auto b = std::min(static_cast<std::size_t>((time_of_day(e.ts) - spec.session_start) / bucket), nb - 1);
    p.norm_count[b] += 1.0;
    p.norm_volume[b] += static_cast<double>(e.size);
    n += 1.0;
    v += static_cast<double>(e.size);
  }
  if (n == 0.0) throw EmptyFlow("intraday_profile: no events inside the session");
  for (double& x : p.norm_count) x /= n;
  for (double& x : p.norm_volume) x /= v;
  return p;
}

}  // namespace lobfacts

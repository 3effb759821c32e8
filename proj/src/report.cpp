#include "lobfacts/report.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <future>
#include <sstream>

namespace lobfacts {

using nlohmann::json;

namespace {

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json num(const std::optional<double>& v) { return v ? num(*v) : json(nullptr); }

Range parse_range(const std::string& name, const json& j) {
  Range r;
  if (j.is_array() && j.size() == 2) {
    r.min = j[0].get<double>();
    r.max = j[1].get<double>();
  } else if (j.is_object()) {
    r.min = j.at("min").get<double>();
    r.max = j.at("max").get<double>();
  } else {
    throw ConfigError("range '" + name + "' must be [min, max] or {min, max}");
  }
  if (!(r.min <= r.max)) throw ConfigError("range '" + name + "' has min > max");
  return r;
}

json to_json(const AcfResult& a) {
  json rho = json::array();
  for (double r : a.rho) rho.push_back(num(r));
  return {{"lags", a.lags}, {"rho", rho}, {"conf_band", num(a.conf_band)}, {"n", a.n}};
}

json to_json(const PowerLawFit& f) {
  return {{"alpha", num(f.alpha)}, {"c", num(f.c)}, {"r2", num(f.r2)},
          {"n_points", f.n_points}, {"x_min", num(f.x_min)}, {"x_max", num(f.x_max)}};
}

json to_json(const GammaFit& f) {
  return {{"shape", num(f.shape)}, {"scale", num(f.scale)}, {"loglik", num(f.loglik)}, {"n", f.n}};
}

json to_json(const WeibullFit& f) {
  return {{"k", num(f.shape)}, {"lambda", num(f.scale)}, {"loglik", num(f.loglik)}, {"n", f.n}};
}

json to_json(const DurationSummary& s) {
  return {{"episodes", s.episodes}, {"p5", num(s.p5)},         {"p25", num(s.p25)},
          {"median", num(s.median)}, {"p75", num(s.p75)},     {"p95", num(s.p95)},
          {"mean", num(s.mean)},     {"total", num(s.total)}};
}

json to_json(const ModelSelection& m) {
  json c = json::object();
  for (const auto& cand : m.candidates) {
    json params = json::array();
    for (double p : cand.params) params.push_back(num(p));
    c[family_name(cand.family)] = {{"loglik", num(cand.loglik)}, {"aic", num(cand.aic)}, {"params", params}};
  }
  json f = json::object();
  for (const auto& [fam, msg] : m.failures) f[family_name(fam)] = msg;
  return {{"candidates", c}, {"failures", f}, {"winner", family_name(m.winner)}, {"margin", num(m.margin)}};
}

json to_json(const ClassMatrix& m) {
  json rows = json::array();
  for (const auto& row : m) {
    json r = json::array();
    for (const auto& v : row) r.push_back(num(v));
    rows.push_back(r);
  }
  return rows;
}

json to_json(const InterarrivalResult& r) {
  json days = json::array();
  for (const auto& d : r.per_day) {
    json dj = {{"date", d.date}, {"gaps", d.gaps}};
    if (d.fit) {
      dj["k"] = num(d.fit->shape);
      dj["lambda"] = num(d.fit->scale);
    }
    days.push_back(dj);
  }
  return {{"time_type", time_type_name(r.time_type)},
          {"fit", to_json(r.fit)},
          {"gaps", r.gaps},
          {"zero_gaps", r.zero_gaps},
          {"per_day", days},
          {"day_k_median", num(r.day_k_median)},
          {"day_lambda_median", num(r.day_lambda_median)}};
}

json spread_map(const std::map<Ticks, DurationSummary>& m) {
  json o = json::object();
  for (const auto& [k, v] : m) o[std::to_string(k)] = to_json(v);
  return o;
}

std::string side_name(Side s) { return s == Side::Bid ? "bid" : "ask"; }

bool selected(const ReportConfig& c, const std::string& name) {
  return c.metrics.empty() || c.metrics.count(name) > 0;
}

void set_scalar(RealismReport& r, const std::string& name, double v) {
  if (std::isfinite(v)) r.scalars[name] = v;
}

void collect_scalars(RealismReport& r) {
  if (r.returns_acf)
    for (const auto& e : *r.returns_acf)
      if (e.result && !e.result->rho.empty()) set_scalar(r, "acf." + e.label + ".rho1", e.result->rho.front());
  if (r.volume_volatility) {
    set_scalar(r, "volvol.median", r.volume_volatility->median);
    set_scalar(r, "volvol.mean", r.volume_volatility->mean);
  }
  if (r.long_range_dependence) {
    set_scalar(r, "lrd.alpha", r.long_range_dependence->fit.alpha);
    set_scalar(r, "lrd.r2", r.long_range_dependence->fit.r2);
  }
  for (const auto* q : {&r.queue_gamma_bid, &r.queue_gamma_ask})
    if (*q) {
      const std::string p = "gamma_" + side_name((*q)->side);
      set_scalar(r, p + ".shape", (*q)->fit.shape);
      set_scalar(r, p + ".scale", (*q)->fit.scale);
    }
  if (r.flow_stats) {
    set_scalar(r, "market_ratio", r.flow_stats->market_ratio);
    set_scalar(r, "round_number_peaks", static_cast<double>(r.flow_stats->round_number_peaks.size()));
    if (r.flow_stats->size_powerlaw) {
      set_scalar(r, "powerlaw.alpha", r.flow_stats->size_powerlaw->alpha);
      set_scalar(r, "powerlaw.r2", r.flow_stats->size_powerlaw->r2);
    }
  }
  if (r.window_activity) set_scalar(r, "activity.windows", static_cast<double>(r.window_activity->starts.size()));
  if (r.interarrival_calendar) {
    set_scalar(r, "weibull.k", r.interarrival_calendar->fit.shape);
    set_scalar(r, "weibull.lambda", r.interarrival_calendar->fit.scale);
  }
  if (r.interarrival_event) {
    set_scalar(r, "weibull_event.k", r.interarrival_event->fit.shape);
    set_scalar(r, "weibull_event.lambda", r.interarrival_event->fit.scale);
  }
  if (r.signature) {
    const auto [lo, hi] = std::minmax_element(r.signature->sigma2.begin(), r.signature->sigma2.end());
    if (*lo > 0.0) set_scalar(r, "signature.max_min_ratio", *hi / *lo);
  }
  if (r.spread) {
    set_scalar(r, "mean_spread_ticks", r.spread->mean_spread_ticks);
    auto it = r.spread->frequency.find(1);
    set_scalar(r, "spread.one_tick_share", it == r.spread->frequency.end() ? 0.0 : it->second);
  }
  if (r.vol_liquidity) set_scalar(r, "vol_liquidity.median", r.vol_liquidity->summary.median);
  if (r.book_shape && !r.book_shape->bid_avg_qty.empty()) {
    set_scalar(r, "book.bid_l1", r.book_shape->bid_avg_qty.front());
    set_scalar(r, "book.ask_l1", r.book_shape->ask_avg_qty.front());
  }
  if (r.extraction) set_scalar(r, "match_rate", r.extraction->match_rate);
}

}  // namespace

std::map<std::string, Range> parse_ranges(const std::string& json_text) {
  std::map<std::string, Range> out;
  try {
    const auto j = json::parse(json_text);
    if (!j.is_object()) throw ConfigError("ranges file must hold a JSON object");
    for (const auto& [name, v] : j.items()) out[name] = parse_range(name, v);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("ranges: ") + e.what());
  }
  return out;
}

std::map<std::string, Range> load_ranges(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_ranges(ss.str());
}

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names = {
      "returns_acf", "volume_volatility", "long_range_dependence", "queue_gamma", "flow_stats",
      "window_activity", "interarrival", "excitation", "signature", "spread", "vol_liquidity",
      "book_shape", "intraday"};
  return names;
}

bool RealismReport::all_checks_pass() const {
  for (const auto& [n, c] : checks)
    if (!c.pass) return false;
  return true;
}

std::vector<std::string> RealismReport::failed_checks() const {
  std::vector<std::string> out;
  for (const auto& [n, c] : checks)
    if (!c.pass) out.push_back(n);
  return out;
}

void apply_checks(RealismReport& report, const std::map<std::string, Range>& ranges) {
  report.checks.clear();
  for (const auto& [name, range] : ranges) {
    CheckResult c;
    c.range = range;
    auto it = report.scalars.find(name);
    if (it != report.scalars.end()) {
      c.value = it->second;
      c.pass = it->second >= range.min && it->second <= range.max;
    }
    report.checks[name] = c;
  }
}

RealismReport build_report(const SessionData& data, std::span<const FlowEvent> flow, const ReportConfig& cfg,
                           const MatchReport* extraction) {
  for (const auto& m : cfg.metrics)
    if (std::find(metric_names().begin(), metric_names().end(), m) == metric_names().end())
      throw ConfigError("unknown metric '" + m + "'");
  RealismReport r;
  r.instrument = data.spec.symbol;
  r.date = data.session_date;
  r.reference_mean_spread_ticks = data.spec.reference_mean_spread_ticks;
  if (extraction) r.extraction = *extraction;

  const MidSeries mids = mid_series(data.snapshots, data.spec.tick_size);
  const TimeNs open = data.session_open();

  // Each task writes only its own result slot; errors are collected per task.
  struct Task {
    std::string name;
    std::function<void()> run;
    std::string error;
  };
  std::vector<Task> tasks;
  auto add = [&](const std::string& name, std::function<void()> fn) {
    if (selected(cfg, name)) tasks.push_back({name, std::move(fn), {}});
  };
  add("returns_acf", [&] { r.returns_acf = return_acf_report(mids, cfg.return_dts, cfg.acf_max_lag); });
  add("volume_volatility",
      [&] { r.volume_volatility = volume_volatility(data, cfg.volvol_dt, cfg.volvol_window_mult, cfg.volvol_mode); });
  add("long_range_dependence",
      [&] { r.long_range_dependence = long_range_dependence(mids, cfg.lrd_dt, cfg.lrd_max_lag, open); });
  add("queue_gamma", [&] {
    r.queue_gamma_bid = queue_gamma(data.snapshots, Side::Bid);
    r.queue_gamma_ask = queue_gamma(data.snapshots, Side::Ask);
  });
  add("flow_stats", [&] { r.flow_stats = flow_stats(flow); });
  add("window_activity", [&] { r.window_activity = window_activity(flow, data.spec, cfg.activity_window); });
  add("interarrival", [&] {
    std::string err;
    try {
      r.interarrival_calendar = interarrival_fit(flow, TimeType::Calendar);
    } catch (const Error& e) {
      err = std::string("calendar: ") + e.what();
    }
    try {
      r.interarrival_event = interarrival_fit(flow, TimeType::Event);
    } catch (const Error& e) {
      err += (err.empty() ? "" : "; ") + std::string("event: ") + e.what();
    }
    if (!err.empty()) throw Error(err);
  });
  add("excitation", [&] { r.excitation = excitation(flow, cfg.mask_mm); });
  add("signature", [&] { r.signature = signature(mids, cfg.signature_lags, open); });
  add("spread", [&] { r.spread = spread_stats(data.snapshots); });
  add("vol_liquidity",
      [&] { r.vol_liquidity = vol_liquidity_ratio(data, cfg.vol_liquidity_tau, cfg.vol_liquidity_dt); });
  add("book_shape", [&] { r.book_shape = book_shape(data.snapshots, data.spec.levels); });
  add("intraday", [&] { r.intraday = intraday_profile(flow, data.spec, cfg.intraday_bucket); });

  auto guarded = [](Task& t) {
    try {
      t.run();
    } catch (const std::exception& e) {
      t.error = e.what();
    }
  };
  if (cfg.parallel) {
    std::vector<std::future<void>> futs;
    for (auto& t : tasks) futs.push_back(std::async(std::launch::async, guarded, std::ref(t)));
    for (auto& f : futs) f.get();
  } else {
    for (auto& t : tasks) guarded(t);
  }
  for (const auto& t : tasks)
    if (!t.error.empty()) r.errors[t.name] = t.error;

  collect_scalars(r);
  apply_checks(r, cfg.ranges);
  return r;
}

json to_json(const RealismReport& r) {
  json m = json::object();
  auto put = [&](const std::string& name, bool present, const std::function<json()>& fn) {
    auto err = r.errors.find(name);
    if (err != r.errors.end()) {
      json e = {{"error", err->second}};
      if (present) e["partial"] = fn();
      m[name] = e;
    } else if (present) {
      m[name] = fn();
    }
  };
  put("returns_acf", r.returns_acf.has_value(), [&] {
    json o = json::object();
    for (const auto& e : *r.returns_acf) o[e.label] = e.result ? to_json(*e.result) : json{{"error", e.error}};
    return o;
  });
  put("volume_volatility", r.volume_volatility.has_value(), [&] {
    const auto& c = *r.volume_volatility;
    json corr = json::array();
    for (double v : c.per_window_corr) corr.push_back(num(v));
    return json{{"mode", c.mode == VolVolMode::AcrossWindows ? "across_windows" : "within_window"},
                {"dt_seconds", num(c.dt * 1e-9)},
                {"window_seconds", num(c.window * 1e-9)},
                {"windows", c.windows},
                {"skipped", c.skipped},
                {"correlations", corr},
                {"mean", num(c.mean)},
                {"median", num(c.median)}};
  });
  put("long_range_dependence", r.long_range_dependence.has_value(), [&] {
    const auto& l = *r.long_range_dependence;
    return json{{"fit", to_json(l.fit)}, {"acf", to_json(l.acf)}, {"excluded_lags", l.excluded_lags}};
  });
  put("queue_gamma", r.queue_gamma_bid.has_value() || r.queue_gamma_ask.has_value(), [&] {
    json o = json::object();
    for (const auto* q : {&r.queue_gamma_bid, &r.queue_gamma_ask})
      if (*q) o[side_name((*q)->side)] = {{"level", (*q)->level}, {"fit", to_json((*q)->fit)}};
    return o;
  });
  put("flow_stats", r.flow_stats.has_value(), [&] {
    const auto& f = *r.flow_stats;
    json o = {{"limits", f.limits},
              {"cancels", f.cancels},
              {"markets", f.markets},
              {"market_ratio", num(f.market_ratio)},
              {"round_number_peaks", f.round_number_peaks}};
    if (f.size_powerlaw) o["size_powerlaw"] = to_json(*f.size_powerlaw);
    else o["size_powerlaw"] = {{"error", f.size_powerlaw_error}};
    return o;
  });
  put("window_activity", r.window_activity.has_value(), [&] {
    const auto& w = *r.window_activity;
    json o = {{"window_seconds", num(w.window * 1e-9)}, {"windows", w.starts.size()}};
    o["counts"] = w.count_model ? to_json(*w.count_model) : json{{"error", w.count_error}};
    o["volumes"] = w.volume_model ? to_json(*w.volume_model) : json{{"error", w.volume_error}};
    return o;
  });
  put("interarrival", r.interarrival_calendar.has_value() || r.interarrival_event.has_value(), [&] {
    json o = json::object();
    if (r.interarrival_calendar) o["calendar"] = to_json(*r.interarrival_calendar);
    if (r.interarrival_event) o["event"] = to_json(*r.interarrival_event);
    return o;
  });
  put("excitation", r.excitation.has_value(), [&] {
    const auto& x = *r.excitation;
    json labels = json::array();
    for (std::size_t i = 0; i < kEventClasses; ++i) labels.push_back(event_class_name(i));
    json marg = json::array();
    for (double v : x.marginals) marg.push_back(num(v));
    return json{{"labels", labels},
                {"transition", to_json(x.transition)},
                {"excitation", to_json(x.excitation)},
                {"marginals", marg},
                {"mm_diagonal_masked", x.mm_diagonal_masked},
                {"pairs", x.pairs}};
  });
  put("signature", r.signature.has_value(), [&] {
    const auto& s = *r.signature;
    json lags = json::array(), s2 = json::array(), nz = json::array();
    for (std::size_t i = 0; i < s.lags.size(); ++i) {
      lags.push_back(num(s.lags[i] * 1e-9));
      s2.push_back(num(s.sigma2[i]));
      nz.push_back(num(s.normalized[i]));
    }
    return json{{"lag_seconds", lags}, {"sigma2", s2}, {"normalized", nz}, {"n", s.n}};
  });
  put("spread", r.spread.has_value(), [&] {
    const auto& s = *r.spread;
    json freq = json::object();
    for (const auto& [k, v] : s.frequency) freq[std::to_string(k)] = num(v);
    return json{{"frequency", freq},
                {"duration_calendar_seconds", spread_map(s.duration_calendar)},
                {"duration_events", spread_map(s.duration_event)},
                {"mean_spread_ticks", num(s.mean_spread_ticks)},
                {"reference_mean_spread_ticks", num(r.reference_mean_spread_ticks)}};
  });
  put("vol_liquidity", r.vol_liquidity.has_value(), [&] {
    const auto& v = *r.vol_liquidity;
    json ratios = json::array();
    for (double x : v.ratios) ratios.push_back(num(x));
    return json{{"tau_seconds", num(v.window * 1e-9)},
                {"dt_seconds", num(v.dt * 1e-9)},
                {"ratios", ratios},
                {"skipped_zero_volume", v.skipped_zero_volume},
                {"summary", to_json(v.summary)}};
  });
  put("book_shape", r.book_shape.has_value(), [&] {
    json b = json::array(), a = json::array();
    for (double x : r.book_shape->bid_avg_qty) b.push_back(num(x));
    for (double x : r.book_shape->ask_avg_qty) a.push_back(num(x));
    return json{{"bid_avg_qty", b}, {"ask_avg_qty", a}};
  });
  put("intraday", r.intraday.has_value(), [&] {
    const auto& p = *r.intraday;
    json starts = json::array(), vol = json::array(), cnt = json::array();
    for (std::size_t i = 0; i < p.bucket_start.size(); ++i) {
      starts.push_back(format_time_of_day(p.bucket_start[i]));
      vol.push_back(num(p.norm_volume[i]));
      cnt.push_back(num(p.norm_count[i]));
    }
    return json{{"bucket_seconds", num(p.bucket * 1e-9)}, {"bucket_start", starts}, {"norm_volume", vol},
                {"norm_count", cnt}};
  });
  if (r.extraction)
    m["extraction"] = {{"matched", r.extraction->matched},
                       {"unmatched", r.extraction->unmatched_trades.size()},
                       {"match_rate", num(r.extraction->match_rate)},
                       {"no_trades", r.extraction->no_trades}};
  json scalars = json::object();
  for (const auto& [k, v] : r.scalars) scalars[k] = num(v);
  m["scalars"] = scalars;

  json checks = json::object();
  for (const auto& [k, c] : r.checks)
    checks[k] = {{"value", num(c.value)}, {"min", num(c.range.min)}, {"max", num(c.range.max)}, {"pass", c.pass}};

  return {{"instrument", r.instrument},
          {"date", r.date},
          {"metrics", m},
          {"checks", checks},
          {"versions", {{"lobfacts", LOBFACTS_VERSION}, {"report_schema", 1}}}};
}

std::vector<std::string> write_metric_csvs(const RealismReport& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> written;
  auto open = [&](const std::string& name) {
    written.push_back(name);
    std::ofstream out(dir / name);
    if (!out) throw Error("cannot write " + (dir / name).string());
    out.precision(17);
    return out;
  };
  if (r.returns_acf) {
    auto out = open("returns_acf.csv");
    out << "sampling,lag,rho,conf_band\n";
    for (const auto& e : *r.returns_acf)
      if (e.result)
        for (std::size_t i = 0; i < e.result->lags.size(); ++i)
          out << e.label << ',' << e.result->lags[i] << ',' << e.result->rho[i] << ',' << e.result->conf_band << '\n';
  }
  if (r.volume_volatility) {
    auto out = open("volume_volatility.csv");
    out << "index,corr\n";
    for (std::size_t i = 0; i < r.volume_volatility->per_window_corr.size(); ++i)
      out << i << ',' << r.volume_volatility->per_window_corr[i] << '\n';
  }
  if (r.long_range_dependence) {
    auto out = open("long_range_dependence.csv");
    out << "lag,rho,fitted\n";
    const auto& l = *r.long_range_dependence;
    for (std::size_t i = 0; i < l.acf.lags.size(); ++i)
      out << l.acf.lags[i] << ',' << l.acf.rho[i] << ','
          << (l.acf.rho[i] > 0.0 ? l.fit.c * std::pow(l.acf.lags[i], -l.fit.alpha) : 0.0) << '\n';
  }
  if (r.queue_gamma_bid || r.queue_gamma_ask) {
    auto out = open("queue_gamma.csv");
    out << "side,bin_lo,bin_hi,count\n";
    for (const auto* q : {&r.queue_gamma_bid, &r.queue_gamma_ask})
      if (*q)
        for (std::size_t i = 0; i < (*q)->histogram.counts.size(); ++i)
          out << side_name((*q)->side) << ',' << (*q)->histogram.edges[i] << ',' << (*q)->histogram.edges[i + 1]
              << ',' << (*q)->histogram.counts[i] << '\n';
  }
  if (r.flow_stats) {
    auto out = open("order_sizes.csv");
    out << "size,count\n";
    for (const auto& [s, c] : r.flow_stats->size_counts) out << s << ',' << c << '\n';
  }
  if (r.window_activity) {
    auto out = open("window_activity.csv");
    out << "start_ns,count,volume\n";
    const auto& w = *r.window_activity;
    for (std::size_t i = 0; i < w.starts.size(); ++i)
      out << w.starts[i] << ',' << w.counts[i] << ',' << w.volumes[i] << '\n';
  }
  if (r.interarrival_calendar || r.interarrival_event) {
    auto out = open("interarrival.csv");
    out << "time_type,date,gaps,k,lambda\n";
    for (const auto* ia : {&r.interarrival_calendar, &r.interarrival_event})
      if (*ia) {
        out << time_type_name((*ia)->time_type) << ",all," << (*ia)->gaps << ',' << (*ia)->fit.shape << ','
            << (*ia)->fit.scale << '\n';
        for (const auto& d : (*ia)->per_day) {
          out << time_type_name((*ia)->time_type) << ',' << d.date << ',' << d.gaps << ',';
          if (d.fit) out << d.fit->shape << ',' << d.fit->scale;
          else out << ',';
          out << '\n';
        }
      }
  }
  if (r.excitation) {
    auto out = open("excitation.csv");
    out << "matrix,from,to,value\n";
    using Named = std::pair<const char*, const ClassMatrix*>;
    for (const auto& [name, mat] : {Named{"transition", &r.excitation->transition},
                                    Named{"excitation", &r.excitation->excitation}})
      for (std::size_t i = 0; i < kEventClasses; ++i)
        for (std::size_t j = 0; j < kEventClasses; ++j) {
          out << name << ',' << event_class_name(i) << ',' << event_class_name(j) << ',';
          if ((*mat)[i][j]) out << *(*mat)[i][j];
          out << '\n';
        }
  }
  if (r.signature) {
    auto out = open("signature.csv");
    out << "lag_seconds,sigma2,normalized,n\n";
    const auto& s = *r.signature;
    for (std::size_t i = 0; i < s.lags.size(); ++i)
      out << s.lags[i] * 1e-9 << ',' << s.sigma2[i] << ',' << s.normalized[i] << ',' << s.n[i] << '\n';
  }
  if (r.spread) {
    auto out = open("spread.csv");
    out << "spread_ticks,frequency,episodes,cal_p5,cal_p25,cal_median,cal_p75,cal_p95,evt_p5,evt_p25,evt_median,"
           "evt_p75,evt_p95\n";
    for (const auto& [k, f] : r.spread->frequency) {
      const auto c = r.spread->duration_calendar.at(k);
      const auto e = r.spread->duration_event.at(k);
      out << k << ',' << f << ',' << c.episodes << ',' << c.p5 << ',' << c.p25 << ',' << c.median << ',' << c.p75
          << ',' << c.p95 << ',' << e.p5 << ',' << e.p25 << ',' << e.median << ',' << e.p75 << ',' << e.p95 << '\n';
    }
  }
  if (r.vol_liquidity) {
    auto out = open("vol_liquidity.csv");
    out << "start_ns,ratio\n";
    for (std::size_t i = 0; i < r.vol_liquidity->ratios.size(); ++i)
      out << r.vol_liquidity->starts[i] << ',' << r.vol_liquidity->ratios[i] << '\n';
  }
  if (r.book_shape) {
    auto out = open("book_shape.csv");
    out << "level,bid_avg_qty,ask_avg_qty\n";
    for (std::size_t i = 0; i < r.book_shape->bid_avg_qty.size(); ++i)
      out << i + 1 << ',' << r.book_shape->bid_avg_qty[i] << ',' << r.book_shape->ask_avg_qty[i] << '\n';
  }
  if (r.intraday) {
    auto out = open("intraday.csv");
    out << "bucket_start,norm_count,norm_volume\n";
    for (std::size_t i = 0; i < r.intraday->bucket_start.size(); ++i)
      out << format_time_of_day(r.intraday->bucket_start[i]) << ',' << r.intraday->norm_count[i] << ','
          << r.intraday->norm_volume[i] << '\n';
  }
  return written;
}

}  // namespace lobfacts

#include "lobfacts/synth.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace lobfacts {

namespace {

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }
bool finite_pos(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

void GenConfig::validate() const {
  spec.validate();
  if (!finite_nonneg(limit_intensity) || !finite_nonneg(cancel_intensity) || !finite_nonneg(market_intensity))
    throw ConfigError("intensities must be finite and >= 0");
  if (!finite_pos(duration_seconds)) throw ConfigError("duration must be > 0");
  if (!finite_pos(initial_mid) || initial_mid / spec.tick_size < 2.0 * spec.levels + 2.0)
    throw ConfigError("initial_mid too small for the tick size and depth");
  if (const auto* p = std::get_if<PowerLawSizes>(&size_law)) {
    if (!finite_pos(p->alpha) || p->max_size < 1 || !finite_pos(p->round_boost) || p->round_multiple < 1)
      throw ConfigError("power-law size law needs alpha > 0, max >= 1, boost > 0");
  } else if (const auto* c = std::get_if<ConstantSizes>(&size_law)) {
    if (c->size < 1) throw ConfigError("constant size must be >= 1");
  } else if (const auto* g = std::get_if<GammaSizes>(&size_law)) {
    if (!finite_pos(g->shape) || !finite_pos(g->scale)) throw ConfigError("gamma size law needs shape, scale > 0");
  }
  if (const auto* w = std::get_if<WeibullGaps>(&interarrival))
    if (!finite_pos(w->shape) || !finite_pos(w->scale_seconds)) throw ConfigError("weibull gaps need k, lambda > 0");
  if (queue_target && (!finite_pos(queue_target->shape) || !finite_pos(queue_target->scale) ||
                       !std::isfinite(queue_target->depth_exponent)))
    throw ConfigError("queue target law needs shape, scale > 0");
  if (!(spread_closing_intensity_multiplier >= 1.0) || !std::isfinite(spread_closing_intensity_multiplier))
    throw ConfigError("spread closing multiplier must be >= 1");
  for (double p : {inspread_probability, level_clear_probability, late_trade_fraction})
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("probabilities must lie in [0, 1]");
  if (!finite_pos(regime.high_multiplier) || !finite_nonneg(regime.switch_rate))
    throw ConfigError("regime needs multiplier > 0 and switch rate >= 0");
  if (trade_jitter_ns < 0 || late_delay_min_ns < 0 || late_delay_max_ns < late_delay_min_ns)
    throw ConfigError("bad trade timestamp noise settings");
  parse_date(date);
}

GenConfig parse_gen_config(const std::string& json_text) {
  GenConfig c;
  try {
    const auto j = nlohmann::json::parse(json_text);
    c.seed = j.value("seed", c.seed);
    c.spec.symbol = j.value("symbol", c.spec.symbol);
    c.spec.tick_size = j.value("tick_size", c.spec.tick_size);
    c.spec.levels = j.value("levels", c.spec.levels);
    if (j.contains("session_start")) c.spec.session_start = parse_time_of_day(j["session_start"].get<std::string>());
    if (j.contains("session_end")) c.spec.session_end = parse_time_of_day(j["session_end"].get<std::string>());
    c.date = j.value("date", c.date);
    c.duration_seconds = j.value("duration_seconds", c.duration_seconds);
    if (j.contains("max_events") && !j["max_events"].is_null()) c.max_events = j["max_events"].get<std::size_t>();
    c.initial_mid = j.value("initial_mid", c.initial_mid);
    if (j.contains("intensities")) {
      const auto& in = j["intensities"];
      c.limit_intensity = in.value("limit", c.limit_intensity);
      c.cancel_intensity = in.value("cancel", c.cancel_intensity);
      c.market_intensity = in.value("market", c.market_intensity);
    }
    if (j.contains("size_law")) {
      const auto& s = j["size_law"];
      const auto type = s.at("type").get<std::string>();
      if (type == "power_law") {
        PowerLawSizes p;
        p.alpha = s.value("alpha", p.alpha);
        p.max_size = s.value("max", p.max_size);
        p.round_boost = s.value("round_boost", p.round_boost);
        p.round_multiple = s.value("round_multiple", p.round_multiple);
        c.size_law = p;
      } else if (type == "constant") {
        c.size_law = ConstantSizes{s.value("size", Qty{1})};
      } else if (type == "gamma") {
        c.size_law = GammaSizes{s.at("shape").get<double>(), s.at("scale").get<double>()};
      } else {
        throw ConfigError("unknown size_law type '" + type + "'");
      }
    }
    if (j.contains("interarrival")) {
      const auto& g = j["interarrival"];
      const auto type = g.at("type").get<std::string>();
      if (type == "exponential") c.interarrival = ExponentialGaps{};
      else if (type == "weibull") c.interarrival = WeibullGaps{g.at("k").get<double>(), g.at("lambda").get<double>()};
      else throw ConfigError("unknown interarrival type '" + type + "'");
    }
    if (j.contains("queue_target") && !j["queue_target"].is_null()) {
      const auto& q = j["queue_target"];
      QueueTargetLaw law;
      law.shape = q.value("shape", law.shape);
      law.scale = q.value("scale", law.scale);
      law.depth_exponent = q.value("depth_exponent", law.depth_exponent);
      c.queue_target = law;
    }
    c.spread_closing_intensity_multiplier =
        j.value("spread_closing_intensity_multiplier", c.spread_closing_intensity_multiplier);
    c.inspread_probability = j.value("inspread_probability", c.inspread_probability);
    c.level_clear_probability = j.value("level_clear_probability", c.level_clear_probability);
    if (j.contains("regime")) {
      c.regime.high_multiplier = j["regime"].value("high_multiplier", c.regime.high_multiplier);
      c.regime.switch_rate = j["regime"].value("switch_rate", c.regime.switch_rate);
    }
    c.trade_jitter_ns = static_cast<TimeNs>(std::llround(j.value("trade_jitter_ms", 0.0) * 1e6));
    c.late_trade_fraction = j.value("late_trade_fraction", c.late_trade_fraction);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("generator config: ") + e.what());
  }
  c.validate();
  return c;
}

SizeSampler::SizeSampler(const SizeLaw& law) : law_(law) {
  if (const auto* p = std::get_if<PowerLawSizes>(&law_)) {
    std::vector<double> w(static_cast<std::size_t>(p->max_size));
    double total = 0.0, first = 0.0;
    for (int x = 1; x <= p->max_size; ++x) {
      double v = std::pow(static_cast<double>(x), -p->alpha);
      if (x % p->round_multiple == 0) v *= p->round_boost;
      w[static_cast<std::size_t>(x - 1)] = v;
      total += v;
      first += v * x;
    }
    table_ = std::discrete_distribution<int>(w.begin(), w.end());
    mean_ = first / total;
  } else if (const auto* c = std::get_if<ConstantSizes>(&law_)) {
    mean_ = static_cast<double>(c->size);
  } else {
    const auto& g = std::get<GammaSizes>(law_);
    mean_ = g.shape * g.scale;
  }
}

Qty SizeSampler::operator()(std::mt19937_64& rng) {
  if (std::holds_alternative<PowerLawSizes>(law_)) return table_(rng) + 1;
  if (const auto* c = std::get_if<ConstantSizes>(&law_)) return c->size;
  const auto& g = std::get<GammaSizes>(law_);
  std::gamma_distribution<double> d(g.shape, g.scale);
  return std::max<Qty>(1, std::llround(d(rng)));
}

namespace {

// Mutable simulation state for generate().
class Simulator {
 public:
  explicit Simulator(const GenConfig& c)
      : cfg_(c),
        rng_(c.seed),
        sizes_(c.size_law),
        max_levels_(static_cast<std::size_t>(c.spec.levels)) {}

  Generated run();

 private:
  enum class Action { Limit, Cancel, Market, Close };

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }
  Side random_side() { return uniform() < 0.5 ? Side::Bid : Side::Ask; }
  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

  Qty target_qty(std::size_t depth) {
    const auto& q = *cfg_.queue_target;
    const double scale = q.scale * std::pow(static_cast<double>(depth), q.depth_exponent);
    return std::max<Qty>(1, std::llround(std::gamma_distribution<double>(q.shape, scale)(rng_)));
  }

  Qty fresh_level_qty(std::size_t depth) {
    if (cfg_.queue_target) return target_qty(depth);
    return sizes_(rng_);
  }

  Ticks spread() const { return book_.asks.front().price - book_.bids.front().price; }
  bool wide() const { return spread() > 1; }

  // Price one tick beyond the worst level of a side.
  Ticks deeper_price(Side s) const {
    const auto& lv = book_.side(s);
    return s == Side::Bid ? lv.back().price - 1 : lv.back().price + 1;
  }

  void emit(FlowEvent e, TimeNs t);
  bool try_limit(Side s, TimeNs t);
  bool try_inspread(Side s, TimeNs t);
  bool try_cancel(Side s, TimeNs t);
  bool try_market(Side s, TimeNs t);
  void do_limit(TimeNs t);
  void do_close(TimeNs t);
  void init_book(TimeNs t0);

  const GenConfig& cfg_;
  std::mt19937_64 rng_;
  SizeSampler sizes_;
  std::size_t max_levels_;
  BookSnapshot book_;
  Generated out_;
  std::optional<Side> pending_inspread_;
};

void Simulator::init_book(TimeNs t0) {
  const Ticks mid = std::llround(cfg_.initial_mid / cfg_.spec.tick_size);
  book_.ts = t0;
  for (std::size_t d = 0; d < max_levels_; ++d) {
    book_.bids.push_back({mid - static_cast<Ticks>(d), 0});
    book_.asks.push_back({mid + 1 + static_cast<Ticks>(d), 0});
  }
  for (Side s : {Side::Bid, Side::Ask})
    for (std::size_t d = 0; d < max_levels_; ++d) {
      Qty q = 0;
      if (cfg_.queue_target) q = target_qty(d + 1);
      else for (int i = 0; i < 5; ++i) q += sizes_(rng_);
      book_.side(s)[d].qty = q;
    }
  out_.data.snapshots.push_back(book_);
}

void Simulator::emit(FlowEvent e, TimeNs t) {
  const auto& lv = book_.side(e.side);
  // Event level follows the extraction convention.
  if (e.kind != EventKind::Limit) {
    for (std::size_t i = 0; i < lv.size(); ++i)
      if (lv[i].price == e.price) e.level = static_cast<int>(i) + 1;
  } else {
    const Ticks best = lv.front().price;
    const Ticks improvement = e.side == Side::Bid ? e.price - best : best - e.price;
    e.level = improvement > 0 ? -static_cast<int>(improvement) : 0;
  }
  e.ts = t;
  e.seq = out_.truth_flow.size();

  auto& side = book_.side(e.side);
  auto better = [&](Ticks a, Ticks b) { return e.side == Side::Bid ? a > b : a < b; };
  auto it = std::find_if(side.begin(), side.end(), [&](const Level& l) { return !better(l.price, e.price); });
  if (e.kind == EventKind::Limit) {
    if (it != side.end() && it->price == e.price) it->qty += e.size;
    else it = side.insert(it, Level{e.price, e.size});
    if (e.level == 0) e.level = static_cast<int>(it - side.begin()) + 1;
    ++out_.stats.limits;
  } else {
    it->qty -= e.size;
    if (it->qty == 0) side.erase(it);
    ++(e.kind == EventKind::Cancel ? out_.stats.cancels : out_.stats.markets);
  }
  book_.ts = t;
  out_.data.snapshots.push_back(book_);
  out_.truth_flow.push_back(e);

  if (e.kind == EventKind::Market) {
    Trade tr;
    tr.ts = t;
    tr.price = e.price;
    tr.size = e.size;
    tr.aggressor = e.side == Side::Bid ? Aggressor::Ask : Aggressor::Bid;
    if (cfg_.trade_jitter_ns > 0)
      tr.ts += std::uniform_int_distribution<TimeNs>(-cfg_.trade_jitter_ns, cfg_.trade_jitter_ns)(rng_);
    if (cfg_.late_trade_fraction > 0.0 && uniform() < cfg_.late_trade_fraction)
      tr.ts = t + std::uniform_int_distribution<TimeNs>(cfg_.late_delay_min_ns, cfg_.late_delay_max_ns)(rng_);
    out_.data.trades.push_back(tr);
  }
}

bool Simulator::try_inspread(Side s, TimeNs t) {
  if (!wide()) return false;
  const Ticks lo = book_.bids.front().price + 1;
  const Ticks hi = book_.asks.front().price - 1;
  const Ticks price = lo + static_cast<Ticks>(pick(static_cast<std::size_t>(hi - lo + 1)));
  FlowEvent e;
  e.kind = EventKind::Limit;
  e.side = s;
  e.price = price;
  e.size = fresh_level_qty(1);
  emit(e, t);
  ++out_.stats.inspread_limits;
  return true;
}

void Simulator::do_close(TimeNs t) {
  Side s = random_side();
  if (book_.side(s).size() >= max_levels_ && book_.side(opposite(s)).size() < max_levels_) s = opposite(s);
  if (book_.side(s).size() < max_levels_) {
    try_inspread(s, t);
    return;
  }
  // Both sides full: cancel the deepest level now, place inside the spread next.
  const Level worst = book_.side(s).back();
  FlowEvent e;
  e.kind = EventKind::Cancel;
  e.side = s;
  e.price = worst.price;
  e.size = worst.qty;
  emit(e, t);
  ++out_.stats.evictions;
  pending_inspread_ = s;
}

bool Simulator::try_limit(Side s, TimeNs t) {
  auto& lv = book_.side(s);
  const std::size_t choices = std::min(lv.size() + 1, max_levels_);
  const std::size_t d = pick(choices);
  FlowEvent e;
  e.kind = EventKind::Limit;
  e.side = s;
  if (d < lv.size()) {
    e.price = lv[d].price;
    if (cfg_.queue_target) {
      // Queue update toward a fresh target; the sign decides the kind.
      const Qty q = lv[d].qty;
      Qty target = target_qty(d + 1);
      for (int i = 0; i < 16 && target == q; ++i) target = target_qty(d + 1);
      if (target == q) target = q + 1;
      if (target < q) {
        e.kind = EventKind::Cancel;
        e.size = q - target;
      } else {
        e.size = target - q;
      }
    } else {
      e.size = sizes_(rng_);
    }
  } else {
    e.price = deeper_price(s);
    e.size = fresh_level_qty(d + 1);
  }
  emit(e, t);
  return true;
}

void Simulator::do_limit(TimeNs t) {
  const Side s = random_side();
  if (wide() && uniform() < cfg_.inspread_probability) {
    if (book_.side(s).size() < max_levels_) {
      try_inspread(s, t);
      return;
    }
    if (book_.side(opposite(s)).size() < max_levels_) {
      try_inspread(opposite(s), t);
      return;
    }
  }
  try_limit(s, t);
}

bool Simulator::try_cancel(Side s, TimeNs t) {
  auto& lv = book_.side(s);
  FlowEvent e;
  e.kind = EventKind::Cancel;
  e.side = s;
  if (lv.size() > 1 && uniform() < cfg_.level_clear_probability) {
    const std::size_t d = pick(lv.size());
    e.price = lv[d].price;
    e.size = lv[d].qty;
    emit(e, t);
    return true;
  }
  if (cfg_.queue_target) {
    // Queue updates are handled symmetrically with limits.
    return try_limit(s, t);
  }
  // Level chosen in proportion to its resting quantity.
  Qty total = 0;
  for (const auto& l : lv) total += l.qty;
  Qty u = std::uniform_int_distribution<Qty>(1, total)(rng_);
  std::size_t d = 0;
  while (u > lv[d].qty) u -= lv[d++].qty;
  const Qty q = lv[d].qty;
  Qty size = sizes_(rng_);
  if (size >= q) size = lv.size() > 1 ? q : q - 1;
  if (size <= 0) return false;
  e.price = lv[d].price;
  e.size = size;
  emit(e, t);
  return true;
}

bool Simulator::try_market(Side s, TimeNs t) {
  auto& lv = book_.side(s);
  const Qty q = lv.front().qty;
  Qty size = sizes_(rng_);
  if (size >= q) size = lv.size() > 1 ? q : q - 1;
  if (size <= 0) return false;
  FlowEvent e;
  e.kind = EventKind::Market;
  e.side = s;
  e.price = lv.front().price;
  e.size = size;
  emit(e, t);
  return true;
}

Generated Simulator::run() {
  cfg_.validate();
  out_.data.spec = cfg_.spec;
  out_.data.session_date = cfg_.date;
  const TimeNs open = parse_date(cfg_.date) + cfg_.spec.session_start;
  const TimeNs close = std::min(parse_date(cfg_.date) + cfg_.spec.session_end,
                                open + static_cast<TimeNs>(std::llround(cfg_.duration_seconds * 1e9)));
  init_book(open);

  const double m_close = cfg_.spread_closing_intensity_multiplier;
  bool high = false;
  double next_switch = cfg_.regime.switch_rate > 0.0
                           ? std::exponential_distribution<double>(cfg_.regime.switch_rate)(rng_)
                           : std::numeric_limits<double>::infinity();
  TimeNs t = open;
  while (true) {
    if (cfg_.max_events && out_.truth_flow.size() >= *cfg_.max_events) break;
    const double r = high ? cfg_.regime.high_multiplier : 1.0;
    const double l_close = wide() ? (m_close - 1.0) * cfg_.limit_intensity : 0.0;
    const double total = cfg_.limit_intensity + cfg_.cancel_intensity + cfg_.market_intensity + l_close;
    if (total <= 0.0) break;
    double gap = 0.0;
    if (std::holds_alternative<ExponentialGaps>(cfg_.interarrival)) {
      gap = std::exponential_distribution<double>(total * r)(rng_);
    } else {
      const auto& w = std::get<WeibullGaps>(cfg_.interarrival);
      gap = w.scale_seconds * std::pow(-std::log1p(-uniform()), 1.0 / w.shape) / r;
    }
    t += std::max<TimeNs>(1, static_cast<TimeNs>(std::llround(gap * 1e9)));
    if (t > close) break;
    const double elapsed = static_cast<double>(t - open) * 1e-9;
    while (elapsed >= next_switch) {
      high = !high;
      next_switch += std::exponential_distribution<double>(cfg_.regime.switch_rate)(rng_);
    }

    if (pending_inspread_) {
      const Side s = *pending_inspread_;
      pending_inspread_.reset();
      if (wide() && book_.side(s).size() < max_levels_) {
        try_inspread(s, t);
        continue;
      }
    }

    const double u = uniform() * total;
    Action a = Action::Close;
    if (u < cfg_.limit_intensity) a = Action::Limit;
    else if (u < cfg_.limit_intensity + cfg_.cancel_intensity) a = Action::Cancel;
    else if (u < cfg_.limit_intensity + cfg_.cancel_intensity + cfg_.market_intensity) a = Action::Market;

    switch (a) {
      case Action::Limit: do_limit(t); break;
      case Action::Close: do_close(t); break;
      case Action::Cancel:
      case Action::Market: {
        const Side s = random_side();
        auto attempt = [&](Side side) { return a == Action::Cancel ? try_cancel(side, t) : try_market(side, t); };
        if (!attempt(s) && !attempt(opposite(s))) {
          ++out_.stats.conversions;
          do_limit(t);
        }
        break;
      }
    }
  }
  std::stable_sort(out_.data.trades.begin(), out_.data.trades.end(),
                   [](const Trade& a, const Trade& b) { return a.ts < b.ts; });
  return std::move(out_);
}

}  // namespace

Generated generate(const GenConfig& config) { return Simulator(config).run(); }

std::vector<double> generate_bounce_trades(const BounceConfig& c) {
  if (c.spread_ticks < 1) throw ConfigError("bounce spread must be >= 1 tick");
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Ticks bid = std::llround(c.initial_price / c.tick_size);
  bool at_ask = u(rng) < 0.5;
  std::vector<double> prices;
  prices.reserve(c.n_trades);
  for (std::size_t i = 0; i < c.n_trades; ++i) {
    if (u(rng) < c.mid_move_probability) bid += u(rng) < 0.5 ? -1 : 1;
    if (u(rng) < c.flip_probability) at_ask = u(rng) < 0.5;
    prices.push_back(static_cast<double>(at_ask ? bid + c.spread_ticks : bid) * c.tick_size);
  }
  return prices;
}

}  // namespace lobfacts

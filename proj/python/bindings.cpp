#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "lobfacts/flow.hpp"
#include "lobfacts/ingest.hpp"
#include "lobfacts/metrics.hpp"
#include "lobfacts/replay.hpp"
#include "lobfacts/report.hpp"
#include "lobfacts/synth.hpp"

namespace py = pybind11;
using namespace lobfacts;

PYBIND11_MODULE(_core, m) {
  m.doc() = "lobfacts native core";
  m.attr("__version__") = LOBFACTS_VERSION;

  static py::exception<Error> base(m, "Error", PyExc_RuntimeError);
  static py::exception<ParseError> parse_error(m, "ParseError", base.ptr());
  static py::exception<InconsistentUpdate> inconsistent(m, "InconsistentUpdate", base.ptr());
  static py::exception<ReplayError> replay_error(m, "ReplayError", base.ptr());
  static py::exception<ConfigError> config_error(m, "ConfigError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ParseError& e) {
      py::set_error(parse_error, e.what());
    } catch (const InconsistentUpdate& e) {
      py::set_error(inconsistent, e.what());
    } catch (const ReplayError& e) {
      py::set_error(replay_error, e.what());
    } catch (const ConfigError& e) {
      py::set_error(config_error, e.what());
    } catch (const Error& e) {
      py::set_error(base, e.what());
    }
  });

  py::enum_<Side>(m, "Side").value("Bid", Side::Bid).value("Ask", Side::Ask);
  py::enum_<EventKind>(m, "EventKind")
      .value("Limit", EventKind::Limit)
      .value("Cancel", EventKind::Cancel)
      .value("Market", EventKind::Market);
  py::enum_<Aggressor>(m, "Aggressor")
      .value("Bid", Aggressor::Bid)
      .value("Ask", Aggressor::Ask)
      .value("Unknown", Aggressor::Unknown);

  py::class_<InstrumentSpec>(m, "InstrumentSpec")
      .def(py::init<>())
      .def_readwrite("symbol", &InstrumentSpec::symbol)
      .def_readwrite("tick_size", &InstrumentSpec::tick_size)
      .def_readwrite("levels", &InstrumentSpec::levels)
      .def_readwrite("session_start_ns", &InstrumentSpec::session_start)
      .def_readwrite("session_end_ns", &InstrumentSpec::session_end)
      .def_readwrite("reference_mean_spread_ticks", &InstrumentSpec::reference_mean_spread_ticks)
      .def("validate", &InstrumentSpec::validate)
      .def("to_ticks", &InstrumentSpec::to_ticks)
      .def("format_price", &InstrumentSpec::format_price);

  py::class_<Level>(m, "Level")
      .def(py::init([](Ticks p, Qty q) { return Level{p, q}; }), py::arg("price"), py::arg("qty"))
      .def_readwrite("price", &Level::price)
      .def_readwrite("qty", &Level::qty)
      .def("__eq__", [](const Level& a, const Level& b) { return a == b; })
      .def("__repr__", [](const Level& l) { return "Level(" + std::to_string(l.price) + ", " + std::to_string(l.qty) + ")"; });

  py::class_<BookSnapshot>(m, "BookSnapshot")
      .def(py::init<>())
      .def(py::init([](TimeNs ts, std::vector<Level> bids, std::vector<Level> asks) {
             return BookSnapshot{ts, std::move(bids), std::move(asks)};
           }),
           py::arg("ts"), py::arg("bids"), py::arg("asks"))
      .def_readwrite("ts", &BookSnapshot::ts)
      .def_readwrite("bids", &BookSnapshot::bids)
      .def_readwrite("asks", &BookSnapshot::asks)
      .def("same_book", &BookSnapshot::same_book);

  py::class_<Trade>(m, "Trade")
      .def(py::init([](TimeNs ts, Ticks price, Qty size, Aggressor a) { return Trade{ts, price, size, a}; }),
           py::arg("ts"), py::arg("price"), py::arg("size"), py::arg("aggressor") = Aggressor::Unknown)
      .def_readwrite("ts", &Trade::ts)
      .def_readwrite("price", &Trade::price)
      .def_readwrite("size", &Trade::size)
      .def_readwrite("aggressor", &Trade::aggressor);

  py::class_<FlowEvent>(m, "FlowEvent")
      .def(py::init<>())
      .def_readwrite("ts", &FlowEvent::ts)
      .def_readwrite("kind", &FlowEvent::kind)
      .def_readwrite("side", &FlowEvent::side)
      .def_readwrite("price", &FlowEvent::price)
      .def_readwrite("size", &FlowEvent::size)
      .def_readwrite("level", &FlowEvent::level)
      .def_readwrite("seq", &FlowEvent::seq)
      .def("__eq__", [](const FlowEvent& a, const FlowEvent& b) { return a == b; });

  py::class_<SessionData>(m, "SessionData")
      .def(py::init<>())
      .def_readwrite("spec", &SessionData::spec)
      .def_readwrite("snapshots", &SessionData::snapshots)
      .def_readwrite("trades", &SessionData::trades)
      .def_readwrite("session_date", &SessionData::session_date);

  m.def("mid_price", &mid_price, py::arg("snapshot"), py::arg("tick_size"));
  m.def("spread_ticks", &spread_ticks, py::arg("snapshot"));
  m.def(
      "log_returns",
      [](std::vector<TimeNs> ts, std::vector<double> mids, std::optional<double> dt_seconds) {
        MidSeries s(std::move(ts), std::move(mids));
        if (!dt_seconds) return log_returns(s, TickByTick{});
        return log_returns(s, Calendar{static_cast<TimeNs>(std::llround(*dt_seconds * 1e9)), std::nullopt});
      },
      py::arg("timestamps"), py::arg("mids"), py::arg("dt_seconds") = py::none(),
      "Log returns of a mid series; tick-by-tick when dt_seconds is None.");

  m.def("parse_instrument_spec", &parse_instrument_spec);
  m.def("load_instrument_spec", &load_instrument_spec);
  m.def("load_session", [](const std::filesystem::path& s, const std::filesystem::path& t, const InstrumentSpec& spec) {
    return load_session(s, t, spec);
  });

  py::class_<PriceDiff>(m, "PriceDiff")
      .def_readonly("side", &PriceDiff::side)
      .def_readonly("price", &PriceDiff::price)
      .def_readonly("delta_qty", &PriceDiff::delta_qty);
  m.def("diff_by_price", &diff_by_price);
  m.def(
      "classify_update",
      [](const BookSnapshot& prev, const BookSnapshot& next, std::size_t levels) {
        const auto d = diff_by_price(prev, next);
        return classify_update(d, prev, next, 0, levels);
      },
      py::arg("prev"), py::arg("next"), py::arg("levels") = 5);

  py::class_<MatchReport>(m, "MatchReport")
      .def_readonly("matched", &MatchReport::matched)
      .def_readonly("unmatched_trades", &MatchReport::unmatched_trades)
      .def_readonly("match_rate", &MatchReport::match_rate)
      .def_readonly("no_trades", &MatchReport::no_trades);
  py::class_<Extraction>(m, "Extraction")
      .def_readonly("flow", &Extraction::flow)
      .def_readonly("report", &Extraction::report)
      .def_property_readonly("scenario_counts", [](const Extraction& e) {
        py::dict d;
        for (std::size_t i = 0; i < kScenarioCount; ++i)
          d[scenario_name(static_cast<UpdateScenario>(i))] = e.scenario_counts[i];
        return d;
      });
  m.def(
      "extract_session",
      [](const SessionData& d, double window_ms) {
        ExtractOptions o;
        o.match_window = static_cast<TimeNs>(std::llround(window_ms * 1e6));
        return extract_session(d, o);
      },
      py::arg("data"), py::arg("match_window_ms") = 10.0);

  m.def("apply_event", &apply_event, py::arg("book"), py::arg("event"), py::arg("max_levels") = 5);
  py::class_<Mismatch>(m, "Mismatch")
      .def_readonly("snapshot_index", &Mismatch::snapshot_index)
      .def_readonly("side", &Mismatch::side)
      .def_readonly("price", &Mismatch::price)
      .def_readonly("expected_qty", &Mismatch::expected_qty)
      .def_readonly("got_qty", &Mismatch::got_qty);
  py::class_<ReplayOutcome>(m, "ReplayOutcome")
      .def_readonly("checked", &ReplayOutcome::checked)
      .def_readonly("mismatches", &ReplayOutcome::mismatches)
      .def_readonly("match_fraction", &ReplayOutcome::match_fraction);
  m.def(
      "replay_and_verify",
      [](const BookSnapshot& initial, const std::vector<FlowEvent>& flow, const std::vector<BookSnapshot>& snaps,
         std::size_t levels) {
        ReplayOptions o;
        o.max_levels = levels;
        return replay_and_verify(initial, flow, snaps, o);
      },
      py::arg("initial"), py::arg("flow"), py::arg("snapshots"), py::arg("levels") = 5);

  py::class_<GammaFit>(m, "GammaFit")
      .def_readonly("shape", &GammaFit::shape)
      .def_readonly("scale", &GammaFit::scale)
      .def_readonly("loglik", &GammaFit::loglik);
  py::class_<WeibullFit>(m, "WeibullFit")
      .def_readonly("k", &WeibullFit::shape)
      .def_readonly("lam", &WeibullFit::scale)
      .def_readonly("loglik", &WeibullFit::loglik);
  py::class_<LogNormalFit>(m, "LogNormalFit")
      .def_readonly("mu", &LogNormalFit::mu)
      .def_readonly("sigma", &LogNormalFit::sigma)
      .def_readonly("loglik", &LogNormalFit::loglik);
  py::class_<ExponentialFit>(m, "ExponentialFit")
      .def_readonly("rate", &ExponentialFit::rate)
      .def_readonly("loglik", &ExponentialFit::loglik);
  py::class_<PowerLawFit>(m, "PowerLawFit")
      .def_readonly("alpha", &PowerLawFit::alpha)
      .def_readonly("c", &PowerLawFit::c)
      .def_readonly("r2", &PowerLawFit::r2);
  m.def("fit_gamma_mle", [](const std::vector<double>& x) { return fit_gamma_mle(x); });
  m.def("fit_weibull_mle", [](const std::vector<double>& x) { return fit_weibull_mle(x); });
  m.def("fit_lognormal", [](const std::vector<double>& x) { return fit_lognormal(x); });
  m.def("fit_exponential", [](const std::vector<double>& x) { return fit_exponential(x); });
  m.def("fit_powerlaw_loglog",
        [](const std::vector<double>& x, const std::vector<double>& y) { return fit_powerlaw_loglog(x, y); });

  py::class_<AcfResult>(m, "AcfResult")
      .def_readonly("lags", &AcfResult::lags)
      .def_readonly("rho", &AcfResult::rho)
      .def_readonly("conf_band", &AcfResult::conf_band)
      .def_readonly("n", &AcfResult::n);
  m.def("acf", [](const std::vector<double>& x, int max_lag) { return acf(x, max_lag); }, py::arg("series"),
        py::arg("max_lag"));
  m.def("market_ratio", [](const std::vector<FlowEvent>& f) { return market_ratio(f); });
  m.def(
      "excitation",
      [](const std::vector<FlowEvent>& f, bool mask_mm) {
        const auto r = excitation(f, mask_mm);
        py::dict d;
        py::list labels;
        for (std::size_t i = 0; i < kEventClasses; ++i) labels.append(event_class_name(i));
        d["labels"] = labels;
        d["transition"] = r.transition;
        d["excitation"] = r.excitation;
        d["marginals"] = r.marginals;
        return d;
      },
      py::arg("flow"), py::arg("mask_mm") = true);

  py::class_<GenStats>(m, "GenStats")
      .def_readonly("limits", &GenStats::limits)
      .def_readonly("cancels", &GenStats::cancels)
      .def_readonly("markets", &GenStats::markets)
      .def_readonly("inspread_limits", &GenStats::inspread_limits)
      .def_readonly("evictions", &GenStats::evictions);
  py::class_<Generated>(m, "Generated")
      .def_readonly("data", &Generated::data)
      .def_readonly("truth_flow", &Generated::truth_flow)
      .def_readonly("stats", &Generated::stats);
  m.def("generate", [](const std::string& config_json) { return generate(parse_gen_config(config_json)); },
        py::arg("config_json"), "Synthetic session from a generator config given as JSON text.");
  m.def(
      "generate_bounce_trades",
      [](std::uint64_t seed, std::size_t n, double flip, double mid_move, Ticks spread) {
        BounceConfig c;
        c.seed = seed;
        c.n_trades = n;
        c.flip_probability = flip;
        c.mid_move_probability = mid_move;
        c.spread_ticks = spread;
        return generate_bounce_trades(c);
      },
      py::arg("seed") = 1, py::arg("n_trades") = 100000, py::arg("flip_probability") = 1.0,
      py::arg("mid_move_probability") = 0.01, py::arg("spread_ticks") = 1);

  m.def(
      "build_report_json",
      [](const SessionData& d, const std::vector<FlowEvent>& flow, const std::string& ranges_json,
         const std::vector<std::string>& metrics) {
        ReportConfig c;
        if (!ranges_json.empty()) c.ranges = parse_ranges(ranges_json);
        c.metrics = {metrics.begin(), metrics.end()};
        return to_json(build_report(d, flow, c)).dump();
      },
      py::arg("data"), py::arg("flow"), py::arg("ranges_json") = "", py::arg("metrics") = std::vector<std::string>{});
}

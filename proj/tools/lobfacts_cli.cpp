// lobfacts command-line tool: synth, extract, metrics.
//
// Exit codes: 0 success, 1 reference check failed, 2 input error,
// 3 consistency error.

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "lobfacts/flow.hpp"
#include "lobfacts/ingest.hpp"
#include "lobfacts/replay.hpp"
#include "lobfacts/report.hpp"
#include "lobfacts/synth.hpp"

namespace fs = std::filesystem;
using namespace lobfacts;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitInput = 2;
constexpr int kExitConsistency = 3;

std::mutex g_log;

void log_error(const std::string& msg) {
  std::lock_guard<std::mutex> lock(g_log);
  std::cerr << "lobfacts: " << msg << '\n';
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw ConfigError("cannot open " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw Error("cannot write " + p.string());
  return out;
}

TimeNs seconds_to_ns(double s) {
  if (!(s > 0.0)) throw ConfigError("durations must be positive");
  return static_cast<TimeNs>(std::llround(s * 1e9));
}

// Maps an exception from a command body to an exit code.
int classify(const std::exception& e) {
  if (dynamic_cast<const InconsistentUpdate*>(&e) || dynamic_cast<const ReplayError*>(&e)) return kExitConsistency;
  return kExitInput;
}

struct IngestArgs {
  std::vector<std::string> snapshots;
  std::vector<std::string> trades;
  std::string spec;
  bool lenient = false;
};

void add_ingest_options(CLI::App* cmd, IngestArgs& a) {
  cmd->add_option("--snapshots", a.snapshots, "Snapshot CSV files, one per session")->required()->check(CLI::ExistingFile);
  cmd->add_option("--trades", a.trades, "Trade CSV files, paired with --snapshots")->required()->check(CLI::ExistingFile);
  cmd->add_option("--spec", a.spec, "Instrument spec JSON")->required()->check(CLI::ExistingFile);
  cmd->add_flag("--lenient", a.lenient, "Skip malformed rows instead of failing");
}

void write_ingest_notes(const IngestReport& r, const char* what) {
  if (r.rejected.empty()) return;
  std::lock_guard<std::mutex> lock(g_log);
  std::cerr << "lobfacts: " << what << ": " << r.rejected.size() << " rejected rows\n";
  for (const auto& row : r.rejected) std::cerr << "  row " << row.row << ": " << row.reason << '\n';
}

SessionData load(const std::string& snaps, const std::string& trades, const InstrumentSpec& spec, bool lenient) {
  LoadOptions opts;
  opts.strict = !lenient;
  SessionData data;
  data.spec = spec;
  auto s = load_snapshots(snaps, spec, opts);
  write_ingest_notes(s.report, snaps.c_str());
  auto t = load_trades(trades, spec, opts);
  write_ingest_notes(t.report, trades.c_str());
  data.snapshots = std::move(s.snapshots);
  data.trades = std::move(t.trades);
  if (data.snapshots.empty()) throw EmptyFile(snaps + " (no rows in session)");
  data.session_date = format_date(data.snapshots.front().ts);
  return data;
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads; returns the worst exit code.
int run_parallel(std::size_t n, int jobs, const std::function<int(std::size_t)>& fn) {
  std::atomic<std::size_t> next{0};
  std::atomic<int> worst{kExitOk};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      int code = kExitOk;
      try {
        code = fn(i);
      } catch (const std::exception& e) {
        log_error(e.what());
        code = classify(e);
      }
      int cur = worst.load();
      while (code > cur && !worst.compare_exchange_weak(cur, code)) {
      }
    }
  };
  const auto threads = static_cast<std::size_t>(std::max(1, jobs));
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < std::min(threads, n); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return worst.load();
}

fs::path session_dir(const fs::path& out, const SessionData& d, std::size_t n_sessions) {
  if (n_sessions == 1) return out;
  return out / (d.spec.symbol + "_" + d.session_date);
}

nlohmann::json match_json(const Extraction& ex) {
  nlohmann::json scen = nlohmann::json::object();
  for (std::size_t i = 0; i < kScenarioCount; ++i)
    scen[scenario_name(static_cast<UpdateScenario>(i))] = ex.scenario_counts[i];
  const double rate = ex.report.match_rate;
  return {{"matched", ex.report.matched},
          {"unmatched", ex.report.unmatched_trades.size()},
          {"match_rate", rate},
          {"no_trades", ex.report.no_trades},
          {"events", ex.flow.size()},
          {"scenarios", scen}};
}

void write_mismatches(const fs::path& p, const ReplayOutcome& o, const InstrumentSpec& spec) {
  auto out = open_out(p);
  out << "snapshot_idx,side,price,expected_qty,got_qty\n";
  for (const auto& m : o.mismatches)
    out << m.snapshot_index << ',' << to_char(m.side) << ',' << spec.format_price(m.price) << ',' << m.expected_qty
        << ',' << m.got_qty << '\n';
}

ReplayOutcome verify(const SessionData& d, const std::vector<FlowEvent>& flow) {
  ReplayOptions ro;
  ro.max_levels = static_cast<std::size_t>(d.spec.levels);
  return replay_and_verify(d.snapshots.front(), flow, d.snapshots, ro);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Order-flow reconstruction and stylized-fact metrics for L2 order books"};
  app.require_subcommand(1);
  app.set_version_flag("--version", LOBFACTS_VERSION);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic session with ground-truth flow");
  std::string gen_config, synth_out;
  std::optional<std::uint64_t> synth_seed;
  synth->add_option("--config", gen_config, "Generator config JSON")->required();
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--seed", synth_seed, "Override the config seed");

  // extract
  auto* extract = app.add_subcommand("extract", "Reconstruct labeled order flow from snapshots and trades");
  IngestArgs ex_args;
  std::string ex_out, ex_verify;
  double ex_window_ms = 10.0;
  int ex_jobs = 1;
  add_ingest_options(extract, ex_args);
  extract->add_option("--out", ex_out, "Output directory")->required();
  extract->add_option("--verify", ex_verify, "Replay this flow file instead of extracting")->check(CLI::ExistingFile);
  extract->add_option("--match-window-ms", ex_window_ms, "Trade matching window in milliseconds");
  extract->add_option("--jobs", ex_jobs, "Sessions processed in parallel");

  // metrics
  auto* metrics = app.add_subcommand("metrics", "Compute the realism report");
  IngestArgs m_args;
  std::vector<std::string> m_flow;
  std::string m_out, m_ranges, m_metrics;
  std::optional<double> m_dt, m_window;
  int m_jobs = 1;
  bool m_inline = false;
  add_ingest_options(metrics, m_args);
  metrics->add_option("--flow", m_flow, "Flow CSV files, paired with --snapshots")->check(CLI::ExistingFile);
  metrics->add_flag("--inline-extract", m_inline, "Extract the flow instead of reading --flow");
  metrics->add_option("--out", m_out, "Output directory")->required();
  metrics->add_option("--metrics", m_metrics, "Comma-separated metric names (default: all)");
  metrics->add_option("--ranges", m_ranges, "Reference ranges JSON")->check(CLI::ExistingFile);
  metrics->add_option("--dt", m_dt, "Return sampling interval in seconds for volume-volatility and memory");
  metrics->add_option("--window", m_window, "Activity window in seconds");
  metrics->add_option("--jobs", m_jobs, "Sessions processed in parallel");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*synth) {
      GenConfig cfg = parse_gen_config(read_file(gen_config));
      if (synth_seed) cfg.seed = *synth_seed;
      const Generated g = generate(cfg);
      fs::create_directories(synth_out);
      {
        auto o = open_out(fs::path(synth_out) / "snapshots.csv");
        write_snapshots(o, g.data.snapshots, g.data.spec);
      }
      {
        auto o = open_out(fs::path(synth_out) / "trades.csv");
        write_trades(o, g.data.trades, g.data.spec);
      }
      {
        auto o = open_out(fs::path(synth_out) / "flow_truth.csv");
        write_flow(o, g.truth_flow, g.data.spec);
      }
      {
        nlohmann::json spec = {{"symbol", g.data.spec.symbol},
                               {"tick_size", g.data.spec.tick_size},
                               {"levels", g.data.spec.levels},
                               {"session_start", format_time_of_day(g.data.spec.session_start)},
                               {"session_end", format_time_of_day(g.data.spec.session_end)}};
        open_out(fs::path(synth_out) / "instrument.json") << spec.dump(2) << '\n';
      }
      return kExitOk;
    }

    if (*extract) {
      if (ex_args.snapshots.size() != ex_args.trades.size())
        throw ConfigError("--snapshots and --trades must be given the same number of times");
      const InstrumentSpec spec = load_instrument_spec(ex_args.spec);
      const std::size_t n = ex_args.snapshots.size();
      if (!ex_verify.empty() && n != 1) throw ConfigError("--verify takes exactly one session");
      return run_parallel(n, ex_jobs, [&](std::size_t i) {
        const SessionData d = load(ex_args.snapshots[i], ex_args.trades[i], spec, ex_args.lenient);
        const fs::path dir = session_dir(ex_out, d, n);
        fs::create_directories(dir);
        if (!ex_verify.empty()) {
          const auto flow = load_flow(ex_verify, spec);
          const ReplayOutcome o = verify(d, flow);
          write_mismatches(dir / "mismatches.csv", o, spec);
          if (o.match_fraction < 1.0) {
            const auto& m = o.mismatches.front();
            log_error("replay mismatch at snapshot " + std::to_string(m.snapshot_index) + " (" +
                      std::to_string(o.mismatches.size()) + " level differences)");
            return kExitConsistency;
          }
          return kExitOk;
        }
        ExtractOptions eo;
        eo.match_window = seconds_to_ns(ex_window_ms / 1000.0);
        const Extraction ex = extract_session(d, eo);
        {
          auto o = open_out(dir / "flow.csv");
          write_flow(o, ex.flow, spec);
        }
        open_out(dir / "match_report.json") << match_json(ex).dump(2) << '\n';
        const ReplayOutcome o = verify(d, ex.flow);
        write_mismatches(dir / "mismatches.csv", o, spec);
        if (o.match_fraction < 1.0) {
          log_error("replay of the extracted flow does not reproduce the snapshots");
          return kExitConsistency;
        }
        return kExitOk;
      });
    }

    if (*metrics) {
      const std::size_t n = m_args.snapshots.size();
      if (m_args.trades.size() != n) throw ConfigError("--snapshots and --trades must be given the same number of times");
      if (!m_inline && m_flow.size() != n) throw ConfigError("pass one --flow per session or use --inline-extract");
      const InstrumentSpec spec = load_instrument_spec(m_args.spec);
      ReportConfig rc;
      if (!m_ranges.empty()) rc.ranges = load_ranges(m_ranges);
      if (!m_metrics.empty()) {
        std::stringstream ss(m_metrics);
        std::string item;
        while (std::getline(ss, item, ','))
          if (!item.empty()) rc.metrics.insert(item);
      }
      if (m_dt) rc.volvol_dt = rc.lrd_dt = seconds_to_ns(*m_dt);
      if (m_window) rc.activity_window = seconds_to_ns(*m_window);
      for (const auto& m : rc.metrics)
        if (std::find(metric_names().begin(), metric_names().end(), m) == metric_names().end())
          throw ConfigError("unknown metric '" + m + "'");
      return run_parallel(n, m_jobs, [&](std::size_t i) {
        const SessionData d = load(m_args.snapshots[i], m_args.trades[i], spec, m_args.lenient);
        std::vector<FlowEvent> flow;
        std::optional<MatchReport> mr;
        if (m_inline) {
          Extraction ex = extract_session(d);
          flow = std::move(ex.flow);
          mr = std::move(ex.report);
        } else {
          flow = load_flow(m_flow[i], spec);
        }
        const fs::path dir = session_dir(m_out, d, n);
        fs::create_directories(dir);
        const RealismReport r = build_report(d, flow, rc, mr ? &*mr : nullptr);
        open_out(dir / "report.json") << to_json(r).dump(2) << '\n';
        write_metric_csvs(r, dir);
        for (const auto& [name, err] : r.errors) log_error(d.session_date + " " + name + ": " + err);
        if (!r.all_checks_pass()) {
          std::string names;
          for (const auto& f : r.failed_checks()) names += (names.empty() ? "" : ", ") + f;
          log_error(d.session_date + " failed checks: " + names);
          return kExitCheckFailed;
        }
        return kExitOk;
      });
    }
  } catch (const std::exception& e) {
    log_error(e.what());
    return classify(e);
  }
  return kExitOk;
}

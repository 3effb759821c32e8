#include "lobfacts/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace lobfacts {

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::map<std::string, std::size_t, std::less<>> header_index(std::string_view header) {
  std::map<std::string, std::size_t, std::less<>> idx;
  const auto cols = split(header);
  for (std::size_t i = 0; i < cols.size(); ++i) idx.emplace(std::string(trim(cols[i])), i);
  return idx;
}

std::size_t require_column(const std::map<std::string, std::size_t, std::less<>>& idx,
                           const std::string& name) {
  auto it = idx.find(name);
  if (it == idx.end()) throw ParseError(1, "missing column '" + name + "'");
  return it->second;
}

struct RowSink {
  const LoadOptions& opts;
  IngestReport& report;

  // Either throws (strict) or records the rejection.
  void reject(std::size_t row, std::string reason) {
    if (opts.strict) throw ParseError(row, reason);
    report.rejected.push_back({row, std::move(reason)});
  }
};

Ticks parse_price(std::string_view field, const InstrumentSpec& spec, std::size_t row) {
  double p = 0.0;
  if (!parse_number(field, p)) throw ParseError(row, "bad price '" + std::string(field) + "'");
  auto t = spec.to_ticks(p);
  if (!t) throw ParseError(row, "price " + std::string(trim(field)) + " is not a multiple of the tick size");
  return *t;
}

Qty parse_qty(std::string_view field, std::size_t row, const char* what) {
  Qty q = 0;
  if (!parse_number(field, q)) throw ParseError(row, std::string("bad ") + what + " '" + std::string(field) + "'");
  if (q <= 0) throw ParseError(row, std::string(what) + " must be positive");
  return q;
}

}  // namespace

TimeNs SessionData::session_open() const {
  return parse_date(session_date) + spec.session_start;
}

SnapshotLoad read_snapshots(std::istream& in, const InstrumentSpec& spec, const LoadOptions& opts) {
  SnapshotLoad out;
  std::string line;
  if (!std::getline(in, line) || trim(line).empty()) throw EmptyFile("snapshots");
  const auto idx = header_index(line);
  const std::size_t ts_col = require_column(idx, "ts_ns");

  // Depth present in the file, truncated to the instrument's tracked levels.
  int file_levels = 0;
  while (idx.count("bp" + std::to_string(file_levels + 1))) ++file_levels;
  if (file_levels == 0) throw ParseError(1, "missing column 'bp1'");
  const int depth = std::min(file_levels, spec.levels);
  std::vector<std::size_t> bp, bq, ap, aq;
  for (int i = 1; i <= depth; ++i) {
    const std::string n = std::to_string(i);
    bp.push_back(require_column(idx, "bp" + n));
    bq.push_back(require_column(idx, "bq" + n));
    ap.push_back(require_column(idx, "ap" + n));
    aq.push_back(require_column(idx, "aq" + n));
  }
  const std::size_t min_cols = std::max({ts_col, bp.back(), bq.back(), ap.back(), aq.back()}) + 1;

  RowSink sink{opts, out.report};
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    ++out.report.total_rows;
    try {
      const auto f = split(line);
      if (f.size() < min_cols) throw ParseError(row, "expected at least " + std::to_string(min_cols) + " fields");
      BookSnapshot snap;
      if (!parse_number(f[ts_col], snap.ts)) throw ParseError(row, "bad ts_ns");
      if (opts.session_filter && !spec.in_session(snap.ts)) {
        ++out.report.dropped_out_of_session;
        continue;
      }
      for (Side s : {Side::Bid, Side::Ask}) {
        const auto& pc = s == Side::Bid ? bp : ap;
        const auto& qc = s == Side::Bid ? bq : aq;
        bool gap = false;
        for (int i = 0; i < depth; ++i) {
          const auto pf = trim(f[pc[static_cast<std::size_t>(i)]]);
          const auto qf = trim(f[qc[static_cast<std::size_t>(i)]]);
          if (pf.empty() && qf.empty()) {
            gap = true;
            continue;
          }
          if (pf.empty() || qf.empty()) throw ParseError(row, "level with price but no quantity (or vice versa)");
          if (gap) throw ParseError(row, "populated level after an empty one");
          snap.side(s).push_back({parse_price(pf, spec, row), parse_qty(qf, row, "quantity")});
        }
      }
      if (auto why = check_snapshot(snap)) throw ParseError(row, *why);
      if (!out.snapshots.empty()) {
        const auto& last = out.snapshots.back();
        if (last.same_book(snap) && snap.ts >= last.ts) {
          ++out.report.dropped_duplicate;
          continue;
        }
        if (snap.ts <= last.ts) throw ParseError(row, "timestamp not increasing");
      }
      out.snapshots.push_back(std::move(snap));
      ++out.report.retained;
    } catch (const ParseError& e) {
      sink.reject(e.row(), e.reason());
    }
  }
  if (out.report.total_rows == 0) throw EmptyFile("snapshots");
  return out;
}

SnapshotLoad load_snapshots(const std::filesystem::path& path, const InstrumentSpec& spec,
                            const LoadOptions& opts) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return read_snapshots(in, spec, opts);
  } catch (const EmptyFile&) {
    throw EmptyFile(path.string());
  }
}

TradeLoad read_trades(std::istream& in, const InstrumentSpec& spec, const LoadOptions& opts) {
  TradeLoad out;
  std::string line;
  if (!std::getline(in, line) || trim(line).empty()) throw EmptyFile("trades");
  const auto idx = header_index(line);
  const std::size_t ts_col = require_column(idx, "ts_ns");
  const std::size_t price_col = require_column(idx, "price");
  const std::size_t size_col = require_column(idx, "size");
  const auto agg_it = idx.find("aggressor");
  const auto onbook_it = idx.find("onbook");

  RowSink sink{opts, out.report};
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    ++out.report.total_rows;
    try {
      const auto f = split(line);
      auto field = [&](std::size_t col) -> std::string_view {
        if (col >= f.size()) throw ParseError(row, "too few fields");
        return trim(f[col]);
      };
      Trade t;
      if (!parse_number(field(ts_col), t.ts)) throw ParseError(row, "bad ts_ns");
      if (onbook_it != idx.end()) {
        const auto v = field(onbook_it->second);
        if (v == "0") {
          ++out.report.dropped_off_book;
          continue;
        }
        if (v != "1") throw ParseError(row, "onbook must be 0 or 1");
      }
      if (opts.session_filter && !spec.in_session(t.ts)) {
        ++out.report.dropped_out_of_session;
        continue;
      }
      t.price = parse_price(field(price_col), spec, row);
      t.size = parse_qty(field(size_col), row, "size");
      if (agg_it != idx.end()) {
        const auto v = field(agg_it->second);
        std::optional<Aggressor> a;
        if (v.empty()) a = Aggressor::Unknown;
        else if (v.size() == 1) a = aggressor_from_char(v[0]);
        if (!a) throw ParseError(row, "aggressor must be B, A or U");
        t.aggressor = *a;
      }
      out.trades.push_back(t);
      ++out.report.retained;
    } catch (const ParseError& e) {
      sink.reject(e.row(), e.reason());
    }
  }
  std::stable_sort(out.trades.begin(), out.trades.end(),
                   [](const Trade& a, const Trade& b) { return a.ts < b.ts; });
  return out;
}

TradeLoad load_trades(const std::filesystem::path& path, const InstrumentSpec& spec,
                      const LoadOptions& opts) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return read_trades(in, spec, opts);
  } catch (const EmptyFile&) {
    throw EmptyFile(path.string());
  }
}

SessionData load_session(const std::filesystem::path& snapshots, const std::filesystem::path& trades,
                         const InstrumentSpec& spec, const LoadOptions& opts) {
  SessionData data;
  data.spec = spec;
  data.snapshots = load_snapshots(snapshots, spec, opts).snapshots;
  data.trades = load_trades(trades, spec, opts).trades;
  if (data.snapshots.empty()) throw EmptyFile(snapshots.string() + " (no rows in session)");
  data.session_date = format_date(data.snapshots.front().ts);
  return data;
}

std::vector<FlowEvent> read_flow(std::istream& in, const InstrumentSpec& spec) {
  std::vector<FlowEvent> flow;
  std::string line;
  if (!std::getline(in, line) || trim(line).empty()) throw EmptyFile("flow");
  const auto idx = header_index(line);
  const std::size_t c_seq = require_column(idx, "seq"), c_ts = require_column(idx, "ts_ns"),
                    c_kind = require_column(idx, "kind"), c_side = require_column(idx, "side"),
                    c_price = require_column(idx, "price"), c_size = require_column(idx, "size"),
                    c_level = require_column(idx, "level");
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto f = split(line);
    if (f.size() < 7) throw ParseError(row, "expected 7 fields");
    FlowEvent e;
    if (!parse_number(f[c_seq], e.seq)) throw ParseError(row, "bad seq");
    if (!parse_number(f[c_ts], e.ts)) throw ParseError(row, "bad ts_ns");
    const auto k = trim(f[c_kind]);
    const auto s = trim(f[c_side]);
    auto kind = k.size() == 1 ? kind_from_char(k[0]) : std::nullopt;
    auto side = s.size() == 1 ? side_from_char(s[0]) : std::nullopt;
    if (!kind) throw ParseError(row, "kind must be L, C or M");
    if (!side) throw ParseError(row, "side must be B or A");
    e.kind = *kind;
    e.side = *side;
    e.price = parse_price(f[c_price], spec, row);
    e.size = parse_qty(f[c_size], row, "size");
    if (!parse_number(f[c_level], e.level) || e.level == 0) throw ParseError(row, "bad level");
    flow.push_back(e);
  }
  return flow;
}

std::vector<FlowEvent> load_flow(const std::filesystem::path& path, const InstrumentSpec& spec) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return read_flow(in, spec);
}

void write_snapshots(std::ostream& out, std::span<const BookSnapshot> snapshots,
                     const InstrumentSpec& spec) {
  const int n = spec.levels;
  out << "ts_ns";
  for (const char* p : {"bp", "bq", "ap", "aq"})
    for (int i = 1; i <= n; ++i) out << ',' << p << i;
  out << '\n';
  for (const auto& s : snapshots) {
    out << s.ts;
    for (Side side : {Side::Bid, Side::Ask}) {
      const auto& lv = s.side(side);
      for (int i = 0; i < n; ++i) {
        out << ',';
        if (static_cast<std::size_t>(i) < lv.size()) out << spec.format_price(lv[static_cast<std::size_t>(i)].price);
      }
      for (int i = 0; i < n; ++i) {
        out << ',';
        if (static_cast<std::size_t>(i) < lv.size()) out << lv[static_cast<std::size_t>(i)].qty;
      }
    }
    out << '\n';
  }
}

void write_trades(std::ostream& out, std::span<const Trade> trades, const InstrumentSpec& spec) {
  out << "ts_ns,price,size,aggressor,onbook\n";
  for (const auto& t : trades)
    out << t.ts << ',' << spec.format_price(t.price) << ',' << t.size << ',' << to_char(t.aggressor)
        << ",1\n";
}

void write_flow(std::ostream& out, std::span<const FlowEvent> flow, const InstrumentSpec& spec) {
  out << "seq,ts_ns,kind,side,price,size,level\n";
  for (const auto& e : flow)
    out << e.seq << ',' << e.ts << ',' << to_char(e.kind) << ',' << to_char(e.side) << ','
        << spec.format_price(e.price) << ',' << e.size << ',' << e.level << '\n';
}

InstrumentSpec parse_instrument_spec(const std::string& json_text) {
  InstrumentSpec spec;
  try {
    const auto j = nlohmann::json::parse(json_text);
    spec.symbol = j.at("symbol").get<std::string>();
    spec.tick_size = j.at("tick_size").get<double>();
    spec.levels = j.value("levels", 5);
    if (j.contains("session_start")) spec.session_start = parse_time_of_day(j["session_start"].get<std::string>());
    if (j.contains("session_end")) spec.session_end = parse_time_of_day(j["session_end"].get<std::string>());
    if (j.contains("reference") && j["reference"].contains("mean_spread_ticks"))
      spec.reference_mean_spread_ticks = j["reference"]["mean_spread_ticks"].get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("instrument spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

InstrumentSpec load_instrument_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_instrument_spec(ss.str());
}

}  // namespace lobfacts

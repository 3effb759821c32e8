#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lobfacts/types.hpp"

namespace lobfacts {

struct RejectedRow {
  std::size_t row = 0;
  std::string reason;
};

/// Row accounting for one loaded file:
/// retained + dropped_out_of_session + dropped_duplicate + dropped_off_book
/// + rejected.size() == total_rows.
struct IngestReport {
  std::size_t total_rows = 0;
  std::size_t retained = 0;
  std::size_t dropped_out_of_session = 0;
  std::size_t dropped_duplicate = 0;
  std::size_t dropped_off_book = 0;
  std::vector<RejectedRow> rejected;

  std::size_t dropped() const { return dropped_out_of_session + dropped_duplicate + dropped_off_book; }
};

struct LoadOptions {
  /// Throw ParseError on the first bad row instead of rejecting it.
  bool strict = true;
  bool session_filter = true;
};

struct SnapshotLoad {
  std::vector<BookSnapshot> snapshots;
  IngestReport report;
};

struct TradeLoad {
  std::vector<Trade> trades;
  IngestReport report;
};

struct SessionData {
  InstrumentSpec spec;
  std::vector<BookSnapshot> snapshots;
  std::vector<Trade> trades;
  /// ISO date of the session.
  std::string session_date;

  /// Midnight plus session_start on the session date.
  TimeNs session_open() const;
};

/// snapshots.csv: `ts_ns,bp1..bpN,bq1..bqN,ap1..apN,aq1..aqN`; an empty level
/// has empty fields. Consecutive identical books are collapsed; timestamps
/// must be strictly increasing afterwards.
SnapshotLoad load_snapshots(const std::filesystem::path& path, const InstrumentSpec& spec,
                            const LoadOptions& opts = {});
SnapshotLoad read_snapshots(std::istream& in, const InstrumentSpec& spec,
                            const LoadOptions& opts = {});

/// trades.csv: `ts_ns,price,size[,aggressor][,onbook]`, aggressor in {B,A,U},
/// onbook in {0,1}. Output is sorted by timestamp, stable on ties.
TradeLoad load_trades(const std::filesystem::path& path, const InstrumentSpec& spec,
                      const LoadOptions& opts = {});
TradeLoad read_trades(std::istream& in, const InstrumentSpec& spec, const LoadOptions& opts = {});

SessionData load_session(const std::filesystem::path& snapshots, const std::filesystem::path& trades,
                         const InstrumentSpec& spec, const LoadOptions& opts = {});

/// flow.csv: `seq,ts_ns,kind,side,price,size,level`.
std::vector<FlowEvent> load_flow(const std::filesystem::path& path, const InstrumentSpec& spec);
std::vector<FlowEvent> read_flow(std::istream& in, const InstrumentSpec& spec);

void write_snapshots(std::ostream& out, std::span<const BookSnapshot> snapshots,
                     const InstrumentSpec& spec);
void write_trades(std::ostream& out, std::span<const Trade> trades, const InstrumentSpec& spec);
void write_flow(std::ostream& out, std::span<const FlowEvent> flow, const InstrumentSpec& spec);

/// Instrument spec JSON: symbol, tick_size, levels, session_start,
/// session_end ("HH:MM:SS") and optional reference.mean_spread_ticks.
InstrumentSpec load_instrument_spec(const std::filesystem::path& path);
InstrumentSpec parse_instrument_spec(const std::string& json_text);

}  // namespace lobfacts

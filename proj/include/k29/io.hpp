#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "k29/metrics.hpp"
#include "k29/types.hpp"

namespace k29 {

// Shortest decimal form that round-trips the exact double, so repeated runs
// produce byte-identical files and replayed values are lossless.
std::string format_double(double v);

// History serialization: JSON-lines, one round per line
// {"x":[...],"p":0.5,"y":1}.
void write_history_jsonl(const History& history, std::ostream& out);
History read_history_jsonl(std::istream& in, const std::string& origin = "<stream>");
void write_history_jsonl_file(const History& history, const std::string& path);
History read_history_jsonl_file(const std::string& path);

// Capital trajectory: CSV with columns round,capital (round 0 holds K_0 = 1).
void write_ledger_csv(const CapitalLedger& ledger, std::ostream& out);

// Calibration bins: CSV with one row per bin.
void write_bins_csv(const std::vector<CalibrationBin>& bins, std::ostream& out);

// Bound-check report as a small JSON object.
void write_bound_report_json(const BoundReport& report, std::ostream& out);

// Minimal numeric CSV table (header + double cells).
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  // Index of a named column; throws std::invalid_argument naming the column.
  std::size_t column_index(const std::string& name) const;
};

CsvTable read_csv(std::istream& in, const std::string& origin = "<stream>");
CsvTable read_csv_file(const std::string& path);

}  // namespace k29

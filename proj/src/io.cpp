#include "k29/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include <nlohmann/json.hpp>

namespace k29 {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

[[noreturn]] void parse_fail(const std::string& origin, std::size_t line,
                             const std::string& what) {
  throw ParseError(origin + ":" + std::to_string(line) + ": " + what);
}

double parse_cell(const std::string& origin, std::size_t line, std::string_view cell) {
  double v = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc{} || res.ptr != end)
    parse_fail(origin, line, "bad numeric cell '" + std::string(cell) + "'");
  return v;
}

}  // namespace

void write_history_jsonl(const History& history, std::ostream& out) {
  for (const Round& r : history) {
    out << "{\"x\":[";
    for (Eigen::Index i = 0; i < r.object.size(); ++i) {
      if (i > 0) out << ',';
      out << format_double(r.object[i]);
    }
    out << "],\"p\":" << format_double(r.forecast) << ",\"y\":" << r.label << "}\n";
  }
}

History read_history_jsonl(std::istream& in, const std::string& origin) {
  History history;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      parse_fail(origin, line_no, e.what());
    }
    Round r;
    if (!j.contains("p") || !j["p"].is_number())
      parse_fail(origin, line_no, "missing numeric field 'p'");
    r.forecast = j["p"].get<double>();
    if (!is_valid_forecast(r.forecast))
      parse_fail(origin, line_no, "forecast outside [0, 1]");
    if (!j.contains("y") || !j["y"].is_number())
      parse_fail(origin, line_no, "missing numeric field 'y'");
    const double y = j["y"].get<double>();
    if (y != 0.0 && y != 1.0)
      parse_fail(origin, line_no, "label y=" + j["y"].dump() + " not in {0, 1}");
    r.label = static_cast<int>(y);
    if (!j.contains("x") || !j["x"].is_array())
      parse_fail(origin, line_no, "missing array field 'x'");
    r.object.resize(static_cast<Eigen::Index>(j["x"].size()));
    Eigen::Index i = 0;
    for (const auto& v : j["x"]) {
      if (!v.is_number()) parse_fail(origin, line_no, "'x' entries must be numbers");
      r.object[i++] = v.get<double>();
    }
    if (!r.object.allFinite())
      parse_fail(origin, line_no, "'x' entries must be finite");
    if (!history.empty() && history.front().object.size() != r.object.size())
      parse_fail(origin, line_no, "object dimension changed mid-stream");
    history.push_back(std::move(r));
  }
  return history;
}

void write_history_jsonl_file(const History& history, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_history_jsonl(history, out);
}

History read_history_jsonl_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open history file: " + path);
  return read_history_jsonl(in, path);
}

void write_ledger_csv(const CapitalLedger& ledger, std::ostream& out) {
  out << "round,capital\n";
  for (std::size_t n = 0; n < ledger.values.size(); ++n)
    out << n << ',' << format_double(ledger.values[n]) << '\n';
}

void write_bins_csv(const std::vector<CalibrationBin>& bins, std::ostream& out) {
  out << "lower,upper,count,mean_forecast,mean_label,gap\n";
  for (const CalibrationBin& b : bins)
    out << format_double(b.lower) << ',' << format_double(b.upper) << ',' << b.count
        << ',' << format_double(b.mean_forecast) << ',' << format_double(b.mean_label)
        << ',' << format_double(b.gap) << '\n';
}

void write_bound_report_json(const BoundReport& report, std::ostream& out) {
  nlohmann::json j{{"c_observed", report.c_observed},
                   {"lhs", report.lhs},
                   {"rhs", report.rhs},
                   {"holds", report.holds},
                   {"applicable", report.applicable}};
  out << j.dump(2) << '\n';
}

std::size_t CsvTable::column_index(const std::string& name) const {
  for (std::size_t c = 0; c < columns.size(); ++c)
    if (columns[c] == name) return c;
  throw std::invalid_argument("column '" + name + "' not found");
}

CsvTable read_csv(std::istream& in, const std::string& origin) {
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.emplace_back();
    if (table.columns.empty()) {
      table.columns = std::move(cells);
      continue;
    }
    if (cells.size() != table.columns.size())
      parse_fail(origin, line_no,
                 "expected " + std::to_string(table.columns.size()) + " cells, got " +
                     std::to_string(cells.size()));
    std::vector<double> values;
    values.reserve(cells.size());
    for (const std::string& c : cells) values.push_back(parse_cell(origin, line_no, c));
    table.rows.push_back(std::move(values));
  }
  if (table.columns.empty())
    throw ParseError(origin + ": empty CSV (no header)");
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open CSV file: " + path);
  return read_csv(in, path);
}

}  // namespace k29

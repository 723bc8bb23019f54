#ifndef ENTLAB_CLI_REPORT_HPP
#define ENTLAB_CLI_REPORT_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "entlab_cli/config.hpp"

namespace entlab::cli {

inline constexpr const char* artifact_version = "0.1.0";
inline constexpr const char* generator_name = "mt19937_64";

using Cell = std::variant<std::int64_t, double, std::string>;

/// Row-major result table with named columns.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  std::size_t column(const std::string& name) const
  {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name)
        return i;
    throw std::logic_error("no column '" + name + "'");
  }

  void add(std::vector<Cell> row)
  {
    if (row.size() != columns.size())
      throw std::logic_error("row has " + std::to_string(row.size()) + " cells, table has " +
                             std::to_string(columns.size()) + " columns");
    rows.push_back(std::move(row));
  }

  /// Numeric cell value (integers widen to double).
  double number(std::size_t row, const std::string& name) const
  {
    const Cell& c = rows.at(row).at(column(name));
    if (const auto* d = std::get_if<double>(&c))
      return *d;
    if (const auto* i = std::get_if<std::int64_t>(&c))
      return static_cast<double>(*i);
    throw std::logic_error("column '" + name + "' is not numeric");
  }

  const std::string& text(std::size_t row, const std::string& name) const
  {
    return std::get<std::string>(rows.at(row).at(column(name)));
  }
};

/// Built-in assertion evaluated from the emitted rows.
struct Check {
  std::string name;
  bool passed = false;
  double value = 0.0;     ///< measured quantity
  double threshold = 0.0; ///< bound it was compared against
};

struct RunReport {
  std::string experiment;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> config; ///< resolved parameters
  Table table;
  std::vector<Check> checks;
  double wall_seconds = 0.0;

  bool passed() const
  {
    for (const auto& c : checks)
      if (!c.passed)
        return false;
    return true;
  }
};

/// Shortest text carrying 17 significant digits, so doubles round-trip exactly.
inline std::string format_double(double v)
{
  if (std::isnan(v))
    return "nan";
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_escape(const std::string& s)
{
  if (s.find_first_of(",\"\n\r") == std::string::npos)
    return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"')
      out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string cell_text(const Cell& c)
{
  if (const auto* d = std::get_if<double>(&c))
    return format_double(*d);
  if (const auto* i = std::get_if<std::int64_t>(&c))
    return std::to_string(*i);
  return csv_escape(std::get<std::string>(c));
}

/// Header row plus one line per table row, comma separated, LF terminated.
inline void write_csv(std::ostream& out, const RunReport& report)
{
  const auto& t = report.table;
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    out << (i ? "," : "") << csv_escape(t.columns[i]);
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << cell_text(row[i]);
    out << '\n';
  }
}

inline nlohmann::ordered_json to_json(const RunReport& report, bool timing)
{
  nlohmann::ordered_json j;
  j["artifact_version"] = artifact_version;
  j["experiment"] = report.experiment;
  j["seed"] = report.seed;
  j["generator"] = generator_name;
  auto& config = j["config"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : report.config)
    config[k] = v;
  j["columns"] = report.table.columns;
  auto& rows = j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : report.table.rows) {
    nlohmann::ordered_json r = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i)
      std::visit([&](const auto& v) { r[report.table.columns[i]] = v; }, row[i]);
    rows.push_back(std::move(r));
  }
  auto& checks = j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : report.checks)
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"threshold", c.threshold}});
  j["passed"] = report.passed();
  if (timing)
    j["wall_clock_seconds"] = report.wall_seconds;
  return j;
}

inline void write_report(std::ostream& out, const RunReport& report, Format format, bool timing)
{
  if (format == Format::csv)
    write_csv(out, report);
  else
    out << to_json(report, timing).dump(2) << '\n';
}

/// Writes the report to `path`, or to standard output when the path is empty.
inline void emit(const RunReport& report, const ExperimentConfig& cfg)
{
  if (cfg.out.empty()) {
    write_report(std::cout, report, cfg.format, cfg.timing);
    std::cout.flush();
    return;
  }
  std::ofstream file(cfg.out, std::ios::binary | std::ios::trunc);
  if (!file)
    throw IoError("cannot open output file '" + cfg.out + "' for writing");
  write_report(file, report, cfg.format, cfg.timing);
  file.close();
  if (!file)
    throw IoError("failed writing output file '" + cfg.out + "'");
}

/// Human-readable run summary: config echo, checks, wall-clock.
inline void write_summary(std::ostream& out, const RunReport& report)
{
  out << "entlab " << artifact_version << "  experiment=" << report.experiment << "  seed=" << report.seed
      << "  generator=" << generator_name << '\n';
  for (const auto& [k, v] : report.config)
    out << "  " << k << " = " << v << '\n';
  out << "  rows: " << report.table.rows.size() << '\n';
  for (const auto& c : report.checks)
    out << "  [" << (c.passed ? "PASS" : "FAIL") << "] " << c.name << ": " << format_double(c.value) << " vs "
        << format_double(c.threshold) << '\n';
  std::ostringstream wall;
  wall.precision(3);
  wall << std::fixed << report.wall_seconds;
  out << "  wall-clock: " << wall.str() << " s\n";
  out << (report.passed() ? "PASS" : "FAIL") << '\n';
}

} // namespace entlab::cli

#endif // ENTLAB_CLI_REPORT_HPP

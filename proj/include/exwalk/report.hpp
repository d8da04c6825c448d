#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace exwalk {

/// 17 significant digits, '.' separator,
/// independent of the C++ locale. NaN prints as "nan", infinities as "inf"/"-inf".
std::string format_double(double v);

using Cell = std::variant<std::monostate, std::int64_t, std::uint64_t, double, std::string>;

/// A rectangular result set rendered as CSV or JSON.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
};

/// Canonical description of one invocation: sorted-key JSON plus its FNV-1a hash.
struct RunConfig {
  std::string subcommand;
  nlohmann::json params = nlohmann::json::object();
  int format_version = 1;

  std::string canonical_json() const;
  std::string hash_hex() const;
};

std::uint64_t fnv1a64(const std::string& bytes);

enum class OutputFormat { Csv, Json };

/// CSV: optional `# config_hash=... config=...` line, header, rows, LF endings.
void write_csv(std::ostream& out, const Table& t, const RunConfig* config = nullptr);
/// JSON: {"config": ..., "config_hash": ..., "rows": [...]} with typed values.
void write_json(std::ostream& out, const Table& t, const RunConfig* config = nullptr);
/// Writes to `path`, or to stdout when path is empty or "-".
void write_table(const std::string& path, const Table& t, OutputFormat fmt,
                 const RunConfig* config = nullptr);

/// One row of the shared experiment schema
/// `name,param,trials,estimate,ci_lo,ci_hi,censored,seed,z`.
struct ReportRow {
  std::string name;
  std::string param;
  std::uint64_t trials = 0;
  std::optional<double> estimate;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::uint64_t censored = 0;
  std::uint64_t seed = 0;
  std::optional<double> z;
};

struct ExperimentReport {
  std::string name;
  std::vector<ReportRow> rows;
  double wall_seconds = 0.0;  // diagnostics only, never serialized

  Table to_table() const;
};

inline const std::vector<std::string>& report_columns() {
  static const std::vector<std::string> cols{"name", "param", "trials", "estimate", "ci_lo",
                                             "ci_hi", "censored", "seed", "z"};
  return cols;
}

void emit_report(const ExperimentReport& report, const std::string& path,
                 OutputFormat fmt = OutputFormat::Csv, const RunConfig* config = nullptr);

/// Minimal CSV reader for files produced by write_csv (no quoting). Lines
/// starting with '#' are skipped.
Table read_csv(std::istream& in);

/// Diagnostics to stderr, enabled by the EXWALK_LOG environment variable.
bool log_enabled();
void log_line(const std::string& msg);

}  // namespace exwalk

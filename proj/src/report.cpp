#include "exwalk/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "exwalk/errors.hpp"

namespace exwalk {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw FormatError("table row width mismatch");
  rows.push_back(std::move(row));
}

std::string RunConfig::canonical_json() const {
  nlohmann::json j = params;
  j["subcommand"] = subcommand;
  j["format_version"] = format_version;
  return j.dump();  // object keys are kept sorted
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string RunConfig::hash_hex() const {
  char buf[17];
  const auto h = fnv1a64(canonical_json());
  static const char* kHex = "0123456789abcdef";
  for (int i = 0; i < 16; ++i) buf[i] = kHex[(h >> (60 - 4 * i)) & 0xf];
  buf[16] = '\0';
  return buf;
}

namespace {

std::string cell_text(const Cell& c) {
  struct V {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(std::uint64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const { return format_double(v); }
    std::string operator()(const std::string& v) const { return v; }
  };
  return std::visit(V{}, c);
}

nlohmann::json cell_json(const Cell& c) {
  struct V {
    nlohmann::json operator()(std::monostate) const { return nullptr; }
    nlohmann::json operator()(std::int64_t v) const { return v; }
    nlohmann::json operator()(std::uint64_t v) const { return v; }
    nlohmann::json operator()(double v) const {
      if (!std::isfinite(v)) return format_double(v);
      return v;
    }
    nlohmann::json operator()(const std::string& v) const { return v; }
  };
  return std::visit(V{}, c);
}

}  // namespace

void write_csv(std::ostream& out, const Table& t, const RunConfig* config) {
  if (config) {
    out << "# config_hash=" << config->hash_hex() << " config=" << config->canonical_json()
        << '\n';
  }
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (i) out << ',';
    out << t.columns[i];
  }
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << cell_text(row[i]);
    }
    out << '\n';
  }
}

void write_json(std::ostream& out, const Table& t, const RunConfig* config) {
  nlohmann::json j;
  if (config) {
    j["config"] = nlohmann::json::parse(config->canonical_json());
    j["config_hash"] = config->hash_hex();
  }
  j["rows"] = nlohmann::json::array();
  for (const auto& row : t.rows) {
    nlohmann::json r = nlohmann::json::object();
    for (std::size_t i = 0; i < row.size(); ++i) r[t.columns[i]] = cell_json(row[i]);
    j["rows"].push_back(std::move(r));
  }
  out << j.dump(2) << '\n';
}

void write_table(const std::string& path, const Table& t, OutputFormat fmt,
                 const RunConfig* config) {
  auto emit = [&](std::ostream& os) {
    if (fmt == OutputFormat::Csv) {
      write_csv(os, t, config);
    } else {
      write_json(os, t, config);
    }
  };
  if (path.empty() || path == "-") {
    emit(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open output file: " + path);
  emit(f);
  if (!f) throw IoError("write failed: " + path);
}

Table ExperimentReport::to_table() const {
  Table t;
  t.columns = report_columns();
  for (const auto& r : rows) {
    t.add_row({r.name, r.param, r.trials,
               r.estimate ? Cell{*r.estimate} : Cell{std::string("nan")}, r.ci_lo, r.ci_hi,
               r.censored, r.seed, r.z ? Cell{*r.z} : Cell{}});
  }
  return t;
}

void emit_report(const ExperimentReport& report, const std::string& path, OutputFormat fmt,
                 const RunConfig* config) {
  write_table(path, report.to_table(), fmt, config);
}

Table read_csv(std::istream& in) {
  Table t;
  std::string line;
  bool have_header = false;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(s);
    while (std::getline(ss, cur, ',')) out.push_back(cur);
    if (!s.empty() && s.back() == ',') out.emplace_back();
    return out;
  };
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto fields = split(line);
    if (!have_header) {
      t.columns = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != t.columns.size()) throw FormatError("ragged CSV row: " + line);
    std::vector<Cell> row;
    for (auto& f : fields) row.emplace_back(std::move(f));
    t.rows.push_back(std::move(row));
  }
  if (!have_header) throw FormatError("CSV input has no header");
  return t;
}

bool log_enabled() {
  static const bool on = [] {
    const char* v = std::getenv("EXWALK_LOG");
    return v != nullptr && *v != '\0' && std::string(v) != "0";
  }();
  return on;
}

void log_line(const std::string& msg) {
  if (log_enabled()) std::cerr << "[exwalk] " << msg << '\n';
}

}  // namespace exwalk

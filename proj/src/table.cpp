#include "sknaflow/table.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sknaflow/error.hpp"

namespace sknaflow {

namespace {

constexpr const char* kModule = "ingest";

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string quote_csv(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> resolve_columns(std::span<const Row> rows, std::span<const std::string> columns) {
  std::set<std::string> keys;
  if (!rows.empty()) {
    for (const auto& [k, _] : rows.front()) keys.insert(k);
  }
  for (std::size_t i = 1; i < rows.size(); ++i) {
    std::set<std::string> other;
    for (const auto& [k, _] : rows[i]) other.insert(k);
    if (other != keys) {
      throw Error(ErrorKind::schema, kModule, "write_table",
                  "row " + std::to_string(i) + " has a different key set than row 0");
    }
  }
  if (columns.empty()) return {keys.begin(), keys.end()};

  std::vector<std::string> cols(columns.begin(), columns.end());
  if (!rows.empty()) {
    std::set<std::string> listed(cols.begin(), cols.end());
    if (listed != keys || listed.size() != cols.size()) {
      throw Error(ErrorKind::schema, kModule, "write_table", "column list does not match the row keys");
    }
  }
  return cols;
}

nlohmann::json cell_to_json(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> nlohmann::json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(v)) return format_real(v);
          // Round-trip through the 9-digit text so JSON and CSV agree.
          return std::strtod(format_real(v).c_str(), nullptr);
        } else {
          return v;
        }
      },
      cell);
}

}  // namespace

std::string format_cell(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) return format_real(v);
        else if constexpr (std::is_same_v<T, std::int64_t>) return std::to_string(v);
        else return v;
      },
      cell);
}

std::string format_table(std::span<const Row> rows, TableFormat format, std::span<const std::string> columns) {
  const auto cols = resolve_columns(rows, columns);

  if (format == TableFormat::json) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::array();
    for (const auto& row : rows) {
      nlohmann::ordered_json obj = nlohmann::ordered_json::object();
      for (const auto& c : cols) obj[c] = cell_to_json(row.at(c));
      doc.push_back(std::move(obj));
    }
    return doc.dump(2) + "\n";
  }

  std::string out;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) out += ',';
    out += quote_csv(cols[i]);
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i) out += ',';
      out += quote_csv(format_cell(row.at(cols[i])));
    }
    out += '\n';
  }
  return out;
}

void write_table(std::span<const Row> rows, const std::filesystem::path& path, TableFormat format,
                 std::span<const std::string> columns) {
  const std::string text = format_table(rows, format, columns);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, kModule, "write_table", "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error(ErrorKind::io, kModule, "write_table", "write failed for " + path.string());
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::size_t TextTable::column_index(const std::string& name) const {
  auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw Error(ErrorKind::schema, kModule, "read_csv", "missing column '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

TextTable parse_csv(const std::string& text, const std::string& source) {
  TextTable table;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (!have_header) {
      table.columns = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != table.columns.size()) {
      throw Error(ErrorKind::parse, kModule, "read_csv",
                  source + " line " + std::to_string(line_no) + ": expected " +
                      std::to_string(table.columns.size()) + " fields, got " + std::to_string(fields.size()));
    }
    table.rows.push_back(std::move(fields));
  }
  if (!have_header) throw Error(ErrorKind::parse, kModule, "read_csv", source + " line 1: missing header row");
  return table;
}

std::string read_text_file(const std::filesystem::path& path, const std::string& module,
                           const std::string& operation) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, module, operation, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TextTable read_csv(const std::filesystem::path& path) {
  return parse_csv(read_text_file(path, kModule, "read_csv"), path.string());
}

}  // namespace sknaflow

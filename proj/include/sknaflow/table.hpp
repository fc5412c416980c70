#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace sknaflow {

using Cell = std::variant<std::int64_t, double, std::string>;
using Row = std::map<std::string, Cell>;

enum class TableFormat { csv, json };

// Reals are written with 9 significant digits. Without an explicit column
// list the columns are emitted in lexicographic order; an explicit list must
// name exactly the rows' key set.
std::string format_table(std::span<const Row> rows, TableFormat format,
                         std::span<const std::string> columns = {});

void write_table(std::span<const Row> rows, const std::filesystem::path& path, TableFormat format,
                 std::span<const std::string> columns = {});

std::string format_cell(const Cell& cell);

// Header-keyed CSV reader; every value comes back as text.
struct TextTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t column_index(const std::string& name) const;
};

TextTable parse_csv(const std::string& text, const std::string& source = "<memory>");
TextTable read_csv(const std::filesystem::path& path);

// Splits one CSV line, honouring double-quoted fields.
std::vector<std::string> split_csv_line(const std::string& line);

std::string read_text_file(const std::filesystem::path& path, const std::string& module,
                           const std::string& operation);

}  // namespace sknaflow

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace peg {

// One relational source table, all cells kept as UTF-8 strings.
struct RecordTable {
  using Row = std::vector<std::string>;

  std::string name;
  std::vector<std::string> columns;
  std::vector<Row> rows;

  std::optional<std::size_t> column_index(std::string_view column) const noexcept;
  // Throws CsvError when a row width differs from the header.
  void validate() const;

  friend bool operator==(const RecordTable&, const RecordTable&) = default;
};

// RFC-4180 CSV: header row required, comma separated, double-quote quoting,
// CRLF or LF line ends, optional UTF-8 BOM. Throws CsvError with a line number.
RecordTable parse_csv(std::string_view content, std::string table_name);
RecordTable read_csv_file(const std::filesystem::path& path, std::string table_name);

// Writes LF-terminated CSV, quoting only when a field needs it.
void write_csv(std::ostream& out, const RecordTable& table);
void write_csv_file(const std::filesystem::path& path, const RecordTable& table);

std::string csv_field(std::string_view value);
std::string csv_line(const std::vector<std::string>& fields);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace peg

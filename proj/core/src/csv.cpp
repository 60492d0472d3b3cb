#include <fstream>
#include <sstream>

#include "peg/errors.hpp"
#include "peg/table.hpp"

namespace peg {

std::optional<std::size_t> RecordTable::column_index(std::string_view column) const noexcept {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == column) return i;
  }
  return std::nullopt;
}

void RecordTable::validate() const {
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != columns.size()) {
      throw CsvError(name + ": row " + std::to_string(r) + " has " +
                     std::to_string(rows[r].size()) + " cells, expected " +
                     std::to_string(columns.size()));
    }
  }
}

RecordTable parse_csv(std::string_view content, std::string table_name) {
  if (content.starts_with("\xEF\xBB\xBF")) content.remove_prefix(3);

  std::vector<std::vector<std::string>> records;
  std::vector<std::size_t> record_lines;
  std::vector<std::string> record;
  std::string field;
  std::size_t line = 1;
  std::size_t record_line = 1;
  bool in_quotes = false;
  bool field_was_quoted = false;
  bool at_record_start = true;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_was_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record_lines.push_back(record_line);
    record.clear();
    at_record_start = true;
  };

  for (std::size_t i = 0; i < content.size(); ++i) {
    char c = content[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (at_record_start) {
      record_line = line;
      at_record_start = false;
    }
    switch (c) {
      case '"':
        if (!field.empty() || field_was_quoted) {
          throw CsvError(table_name + ": line " + std::to_string(line) +
                         ": quote inside unquoted field");
        }
        in_quotes = true;
        field_was_quoted = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < content.size() && content[i + 1] == '\n') ++i;
        [[fallthrough]];
      case '\n':
        end_record();
        ++line;
        break;
      default:
        if (field_was_quoted) {
          throw CsvError(table_name + ": line " + std::to_string(line) +
                         ": text after closing quote");
        }
        field.push_back(c);
    }
  }
  if (in_quotes) {
    throw CsvError(table_name + ": unterminated quoted field");
  }
  if (!at_record_start) end_record();

  // A blank line is a single empty field; drop those.
  RecordTable table;
  table.name = std::move(table_name);
  bool have_header = false;
  for (std::size_t r = 0; r < records.size(); ++r) {
    auto& rec = records[r];
    if (rec.size() == 1 && rec[0].empty()) continue;
    if (!have_header) {
      table.columns = std::move(rec);
      have_header = true;
      continue;
    }
    if (rec.size() != table.columns.size()) {
      throw CsvError(table.name + ": line " + std::to_string(record_lines[r]) + ": " +
                     std::to_string(rec.size()) + " cells, header has " +
                     std::to_string(table.columns.size()));
    }
    table.rows.push_back(std::move(rec));
  }
  if (!have_header) {
    throw CsvError(table.name + ": missing header row");
  }
  return table;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return std::move(ss).str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

RecordTable read_csv_file(const std::filesystem::path& path, std::string table_name) {
  return parse_csv(read_text_file(path), std::move(table_name));
}

std::string csv_field(std::string_view value) {
  bool quote = value.find_first_of(",\"\r\n") != std::string_view::npos ||
               (!value.empty() && (value.front() == ' ' || value.back() == ' '));
  if (!quote) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string csv_line(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += csv_field(fields[i]);
  }
  out.push_back('\n');
  return out;
}

void write_csv(std::ostream& out, const RecordTable& table) {
  out << csv_line(table.columns);
  for (const auto& row : table.rows) out << csv_line(row);
}

void write_csv_file(const std::filesystem::path& path, const RecordTable& table) {
  std::ostringstream ss;
  write_csv(ss, table);
  write_text_file(path, ss.str());
}

}  // namespace peg

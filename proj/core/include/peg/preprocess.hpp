#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "peg/decimal.hpp"
#include "peg/table.hpp"

namespace peg {

enum class MissingPolicy { DropRow, KeepEmpty };

struct UnitRule {
  std::string target_unit;
  Decimal factor;
};

// A numeric value column, the column holding its unit, and the column naming
// the measured quantity (e.g. the assay name).
struct UnitColumns {
  std::string value;
  std::string unit;
  std::string quantity;
};

struct TablePolicy {
  std::vector<std::string> qualitative;
  std::vector<UnitColumns> units;
  std::vector<std::string> multivalue;
  // Cells that must be non-empty; missing_policy decides what happens otherwise.
  std::vector<std::string> mandatory;
  // Primary-key column. When set, rows that explode into several rows get an
  // ordinal suffix ("213" -> "213_1", "213_2") so each keeps a unique key.
  std::optional<std::string> key;
};

struct NormalizationConfig {
  // Folded surface form -> canonical value.
  std::map<std::string, std::string> qualitative;
  std::map<std::pair<std::string, std::string>, UnitRule> units;
  std::vector<char32_t> split_delimiters;
  MissingPolicy missing_policy = MissingPolicy::DropRow;
  std::map<std::string, TablePolicy> table_policies;

  std::set<std::string> canonical_values() const;

  // Throws ConfigValidationError.
  void validate() const;

  // Throws ConfigParseError for malformed JSON or wrong member types, then
  // ConfigValidationError through validate().
  static NormalizationConfig from_json(std::string_view json_text);
  static NormalizationConfig load(const std::filesystem::path& path);
};

// Trims, maps fullwidth parentheses to ASCII and removes whitespace adjacent
// to a parenthesis; remaining whitespace runs collapse to one space.
std::string fold_qualitative(std::string_view cell);

std::string normalize_qualitative(std::string_view cell, const NormalizationConfig& config);

std::pair<Decimal, std::string> convert_unit(const Decimal& value, std::string_view quantity,
                                             std::string_view unit,
                                             const NormalizationConfig& config);

std::vector<std::string> split_multivalue(std::string_view cell,
                                          const NormalizationConfig& config);

// Throws ConfigValidationError when the table has no policy or the policy
// names unknown columns; MalformedNumber with table/row/column context.
RecordTable preprocess_table(const RecordTable& table, const NormalizationConfig& config);

}  // namespace peg

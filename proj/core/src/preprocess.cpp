#include "peg/preprocess.hpp"

#include <algorithm>

#include "json.hpp"
#include "peg/errors.hpp"
#include "peg/text.hpp"

namespace peg {

using json = nlohmann::json;

namespace {

bool is_paren(char32_t c) { return c == U'(' || c == U')'; }

Decimal decimal_from_json(const json& j, const std::string& where) {
  try {
    if (j.is_string()) return Decimal::parse(j.get<std::string>());
    if (j.is_number()) return Decimal::parse(j.dump());
  } catch (const MalformedNumber& e) {
    throw ConfigParseError(where + ": " + e.what());
  }
  throw ConfigParseError(where + ": expected a number or numeric string");
}

std::vector<std::string> string_list(const json& obj, const char* key, const std::string& where) {
  std::vector<std::string> out;
  if (!obj.contains(key)) return out;
  const auto& arr = obj.at(key);
  if (!arr.is_array()) throw ConfigParseError(where + "." + key + ": expected an array");
  for (const auto& v : arr) {
    if (!v.is_string()) throw ConfigParseError(where + "." + key + ": expected strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj.at(key).is_string()) {
    throw ConfigParseError(where + ": missing string member '" + key + "'");
  }
  return obj.at(key).get<std::string>();
}

}  // namespace

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

std::set<std::string> NormalizationConfig::canonical_values() const {
  std::set<std::string> out;
  for (const auto& [surface, canonical] : qualitative) out.insert(canonical);
  return out;
}

void NormalizationConfig::validate() const {
  if (!qualitative.empty()) {
    auto canon = canonical_values();
    for (const char* required : {"positive", "negative"}) {
      if (!canon.count(required)) {
        throw ConfigValidationError(std::string("qualitative: canonical value '") + required +
                                    "' is not produced by any mapping");
      }
    }
    for (const auto& c : canon) {
      auto it = qualitative.find(fold_qualitative(c));
      if (it != qualitative.end() && it->second != c) {
        throw ConfigValidationError("qualitative: canonical value '" + c +
                                    "' is itself remapped to '" + it->second + "'");
      }
    }
  }
  for (const auto& [key, rule] : units) {
    if (!rule.factor.is_positive()) {
      throw ConfigValidationError("units: factor for (" + key.first + ", " + key.second +
                                  ") must be strictly positive");
    }
    // Converting an already converted value must be the identity.
    auto again = units.find({key.first, rule.target_unit});
    if (again != units.end() &&
        !(again->second.target_unit == rule.target_unit &&
          again->second.factor == Decimal::parse("1"))) {
      throw ConfigValidationError("units: target unit '" + rule.target_unit + "' of '" +
                                  key.first + "' is itself converted");
    }
  }
  if (split_delimiters.empty()) {
    throw ConfigValidationError("delimiters: at least one delimiter is required");
  }
}

NormalizationConfig NormalizationConfig::from_json(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigParseError(std::string("normalization config: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigParseError("normalization config: expected an object");

  NormalizationConfig cfg;
  if (doc.contains("qualitative")) {
    const auto& q = doc.at("qualitative");
    if (!q.is_object()) throw ConfigParseError("qualitative: expected an object");
    for (const auto& [surface, canonical] : q.items()) {
      if (!canonical.is_string()) {
        throw ConfigParseError("qualitative." + surface + ": expected a string");
      }
      cfg.qualitative[fold_qualitative(surface)] = canonical.get<std::string>();
    }
  }

  if (doc.contains("units")) {
    const auto& u = doc.at("units");
    if (!u.is_array()) throw ConfigParseError("units: expected an array");
    for (std::size_t i = 0; i < u.size(); ++i) {
      std::string where = "units[" + std::to_string(i) + "]";
      const auto& rule = u[i];
      if (!rule.is_object()) throw ConfigParseError(where + ": expected an object");
      if (!rule.contains("factor")) throw ConfigParseError(where + ": missing 'factor'");
      auto key = std::make_pair(require_string(rule, "quantity", where),
                                require_string(rule, "from", where));
      UnitRule r{require_string(rule, "to", where),
                 decimal_from_json(rule.at("factor"), where + ".factor")};
      if (!cfg.units.emplace(key, r).second) {
        throw ConfigValidationError(where + ": duplicate rule for (" + key.first + ", " +
                                    key.second + ")");
      }
    }
  }

  if (doc.contains("delimiters")) {
    for (const auto& d : string_list(doc, "delimiters", "config")) {
      auto cps = text::decode_utf8(d);
      if (cps.size() != 1) {
        throw ConfigParseError("delimiters: '" + d + "' is not a single character");
      }
      cfg.split_delimiters.push_back(cps[0]);
    }
  } else {
    cfg.split_delimiters = {U',', U';', U' ', U'，', U'；'};
  }

  if (doc.contains("missing")) {
    const auto& m = doc.at("missing");
    if (m == "DropRow") {
      cfg.missing_policy = MissingPolicy::DropRow;
    } else if (m == "KeepEmpty") {
      cfg.missing_policy = MissingPolicy::KeepEmpty;
    } else {
      throw ConfigParseError("missing: expected \"DropRow\" or \"KeepEmpty\"");
    }
  }

  if (doc.contains("table_policies")) {
    const auto& tp = doc.at("table_policies");
    if (!tp.is_object()) throw ConfigParseError("table_policies: expected an object");
    for (const auto& [name, p] : tp.items()) {
      std::string where = "table_policies." + name;
      if (!p.is_object()) throw ConfigParseError(where + ": expected an object");
      TablePolicy policy;
      policy.qualitative = string_list(p, "qualitative", where);
      policy.multivalue = string_list(p, "multivalue", where);
      policy.mandatory = string_list(p, "mandatory", where);
      if (p.contains("key")) policy.key = require_string(p, "key", where);
      if (p.contains("units")) {
        if (!p.at("units").is_array()) throw ConfigParseError(where + ".units: expected an array");
        for (const auto& uc : p.at("units")) {
          policy.units.push_back({require_string(uc, "value", where + ".units"),
                                  require_string(uc, "unit", where + ".units"),
                                  require_string(uc, "quantity", where + ".units")});
        }
      }
      cfg.table_policies.emplace(name, std::move(policy));
    }
  }

  cfg.validate();
  return cfg;
}

NormalizationConfig NormalizationConfig::load(const std::filesystem::path& path) {
  return from_json(read_text_file(path));
}

// ---------------------------------------------------------------------------
// Cell operations
// ---------------------------------------------------------------------------

std::string fold_qualitative(std::string_view cell) {
  std::u32string cps = text::decode_utf8(cell);
  for (auto& c : cps) {
    if (c == U'（') c = U'(';
    if (c == U'）') c = U')';
  }
  std::u32string out;
  std::size_t i = 0;
  while (i < cps.size()) {
    if (!text::is_space(cps[i])) {
      out.push_back(cps[i++]);
      continue;
    }
    std::size_t j = i;
    while (j < cps.size() && text::is_space(cps[j])) ++j;
    bool at_edge = out.empty() || j == cps.size();
    bool near_paren = (!out.empty() && is_paren(out.back())) ||
                      (j < cps.size() && is_paren(cps[j]));
    if (!at_edge && !near_paren) out.push_back(U' ');
    i = j;
  }
  return text::encode_utf8(out);
}

std::string normalize_qualitative(std::string_view cell, const NormalizationConfig& config) {
  auto it = config.qualitative.find(fold_qualitative(cell));
  if (it != config.qualitative.end()) return it->second;
  return text::trim(cell);
}

std::pair<Decimal, std::string> convert_unit(const Decimal& value, std::string_view quantity,
                                             std::string_view unit,
                                             const NormalizationConfig& config) {
  auto it = config.units.find({std::string(quantity), std::string(unit)});
  if (it == config.units.end()) return {value, std::string(unit)};
  return {value * it->second.factor, it->second.target_unit};
}

std::vector<std::string> split_multivalue(std::string_view cell,
                                          const NormalizationConfig& config) {
  const auto& delims = config.split_delimiters;
  std::vector<std::string> out;
  std::u32string piece;
  auto flush = [&] {
    std::string t = text::trim(text::encode_utf8(piece));
    if (!t.empty()) out.push_back(std::move(t));
    piece.clear();
  };
  for (char32_t c : text::decode_utf8(cell)) {
    if (std::find(delims.begin(), delims.end(), c) != delims.end()) {
      flush();
    } else {
      piece.push_back(c);
    }
  }
  flush();
  return out;
}

// ---------------------------------------------------------------------------
// Table
// ---------------------------------------------------------------------------

namespace {

std::size_t require_column(const RecordTable& table, const std::string& column,
                           const char* role) {
  auto idx = table.column_index(column);
  if (!idx) {
    throw ConfigValidationError("table_policies." + table.name + ": " + role + " column '" +
                                column + "' not in table");
  }
  return *idx;
}

}  // namespace

RecordTable preprocess_table(const RecordTable& table, const NormalizationConfig& config) {
  table.validate();
  auto pit = config.table_policies.find(table.name);
  if (pit == config.table_policies.end()) {
    throw ConfigValidationError("no table policy for table '" + table.name + "'");
  }
  const TablePolicy& policy = pit->second;

  std::vector<std::size_t> qual_cols, multi_cols, mandatory_cols;
  for (const auto& c : policy.qualitative) qual_cols.push_back(require_column(table, c, "qualitative"));
  for (const auto& c : policy.multivalue) multi_cols.push_back(require_column(table, c, "multivalue"));
  for (const auto& c : policy.mandatory) mandatory_cols.push_back(require_column(table, c, "mandatory"));
  struct UnitIdx {
    std::size_t value, unit, quantity;
  };
  std::vector<UnitIdx> unit_cols;
  for (const auto& u : policy.units) {
    unit_cols.push_back({require_column(table, u.value, "unit value"),
                         require_column(table, u.unit, "unit"),
                         require_column(table, u.quantity, "unit quantity")});
  }
  std::optional<std::size_t> key_col;
  if (policy.key) key_col = require_column(table, *policy.key, "key");

  RecordTable out;
  out.name = table.name;
  out.columns = table.columns;

  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];

    // Cartesian explosion over the multi-value columns, first column outermost.
    std::vector<RecordTable::Row> exploded{row};
    for (std::size_t c : multi_cols) {
      auto values = split_multivalue(row[c], config);
      if (values.empty()) values.emplace_back();
      std::vector<RecordTable::Row> next;
      next.reserve(exploded.size() * values.size());
      for (const auto& partial : exploded) {
        for (const auto& v : values) {
          next.push_back(partial);
          next.back()[c] = v;
        }
      }
      exploded = std::move(next);
    }
    if (key_col && exploded.size() > 1) {
      for (std::size_t k = 0; k < exploded.size(); ++k) {
        exploded[k][*key_col] += "_" + std::to_string(k + 1);
      }
    }

    for (auto& cells : exploded) {
      for (std::size_t c : qual_cols) cells[c] = normalize_qualitative(cells[c], config);

      for (const auto& u : unit_cols) {
        std::string value = text::trim(cells[u.value]);
        if (value.empty()) continue;
        std::string unit = text::trim(cells[u.unit]);
        std::string quantity = text::trim(cells[u.quantity]);
        if (!config.units.count({quantity, unit})) continue;
        Decimal parsed;
        try {
          parsed = Decimal::parse(value);
        } catch (const MalformedNumber& e) {
          throw MalformedNumber(table.name + ": row " + std::to_string(r) + ", column '" +
                                table.columns[u.value] + "': " + e.what());
        }
        auto [converted, target] = convert_unit(parsed, quantity, unit, config);
        cells[u.value] = converted.to_string();
        cells[u.unit] = std::move(target);
      }

      bool missing = std::any_of(mandatory_cols.begin(), mandatory_cols.end(),
                                 [&](std::size_t c) { return text::trim(cells[c]).empty(); });
      if (missing && config.missing_policy == MissingPolicy::DropRow) continue;
      out.rows.push_back(std::move(cells));
    }
  }
  return out;
}

}  // namespace peg

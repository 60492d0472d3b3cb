#include "peg/mapping.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>

#include "json.hpp"
#include "peg/errors.hpp"
#include "peg/text.hpp"

namespace peg {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Config loading
// ---------------------------------------------------------------------------

const TriplesMap* MappingConfig::find(std::string_view table) const noexcept {
  for (const auto& m : maps) {
    if (m.table == table) return &m;
  }
  return nullptr;
}

namespace {

std::string get_string(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key) || !obj.at(key).is_string()) {
    throw ConfigParseError(where + ": missing string field '" + key + "'");
  }
  return obj.at(key).get<std::string>();
}

Iri parse_vocab_iri(const std::string& text, const std::string& where) {
  try {
    return Iri::parse_prefixed(text);
  } catch (const ModelError& e) {
    throw ConfigValidationError(where + ": " + e.what());
  }
}

bool is_class_iri(const Iri& iri) {
  return iri == vocab::patient_class() || entity_kind_of_class(iri) || event_kind_of_class(iri);
}

}  // namespace

MappingConfig parse_mapping_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigParseError(std::string("mapping config: ") + e.what());
  }

  MappingConfig cfg;
  const json* maps = nullptr;
  if (doc.is_array()) {
    maps = &doc;
  } else if (doc.is_object() && doc.contains("maps") && doc.at("maps").is_array()) {
    maps = &doc.at("maps");
  } else {
    throw ConfigParseError("mapping config: expected an array of maps or {\"maps\": [...]}");
  }

  if (doc.is_object() && doc.contains("tables")) {
    const auto& tables = doc.at("tables");
    if (!tables.is_object()) throw ConfigParseError("tables: expected an object");
    for (const auto& [name, cols] : tables.items()) {
      if (!cols.is_array()) throw ConfigParseError("tables." + name + ": expected an array");
      std::vector<std::string> columns;
      for (const auto& c : cols) {
        if (!c.is_string()) throw ConfigParseError("tables." + name + ": expected strings");
        columns.push_back(c.get<std::string>());
      }
      cfg.tables.emplace(name, std::move(columns));
    }
  }

  if (maps->empty()) throw ConfigValidationError("mapping config: no triples maps");

  std::set<std::string> seen_tables;
  for (std::size_t i = 0; i < maps->size(); ++i) {
    const json& m = (*maps)[i];
    std::string where = "maps[" + std::to_string(i) + "]";
    if (!m.is_object()) throw ConfigParseError(where + ": expected an object");

    std::string table = get_string(m, "table", where);
    where += " (" + table + ")";
    std::string subject = get_string(m, "subjectColumn", where);
    Iri type = parse_vocab_iri(get_string(m, "type", where), where + ".type");
    if (type.ns() != Namespace::PegO || !is_class_iri(type)) {
      throw ConfigValidationError(where + ".type: " + type.prefixed() +
                                  " is not a peg-o class");
    }
    if (!seen_tables.insert(table).second) {
      throw ConfigValidationError(where + ": second map for the same table");
    }

    const std::vector<std::string>* columns = nullptr;
    if (!cfg.tables.empty()) {
      auto it = cfg.tables.find(table);
      if (it == cfg.tables.end()) {
        throw ConfigValidationError(where + ".table: unknown table '" + table + "'");
      }
      columns = &it->second;
    }
    auto check_column = [&](const std::string& col, const std::string& field) {
      if (columns && std::find(columns->begin(), columns->end(), col) == columns->end()) {
        throw ConfigValidationError(where + "." + field + ": unknown column '" + col + "'");
      }
    };
    check_column(subject, "subjectColumn");

    TriplesMap tm{table, subject, type, {}};
    if (!m.contains("predicateObjectMaps") || !m.at("predicateObjectMaps").is_array()) {
      throw ConfigParseError(where + ": missing array 'predicateObjectMaps'");
    }
    const auto& poms = m.at("predicateObjectMaps");
    for (std::size_t k = 0; k < poms.size(); ++k) {
      const json& p = poms[k];
      std::string pw = where + ".predicateObjectMaps[" + std::to_string(k) + "]";
      std::string column = get_string(p, "column", pw);
      check_column(column, "predicateObjectMaps[" + std::to_string(k) + "].column");
      Iri predicate = parse_vocab_iri(get_string(p, "predicate", pw), pw + ".predicate");
      if (!vocab::contains(predicate) || predicate == vocab::rdf_type()) {
        throw ConfigValidationError(pw + ".predicate: " + predicate.prefixed() +
                                    " is not a vocabulary property");
      }
      PredicateObjectMap pom{column, predicate, ObjectKind::Literal, std::nullopt, std::nullopt,
                             false};
      std::string object = p.contains("object") ? get_string(p, "object", pw) : "literal";
      if (object == "literal") {
        if (p.contains("datatype")) {
          std::string dt = get_string(p, "datatype", pw);
          pom.datatype = datatype_from_name(dt);
          if (!pom.datatype) throw ConfigValidationError(pw + ".datatype: unknown '" + dt + "'");
        }
      } else if (object == "ref") {
        pom.object_kind = ObjectKind::ResourceRef;
      } else if (object == "entity") {
        pom.object_kind = ObjectKind::EntityRef;
        std::string kind = get_string(p, "entity", pw);
        pom.entity_kind = entity_kind_from_string(kind);
        if (!pom.entity_kind) {
          throw ConfigValidationError(pw + ".entity: unknown entity kind '" + kind + "'");
        }
      } else {
        throw ConfigValidationError(pw + ".object: expected literal, ref or entity");
      }
      if (p.contains("required")) {
        if (!p.at("required").is_boolean()) throw ConfigParseError(pw + ".required: expected bool");
        pom.required = p.at("required").get<bool>();
      }
      tm.pom.push_back(std::move(pom));
    }
    cfg.maps.push_back(std::move(tm));
  }
  return cfg;
}

MappingConfig load_mapping_config(const std::filesystem::path& path) {
  return parse_mapping_config(read_text_file(path));
}

// ---------------------------------------------------------------------------
// Entity registry
// ---------------------------------------------------------------------------

namespace {

std::string lower_kind(EntityKind kind) {
  std::string s(to_string(kind));
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// Counter value embedded in a minted id, or 0 for ids minted elsewhere.
std::uint64_t counter_of(const Iri& id) {
  const auto& local = id.local();
  auto dash = local.rfind('-');
  if (dash == std::string::npos) return 0;
  std::uint64_t v = 0;
  auto r = std::from_chars(local.data() + dash + 1, local.data() + local.size(), v);
  return (r.ec == std::errc{} && r.ptr == local.data() + local.size()) ? v : 0;
}

}  // namespace

EntityRegistry::EntityRegistry(const EntityRegistry& other) {
  std::lock_guard lock(other.mu_);
  ids_ = other.ids_;
  next_ = other.next_;
}

EntityRegistry& EntityRegistry::operator=(const EntityRegistry& other) {
  if (this == &other) return *this;
  std::scoped_lock lock(mu_, other.mu_);
  ids_ = other.ids_;
  next_ = other.next_;
  return *this;
}

Iri EntityRegistry::resolve(EntityKind kind, std::string_view label) {
  std::string key = text::trim(label);
  std::lock_guard lock(mu_);
  auto it = ids_.find({kind, key});
  if (it != ids_.end()) return it->second;
  Iri id = peg_r(lower_kind(kind) + "-" + std::to_string(next_++));
  ids_.emplace(std::make_pair(kind, std::move(key)), id);
  return id;
}

std::optional<Iri> EntityRegistry::find(EntityKind kind, std::string_view label) const {
  std::lock_guard lock(mu_);
  auto it = ids_.find({kind, text::trim(label)});
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

void EntityRegistry::insert(EntityKind kind, std::string label, Iri id) {
  std::lock_guard lock(mu_);
  label = text::trim(label);
  if (ids_.count({kind, label})) {
    throw ModelError("registry already holds " + std::string(to_string(kind)) + " '" + label + "'");
  }
  for (const auto& [k, existing] : ids_) {
    if (existing == id) throw ModelError("registry id " + id.prefixed() + " already in use");
  }
  next_ = std::max(next_, counter_of(id) + 1);
  ids_.emplace(std::make_pair(kind, std::move(label)), std::move(id));
}

std::size_t EntityRegistry::size() const {
  std::lock_guard lock(mu_);
  return ids_.size();
}

std::vector<MedicalEntity> EntityRegistry::entities() const {
  std::vector<MedicalEntity> out;
  {
    std::lock_guard lock(mu_);
    out.reserve(ids_.size());
    for (const auto& [key, id] : ids_) out.push_back(MedicalEntity{id, key.first, key.second});
  }
  std::sort(out.begin(), out.end(),
            [](const MedicalEntity& a, const MedicalEntity& b) { return a.id < b.id; });
  return out;
}

std::vector<Triple> EntityRegistry::to_triples() const {
  std::vector<Triple> out;
  for (const auto& e : entities()) {
    auto t = entity_to_triples(e);
    out.insert(out.end(), t.begin(), t.end());
  }
  return out;
}

std::string EntityRegistry::to_json() const {
  json doc;
  json entries = json::array();
  std::uint64_t next;
  {
    std::lock_guard lock(mu_);
    next = next_;
    for (const auto& [key, id] : ids_) {
      entries.push_back({{"kind", std::string(to_string(key.first))},
                         {"label", key.second},
                         {"id", id.local()}});
    }
  }
  doc["next"] = next;
  doc["entities"] = std::move(entries);
  return doc.dump(2) + "\n";
}

EntityRegistry EntityRegistry::from_json(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigParseError(std::string("entity registry: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("entities") || !doc.at("entities").is_array()) {
    throw ConfigParseError("entity registry: expected {\"entities\": [...]}");
  }
  EntityRegistry reg;
  for (const auto& e : doc.at("entities")) {
    std::string kind_name = get_string(e, "kind", "entity registry");
    auto kind = entity_kind_from_string(kind_name);
    if (!kind) throw ConfigValidationError("entity registry: unknown kind '" + kind_name + "'");
    try {
      reg.insert(*kind, get_string(e, "label", "entity registry"),
                 peg_r(get_string(e, "id", "entity registry")));
    } catch (const ModelError& ex) {
      throw ConfigValidationError(std::string("entity registry: ") + ex.what());
    }
  }
  if (doc.contains("next")) {
    if (!doc.at("next").is_number_unsigned()) {
      throw ConfigParseError("entity registry: 'next' must be a non-negative integer");
    }
    reg.next_ = std::max(reg.next_, doc.at("next").get<std::uint64_t>());
  }
  return reg;
}

EntityRegistry EntityRegistry::load(const std::filesystem::path& path) {
  return from_json(read_text_file(path));
}

void EntityRegistry::save(const std::filesystem::path& path) const {
  write_text_file(path, to_json());
}

// ---------------------------------------------------------------------------
// Row mapping
// ---------------------------------------------------------------------------

namespace {

struct ResolvedMap {
  std::size_t pk;
  std::vector<std::size_t> cols;
};

ResolvedMap resolve_columns(const RecordTable& table, const TriplesMap& map) {
  if (table.name != map.table) {
    throw ConfigValidationError("triples map for '" + map.table + "' applied to table '" +
                                table.name + "'");
  }
  auto col = [&](const std::string& name) {
    auto idx = table.column_index(name);
    if (!idx) {
      throw ConfigValidationError("triples map " + map.table + ": column '" + name +
                                  "' not in table");
    }
    return *idx;
  };
  ResolvedMap r{col(map.subject_pk_column), {}};
  for (const auto& p : map.pom) r.cols.push_back(col(p.column));
  return r;
}

Literal make_literal(const std::string& cell, std::optional<Datatype> dt) {
  if (!dt) return Literal::plain(cell);
  if (*dt == Datatype::Date || *dt == Datatype::DateTime) {
    auto ts = Timestamp::try_parse(cell);
    if (!ts) throw InvalidLiteral("'" + cell + "' is not an ISO-8601 date or date-time");
    return Literal::of(*ts);
  }
  return Literal::typed(cell, *dt);
}

}  // namespace

std::vector<Triple> apply_triples_map(const RecordTable& table, const TriplesMap& map,
                                      EntityRegistry& registry) {
  table.validate();
  ResolvedMap cols = resolve_columns(table, map);

  std::vector<Triple> out;
  out.reserve(table.rows.size() * (1 + map.pom.size()));
  std::set<std::string> seen_keys;
  const Iri type = vocab::rdf_type();

  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    std::string pk = text::trim(row[cols.pk]);
    if (pk.empty()) throw MissingRequiredCell(r, map.subject_pk_column);
    if (!seen_keys.insert(pk).second) {
      throw DuplicatePrimaryKey(map.table + ": primary key '" + pk + "' appears twice (row " +
                                std::to_string(r) + ")");
    }
    Iri subject = peg_r(text::percent_encode_iri_local(pk));
    out.emplace_back(subject, type, map.type_iri);

    for (std::size_t k = 0; k < map.pom.size(); ++k) {
      const auto& pom = map.pom[k];
      std::string cell = text::trim(row[cols.cols[k]]);
      if (cell.empty()) {
        if (pom.required) throw MissingRequiredCell(r, pom.column);
        continue;
      }
      switch (pom.object_kind) {
        case ObjectKind::Literal:
          try {
            out.emplace_back(subject, pom.predicate, make_literal(cell, pom.datatype));
          } catch (const InvalidLiteral& e) {
            throw InvalidLiteral(map.table + ": row " + std::to_string(r) + ", column '" +
                                 pom.column + "': " + e.what());
          }
          break;
        case ObjectKind::ResourceRef:
          out.emplace_back(subject, pom.predicate, peg_r(text::percent_encode_iri_local(cell)));
          break;
        case ObjectKind::EntityRef:
          out.emplace_back(subject, pom.predicate, registry.resolve(*pom.entity_kind, cell));
          break;
      }
    }
  }
  return out;
}

std::size_t expected_triple_count(const RecordTable& table, const TriplesMap& map) {
  ResolvedMap cols = resolve_columns(table, map);
  std::size_t n = 0;
  for (const auto& row : table.rows) {
    n += 1;
    for (std::size_t c : cols.cols) {
      if (!text::trim(row[c]).empty()) ++n;
    }
  }
  return n;
}

}  // namespace peg

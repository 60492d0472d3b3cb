#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "peg/model.hpp"
#include "peg/table.hpp"

namespace peg {

enum class ObjectKind {
  Literal,      // typed or plain literal from the cell
  ResourceRef,  // foreign key: peg-r IRI built from the cell
  EntityRef,    // medical entity label resolved through the EntityRegistry
};

struct PredicateObjectMap {
  std::string column;
  Iri predicate;
  ObjectKind object_kind = ObjectKind::Literal;
  std::optional<Datatype> datatype;      // Literal only; nullopt = plain
  std::optional<EntityKind> entity_kind; // EntityRef only
  bool required = false;
};

struct TriplesMap {
  std::string table;
  std::string subject_pk_column;
  Iri type_iri;
  std::vector<PredicateObjectMap> pom;
};

// Parsed mapping document: declared source-table schemas plus the maps, in
// the order they are applied.
struct MappingConfig {
  std::map<std::string, std::vector<std::string>> tables;
  std::vector<TriplesMap> maps;

  const TriplesMap* find(std::string_view table) const noexcept;
};

// Throws ConfigParseError / ConfigValidationError naming the map and field.
MappingConfig parse_mapping_config(std::string_view json_text);
MappingConfig load_mapping_config(const std::filesystem::path& path);

// Deterministic (kind, label) -> peg-r id assignment. The first occurrence of
// a label mints "<kind>-<n>" from a counter shared by all kinds.
class EntityRegistry {
 public:
  EntityRegistry() = default;
  EntityRegistry(const EntityRegistry& other);
  EntityRegistry& operator=(const EntityRegistry& other);

  // Returns the id for (kind, trimmed label), minting one when unseen.
  Iri resolve(EntityKind kind, std::string_view label);
  std::optional<Iri> find(EntityKind kind, std::string_view label) const;
  // Pins an explicit id; throws ModelError when the key or id is taken.
  void insert(EntityKind kind, std::string label, Iri id);

  std::size_t size() const;
  // Sorted by id.
  std::vector<MedicalEntity> entities() const;
  std::vector<Triple> to_triples() const;

  std::string to_json() const;
  static EntityRegistry from_json(std::string_view json_text);
  static EntityRegistry load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

 private:
  mutable std::mutex mu_;
  std::map<std::pair<EntityKind, std::string>, Iri> ids_;
  std::uint64_t next_ = 1;
};

// Maps each row to (subject rdf:type type_iri) plus one triple per non-empty
// pom cell. Output order: row order, then pom order.
// Throws MissingRequiredCell, DuplicatePrimaryKey, InvalidLiteral and
// ConfigValidationError (table/map mismatch).
std::vector<Triple> apply_triples_map(const RecordTable& table, const TriplesMap& map,
                                      EntityRegistry& registry);

// Closed form of the count law: Σ rows (1 + non-empty mapped cells).
std::size_t expected_triple_count(const RecordTable& table, const TriplesMap& map);

}  // namespace peg

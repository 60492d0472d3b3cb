#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "peg/timestamp.hpp"

namespace peg {

// ---------------------------------------------------------------------------
// Namespaces and IRIs
// ---------------------------------------------------------------------------

enum class Namespace : std::uint8_t { PegO, PegR, Sem, Rdf, Rdfs, Skos };

inline constexpr Namespace kAllNamespaces[] = {
    Namespace::PegO, Namespace::PegR, Namespace::Sem,
    Namespace::Rdf,  Namespace::Rdfs, Namespace::Skos};

// "peg-o", "peg-r", "sem", ...
std::string_view prefix_label(Namespace ns) noexcept;
// Absolute base URI, e.g. "http://peg.ecustnlplab.com/ontology#".
std::string_view base_uri(Namespace ns) noexcept;
std::optional<Namespace> namespace_from_label(std::string_view label) noexcept;

// An IRI restricted to the fixed prefix table: namespace plus local name.
class Iri {
 public:
  // Throws ModelError when local is empty or contains whitespace, '<' or '>'.
  Iri(Namespace ns, std::string local);

  // "peg-r:859". Throws ModelError on an unknown prefix.
  static Iri parse_prefixed(std::string_view text);
  // Resolves an absolute IRI against the prefix table; nullopt when no base
  // matches or the remaining local name is invalid.
  static std::optional<Iri> from_absolute(std::string_view absolute);

  Namespace ns() const noexcept { return ns_; }
  const std::string& local() const noexcept { return local_; }

  std::string absolute() const;
  std::string prefixed() const;

  friend bool operator==(const Iri&, const Iri&) = default;
  friend auto operator<=>(const Iri&, const Iri&) = default;

 private:
  Namespace ns_;
  std::string local_;
};

inline Iri peg_o(std::string local) { return Iri(Namespace::PegO, std::move(local)); }
inline Iri peg_r(std::string local) { return Iri(Namespace::PegR, std::move(local)); }

// ---------------------------------------------------------------------------
// Literals, terms and triples
// ---------------------------------------------------------------------------

enum class Datatype : std::uint8_t { String, Date, DateTime, Integer, Decimal };

std::string_view datatype_name(Datatype dt) noexcept;  // "date", ...
std::string_view datatype_iri(Datatype dt) noexcept;   // xsd IRI
std::optional<Datatype> datatype_from_iri(std::string_view iri) noexcept;
std::optional<Datatype> datatype_from_name(std::string_view name) noexcept;

struct Literal {
  std::string lexical;
  std::optional<Datatype> datatype;

  static Literal plain(std::string lexical) { return {std::move(lexical), std::nullopt}; }
  // Validates the lexical form against the datatype; throws InvalidLiteral.
  static Literal typed(std::string lexical, Datatype dt);
  // Typed date when day-granular, dateTime otherwise.
  static Literal of(const Timestamp& ts);

  friend bool operator==(const Literal&, const Literal&) = default;
  friend auto operator<=>(const Literal&, const Literal&) = default;
};

using Term = std::variant<Iri, Literal>;

class Triple {
 public:
  // Throws ModelError when the predicate lives in the resource namespace.
  Triple(Iri subject, Iri predicate, Term object);

  const Iri& subject() const noexcept { return subject_; }
  const Iri& predicate() const noexcept { return predicate_; }
  const Term& object() const noexcept { return object_; }

  friend bool operator==(const Triple&, const Triple&) = default;
  friend auto operator<=>(const Triple&, const Triple&) = default;

 private:
  Iri subject_;
  Iri predicate_;
  Term object_;
};

// ---------------------------------------------------------------------------
// Vocabulary
// ---------------------------------------------------------------------------

namespace vocab {
Iri rdf_type();
Iri rdfs_label();
Iri rdfs_subclass_of();
Iri skos_exact_match();
Iri sem_event();
Iri sem_actor();
Iri sem_object();
Iri sem_has_actor();
Iri sem_has_begin();
Iri sem_has_end();
Iri patient_class();
Iri gender();
Iri birthday();
Iri situation();
Iri assay_result();
Iri assay_prompt();

// Closed-world membership: true for every class and property the toolkit
// may emit, false for anything else (including all peg-r resources).
bool contains(const Iri& iri);
}  // namespace vocab

// ---------------------------------------------------------------------------
// Domain kinds
// ---------------------------------------------------------------------------

enum class EntityKind : std::uint8_t { Disease, Drug, Assay, Surgery };
enum class EventKind : std::uint8_t { Hospitalization, Diagnosis, Drug, Assay, Surgery };
enum class RelationKind : std::uint8_t { Before, After, Concurrent, During, Overlap };

inline constexpr EntityKind kAllEntityKinds[] = {
    EntityKind::Disease, EntityKind::Drug, EntityKind::Assay, EntityKind::Surgery};
inline constexpr EventKind kAllEventKinds[] = {
    EventKind::Hospitalization, EventKind::Diagnosis, EventKind::Drug,
    EventKind::Assay, EventKind::Surgery};
inline constexpr RelationKind kAllRelationKinds[] = {
    RelationKind::Before, RelationKind::After, RelationKind::Concurrent,
    RelationKind::During, RelationKind::Overlap};

std::string_view to_string(EntityKind k) noexcept;    // "Disease"
std::string_view to_string(EventKind k) noexcept;     // "DiagnosisEvent"
std::string_view to_string(RelationKind k) noexcept;  // "Before"

std::optional<EntityKind> entity_kind_from_string(std::string_view s) noexcept;
std::optional<EventKind> event_kind_from_string(std::string_view s) noexcept;
std::optional<RelationKind> relation_kind_from_string(std::string_view s) noexcept;

Iri class_iri(EntityKind k);
Iri class_iri(EventKind k);
Iri relation_predicate(RelationKind k);

std::optional<EntityKind> entity_kind_of_class(const Iri& cls) noexcept;
std::optional<EventKind> event_kind_of_class(const Iri& cls) noexcept;
std::optional<RelationKind> relation_of_predicate(const Iri& pred) noexcept;

// ---------------------------------------------------------------------------
// Typed records
// ---------------------------------------------------------------------------

class Interval {
 public:
  // Throws ModelError when end < begin.
  Interval(Timestamp begin, Timestamp end);
  static Interval point(Timestamp at) { return Interval(at, at); }

  const Timestamp& begin() const noexcept { return begin_; }
  const Timestamp& end() const noexcept { return end_; }
  bool is_point() const noexcept { return begin_ == end_; }

  friend bool operator==(const Interval&, const Interval&) = default;

 private:
  Timestamp begin_;
  Timestamp end_;
};

struct PatientEntity {
  Iri id;
  std::string gender;
  std::optional<Timestamp> birthday;

  friend bool operator==(const PatientEntity&, const PatientEntity&) = default;
};

struct MedicalEntity {
  Iri id;
  EntityKind kind;
  std::string label;

  friend bool operator==(const MedicalEntity&, const MedicalEntity&) = default;
};

struct MedicalEvent {
  Iri id;
  EventKind kind;
  Iri patient;
  std::vector<Iri> entities;
  Interval interval;
  std::map<Iri, Literal> props;

  friend bool operator==(const MedicalEvent&, const MedicalEvent&) = default;
};

// Throws ModelError when a Diagnosis/Assay/Surgery event carries a period.
void validate(const MedicalEvent& event);

struct TemporalEdge {
  Iri from;
  Iri to;
  RelationKind rel;

  friend bool operator==(const TemporalEdge&, const TemporalEdge&) = default;
  friend auto operator<=>(const TemporalEdge&, const TemporalEdge&) = default;
};

// ---------------------------------------------------------------------------
// Triple emission
// ---------------------------------------------------------------------------

// Order: type, patient actor, entity actors, begin, end (periods only),
// then props in key order.
std::vector<Triple> event_to_triples(const MedicalEvent& event);
std::vector<Triple> entity_to_triples(const PatientEntity& patient);
std::vector<Triple> entity_to_triples(const MedicalEntity& entity);

// Regroups triples by subject and rebuilds every event. The patient actor is
// recognised by an rdf:type peg-o:Patient triple somewhere in the input;
// other actors become entities (sorted). Events are returned in id order.
// Throws ModelError for events without a patient or begin timestamp.
std::vector<MedicalEvent> decode_events(std::span<const Triple> triples);

}  // namespace peg

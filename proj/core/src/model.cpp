#include "peg/model.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <unordered_map>

#include "peg/decimal.hpp"
#include "peg/errors.hpp"
#include "peg/text.hpp"

namespace peg {

// ---------------------------------------------------------------------------
// Prefix table
// ---------------------------------------------------------------------------

namespace {

struct PrefixEntry {
  Namespace ns;
  std::string_view label;
  std::string_view base;
};

constexpr std::array<PrefixEntry, 6> kPrefixTable{{
    {Namespace::PegO, "peg-o", "http://peg.ecustnlplab.com/ontology#"},
    {Namespace::PegR, "peg-r", "http://peg.ecustnlplab.com/resource/"},
    {Namespace::Sem, "sem", "https://semanticweb.cs.vu.nl/2009/11/sem/"},
    {Namespace::Rdf, "rdf", "http://www.w3.org/1999/02/22-rdf-syntax-ns#"},
    {Namespace::Rdfs, "rdfs", "http://www.w3.org/2000/01/rdf-schema#"},
    {Namespace::Skos, "skos", "http://www.w3.org/2004/02/skos/core#"},
}};

constexpr std::string_view kXsd = "http://www.w3.org/2001/XMLSchema#";

bool valid_local(std::string_view local) {
  if (local.empty()) return false;
  if (local.find_first_of("<>") != std::string_view::npos) return false;
  return !text::contains_space(local);
}

bool is_integer_lexical(std::string_view s) {
  if (!s.empty() && (s[0] == '+' || s[0] == '-')) s.remove_prefix(1);
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

std::string_view prefix_label(Namespace ns) noexcept {
  return kPrefixTable[static_cast<std::size_t>(ns)].label;
}

std::string_view base_uri(Namespace ns) noexcept {
  return kPrefixTable[static_cast<std::size_t>(ns)].base;
}

std::optional<Namespace> namespace_from_label(std::string_view label) noexcept {
  for (const auto& e : kPrefixTable) {
    if (e.label == label) return e.ns;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Iri
// ---------------------------------------------------------------------------

Iri::Iri(Namespace ns, std::string local) : ns_(ns), local_(std::move(local)) {
  if (!valid_local(local_)) {
    throw ModelError("invalid IRI local name: '" + local_ + "'");
  }
}

Iri Iri::parse_prefixed(std::string_view text) {
  auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw ModelError("expected prefixed name, got '" + std::string(text) + "'");
  }
  auto ns = namespace_from_label(text.substr(0, colon));
  if (!ns) {
    throw ModelError("unknown prefix in '" + std::string(text) + "'");
  }
  return Iri(*ns, std::string(text.substr(colon + 1)));
}

std::optional<Iri> Iri::from_absolute(std::string_view absolute) {
  const PrefixEntry* best = nullptr;
  for (const auto& e : kPrefixTable) {
    if (absolute.starts_with(e.base) && (!best || e.base.size() > best->base.size())) {
      best = &e;
    }
  }
  if (!best) return std::nullopt;
  auto local = absolute.substr(best->base.size());
  if (!valid_local(local)) return std::nullopt;
  return Iri(best->ns, std::string(local));
}

std::string Iri::absolute() const {
  std::string out(base_uri(ns_));
  out += local_;
  return out;
}

std::string Iri::prefixed() const {
  std::string out(prefix_label(ns_));
  out += ':';
  out += local_;
  return out;
}

// ---------------------------------------------------------------------------
// Literals
// ---------------------------------------------------------------------------

namespace {
constexpr std::array<std::string_view, 5> kDatatypeNames{"string", "date", "dateTime",
                                                         "integer", "decimal"};
}

std::string_view datatype_name(Datatype dt) noexcept {
  return kDatatypeNames[static_cast<std::size_t>(dt)];
}

std::string_view datatype_iri(Datatype dt) noexcept {
  static const std::array<std::string, 5> iris = [] {
    std::array<std::string, 5> a;
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = std::string(kXsd) + std::string(kDatatypeNames[i]);
    }
    return a;
  }();
  return iris[static_cast<std::size_t>(dt)];
}

std::optional<Datatype> datatype_from_name(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kDatatypeNames.size(); ++i) {
    if (kDatatypeNames[i] == name) return static_cast<Datatype>(i);
  }
  return std::nullopt;
}

std::optional<Datatype> datatype_from_iri(std::string_view iri) noexcept {
  if (!iri.starts_with(kXsd)) return std::nullopt;
  return datatype_from_name(iri.substr(kXsd.size()));
}

Literal Literal::typed(std::string lexical, Datatype dt) {
  bool ok = true;
  switch (dt) {
    case Datatype::String:
      break;
    case Datatype::Date: {
      auto ts = Timestamp::try_parse(lexical);
      ok = ts && !ts->has_time_of_day() && ts->to_string() == lexical;
      break;
    }
    case Datatype::DateTime: {
      auto ts = Timestamp::try_parse(lexical);
      ok = ts && ts->has_time_of_day();
      break;
    }
    case Datatype::Integer:
      ok = is_integer_lexical(lexical);
      break;
    case Datatype::Decimal:
      ok = Decimal::is_valid(lexical);
      break;
  }
  if (!ok) {
    throw InvalidLiteral("'" + lexical + "' is not a valid " +
                         std::string(datatype_name(dt)) + " literal");
  }
  return Literal{std::move(lexical), dt};
}

Literal Literal::of(const Timestamp& ts) {
  return Literal{ts.to_string(), ts.has_time_of_day() ? Datatype::DateTime : Datatype::Date};
}

// ---------------------------------------------------------------------------
// Triple
// ---------------------------------------------------------------------------

Triple::Triple(Iri subject, Iri predicate, Term object)
    : subject_(std::move(subject)), predicate_(std::move(predicate)), object_(std::move(object)) {
  if (predicate_.ns() == Namespace::PegR) {
    throw ModelError("predicate must be a vocabulary term, got " + predicate_.prefixed());
  }
}

// ---------------------------------------------------------------------------
// Vocabulary
// ---------------------------------------------------------------------------

namespace vocab {

Iri rdf_type() { return Iri(Namespace::Rdf, "type"); }
Iri rdfs_label() { return Iri(Namespace::Rdfs, "label"); }
Iri rdfs_subclass_of() { return Iri(Namespace::Rdfs, "subClassOf"); }
Iri skos_exact_match() { return Iri(Namespace::Skos, "exactMatch"); }
Iri sem_event() { return Iri(Namespace::Sem, "Event"); }
Iri sem_actor() { return Iri(Namespace::Sem, "Actor"); }
Iri sem_object() { return Iri(Namespace::Sem, "Object"); }
Iri sem_has_actor() { return Iri(Namespace::Sem, "hasActor"); }
Iri sem_has_begin() { return Iri(Namespace::Sem, "hasBeginTimeStamp"); }
Iri sem_has_end() { return Iri(Namespace::Sem, "hasEndTimeStamp"); }
Iri patient_class() { return peg_o("Patient"); }
Iri gender() { return peg_o("gender"); }
Iri birthday() { return peg_o("birthday"); }
Iri situation() { return peg_o("situation"); }
Iri assay_result() { return peg_o("assayResult"); }
Iri assay_prompt() { return peg_o("assayPrompt"); }

bool contains(const Iri& iri) {
  static const std::set<Iri> members = [] {
    std::set<Iri> s{rdf_type(),      rdfs_label(),    rdfs_subclass_of(), skos_exact_match(),
                    sem_event(),     sem_actor(),     sem_object(),       sem_has_actor(),
                    sem_has_begin(), sem_has_end(),   patient_class(),    gender(),
                    birthday(),      situation(),     assay_result(),     assay_prompt()};
    for (auto k : kAllEntityKinds) s.insert(class_iri(k));
    for (auto k : kAllEventKinds) s.insert(class_iri(k));
    for (auto k : kAllRelationKinds) s.insert(relation_predicate(k));
    return s;
  }();
  return members.count(iri) != 0;
}

}  // namespace vocab

// ---------------------------------------------------------------------------
// Domain kinds
// ---------------------------------------------------------------------------

namespace {
constexpr std::array<std::string_view, 4> kEntityNames{"Disease", "Drug", "Assay", "Surgery"};
constexpr std::array<std::string_view, 5> kEventNames{
    "HospitalizationEvent", "DiagnosisEvent", "DrugEvent", "AssayEvent", "SurgeryEvent"};
constexpr std::array<std::string_view, 5> kRelationNames{"Before", "After", "Concurrent",
                                                         "During", "Overlap"};

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::string_view, N>& names, std::string_view s) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == s) return static_cast<Enum>(i);
  }
  return std::nullopt;
}
}  // namespace

std::string_view to_string(EntityKind k) noexcept { return kEntityNames[static_cast<std::size_t>(k)]; }
std::string_view to_string(EventKind k) noexcept { return kEventNames[static_cast<std::size_t>(k)]; }
std::string_view to_string(RelationKind k) noexcept {
  return kRelationNames[static_cast<std::size_t>(k)];
}

std::optional<EntityKind> entity_kind_from_string(std::string_view s) noexcept {
  return lookup<EntityKind>(kEntityNames, s);
}
std::optional<EventKind> event_kind_from_string(std::string_view s) noexcept {
  return lookup<EventKind>(kEventNames, s);
}
std::optional<RelationKind> relation_kind_from_string(std::string_view s) noexcept {
  return lookup<RelationKind>(kRelationNames, s);
}

Iri class_iri(EntityKind k) { return peg_o(std::string(to_string(k))); }
Iri class_iri(EventKind k) { return peg_o(std::string(to_string(k))); }
Iri relation_predicate(RelationKind k) { return peg_o(std::string(to_string(k))); }

std::optional<EntityKind> entity_kind_of_class(const Iri& cls) noexcept {
  if (cls.ns() != Namespace::PegO) return std::nullopt;
  return entity_kind_from_string(cls.local());
}
std::optional<EventKind> event_kind_of_class(const Iri& cls) noexcept {
  if (cls.ns() != Namespace::PegO) return std::nullopt;
  return event_kind_from_string(cls.local());
}
std::optional<RelationKind> relation_of_predicate(const Iri& pred) noexcept {
  if (pred.ns() != Namespace::PegO) return std::nullopt;
  return relation_kind_from_string(pred.local());
}

// ---------------------------------------------------------------------------
// Records
// ---------------------------------------------------------------------------

Interval::Interval(Timestamp begin, Timestamp end) : begin_(begin), end_(end) {
  if (end_ < begin_) {
    throw ModelError("interval ends before it begins: " + begin_.to_string() + " > " +
                     end_.to_string());
  }
}

void validate(const MedicalEvent& event) {
  bool must_be_point = event.kind == EventKind::Diagnosis ||
                       event.kind == EventKind::Assay || event.kind == EventKind::Surgery;
  if (must_be_point && !event.interval.is_point()) {
    throw ModelError(event.id.prefixed() + ": " + std::string(to_string(event.kind)) +
                     " must have a point interval");
  }
}

std::vector<Triple> event_to_triples(const MedicalEvent& event) {
  std::vector<Triple> out;
  out.reserve(4 + event.entities.size() + event.props.size());
  out.emplace_back(event.id, vocab::rdf_type(), class_iri(event.kind));
  out.emplace_back(event.id, vocab::sem_has_actor(), event.patient);
  for (const auto& e : event.entities) {
    out.emplace_back(event.id, vocab::sem_has_actor(), e);
  }
  out.emplace_back(event.id, vocab::sem_has_begin(), Literal::of(event.interval.begin()));
  if (!event.interval.is_point()) {
    out.emplace_back(event.id, vocab::sem_has_end(), Literal::of(event.interval.end()));
  }
  for (const auto& [pred, value] : event.props) {
    out.emplace_back(event.id, pred, value);
  }
  return out;
}

std::vector<Triple> entity_to_triples(const PatientEntity& patient) {
  std::vector<Triple> out;
  out.emplace_back(patient.id, vocab::rdf_type(), vocab::patient_class());
  if (!patient.gender.empty()) {
    out.emplace_back(patient.id, vocab::gender(), Literal::plain(patient.gender));
  }
  if (patient.birthday) {
    out.emplace_back(patient.id, vocab::birthday(), Literal::of(*patient.birthday));
  }
  return out;
}

std::vector<Triple> entity_to_triples(const MedicalEntity& entity) {
  std::vector<Triple> out;
  out.emplace_back(entity.id, vocab::rdf_type(), class_iri(entity.kind));
  if (!entity.label.empty()) {
    out.emplace_back(entity.id, vocab::rdfs_label(), Literal::plain(entity.label));
  }
  return out;
}

std::vector<MedicalEvent> decode_events(std::span<const Triple> triples) {
  const Iri type = vocab::rdf_type();
  const Iri actor = vocab::sem_has_actor();
  const Iri begin = vocab::sem_has_begin();
  const Iri end = vocab::sem_has_end();

  std::set<Iri> patients;
  std::map<Iri, EventKind> event_kinds;
  for (const auto& t : triples) {
    if (t.predicate() != type) continue;
    const auto* cls = std::get_if<Iri>(&t.object());
    if (!cls) continue;
    if (*cls == vocab::patient_class()) {
      patients.insert(t.subject());
    } else if (auto k = event_kind_of_class(*cls)) {
      event_kinds.emplace(t.subject(), *k);
    }
  }

  struct Partial {
    std::optional<Iri> patient;
    std::vector<Iri> entities;
    std::optional<Timestamp> begin;
    std::optional<Timestamp> end;
    std::map<Iri, Literal> props;
  };
  std::map<Iri, Partial> partial;
  for (const auto& [id, kind] : event_kinds) partial[id];

  for (const auto& t : triples) {
    auto it = partial.find(t.subject());
    if (it == partial.end()) continue;
    Partial& p = it->second;
    if (t.predicate() == type) continue;
    if (t.predicate() == actor) {
      const auto* who = std::get_if<Iri>(&t.object());
      if (!who) throw ModelError(t.subject().prefixed() + ": literal actor");
      if (patients.count(*who)) {
        if (p.patient && *p.patient != *who) {
          throw ModelError(t.subject().prefixed() + ": event references two patients");
        }
        p.patient = *who;
      } else {
        p.entities.push_back(*who);
      }
      continue;
    }
    const auto* lit = std::get_if<Literal>(&t.object());
    if (!lit) continue;
    if (t.predicate() == begin) {
      p.begin = Timestamp::parse(lit->lexical);
    } else if (t.predicate() == end) {
      p.end = Timestamp::parse(lit->lexical);
    } else {
      p.props.insert_or_assign(t.predicate(), *lit);
    }
  }

  std::vector<MedicalEvent> events;
  events.reserve(partial.size());
  for (auto& [id, p] : partial) {
    if (!p.patient) throw ModelError(id.prefixed() + ": event has no patient actor");
    if (!p.begin) throw ModelError(id.prefixed() + ": event has no begin timestamp");
    std::sort(p.entities.begin(), p.entities.end());
    p.entities.erase(std::unique(p.entities.begin(), p.entities.end()), p.entities.end());
    events.push_back(MedicalEvent{id, event_kinds.at(id), *p.patient, std::move(p.entities),
                                  Interval(*p.begin, p.end.value_or(*p.begin)),
                                  std::move(p.props)});
  }
  return events;
}

}  // namespace peg

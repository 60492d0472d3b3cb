#pragma once

#include <span>
#include <string>
#include <vector>

#include "peg/model.hpp"

namespace peg {

enum class TimeType { Point, Period };

TimeType classify_time_type(const MedicalEvent& event) noexcept;

// Result of relating an ordered pair (a, b). When `forward` is false the
// relation runs from b to a, e.g. {During, false} means During(b, a).
// Before, After and Concurrent are always reported forward.
struct DirectedRelation {
  RelationKind kind;
  bool forward = true;

  friend bool operator==(const DirectedRelation&, const DirectedRelation&) = default;
};

// Interval semantics, checked in this order:
//   Concurrent  equal begins and equal ends
//   Before      end(a) < begin(b)              (After mirrored)
//   During      b contains a, ends inclusive   (During(b,a) mirrored)
//   Overlap     begin(b) <= begin(a) <= end(b) and end(a) > end(b)
// Containment wins over Overlap when the begins coincide, so exactly one
// relation holds for every pair.
DirectedRelation relate(const Interval& a, const Interval& b) noexcept;

// Throws CrossPatientComparison when the events belong to different patients.
DirectedRelation relate(const MedicalEvent& a, const MedicalEvent& b);

class PatientTimeline {
 public:
  // Sorts by (begin, end, id); throws CrossPatientComparison when an event
  // belongs to another patient.
  PatientTimeline(Iri patient, std::vector<MedicalEvent> events);

  const Iri& patient() const noexcept { return patient_; }
  const std::vector<MedicalEvent>& events() const noexcept { return events_; }

 private:
  Iri patient_;
  std::vector<MedicalEvent> events_;
};

// Splits events per patient; timelines come back in patient-id order.
std::vector<PatientTimeline> group_timelines(std::vector<MedicalEvent> events);

// Every relation between every same-patient pair. Before/After and
// Concurrent are emitted in both directions; During/Overlap once.
// Sorted by (from, to, rel).
std::vector<TemporalEdge> build_full(const PatientTimeline& timeline);

// Point-point relations are reduced to a Concurrent chain per timestamp and
// one Before/After pair between consecutive timestamps (lowest id stands for
// its timestamp). Every relation involving a period is kept. Sorted.
std::vector<TemporalEdge> build_reduced(const PatientTimeline& timeline);

// Fixed point of: Concurrent symmetric and transitive, Before transitive,
// Concurrent∘Before and Before∘Concurrent ⊆ Before, After the inverse of
// Before. During/Overlap pass through. Sorted and deduplicated.
// Throws InconsistentEdges when an event ends up Before itself.
std::vector<TemporalEdge> infer_closure(std::span<const TemporalEdge> edges);

enum class TemporalMode { Full, Reduced };

// Builds every timeline and concatenates in patient-id order.
std::vector<TemporalEdge> build_edges(std::span<const PatientTimeline> timelines,
                                      TemporalMode mode);

std::vector<Triple> edges_to_triples(std::span<const TemporalEdge> edges);
// Picks out every (event, peg-o:<Relation>, event) triple.
std::vector<TemporalEdge> edges_from_triples(std::span<const Triple> triples);

// CSV with header "patient,relation,count"; one row per patient and relation
// kind with a non-zero count, patients in id order.
std::string edge_count_report(std::span<const PatientTimeline> timelines,
                              std::span<const TemporalEdge> edges);

}  // namespace peg

#include "peg/temporal.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <numeric>
#include <sstream>

#include "peg/errors.hpp"
#include "peg/table.hpp"

namespace peg {

TimeType classify_time_type(const MedicalEvent& event) noexcept {
  return event.interval.is_point() ? TimeType::Point : TimeType::Period;
}

DirectedRelation relate(const Interval& a, const Interval& b) noexcept {
  if (a.begin() == b.begin() && a.end() == b.end()) return {RelationKind::Concurrent, true};
  if (a.end() < b.begin()) return {RelationKind::Before, true};
  if (b.end() < a.begin()) return {RelationKind::After, true};
  if (a.begin() >= b.begin() && a.end() <= b.end()) return {RelationKind::During, true};
  if (b.begin() >= a.begin() && b.end() <= a.end()) return {RelationKind::During, false};
  // The intervals intersect and neither contains the other, so one of them
  // starts strictly inside the other and runs past its end.
  if (a.begin() > b.begin()) return {RelationKind::Overlap, true};
  return {RelationKind::Overlap, false};
}

DirectedRelation relate(const MedicalEvent& a, const MedicalEvent& b) {
  if (a.patient != b.patient) {
    throw CrossPatientComparison(a.id.prefixed() + " (" + a.patient.prefixed() + ") vs " +
                                 b.id.prefixed() + " (" + b.patient.prefixed() + ")");
  }
  return relate(a.interval, b.interval);
}

// ---------------------------------------------------------------------------
// Timelines
// ---------------------------------------------------------------------------

PatientTimeline::PatientTimeline(Iri patient, std::vector<MedicalEvent> events)
    : patient_(std::move(patient)), events_(std::move(events)) {
  for (const auto& e : events_) {
    if (e.patient != patient_) {
      throw CrossPatientComparison(e.id.prefixed() + " belongs to " + e.patient.prefixed() +
                                   ", not " + patient_.prefixed());
    }
  }
  std::sort(events_.begin(), events_.end(), [](const MedicalEvent& x, const MedicalEvent& y) {
    if (x.interval.begin() != y.interval.begin()) return x.interval.begin() < y.interval.begin();
    if (x.interval.end() != y.interval.end()) return x.interval.end() < y.interval.end();
    return x.id < y.id;
  });
}

std::vector<PatientTimeline> group_timelines(std::vector<MedicalEvent> events) {
  std::map<Iri, std::vector<MedicalEvent>> by_patient;
  for (auto& e : events) {
    Iri p = e.patient;
    by_patient[p].push_back(std::move(e));
  }
  std::vector<PatientTimeline> out;
  out.reserve(by_patient.size());
  for (auto& [patient, evs] : by_patient) out.emplace_back(patient, std::move(evs));
  return out;
}

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

namespace {

void emit(std::vector<TemporalEdge>& out, const MedicalEvent& a, const MedicalEvent& b,
          DirectedRelation r) {
  switch (r.kind) {
    case RelationKind::Before:
      out.push_back({a.id, b.id, RelationKind::Before});
      out.push_back({b.id, a.id, RelationKind::After});
      break;
    case RelationKind::After:
      out.push_back({a.id, b.id, RelationKind::After});
      out.push_back({b.id, a.id, RelationKind::Before});
      break;
    case RelationKind::Concurrent:
      out.push_back({a.id, b.id, RelationKind::Concurrent});
      out.push_back({b.id, a.id, RelationKind::Concurrent});
      break;
    case RelationKind::During:
    case RelationKind::Overlap:
      if (r.forward) {
        out.push_back({a.id, b.id, r.kind});
      } else {
        out.push_back({b.id, a.id, r.kind});
      }
      break;
  }
}

void sort_unique(std::vector<TemporalEdge>& edges) {
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

struct Partition {
  std::vector<const MedicalEvent*> points;
  std::vector<const MedicalEvent*> periods;
};

Partition partition(const PatientTimeline& t) {
  Partition p;
  for (const auto& e : t.events()) {
    (classify_time_type(e) == TimeType::Point ? p.points : p.periods).push_back(&e);
  }
  return p;
}

bool is_ordering(RelationKind k) {
  return k == RelationKind::Before || k == RelationKind::After || k == RelationKind::Concurrent;
}

// Everything that involves at least one period; shared by both builders.
void emit_period_relations(std::vector<TemporalEdge>& out, const Partition& p) {
  const auto& q = p.periods;
  // Period-period Before/After/Concurrent.
  for (std::size_t i = 0; i < q.size(); ++i) {
    for (std::size_t j = i + 1; j < q.size(); ++j) {
      auto r = relate(*q[i], *q[j]);
      if (is_ordering(r.kind)) emit(out, *q[i], *q[j], r);
    }
  }
  // Point-period Before/After/During.
  for (const auto* pt : p.points) {
    for (const auto* per : q) emit(out, *pt, *per, relate(*pt, *per));
  }
  // Period-period During/Overlap.
  for (std::size_t i = 0; i < q.size(); ++i) {
    for (std::size_t j = i + 1; j < q.size(); ++j) {
      auto r = relate(*q[i], *q[j]);
      if (!is_ordering(r.kind)) emit(out, *q[i], *q[j], r);
    }
  }
}

}  // namespace

std::vector<TemporalEdge> build_full(const PatientTimeline& timeline) {
  Partition p = partition(timeline);
  std::vector<TemporalEdge> out;
  for (std::size_t i = 0; i < p.points.size(); ++i) {
    for (std::size_t j = i + 1; j < p.points.size(); ++j) {
      emit(out, *p.points[i], *p.points[j], relate(*p.points[i], *p.points[j]));
    }
  }
  emit_period_relations(out, p);
  sort_unique(out);
  return out;
}

std::vector<TemporalEdge> build_reduced(const PatientTimeline& timeline) {
  Partition p = partition(timeline);
  std::vector<TemporalEdge> out;

  // Points arrive sorted by (time, id), so equal timestamps are contiguous
  // and the first of each run has the lowest id.
  const MedicalEvent* prev_rep = nullptr;
  for (std::size_t i = 0; i < p.points.size();) {
    std::size_t j = i;
    while (j < p.points.size() &&
           p.points[j]->interval.begin() == p.points[i]->interval.begin()) {
      ++j;
    }
    for (std::size_t k = i + 1; k < j; ++k) {
      emit(out, *p.points[k - 1], *p.points[k], {RelationKind::Concurrent, true});
    }
    const MedicalEvent* rep = p.points[i];
    if (prev_rep) emit(out, *prev_rep, *rep, {RelationKind::Before, true});
    prev_rep = rep;
    i = j;
  }
  emit_period_relations(out, p);
  sort_unique(out);
  return out;
}

// ---------------------------------------------------------------------------
// Inference
// ---------------------------------------------------------------------------

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

std::vector<TemporalEdge> infer_closure(std::span<const TemporalEdge> edges) {
  std::vector<Iri> nodes;
  nodes.reserve(edges.size() * 2);
  for (const auto& e : edges) {
    nodes.push_back(e.from);
    nodes.push_back(e.to);
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  auto index = [&](const Iri& id) {
    return static_cast<std::size_t>(std::lower_bound(nodes.begin(), nodes.end(), id) -
                                    nodes.begin());
  };

  std::vector<TemporalEdge> out;
  DisjointSets sets(nodes.size());
  std::vector<std::pair<std::size_t, std::size_t>> before;
  for (const auto& e : edges) {
    if (e.from == e.to) {
      throw InconsistentEdges(e.from.prefixed() + " is related to itself");
    }
    std::size_t a = index(e.from), b = index(e.to);
    switch (e.rel) {
      case RelationKind::Concurrent: sets.unite(a, b); break;
      case RelationKind::Before: before.emplace_back(a, b); break;
      case RelationKind::After: before.emplace_back(b, a); break;
      case RelationKind::During:
      case RelationKind::Overlap: out.push_back(e); break;
    }
  }

  // Compact the concurrency classes.
  std::vector<std::size_t> cls(nodes.size());
  std::vector<std::vector<std::size_t>> members;
  {
    std::map<std::size_t, std::size_t> root_to_class;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      auto [it, fresh] = root_to_class.emplace(sets.find(i), members.size());
      if (fresh) members.emplace_back();
      cls[i] = it->second;
      members[it->second].push_back(i);
    }
  }
  const std::size_t n = members.size();

  std::vector<std::vector<std::size_t>> succ(n);
  for (auto [a, b] : before) succ[cls[a]].push_back(cls[b]);
  for (auto& s : succ) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }

  // Reachability bitsets via iterative DFS post-order; a class that reaches
  // itself means some event is Before itself.
  const std::size_t words = (n + 63) / 64;
  std::vector<std::vector<std::uint64_t>> reach(n);
  std::vector<std::uint8_t> state(n, 0);  // 0 new, 1 on stack, 2 done
  for (std::size_t root = 0; root < n; ++root) {
    if (state[root]) continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
    state[root] = 1;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      if (next < succ[v].size()) {
        std::size_t w = succ[v][next++];
        if (state[w] == 1) {
          throw InconsistentEdges("temporal edges imply " + nodes[members[w].front()].prefixed() +
                                  " is Before itself");
        }
        if (state[w] == 0) {
          state[w] = 1;
          stack.emplace_back(w, 0);
        }
        continue;
      }
      auto& bits = reach[v];
      bits.assign(words, 0);
      for (std::size_t w : succ[v]) {
        bits[w / 64] |= std::uint64_t{1} << (w % 64);
        for (std::size_t k = 0; k < words; ++k) bits[k] |= reach[w][k];
      }
      state[v] = 2;
      stack.pop_back();
    }
  }

  for (const auto& group : members) {
    for (std::size_t x : group) {
      for (std::size_t y : group) {
        if (x != y) out.push_back({nodes[x], nodes[y], RelationKind::Concurrent});
      }
    }
  }
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t d = 0; d < n; ++d) {
      if (!(reach[c][d / 64] >> (d % 64) & 1)) continue;
      for (std::size_t x : members[c]) {
        for (std::size_t y : members[d]) {
          out.push_back({nodes[x], nodes[y], RelationKind::Before});
          out.push_back({nodes[y], nodes[x], RelationKind::After});
        }
      }
    }
  }
  sort_unique(out);
  return out;
}

std::vector<TemporalEdge> build_edges(std::span<const PatientTimeline> timelines,
                                      TemporalMode mode) {
  std::vector<TemporalEdge> out;
  for (const auto& t : timelines) {
    auto edges = mode == TemporalMode::Full ? build_full(t) : build_reduced(t);
    out.insert(out.end(), std::make_move_iterator(edges.begin()),
               std::make_move_iterator(edges.end()));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Triples and reporting
// ---------------------------------------------------------------------------

std::vector<Triple> edges_to_triples(std::span<const TemporalEdge> edges) {
  std::vector<Triple> out;
  out.reserve(edges.size());
  for (const auto& e : edges) out.emplace_back(e.from, relation_predicate(e.rel), e.to);
  return out;
}

std::vector<TemporalEdge> edges_from_triples(std::span<const Triple> triples) {
  std::vector<TemporalEdge> out;
  for (const auto& t : triples) {
    auto rel = relation_of_predicate(t.predicate());
    if (!rel) continue;
    const auto* to = std::get_if<Iri>(&t.object());
    if (!to) continue;
    out.push_back({t.subject(), *to, *rel});
  }
  return out;
}

std::string edge_count_report(std::span<const PatientTimeline> timelines,
                              std::span<const TemporalEdge> edges) {
  std::map<Iri, const Iri*> owner;
  for (const auto& t : timelines) {
    for (const auto& e : t.events()) owner.emplace(e.id, &t.patient());
  }
  std::map<Iri, std::array<std::size_t, 5>> counts;
  for (const auto& t : timelines) counts[t.patient()].fill(0);
  for (const auto& e : edges) {
    auto it = owner.find(e.from);
    if (it == owner.end()) continue;
    counts[*it->second][static_cast<std::size_t>(e.rel)]++;
  }
  std::string out = csv_line({"patient", "relation", "count"});
  for (const auto& [patient, c] : counts) {
    for (auto kind : kAllRelationKinds) {
      std::size_t v = c[static_cast<std::size_t>(kind)];
      if (v == 0) continue;
      out += csv_line({patient.prefixed(), std::string(to_string(kind)), std::to_string(v)});
    }
  }
  return out;
}

}  // namespace peg

#include <gtest/gtest.h>

#include <algorithm>

#include "peg/errors.hpp"
#include "peg/model.hpp"

using namespace peg;

namespace {

Literal lit(const char* s) { return Literal::plain(s); }
Literal date(const char* s) { return Literal::typed(s, Datatype::Date); }

MedicalEvent sample_diagnosis() {
  return MedicalEvent{peg_r("213"),
                      EventKind::Diagnosis,
                      peg_r("859"),
                      {peg_r("878")},
                      Interval::point(Timestamp::parse("2012-01-01")),
                      {{vocab::situation(), lit("恶化")}}};
}

bool contains(const std::vector<Triple>& ts, const Triple& t) {
  return std::find(ts.begin(), ts.end(), t) != ts.end();
}

}  // namespace

TEST(Iri, PrefixTableIsFixed) {
  EXPECT_EQ(peg_o("Patient").absolute(), "http://peg.ecustnlplab.com/ontology#Patient");
  EXPECT_EQ(peg_r("859").absolute(), "http://peg.ecustnlplab.com/resource/859");
  EXPECT_EQ(vocab::sem_has_actor().absolute(), "https://semanticweb.cs.vu.nl/2009/11/sem/hasActor");
  EXPECT_EQ(vocab::rdf_type().absolute(), "http://www.w3.org/1999/02/22-rdf-syntax-ns#type");
  EXPECT_EQ(vocab::rdfs_label().absolute(), "http://www.w3.org/2000/01/rdf-schema#label");
  EXPECT_EQ(vocab::skos_exact_match().absolute(), "http://www.w3.org/2004/02/skos/core#exactMatch");
}

TEST(Iri, ParsePrefixedAndAbsolute) {
  EXPECT_EQ(Iri::parse_prefixed("peg-r:859"), peg_r("859"));
  EXPECT_EQ(Iri::from_absolute("http://peg.ecustnlplab.com/ontology#During"), peg_o("During"));
  EXPECT_FALSE(Iri::from_absolute("http://example.org/x").has_value());
  EXPECT_THROW(Iri::parse_prefixed("ex:thing"), ModelError);
  EXPECT_THROW(Iri::parse_prefixed("nocolon"), ModelError);
}

TEST(Iri, LocalNameInvariants) {
  EXPECT_THROW(peg_r(""), ModelError);
  EXPECT_THROW(peg_r("a b"), ModelError);
  EXPECT_THROW(peg_r("a<b"), ModelError);
  EXPECT_THROW(peg_r("a>b"), ModelError);
  EXPECT_NO_THROW(peg_r("2002_1"));
}

TEST(Literal, TypedValidation) {
  EXPECT_NO_THROW(Literal::typed("2012-01-01", Datatype::Date));
  EXPECT_NO_THROW(Literal::typed("2012-01-01T08:00:00", Datatype::DateTime));
  EXPECT_NO_THROW(Literal::typed("-12", Datatype::Integer));
  EXPECT_NO_THROW(Literal::typed("7.5", Datatype::Decimal));
  EXPECT_THROW(Literal::typed("2012-02-30", Datatype::Date), InvalidLiteral);
  EXPECT_THROW(Literal::typed("1.5", Datatype::Integer), InvalidLiteral);
  EXPECT_THROW(Literal::typed("abc", Datatype::Decimal), InvalidLiteral);
  EXPECT_EQ(Literal::of(Timestamp::parse("2012-01-01")).datatype, Datatype::Date);
  EXPECT_EQ(Literal::of(Timestamp::parse("2012-01-01 09:15")).datatype, Datatype::DateTime);
}

TEST(Triple, PredicateNeverInResourceNamespace) {
  EXPECT_THROW(Triple(peg_r("1"), peg_r("p"), peg_r("2")), ModelError);
  EXPECT_NO_THROW(Triple(peg_r("1"), vocab::gender(), lit("男")));
}

TEST(Interval, PointAndOrder) {
  const auto a = Timestamp::parse("2012-01-02");
  const auto b = Timestamp::parse("2012-01-07");
  EXPECT_TRUE(Interval::point(a).is_point());
  EXPECT_FALSE(Interval(a, b).is_point());
  EXPECT_THROW(Interval(b, a), ModelError);
}

TEST(MedicalEvent, PointKindsRejectPeriods) {
  auto e = sample_diagnosis();
  EXPECT_NO_THROW(validate(e));
  e.interval = Interval(Timestamp::parse("2012-01-01"), Timestamp::parse("2012-01-03"));
  EXPECT_THROW(validate(e), ModelError);
  e.kind = EventKind::Drug;
  EXPECT_NO_THROW(validate(e));
}

TEST(EventToTriples, DiagnosisEventWithSituation) {
  const auto ts = event_to_triples(sample_diagnosis());
  EXPECT_TRUE(contains(ts, Triple(peg_r("213"), vocab::rdf_type(), peg_o("DiagnosisEvent"))));
  EXPECT_TRUE(contains(ts, Triple(peg_r("213"), vocab::sem_has_actor(), peg_r("859"))));
  EXPECT_TRUE(contains(ts, Triple(peg_r("213"), vocab::sem_has_actor(), peg_r("878"))));
  EXPECT_TRUE(contains(ts, Triple(peg_r("213"), vocab::situation(), lit("恶化"))));
  EXPECT_TRUE(contains(ts, Triple(peg_r("213"), vocab::sem_has_begin(), date("2012-01-01"))));
  EXPECT_EQ(ts.size(), 5u);  // points carry no end timestamp
  // Order: type, patient, entities, begin, props.
  EXPECT_EQ(ts[0].predicate(), vocab::rdf_type());
  EXPECT_EQ(ts[1].object(), Term(peg_r("859")));
  EXPECT_EQ(ts[2].object(), Term(peg_r("878")));
  EXPECT_EQ(ts[3].predicate(), vocab::sem_has_begin());
  EXPECT_EQ(ts[4].predicate(), vocab::situation());
}

TEST(EventToTriples, MinimalEventHasThreeTriples) {
  MedicalEvent e{peg_r("1"), EventKind::Surgery, peg_r("9"), {},
                 Interval::point(Timestamp::parse("2012-05-05")), {}};
  EXPECT_EQ(event_to_triples(e).size(), 3u);
}

TEST(EventToTriples, DrugPeriodHasBeginAndEnd) {
  MedicalEvent e{peg_r("215663"), EventKind::Drug, peg_r("859"), {peg_r("drug-1")},
                 Interval(Timestamp::parse("2012-01-02"), Timestamp::parse("2012-01-07")), {}};
  const auto ts = event_to_triples(e);
  EXPECT_TRUE(contains(ts, Triple(e.id, vocab::sem_has_begin(), date("2012-01-02"))));
  EXPECT_TRUE(contains(ts, Triple(e.id, vocab::sem_has_end(), date("2012-01-07"))));
}

TEST(EntityToTriples, PatientAndDisease) {
  const auto p = entity_to_triples(PatientEntity{peg_r("859"), "男", std::nullopt});
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p[0], Triple(peg_r("859"), vocab::rdf_type(), vocab::patient_class()));
  EXPECT_EQ(p[1], Triple(peg_r("859"), vocab::gender(), lit("男")));

  const auto with_birthday =
      entity_to_triples(PatientEntity{peg_r("859"), "男", Timestamp::parse("1950-03-02")});
  EXPECT_EQ(with_birthday.size(), 3u);

  const auto d = entity_to_triples(MedicalEntity{peg_r("878"), EntityKind::Disease, "心力衰竭"});
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d[0], Triple(peg_r("878"), vocab::rdf_type(), peg_o("Disease")));
  EXPECT_EQ(d[1], Triple(peg_r("878"), vocab::rdfs_label(), lit("心力衰竭")));
}

TEST(Vocabulary, EmittedTermsAreClosed) {
  std::vector<Triple> all = event_to_triples(sample_diagnosis());
  for (const auto& t : entity_to_triples(PatientEntity{peg_r("859"), "男", std::nullopt})) {
    all.push_back(t);
  }
  for (const auto& t : all) {
    EXPECT_TRUE(vocab::contains(t.predicate())) << t.predicate().prefixed();
    if (t.predicate() == vocab::rdf_type()) {
      EXPECT_TRUE(vocab::contains(std::get<Iri>(t.object())));
    }
  }
  EXPECT_FALSE(vocab::contains(peg_o("Unknown")));
  EXPECT_FALSE(vocab::contains(peg_r("859")));
  for (RelationKind k : kAllRelationKinds) EXPECT_TRUE(vocab::contains(relation_predicate(k)));
  for (EventKind k : kAllEventKinds) EXPECT_TRUE(vocab::contains(class_iri(k)));
}

TEST(Kinds, StringAndClassRoundTrips) {
  for (EntityKind k : kAllEntityKinds) {
    EXPECT_EQ(entity_kind_from_string(to_string(k)), k);
    EXPECT_EQ(entity_kind_of_class(class_iri(k)), k);
  }
  for (EventKind k : kAllEventKinds) {
    EXPECT_EQ(event_kind_from_string(to_string(k)), k);
    EXPECT_EQ(event_kind_of_class(class_iri(k)), k);
  }
  for (RelationKind k : kAllRelationKinds) {
    EXPECT_EQ(relation_kind_from_string(to_string(k)), k);
    EXPECT_EQ(relation_of_predicate(relation_predicate(k)), k);
  }
}

TEST(DecodeEvents, RoundTripReconstructsEvents) {
  MedicalEvent drug{peg_r("215663"), EventKind::Drug, peg_r("859"),
                    {peg_r("drug-2"), peg_r("drug-1")},
                    Interval(Timestamp::parse("2012-01-02"), Timestamp::parse("2012-01-07")), {}};
  MedicalEvent assay{peg_r("4001"),
                     EventKind::Assay,
                     peg_r("859"),
                     {peg_r("assay-3")},
                     Interval::point(Timestamp::parse("2012-01-03T10:30:00")),
                     {{vocab::assay_result(), lit("28")}, {vocab::assay_prompt(), lit("正常")}}};
  std::vector<Triple> ts = entity_to_triples(PatientEntity{peg_r("859"), "男", std::nullopt});
  for (const auto* e : {&drug, &assay}) {
    auto part = event_to_triples(*e);
    ts.insert(ts.begin(), part.begin(), part.end());
  }
  auto diag = sample_diagnosis();
  for (const auto& t : event_to_triples(diag)) ts.push_back(t);

  const auto decoded = decode_events(ts);
  ASSERT_EQ(decoded.size(), 3u);
  std::sort(drug.entities.begin(), drug.entities.end());
  EXPECT_EQ(decoded[0], diag);   // peg-r:213
  EXPECT_EQ(decoded[1], drug);   // peg-r:215663
  EXPECT_EQ(decoded[2], assay);  // peg-r:4001
}

TEST(DecodeEvents, EventWithoutPatientIsRejected) {
  const auto ts = event_to_triples(sample_diagnosis());  // no patient type triple
  EXPECT_THROW(decode_events(ts), ModelError);
}

TEST(EventToTriples, Deterministic) {
  EXPECT_EQ(event_to_triples(sample_diagnosis()), event_to_triples(sample_diagnosis()));
}

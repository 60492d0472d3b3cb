#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "peg/errors.hpp"
#include "peg/matcher.hpp"
#include "peg/text.hpp"

using namespace peg;

namespace {

MatchCandidate cand(const std::string& m_id, EntityKind kind, double s,
                    const std::string& kg_id = "K") {
  return MatchCandidate{MedicalEntity{peg_r(m_id), kind, m_id},
                        TermEntry::make(kg_id, kind, "label"), s};
}

// Positives at or above 0.8, negatives at or below 0.3.
std::vector<LabeledPair> separable_fixture() {
  std::vector<LabeledPair> out;
  int i = 0;
  for (double s : {0.8, 0.85, 0.9, 1.0, 0.95}) {
    out.push_back({cand("p" + std::to_string(i++), EntityKind::Disease, s), true});
  }
  for (double s : {0.0, 0.1, 0.3, 0.25, 0.2, 0.05}) {
    out.push_back({cand("n" + std::to_string(i++), EntityKind::Disease, s), false});
  }
  return out;
}

std::string utf8(const std::u32string& s) { return text::encode_utf8(s); }

}  // namespace

TEST(Similarities, LevExamples) {
  EXPECT_DOUBLE_EQ(lev_sim("abc", "abc"), 1.0);
  EXPECT_DOUBLE_EQ(lev_sim("ab", "cd"), 0.0);
  EXPECT_DOUBLE_EQ(lev_sim("心力衰竭", "心衰"), 0.5);
  EXPECT_DOUBLE_EQ(lev_sim("", ""), 1.0);
  EXPECT_DOUBLE_EQ(lev_sim("", "a"), 0.0);
}

TEST(Similarities, JaccardExamples) {
  EXPECT_DOUBLE_EQ(jaccard_sim("abc", "abc"), 1.0);
  EXPECT_DOUBLE_EQ(jaccard_sim("心力衰竭", "心衰"), 0.0);
  EXPECT_DOUBLE_EQ(jaccard_sim("ab", "abab"), 0.5);
  EXPECT_DOUBLE_EQ(jaccard_sim("", ""), 1.0);
  EXPECT_DOUBLE_EQ(jaccard_sim("a", "ab"), 0.0);  // {a} vs {ab}
}

TEST(Similarities, LcsExamples) {
  EXPECT_DOUBLE_EQ(lcs_sim("abc", "abc"), 1.0);
  EXPECT_DOUBLE_EQ(lcs_sim("心力衰竭", "心衰"), 0.5);
  EXPECT_DOUBLE_EQ(lcs_sim("abcd", "badc"), 0.5);
  EXPECT_DOUBLE_EQ(lcs_sim("", ""), 1.0);
  EXPECT_DOUBLE_EQ(lcs_sim("x", ""), 0.0);
}

TEST(Score, Examples) {
  EXPECT_DOUBLE_EQ(score("冠心病", "冠心病"), 1.0);
  EXPECT_NEAR(score("心力衰竭", "心衰"), (0.5 + 0.0 + 0.5) / 3.0, 1e-9);
  EXPECT_DOUBLE_EQ(score("ab", "cd"), 0.0);
}

TEST(Score, AgreesWithOraclesOnRandomPairs) {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 500; ++i) {
    const auto a = oracle::random_string(rng, 8);
    const auto b = oracle::random_string(rng, 8);
    ASSERT_EQ(edit_distance(a, b), oracle::naive_edit_distance(a, b));
    ASSERT_EQ(lcs_length(a, b), oracle::naive_lcs(a, b));
    const double mx = static_cast<double>(std::max(a.size(), b.size()));
    const double lev = mx == 0 ? 1.0 : 1.0 - static_cast<double>(oracle::naive_edit_distance(a, b)) / mx;
    const double lcs = mx == 0 ? 1.0 : static_cast<double>(oracle::naive_lcs(a, b)) / mx;
    const double jac = oracle::naive_jaccard(a, b);
    EXPECT_NEAR(score(utf8(a), utf8(b)), (lev + jac + lcs) / 3.0, 1e-12);
    EXPECT_DOUBLE_EQ(score(utf8(a), utf8(b)), score(utf8(b), utf8(a)));
    const double s = score(utf8(a), utf8(b));
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
    if (!a.empty()) {
      EXPECT_DOUBLE_EQ(score(utf8(a), utf8(a)), 1.0);
    }
  }
}

TEST(BestCandidate, Examples) {
  const std::vector<TermEntry> kg{TermEntry::make("D2", EntityKind::Disease, "心力衰竭"),
                                  TermEntry::make("D1", EntityKind::Disease, "冠心病"),
                                  TermEntry::make("M1", EntityKind::Drug, "心力衰竭")};
  const MedicalEntity m{peg_r("disease-1"), EntityKind::Disease, "心力衰竭"};
  const auto c = best_candidate(m, kg);
  ASSERT_TRUE(c);
  EXPECT_EQ(c->e.kg_id, "D2");
  EXPECT_DOUBLE_EQ(c->score, 1.0);

  const MedicalEntity assay{peg_r("assay-1"), EntityKind::Assay, "球蛋白"};
  EXPECT_FALSE(best_candidate(assay, kg));

  const std::vector<TermEntry> tied{TermEntry::make("B", EntityKind::Drug, "xy"),
                                    TermEntry::make("A", EntityKind::Drug, "yx")};
  const MedicalEntity drug{peg_r("drug-1"), EntityKind::Drug, "zz"};
  ASSERT_TRUE(best_candidate(drug, tied));
  EXPECT_EQ(best_candidate(drug, tied)->e.kg_id, "A");
}

TEST(TermEntry, OnlyLinkableKinds) {
  EXPECT_THROW(TermEntry::make("S1", EntityKind::Surgery, "x"), ModelError);
  EXPECT_THROW(TermEntry::make("D1", EntityKind::Disease, "  "), ModelError);
  EXPECT_EQ(TermEntry::make("D 1", EntityKind::Disease, "x").iri, peg_r("D%201"));
}

TEST(SampleVerification, Examples) {
  std::vector<MatchCandidate> cs;
  for (int i = 0; i < 100; ++i) {
    cs.push_back(cand("m" + std::to_string(i), EntityKind::Drug, (i * 37 % 100) / 100.0));
  }
  for (std::uint64_t seed : {1u, 2u, 3u, 20190101u}) {
    const auto sample = sample_verification(cs, 0.10, seed);
    ASSERT_EQ(sample.size(), 10u);
    EXPECT_LT(sample.front().score, 0.10);
    EXPECT_GE(sample.back().score, 0.90);
    EXPECT_EQ(sample_verification(cs, 0.10, seed).size(), sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i) {
      EXPECT_EQ(sample[i].m.id, sample_verification(cs, 0.10, seed)[i].m.id);
    }
  }
  EXPECT_EQ(sample_verification(cs, 1.0, 9).size(), cs.size());
  EXPECT_TRUE(sample_verification(std::vector<MatchCandidate>{}, 0.1, 9).empty());
  EXPECT_THROW(sample_verification(cs, 0.0, 1), std::invalid_argument);
  EXPECT_THROW(sample_verification(cs, 1.5, 1), std::invalid_argument);
}

TEST(SampleVerification, SampleSizeFollowsStride) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> n_dist(0, 60);
  for (int round = 0; round < 200; ++round) {
    const int n = n_dist(rng);
    std::vector<MatchCandidate> cs;
    for (int i = 0; i < n; ++i) cs.push_back(cand("m" + std::to_string(i), EntityKind::Drug, 0.5));
    for (double ratio : {0.1, 0.25, 0.3, 0.5, 1.0}) {
      const auto got = static_cast<double>(sample_verification(cs, ratio, rng()).size());
      const double step = std::ceil(1.0 / ratio - 1e-9);
      EXPECT_GE(got, std::floor(n / step)) << n << " " << ratio;
      EXPECT_LE(got, std::ceil(n / step)) << n << " " << ratio;
      // With an integral stride the size is ceil(ratio * n) give or take one.
      if (std::abs(1.0 / ratio - step) < 1e-9) {
        EXPECT_LE(std::abs(got - std::ceil(ratio * n)), 1.0) << n << " " << ratio;
      }
    }
  }
}

TEST(ThresholdMetric, Examples) {
  const auto fx = separable_fixture();
  EXPECT_DOUBLE_EQ(threshold_metric(fx, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(threshold_metric(fx, 0.0), 0.5);
  EXPECT_DOUBLE_EQ(threshold_metric(fx, 1.0 + 1e-6), 0.5);
  std::vector<LabeledPair> one_sided{fx[0], fx[1]};
  EXPECT_THROW(threshold_metric(one_sided, 0.5), DegenerateLabels);
  EXPECT_THROW(threshold_metric(std::vector<LabeledPair>{}, 0.5), DegenerateLabels);
}

TEST(SelectThreshold, SeparableFixtureGives035) {
  const auto grid = default_threshold_grid();
  ASSERT_EQ(grid.size(), 19u);
  EXPECT_DOUBLE_EQ(grid.front(), 0.05);
  EXPECT_DOUBLE_EQ(grid.back(), 0.95);
  const auto [t, m] = select_threshold(separable_fixture(), grid);
  EXPECT_DOUBLE_EQ(t, 0.35);
  EXPECT_DOUBLE_EQ(m, 1.0);

  const std::vector<double> single{0.6};
  EXPECT_DOUBLE_EQ(select_threshold(separable_fixture(), single).first, 0.6);
}

TEST(SelectThreshold, PermutationInvariant) {
  auto fx = separable_fixture();
  // Add overlapping noise so several thresholds compete.
  fx.push_back({cand("x1", EntityKind::Disease, 0.55), true});
  fx.push_back({cand("x2", EntityKind::Disease, 0.6), false});
  fx.push_back({cand("x3", EntityKind::Disease, 0.45), false});
  const auto grid = default_threshold_grid();
  const auto expected = select_threshold(fx, grid);
  std::mt19937_64 rng(4);
  for (int i = 0; i < 30; ++i) {
    std::shuffle(fx.begin(), fx.end(), rng);
    EXPECT_EQ(select_threshold(fx, grid), expected);
  }
}

TEST(ApplyLinks, Examples) {
  const std::vector<MatchCandidate> cs{cand("a", EntityKind::Disease, 0.95, "D1"),
                                       cand("b", EntityKind::Disease, 0.41, "D2"),
                                       cand("c", EntityKind::Disease, 0.39, "D3")};
  const auto r = apply_links(cs, {{EntityKind::Disease, {0.40, 1.0}}});
  EXPECT_EQ(r.links.size(), 2u);
  ASSERT_EQ(r.reports.size(), 1u);
  EXPECT_DOUBLE_EQ(r.reports[0].link_rate, 2.0 / 3.0);
  EXPECT_EQ(r.links[0], Triple(peg_r("a"), vocab::skos_exact_match(), peg_r("D1")));

  const auto none = apply_links(cs, {{EntityKind::Disease, {1.0, 1.0}}});
  EXPECT_TRUE(none.links.empty());
  EXPECT_DOUBLE_EQ(none.reports[0].link_rate, 0.0);
}

TEST(ApplyLinks, PopulationDenominatorAndMonotoneRate) {
  std::vector<MatchCandidate> cs;
  std::vector<MedicalEntity> population;
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    cs.push_back(cand("m" + std::to_string(i), EntityKind::Assay, u(rng)));
    population.push_back(cs.back().m);
  }
  population.push_back(MedicalEntity{peg_r("unmatched"), EntityKind::Assay, "?"});
  double prev = 2.0;
  for (double t : default_threshold_grid()) {
    const auto r = apply_links(cs, {{EntityKind::Assay, {t, 0.0}}}, population);
    const double rate = r.reports[0].link_rate;
    EXPECT_LE(rate, prev);
    EXPECT_EQ(rate, static_cast<double>(r.links.size()) / 51.0);
    prev = rate;
  }
}

TEST(Files, TerminologyCsvAndTriples) {
  const auto kg = parse_terminology_csv("kg_id,kind,label\nD1,Disease,冠心病\nM1,Drug,卡托普利\n");
  ASSERT_EQ(kg.size(), 2u);
  EXPECT_EQ(kg[0].kg_id, "D1");
  EXPECT_EQ(kg[1].kind, EntityKind::Drug);
  EXPECT_THROW(parse_terminology_csv("kg_id,kind,label\nX,Planet,a\n"), Error);

  const std::vector<Triple> ts{Triple(peg_r("D9"), vocab::rdf_type(), peg_o("Disease")),
                               Triple(peg_r("D9"), vocab::rdfs_label(), Literal::plain("胃癌"))};
  const auto from_nt = terminology_from_triples(ts);
  ASSERT_EQ(from_nt.size(), 1u);
  EXPECT_EQ(from_nt[0].label, "胃癌");
  EXPECT_EQ(from_nt[0].iri, peg_r("D9"));

  const auto shipped = load_terminology(oracle::data_dir() / "mini" / "kg.csv");
  EXPECT_FALSE(shipped.empty());
}

TEST(Files, LabelsCsv) {
  const auto rows = parse_labels_csv("m_id,kg_id,correct\npeg-r:disease-1,D1,1\ndrug-5,M1,0\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].m_id, "disease-1");
  EXPECT_TRUE(rows[0].correct);
  EXPECT_FALSE(rows[1].correct);
  EXPECT_THROW(parse_labels_csv("m_id,kg_id,correct\na,b,yes\n"), Error);
}

TEST(Files, ThresholdReportCsv) {
  const std::vector<ThresholdReport> rs{{EntityKind::Disease, 0.4, 0.9126, 0.8014}};
  EXPECT_EQ(threshold_report_csv(rs), "Entity type,Threshold,AUC,Link rate\nDisease,0.40,0.913,0.801\n");
}

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "peg/model.hpp"

namespace peg {

// One label of a terminology-graph entity. A KG entity with synonyms appears
// as several entries sharing kg_id.
struct TermEntry {
  std::string kg_id;
  EntityKind kind;
  std::string label;
  Iri iri;

  // Builds the IRI as peg-r:<percent-encoded kg_id>. Throws ModelError for
  // an empty label or an unsupported kind (only Disease/Drug/Assay link).
  static TermEntry make(std::string kg_id, EntityKind kind, std::string label);
};

struct MatchCandidate {
  MedicalEntity m;
  TermEntry e;
  double score = 0.0;
};

struct LabeledPair {
  MatchCandidate candidate;
  bool correct = false;
};

struct ThresholdReport {
  EntityKind kind;
  double threshold = 0.0;
  double metric = 0.0;
  double link_rate = 0.0;
};

// --- string metrics over Unicode code points --------------------------------

std::size_t edit_distance(std::u32string_view a, std::u32string_view b);
std::size_t lcs_length(std::u32string_view a, std::u32string_view b);

// 1 - editDistance / max length; both empty -> 1, one empty -> 0.
double lev_sim(std::string_view a, std::string_view b);
// Jaccard over character bigram sets (unigram set when shorter than 2).
double jaccard_sim(std::string_view a, std::string_view b);
// LCS length / max length; both empty -> 1, one empty -> 0.
double lcs_sim(std::string_view a, std::string_view b);
// Mean of the three similarities above.
double score(std::string_view m, std::string_view e);

// --- candidate selection ----------------------------------------------------

// Highest-scoring same-kind entry; ties go to the smallest kg_id.
std::optional<MatchCandidate> best_candidate(const MedicalEntity& m,
                                             std::span<const TermEntry> kg);

// Best candidate for every entity whose kind has KG entries, in m-id order.
std::vector<MatchCandidate> match_all(std::span<const MedicalEntity> entities,
                                      std::span<const TermEntry> kg);

// Score-stratified systematic sample: sort by (score, m id), take every
// ceil(1/ratio)-th element from an offset drawn from `seed`.
// Throws std::invalid_argument unless 0 < ratio <= 1.
std::vector<MatchCandidate> sample_verification(std::span<const MatchCandidate> candidates,
                                                double ratio, std::uint64_t seed);

// --- threshold selection ----------------------------------------------------

// Balanced accuracy of "score >= t means link". Throws DegenerateLabels when
// the labels are empty or all identical.
double threshold_metric(std::span<const LabeledPair> labeled, double t);

// {0.05, 0.10, ..., 0.95}
std::vector<double> default_threshold_grid();

// Grid point with the highest metric, smallest threshold on ties.
std::pair<double, double> select_threshold(std::span<const LabeledPair> labeled,
                                           std::span<const double> grid);

struct ThresholdChoice {
  double threshold = 0.0;
  double metric = 0.0;
};

struct LinkResult {
  std::vector<Triple> links;
  std::vector<ThresholdReport> reports;  // one per kind in `thresholds`
};

// Emits <m skos:exactMatch e> for every candidate scoring >= its kind's
// threshold. Link rate denominators count distinct entities per kind in
// `population` (or in the candidates when population is empty).
LinkResult apply_links(std::span<const MatchCandidate> candidates,
                       const std::map<EntityKind, ThresholdChoice>& thresholds,
                       std::span<const MedicalEntity> population = {});

// "score >= threshold" with a tolerance of 1e-12 for the averaged score.
bool passes_threshold(double score, double threshold) noexcept;

// --- file formats -------------------------------------------------------------

// CSV (kg_id,kind,label) or N-Triples (rdf:type peg-o:<Kind> + rdfs:label),
// chosen by the ".nt" extension. Entries come back sorted by (kind, kg_id, label).
std::vector<TermEntry> load_terminology(const std::filesystem::path& path);
std::vector<TermEntry> parse_terminology_csv(std::string_view content);
std::vector<TermEntry> terminology_from_triples(std::span<const Triple> triples);

struct LabelRow {
  std::string m_id;   // local name of the dataset entity
  std::string kg_id;
  bool correct = false;
};

// CSV (m_id,kg_id,correct) with correct in {0,1}.
std::vector<LabelRow> parse_labels_csv(std::string_view content);
std::vector<LabelRow> load_labels(const std::filesystem::path& path);

// Joins label rows against entities and KG entries, scoring each pair.
// Rows naming unknown entities or KG ids are skipped.
std::vector<LabeledPair> build_labeled_pairs(std::span<const LabelRow> labels,
                                             std::span<const MedicalEntity> entities,
                                             std::span<const TermEntry> kg);

// "Entity type,Threshold,AUC,Link rate" table.
std::string threshold_report_csv(std::span<const ThresholdReport> reports);

}  // namespace peg

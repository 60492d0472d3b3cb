#include "peg/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <stdexcept>

#include "peg/errors.hpp"
#include "peg/ntriples.hpp"
#include "peg/table.hpp"
#include "peg/text.hpp"

namespace peg {

namespace {

constexpr double kScoreTolerance = 1e-12;

bool linkable(EntityKind kind) noexcept {
  return kind == EntityKind::Disease || kind == EntityKind::Drug || kind == EntityKind::Assay;
}

using Gram = std::pair<char32_t, char32_t>;

std::vector<Gram> gram_set(const std::u32string& s) {
  std::vector<Gram> grams;
  if (s.size() < 2) {
    for (char32_t c : s) grams.emplace_back(c, U'\0');
  } else {
    grams.reserve(s.size() - 1);
    for (std::size_t i = 0; i + 1 < s.size(); ++i) grams.emplace_back(s[i], s[i + 1]);
  }
  std::sort(grams.begin(), grams.end());
  grams.erase(std::unique(grams.begin(), grams.end()), grams.end());
  return grams;
}

double ratio_of_max(std::size_t numerator, std::size_t la, std::size_t lb) {
  const std::size_t longest = std::max(la, lb);
  return static_cast<double>(numerator) / static_cast<double>(longest);
}

// Score against already-decoded strings, shared by the per-pair and bulk paths.
double score_decoded(const std::u32string& a, const std::u32string& b) {
  double lev = 0.0;
  double lcs = 0.0;
  if (a.empty() && b.empty()) {
    lev = lcs = 1.0;
  } else if (!a.empty() && !b.empty()) {
    lev = 1.0 - ratio_of_max(edit_distance(a, b), a.size(), b.size());
    lcs = ratio_of_max(lcs_length(a, b), a.size(), b.size());
  }
  double jac = 0.0;
  if (a.empty() && b.empty()) {
    jac = 1.0;
  } else {
    auto ga = gram_set(a);
    auto gb = gram_set(b);
    std::vector<Gram> common;
    std::set_intersection(ga.begin(), ga.end(), gb.begin(), gb.end(),
                          std::back_inserter(common));
    const std::size_t uni = ga.size() + gb.size() - common.size();
    jac = uni == 0 ? 0.0 : static_cast<double>(common.size()) / static_cast<double>(uni);
  }
  return (lev + jac + lcs) / 3.0;
}

bool better(const MatchCandidate& cand, const std::optional<MatchCandidate>& best) {
  if (!best) return true;
  if (cand.score != best->score) return cand.score > best->score;
  return cand.e.kg_id < best->e.kg_id;
}

std::string format_fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void sort_terms(std::vector<TermEntry>& entries) {
  std::sort(entries.begin(), entries.end(), [](const TermEntry& a, const TermEntry& b) {
    return std::tie(a.kind, a.kg_id, a.label) < std::tie(b.kind, b.kg_id, b.label);
  });
  entries.erase(std::unique(entries.begin(), entries.end(),
                            [](const TermEntry& a, const TermEntry& b) {
                              return a.kind == b.kind && a.kg_id == b.kg_id &&
                                     a.label == b.label;
                            }),
                entries.end());
}

}  // namespace

TermEntry TermEntry::make(std::string kg_id, EntityKind kind, std::string label) {
  if (!linkable(kind)) {
    throw ModelError("terminology entries must be Disease, Drug or Assay, got " +
                     std::string(to_string(kind)));
  }
  std::string trimmed = text::trim(label);
  if (trimmed.empty()) throw ModelError("terminology entry " + kg_id + " has an empty label");
  if (kg_id.empty()) throw ModelError("terminology entry with empty kg_id");
  Iri iri = peg_r(text::percent_encode_iri_local(kg_id));
  return TermEntry{std::move(kg_id), kind, std::move(trimmed), std::move(iri)};
}

std::size_t edit_distance(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::size_t lcs_length(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double lev_sim(std::string_view a, std::string_view b) {
  const auto ua = text::decode_utf8(a);
  const auto ub = text::decode_utf8(b);
  if (ua.empty() && ub.empty()) return 1.0;
  if (ua.empty() || ub.empty()) return 0.0;
  return 1.0 - ratio_of_max(edit_distance(ua, ub), ua.size(), ub.size());
}

double jaccard_sim(std::string_view a, std::string_view b) {
  const auto ua = text::decode_utf8(a);
  const auto ub = text::decode_utf8(b);
  if (ua.empty() && ub.empty()) return 1.0;
  const auto ga = gram_set(ua);
  const auto gb = gram_set(ub);
  std::vector<Gram> common;
  std::set_intersection(ga.begin(), ga.end(), gb.begin(), gb.end(), std::back_inserter(common));
  const std::size_t uni = ga.size() + gb.size() - common.size();
  return uni == 0 ? 0.0 : static_cast<double>(common.size()) / static_cast<double>(uni);
}

double lcs_sim(std::string_view a, std::string_view b) {
  const auto ua = text::decode_utf8(a);
  const auto ub = text::decode_utf8(b);
  if (ua.empty() && ub.empty()) return 1.0;
  if (ua.empty() || ub.empty()) return 0.0;
  return ratio_of_max(lcs_length(ua, ub), ua.size(), ub.size());
}

double score(std::string_view m, std::string_view e) {
  return score_decoded(text::decode_utf8(m), text::decode_utf8(e));
}

std::optional<MatchCandidate> best_candidate(const MedicalEntity& m,
                                             std::span<const TermEntry> kg) {
  const auto um = text::decode_utf8(m.label);
  std::optional<MatchCandidate> best;
  for (const auto& e : kg) {
    if (e.kind != m.kind) continue;
    MatchCandidate cand{m, e, score_decoded(um, text::decode_utf8(e.label))};
    if (better(cand, best)) best = std::move(cand);
  }
  return best;
}

std::vector<MatchCandidate> match_all(std::span<const MedicalEntity> entities,
                                      std::span<const TermEntry> kg) {
  // Decode every KG label once; the pairwise loop dominates otherwise.
  std::map<EntityKind, std::vector<std::pair<const TermEntry*, std::u32string>>> by_kind;
  for (const auto& e : kg) by_kind[e.kind].emplace_back(&e, text::decode_utf8(e.label));

  std::vector<const MedicalEntity*> order;
  order.reserve(entities.size());
  for (const auto& m : entities) order.push_back(&m);
  std::sort(order.begin(), order.end(),
            [](const MedicalEntity* a, const MedicalEntity* b) { return a->id < b->id; });

  std::vector<MatchCandidate> out;
  for (const MedicalEntity* m : order) {
    auto it = by_kind.find(m->kind);
    if (it == by_kind.end()) continue;
    const auto um = text::decode_utf8(m->label);
    std::optional<MatchCandidate> best;
    for (const auto& [entry, label] : it->second) {
      const double s = score_decoded(um, label);
      if (best && (s < best->score || (s == best->score && entry->kg_id >= best->e.kg_id))) {
        continue;
      }
      best = MatchCandidate{*m, *entry, s};
    }
    if (best) out.push_back(std::move(*best));
  }
  return out;
}

std::vector<MatchCandidate> sample_verification(std::span<const MatchCandidate> candidates,
                                                double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio <= 1.0)) {
    throw std::invalid_argument("sample ratio must lie in (0, 1]");
  }
  std::vector<MatchCandidate> sorted(candidates.begin(), candidates.end());
  std::sort(sorted.begin(), sorted.end(), [](const MatchCandidate& a, const MatchCandidate& b) {
    if (a.score != b.score) return a.score < b.score;
    return a.m.id < b.m.id;
  });
  const auto step = static_cast<std::size_t>(std::ceil(1.0 / ratio - 1e-9));
  std::mt19937_64 rng(seed);
  const std::size_t offset = static_cast<std::size_t>(rng() % step);
  std::vector<MatchCandidate> out;
  for (std::size_t i = offset; i < sorted.size(); i += step) out.push_back(sorted[i]);
  return out;
}

bool passes_threshold(double s, double threshold) noexcept {
  return s + kScoreTolerance >= threshold;
}

double threshold_metric(std::span<const LabeledPair> labeled, double t) {
  std::size_t pos = 0, neg = 0, tp = 0, tn = 0;
  for (const auto& p : labeled) {
    const bool linked = passes_threshold(p.candidate.score, t);
    if (p.correct) {
      ++pos;
      if (linked) ++tp;
    } else {
      ++neg;
      if (!linked) ++tn;
    }
  }
  if (pos == 0 || neg == 0) {
    throw DegenerateLabels("threshold selection needs both correct and incorrect labels (" +
                           std::to_string(pos) + " correct, " + std::to_string(neg) +
                           " incorrect)");
  }
  const double tpr = static_cast<double>(tp) / static_cast<double>(pos);
  const double tnr = static_cast<double>(tn) / static_cast<double>(neg);
  return (tpr + tnr) / 2.0;
}

std::vector<double> default_threshold_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 19; ++i) grid.push_back(static_cast<double>(i) / 20.0);
  return grid;
}

std::pair<double, double> select_threshold(std::span<const LabeledPair> labeled,
                                           std::span<const double> grid) {
  if (grid.empty()) throw std::invalid_argument("empty threshold grid");
  std::optional<std::pair<double, double>> best;
  for (double t : grid) {
    const double m = threshold_metric(labeled, t);
    if (!best || m > best->second || (m == best->second && t < best->first)) best = {t, m};
  }
  return *best;
}

LinkResult apply_links(std::span<const MatchCandidate> candidates,
                       const std::map<EntityKind, ThresholdChoice>& thresholds,
                       std::span<const MedicalEntity> population) {
  std::map<EntityKind, std::set<Iri>> universe;
  if (population.empty()) {
    for (const auto& c : candidates) universe[c.m.kind].insert(c.m.id);
  } else {
    for (const auto& m : population) universe[m.kind].insert(m.id);
  }

  LinkResult result;
  std::map<EntityKind, std::set<Iri>> linked;
  for (const auto& c : candidates) {
    auto it = thresholds.find(c.m.kind);
    if (it == thresholds.end()) continue;
    if (!passes_threshold(c.score, it->second.threshold)) continue;
    result.links.emplace_back(c.m.id, vocab::skos_exact_match(), c.e.iri);
    linked[c.m.kind].insert(c.m.id);
  }
  std::sort(result.links.begin(), result.links.end());
  result.links.erase(std::unique(result.links.begin(), result.links.end()), result.links.end());

  for (const auto& [kind, choice] : thresholds) {
    const std::size_t total = universe[kind].size();
    const std::size_t hit = linked[kind].size();
    const double rate = total == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(total);
    result.reports.push_back(ThresholdReport{kind, choice.threshold, choice.metric, rate});
  }
  return result;
}

std::vector<TermEntry> parse_terminology_csv(std::string_view content) {
  const RecordTable table = parse_csv(content, "terminology");
  const auto id_col = table.column_index("kg_id");
  const auto kind_col = table.column_index("kind");
  const auto label_col = table.column_index("label");
  if (!id_col || !kind_col || !label_col) {
    throw ConfigValidationError("terminology CSV needs columns kg_id, kind, label");
  }
  std::vector<TermEntry> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const auto kind = entity_kind_from_string(text::trim(row[*kind_col]));
    if (!kind || !linkable(*kind)) {
      throw ConfigValidationError("terminology row " + std::to_string(r + 1) +
                                  ": unsupported kind '" + row[*kind_col] + "'");
    }
    try {
      out.push_back(TermEntry::make(text::trim(row[*id_col]), *kind, row[*label_col]));
    } catch (const ModelError& e) {
      throw ConfigValidationError("terminology row " + std::to_string(r + 1) + ": " + e.what());
    }
  }
  sort_terms(out);
  return out;
}

std::vector<TermEntry> terminology_from_triples(std::span<const Triple> triples) {
  std::map<Iri, EntityKind> kinds;
  std::map<Iri, std::vector<std::string>> labels;
  for (const auto& t : triples) {
    if (t.predicate() == vocab::rdf_type()) {
      if (const auto* cls = std::get_if<Iri>(&t.object())) {
        if (auto k = entity_kind_of_class(*cls); k && linkable(*k)) kinds.emplace(t.subject(), *k);
      }
    } else if (t.predicate() == vocab::rdfs_label()) {
      if (const auto* lit = std::get_if<Literal>(&t.object())) {
        labels[t.subject()].push_back(lit->lexical);
      }
    }
  }
  std::vector<TermEntry> out;
  for (const auto& [iri, kind] : kinds) {
    auto it = labels.find(iri);
    if (it == labels.end()) continue;
    for (const auto& label : it->second) {
      if (text::trim(label).empty()) continue;
      // Keep the subject IRI as-is rather than re-encoding its local name.
      out.push_back(TermEntry{iri.local(), kind, text::trim(label), iri});
    }
  }
  sort_terms(out);
  return out;
}

std::vector<TermEntry> load_terminology(const std::filesystem::path& path) {
  if (path.extension() == ".nt") return terminology_from_triples(read_ntriples_file(path));
  return parse_terminology_csv(read_text_file(path));
}

std::vector<LabelRow> parse_labels_csv(std::string_view content) {
  const RecordTable table = parse_csv(content, "labels");
  const auto m_col = table.column_index("m_id");
  const auto kg_col = table.column_index("kg_id");
  const auto ok_col = table.column_index("correct");
  if (!m_col || !kg_col || !ok_col) {
    throw ConfigValidationError("labels CSV needs columns m_id, kg_id, correct");
  }
  std::vector<LabelRow> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string flag = text::trim(row[*ok_col]);
    if (flag != "0" && flag != "1") {
      throw ConfigValidationError("labels row " + std::to_string(r + 1) +
                                  ": correct must be 0 or 1, got '" + flag + "'");
    }
    std::string m_id = text::trim(row[*m_col]);
    if (m_id.rfind("peg-r:", 0) == 0) m_id.erase(0, 6);
    out.push_back(LabelRow{std::move(m_id), text::trim(row[*kg_col]), flag == "1"});
  }
  return out;
}

std::vector<LabelRow> load_labels(const std::filesystem::path& path) {
  return parse_labels_csv(read_text_file(path));
}

std::vector<LabeledPair> build_labeled_pairs(std::span<const LabelRow> labels,
                                             std::span<const MedicalEntity> entities,
                                             std::span<const TermEntry> kg) {
  std::map<std::string, const MedicalEntity*> by_local;
  for (const auto& m : entities) by_local.emplace(m.id.local(), &m);
  std::multimap<std::string, const TermEntry*> by_kg;
  for (const auto& e : kg) by_kg.emplace(e.kg_id, &e);

  std::vector<LabeledPair> out;
  for (const auto& row : labels) {
    auto m_it = by_local.find(row.m_id);
    if (m_it == by_local.end()) continue;
    const MedicalEntity& m = *m_it->second;
    const auto um = text::decode_utf8(m.label);
    std::optional<MatchCandidate> best;
    auto [lo, hi] = by_kg.equal_range(row.kg_id);
    for (auto it = lo; it != hi; ++it) {
      if (it->second->kind != m.kind) continue;
      MatchCandidate cand{m, *it->second, score_decoded(um, text::decode_utf8(it->second->label))};
      if (!best || cand.score > best->score) best = std::move(cand);
    }
    if (best) out.push_back(LabeledPair{std::move(*best), row.correct});
  }
  return out;
}

std::string threshold_report_csv(std::span<const ThresholdReport> reports) {
  std::string out = "Entity type,Threshold,AUC,Link rate\n";
  for (const auto& r : reports) {
    out += std::string(to_string(r.kind)) + "," + format_fixed(r.threshold, 2) + "," +
           format_fixed(r.metric, 3) + "," + format_fixed(r.link_rate, 3) + "\n";
  }
  return out;
}

}  // namespace peg

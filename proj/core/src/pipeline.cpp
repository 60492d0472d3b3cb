#include "peg/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include "json.hpp"
#include "peg/errors.hpp"
#include "peg/mapping.hpp"
#include "peg/matcher.hpp"
#include "peg/ntriples.hpp"
#include "peg/preprocess.hpp"
#include "peg/table.hpp"

namespace peg {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

std::string require_string(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc.at(key).is_string()) {
    throw ConfigParseError(std::string("pipeline config: missing string field '") + key + "'");
  }
  return doc.at(key).get<std::string>();
}

fs::path out_file(const PipelineConfig& c, std::string_view name) {
  fs::create_directories(c.output);
  return c.output / name;
}

// Runs `body`, rewrapping any failure with the stage name and input locus.
template <typename F>
auto in_stage(const std::string& stage, const fs::path& locus, F&& body) {
  try {
    return body();
  } catch (const PipelineError&) {
    throw;
  } catch (const std::exception& e) {
    throw PipelineError(stage, locus.generic_string() + ": " + e.what());
  }
}

std::string format_score(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

TemporalMode parse_temporal_mode(std::string_view text) {
  if (text == "full") return TemporalMode::Full;
  if (text == "reduced") return TemporalMode::Reduced;
  throw ConfigValidationError("temporal mode must be 'full' or 'reduced', got '" +
                              std::string(text) + "'");
}

PipelineConfig PipelineConfig::from_json(std::string_view json_text, const fs::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigParseError(std::string("pipeline config: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigParseError("pipeline config: expected a JSON object");

  PipelineConfig c;
  if (!doc.contains("tables") || !doc.at("tables").is_object()) {
    throw ConfigParseError("pipeline config: 'tables' must be an object of table -> path");
  }
  for (const auto& [name, path] : doc.at("tables").items()) {
    if (!path.is_string()) throw ConfigParseError("pipeline config: table '" + name + "' path");
    c.tables.emplace(name, resolve(base_dir, path.get<std::string>()));
  }
  c.normalization = resolve(base_dir, require_string(doc, "normalization"));
  c.mapping = resolve(base_dir, require_string(doc, "mapping"));
  if (doc.contains("registry")) c.registry = resolve(base_dir, require_string(doc, "registry"));
  c.output = resolve(base_dir, doc.contains("output") ? require_string(doc, "output") : "out");

  if (doc.contains("temporal_mode")) {
    c.mode = parse_temporal_mode(require_string(doc, "temporal_mode"));
  }
  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned()) {
      throw ConfigParseError("pipeline config: 'seed' must be a non-negative integer");
    }
    c.seed = doc.at("seed").get<std::uint64_t>();
  }

  const json match = doc.value("match", json::object());
  if (!match.is_object()) throw ConfigParseError("pipeline config: 'match' must be an object");
  c.match_enabled = match.value("enabled", true);
  if (c.match_enabled) {
    c.kg = match.contains("kg") ? resolve(base_dir, require_string(match, "kg")) : fs::path();
    c.labels =
        match.contains("labels") ? resolve(base_dir, require_string(match, "labels")) : fs::path();
  }
  if (match.contains("sample_ratio")) {
    if (!match.at("sample_ratio").is_number()) {
      throw ConfigParseError("pipeline config: 'match.sample_ratio' must be a number");
    }
    c.sample_ratio = match.at("sample_ratio").get<double>();
  }
  if (match.contains("thresholds")) {
    for (const auto& [kind, value] : match.at("thresholds").items()) {
      const auto k = entity_kind_from_string(kind);
      if (!k || !value.is_number()) {
        throw ConfigParseError("pipeline config: bad fixed threshold for '" + kind + "'");
      }
      c.fixed_thresholds[*k] = value.get<double>();
    }
  }
  return c;
}

PipelineConfig PipelineConfig::load(const fs::path& path) {
  return from_json(read_text_file(path), path.parent_path());
}

void PipelineConfig::validate() const {
  auto need = [](const fs::path& p, const std::string& what) {
    if (p.empty()) throw ConfigValidationError(what + " path is not set");
    if (!fs::exists(p)) throw ConfigValidationError(what + " not found: " + p.generic_string());
  };
  if (tables.empty()) throw ConfigValidationError("no input tables configured");
  for (const auto& [name, path] : tables) need(path, "table " + name);
  need(normalization, "normalization config");
  need(mapping, "mapping config");
  if (registry) need(*registry, "seed registry");
  if (match_enabled) {
    need(kg, "terminology graph");
    need(labels, "labels");
    if (!(sample_ratio > 0.0 && sample_ratio <= 1.0)) {
      throw ConfigValidationError("match.sample_ratio must lie in (0, 1]");
    }
  }
  for (const auto& [kind, t] : fixed_thresholds) {
    if (!(t >= 0.0 && t <= 1.0)) {
      throw ConfigValidationError("fixed threshold for " + std::string(to_string(kind)) +
                                  " must lie in [0, 1]");
    }
  }
  const MappingConfig m = load_mapping_config(mapping);
  for (const auto& map : m.maps) {
    if (!tables.count(map.table)) {
      throw ConfigValidationError("mapping uses table " + map.table +
                                  " but the pipeline config gives no path for it");
    }
  }
}

// ---------------------------------------------------------------------------
// Stages
// ---------------------------------------------------------------------------

void run_preprocess(const PipelineConfig& config) {
  const auto norm = in_stage("preprocess", config.normalization,
                             [&] { return NormalizationConfig::load(config.normalization); });
  const fs::path dir = config.output / outputs::kPreprocessedDir;
  fs::create_directories(dir);
  for (const auto& [name, path] : config.tables) {
    in_stage("preprocess", path, [&, &name = name, &path = path] {
      const RecordTable raw = read_csv_file(path, name);
      write_csv_file(dir / (name + ".csv"), preprocess_table(raw, norm));
    });
  }
}

void run_map(const PipelineConfig& config) {
  const auto mapping = in_stage("map", config.mapping,
                                [&] { return load_mapping_config(config.mapping); });
  EntityRegistry registry;
  if (config.registry) {
    registry = in_stage("map", *config.registry, [&] { return EntityRegistry::load(*config.registry); });
  }
  std::vector<Triple> triples;
  const fs::path dir = config.output / outputs::kPreprocessedDir;
  for (const auto& map : mapping.maps) {
    const fs::path path = dir / (map.table + ".csv");
    in_stage("map", path, [&] {
      const RecordTable table = read_csv_file(path, map.table);
      auto part = apply_triples_map(table, map, registry);
      triples.insert(triples.end(), std::make_move_iterator(part.begin()),
                     std::make_move_iterator(part.end()));
    });
  }
  auto entity_triples = registry.to_triples();
  triples.insert(triples.end(), entity_triples.begin(), entity_triples.end());
  write_ntriples_file(out_file(config, outputs::kEvents), triples);
  registry.save(out_file(config, outputs::kRegistry));
}

void run_temporal(const PipelineConfig& config) {
  const fs::path events_path = out_file(config, outputs::kEvents);
  in_stage("temporal", events_path, [&] {
    const auto triples = read_ntriples_file(events_path);
    const auto timelines = group_timelines(decode_events(triples));
    const auto edges = build_edges(timelines, config.mode);
    write_ntriples_file(out_file(config, outputs::kTemporal), edges_to_triples(edges));
    write_text_file(out_file(config, outputs::kTemporalReport),
                    edge_count_report(timelines, edges));
  });
}

void run_match(const PipelineConfig& config) {
  const fs::path registry_path = out_file(config, outputs::kRegistry);
  if (!config.match_enabled) {
    write_ntriples_file(out_file(config, outputs::kLinks), {});
    write_text_file(out_file(config, outputs::kThresholdReport),
                    threshold_report_csv({}));
    write_text_file(out_file(config, outputs::kVerificationSample),
                    "kind,m_id,m_label,kg_id,kg_label,score\n");
    return;
  }
  const auto registry =
      in_stage("match", registry_path, [&] { return EntityRegistry::load(registry_path); });
  const auto kg = in_stage("match", config.kg, [&] { return load_terminology(config.kg); });
  const auto label_rows =
      in_stage("match", config.labels, [&] { return load_labels(config.labels); });

  std::vector<MedicalEntity> population;
  for (auto& m : registry.entities()) {
    if (m.kind != EntityKind::Surgery) population.push_back(std::move(m));
  }
  const auto candidates = match_all(population, kg);
  const auto labeled = build_labeled_pairs(label_rows, population, kg);

  std::set<EntityKind> kinds;
  for (const auto& c : candidates) kinds.insert(c.m.kind);

  std::map<EntityKind, ThresholdChoice> choices;
  for (EntityKind kind : kinds) {
    std::vector<LabeledPair> mine;
    for (const auto& p : labeled) {
      if (p.candidate.m.kind == kind) mine.push_back(p);
    }
    in_stage("match", config.labels, [&] {
      if (auto fixed = config.fixed_thresholds.find(kind); fixed != config.fixed_thresholds.end()) {
        double metric = std::numeric_limits<double>::quiet_NaN();
        try {
          metric = threshold_metric(mine, fixed->second);
        } catch (const DegenerateLabels&) {
        }
        choices[kind] = {fixed->second, metric};
        return;
      }
      try {
        const auto grid = default_threshold_grid();
        const auto [t, m] = select_threshold(mine, grid);
        choices[kind] = {t, m};
      } catch (const DegenerateLabels& e) {
        throw DegenerateLabels(std::string(to_string(kind)) + ": " + e.what());
      }
    });
  }

  const auto links = apply_links(candidates, choices, population);
  write_ntriples_file(out_file(config, outputs::kLinks), links.links);
  write_text_file(out_file(config, outputs::kThresholdReport),
                  threshold_report_csv(links.reports));

  const auto sample = sample_verification(candidates, config.sample_ratio, config.seed);
  std::string csv = "kind,m_id,m_label,kg_id,kg_label,score\n";
  for (const auto& c : sample) {
    csv += csv_line({std::string(to_string(c.m.kind)), c.m.id.local(), c.m.label, c.e.kg_id,
                     c.e.label, format_score(c.score)});
  }
  write_text_file(out_file(config, outputs::kVerificationSample), csv);
}

// ---------------------------------------------------------------------------
// Statistics
// ---------------------------------------------------------------------------

DatasetStats compute_stats(const TripleStore& store) {
  DatasetStats st;
  for (EventKind k : kAllEventKinds) st.events[k] = 0;
  for (RelationKind k : kAllRelationKinds) st.relations[k] = 0;
  for (EntityKind k : {EntityKind::Disease, EntityKind::Drug, EntityKind::Assay}) st.links[k] = 0;
  st.total_triples = store.size();

  const auto type_id = store.id_of(vocab::rdf_type());
  if (type_id) {
    for (EventKind k : kAllEventKinds) {
      if (auto cls = store.id_of(class_iri(k))) st.events[k] = store.scan({}, type_id, cls).size();
    }
  }
  for (RelationKind k : kAllRelationKinds) {
    if (auto pred = store.id_of(relation_predicate(k))) st.relations[k] = store.scan({}, pred, {}).size();
  }
  if (auto match = store.id_of(vocab::skos_exact_match()); match && type_id) {
    for (auto& [kind, count] : st.links) {
      const auto cls = store.id_of(class_iri(kind));
      if (!cls) continue;
      std::set<TermId> linked;
      for (const auto& t : store.scan({}, match, {})) {
        if (!store.scan(t.s, type_id, cls).empty()) linked.insert(t.s);
      }
      count = linked.size();
    }
  }
  return st;
}

std::string stats_csv(const DatasetStats& stats) {
  std::string out = "category,kind,count\n";
  for (EventKind k : kAllEventKinds) {
    out += "event," + std::string(to_string(k)) + "," + std::to_string(stats.events.at(k)) + "\n";
  }
  for (RelationKind k : kAllRelationKinds) {
    out += "relation," + std::string(to_string(k)) + "," +
           std::to_string(stats.relations.at(k)) + "\n";
  }
  for (EntityKind k : {EntityKind::Disease, EntityKind::Drug, EntityKind::Assay}) {
    out += "link," + std::string(to_string(k)) + "," + std::to_string(stats.links.at(k)) + "\n";
  }
  out += "total,triples," + std::to_string(stats.total_triples) + "\n";
  return out;
}

DatasetStats run_stats(std::span<const fs::path> nt_files) {
  const fs::path locus = nt_files.empty() ? fs::path("<none>") : nt_files.front();
  return in_stage("stats", locus, [&] { return compute_stats(TripleStore::load_files(nt_files)); });
}

DatasetStats run_pipeline(const PipelineConfig& config) {
  in_stage("config", config.output, [&] { config.validate(); });
  fs::create_directories(config.output);
  run_preprocess(config);
  run_map(config);
  run_temporal(config);
  run_match(config);
  const std::vector<fs::path> nt = {out_file(config, outputs::kEvents),
                                    out_file(config, outputs::kTemporal),
                                    out_file(config, outputs::kLinks)};
  const DatasetStats stats = run_stats(nt);
  write_text_file(out_file(config, outputs::kStats), stats_csv(stats));
  return stats;
}

}  // namespace peg

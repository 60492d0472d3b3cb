#include <gtest/gtest.h>

#include "oracles.hpp"
#include "peg/errors.hpp"
#include "peg/mapping.hpp"
#include "peg/ntriples.hpp"
#include "peg/pipeline.hpp"
#include "peg/preprocess.hpp"

using namespace peg;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> output_files(const fs::path& dir) {
  std::vector<std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out.push_back(fs::relative(e.path(), dir).generic_string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(PipelineConfig, LoadsShippedMiniConfig) {
  const auto cfg = PipelineConfig::load(oracle::data_dir() / "mini" / "pipeline.json");
  EXPECT_EQ(cfg.tables.size(), 6u);
  EXPECT_EQ(cfg.seed, 20190101u);
  EXPECT_DOUBLE_EQ(cfg.sample_ratio, 0.25);
  EXPECT_TRUE(cfg.match_enabled);
  EXPECT_TRUE(cfg.kg.is_absolute());
  EXPECT_NO_THROW(cfg.validate());
}

TEST(PipelineConfig, ParseErrors) {
  EXPECT_THROW(PipelineConfig::from_json("{", "."), ConfigParseError);
  EXPECT_THROW(PipelineConfig::from_json(R"({"temporal_mode": "sideways"})", "."), Error);
  EXPECT_THROW(parse_temporal_mode("both"), Error);
  EXPECT_EQ(parse_temporal_mode("reduced"), TemporalMode::Reduced);
}

TEST(RunPipeline, MissingKgFailsBeforeAnyWork) {
  oracle::TempDir tmp("pl-nokg");
  auto cfg = oracle::mini_config(tmp.path() / "out", TemporalMode::Full);
  cfg.kg = tmp.path() / "absent.csv";
  try {
    run_pipeline(cfg);
    FAIL() << "expected PipelineError";
  } catch (const PipelineError& e) {
    EXPECT_EQ(e.stage(), "config");
    EXPECT_NE(std::string(e.what()).find("absent.csv"), std::string::npos) << e.what();
  }
  EXPECT_FALSE(fs::exists(tmp.path() / "out"));
}

TEST(RunPipeline, EventCountsEqualPreprocessedRows) {
  oracle::TempDir tmp("pl-counts");
  const auto stats = run_pipeline(oracle::mini_config(tmp.path(), TemporalMode::Full));
  const std::map<EventKind, std::size_t> expected{{EventKind::Hospitalization, 6},
                                                  {EventKind::Diagnosis, 8},
                                                  {EventKind::Drug, 10},
                                                  {EventKind::Assay, 9},
                                                  {EventKind::Surgery, 2}};
  EXPECT_EQ(stats.events, expected);
  for (const char* f : {"events.nt", "temporal.nt", "links.nt", "registry.json",
                        "threshold_report.csv", "stats.csv", "temporal_report.csv"}) {
    EXPECT_TRUE(fs::exists(tmp.path() / f)) << f;
  }
  EXPECT_EQ(read_text_file(tmp.path() / "stats.csv"), stats_csv(stats));
}

TEST(RunPipeline, EventsFileFollowsCountLaw) {
  oracle::TempDir tmp("pl-law");
  const auto cfg = oracle::mini_config(tmp.path(), TemporalMode::Full);
  run_pipeline(cfg);
  const auto mapping = load_mapping_config(cfg.mapping);
  std::size_t expected = 0;
  for (const auto& map : mapping.maps) {
    const auto table = read_csv_file(tmp.path() / "preprocessed" / (map.table + ".csv"), map.table);
    for (const auto& row : table.rows) {
      expected += 1;
      for (const auto& pom : map.pom) {
        if (!row[*table.column_index(pom.column)].empty()) ++expected;
      }
    }
  }
  const auto registry = EntityRegistry::load(tmp.path() / "registry.json");
  expected += 2 * registry.size();  // type + label per minted entity
  EXPECT_EQ(read_ntriples_file(tmp.path() / "events.nt").size(), expected);
}

TEST(RunPipeline, ModesDifferInRawEdgesButNotStats) {
  oracle::TempDir full("pl-full"), reduced("pl-reduced");
  const auto a = run_pipeline(oracle::mini_config(full.path(), TemporalMode::Full));
  const auto b = run_pipeline(oracle::mini_config(reduced.path(), TemporalMode::Reduced));
  EXPECT_EQ(a, b);
  EXPECT_EQ(read_text_file(full.path() / "stats.csv"), read_text_file(reduced.path() / "stats.csv"));
  EXPECT_GT(read_ntriples_file(full.path() / "temporal.nt").size(),
            read_ntriples_file(reduced.path() / "temporal.nt").size());
}

TEST(RunPipeline, Deterministic) {
  oracle::TempDir one("pl-det1"), two("pl-det2");
  run_pipeline(oracle::mini_config(one.path(), TemporalMode::Reduced));
  run_pipeline(oracle::mini_config(two.path(), TemporalMode::Reduced));
  const auto files = output_files(one.path());
  EXPECT_EQ(files, output_files(two.path()));
  for (const auto& f : files) {
    EXPECT_EQ(oracle::slurp(one.path() / f), oracle::slurp(two.path() / f)) << f;
  }
}

TEST(RunPipeline, StagesInIsolationMatchFullRun) {
  oracle::TempDir whole("pl-whole"), staged("pl-staged");
  run_pipeline(oracle::mini_config(whole.path(), TemporalMode::Full));
  const auto cfg = oracle::mini_config(staged.path(), TemporalMode::Full);
  run_preprocess(cfg);
  run_map(cfg);
  run_temporal(cfg);
  run_match(cfg);
  for (const auto& f : output_files(staged.path())) {
    EXPECT_EQ(oracle::slurp(whole.path() / f), oracle::slurp(staged.path() / f)) << f;
  }
}

TEST(RunPipeline, StageWithoutInputsNamesTheStage) {
  oracle::TempDir tmp("pl-nostage");
  try {
    run_temporal(oracle::mini_config(tmp.path(), TemporalMode::Full));
    FAIL() << "expected PipelineError";
  } catch (const PipelineError& e) {
    EXPECT_EQ(e.stage(), "temporal");
  }
}

TEST(RunStats, ConcatenatedOutputsMatchPipelineStats) {
  oracle::TempDir tmp("pl-stats");
  const auto stats = run_pipeline(oracle::mini_config(tmp.path(), TemporalMode::Reduced));
  std::string all;
  for (const char* f : {"events.nt", "temporal.nt", "links.nt"}) {
    all += read_text_file(tmp.path() / f);
  }
  write_text_file(tmp.path() / "all.nt", all);
  const std::vector<fs::path> one{tmp.path() / "all.nt"};
  EXPECT_EQ(run_stats(one), stats);
}

TEST(RunStats, EmptyIsAllZeros) {
  const auto stats = run_stats(std::vector<fs::path>{});
  EXPECT_EQ(stats.total_triples, 0u);
  EXPECT_EQ(stats_csv(stats),
            "category,kind,count\n"
            "event,HospitalizationEvent,0\nevent,DiagnosisEvent,0\nevent,DrugEvent,0\n"
            "event,AssayEvent,0\nevent,SurgeryEvent,0\n"
            "relation,Before,0\nrelation,After,0\nrelation,Concurrent,0\nrelation,During,0\n"
            "relation,Overlap,0\n"
            "link,Disease,0\nlink,Drug,0\nlink,Assay,0\n"
            "total,triples,0\n");
}

TEST(RunStats, RelationCountsMatchOracle) {
  oracle::TempDir tmp("pl-tally");
  const auto stats = run_pipeline(oracle::mini_config(tmp.path(), TemporalMode::Reduced));
  const auto events = decode_events(read_ntriples_file(tmp.path() / "events.nt"));
  std::map<Iri, std::vector<MedicalEvent>> by_patient;
  for (const auto& e : events) by_patient[e.patient].push_back(e);
  std::map<RelationKind, std::size_t> expected;
  for (RelationKind k : kAllRelationKinds) expected[k] = 0;
  for (const auto& [patient, evs] : by_patient) {
    for (const auto& e : oracle::full_edges(evs)) ++expected[e.rel];
  }
  EXPECT_EQ(stats.relations, expected);
  EXPECT_GT(expected[RelationKind::Overlap], 0u);
  EXPECT_GT(expected[RelationKind::Concurrent], 0u);
}

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "peg/model.hpp"
#include "peg/store.hpp"
#include "peg/temporal.hpp"

namespace peg {

struct PipelineConfig {
  std::map<std::string, std::filesystem::path> tables;  // table name -> CSV
  std::filesystem::path normalization;
  std::filesystem::path mapping;
  std::optional<std::filesystem::path> registry;  // seed registry, optional
  bool match_enabled = true;
  std::filesystem::path kg;
  std::filesystem::path labels;
  double sample_ratio = 0.1;
  std::map<EntityKind, double> fixed_thresholds;
  TemporalMode mode = TemporalMode::Full;
  std::filesystem::path output;
  std::uint64_t seed = 0;

  // Relative paths resolve against `base_dir`. Throws ConfigParseError.
  static PipelineConfig from_json(std::string_view json_text,
                                  const std::filesystem::path& base_dir);
  static PipelineConfig load(const std::filesystem::path& path);

  // Throws ConfigValidationError when a referenced input is missing.
  void validate() const;
};

TemporalMode parse_temporal_mode(std::string_view text);  // "full" | "reduced"

struct DatasetStats {
  std::map<EventKind, std::size_t> events;
  std::map<RelationKind, std::size_t> relations;
  std::map<EntityKind, std::size_t> links;  // linked distinct entities per kind
  std::size_t total_triples = 0;

  friend bool operator==(const DatasetStats&, const DatasetStats&) = default;
};

DatasetStats compute_stats(const TripleStore& store);

// Frozen layout "category,kind,count": five event rows, five relation rows,
// three link rows (Disease, Drug, Assay), then "total,triples,N".
std::string stats_csv(const DatasetStats& stats);

// Output file names inside PipelineConfig::output.
namespace outputs {
inline constexpr std::string_view kPreprocessedDir = "preprocessed";
inline constexpr std::string_view kEvents = "events.nt";
inline constexpr std::string_view kTemporal = "temporal.nt";
inline constexpr std::string_view kTemporalReport = "temporal_report.csv";
inline constexpr std::string_view kLinks = "links.nt";
inline constexpr std::string_view kRegistry = "registry.json";
inline constexpr std::string_view kThresholdReport = "threshold_report.csv";
inline constexpr std::string_view kVerificationSample = "verification_sample.csv";
inline constexpr std::string_view kStats = "stats.csv";
}  // namespace outputs

// Individual stages. Each reads its inputs from the config and the previous
// stage's files in the output directory, and throws PipelineError naming
// the stage and the input it was processing.
void run_preprocess(const PipelineConfig& config);
void run_map(const PipelineConfig& config);
void run_temporal(const PipelineConfig& config);
void run_match(const PipelineConfig& config);
// Loads the given .nt files (temporal edges closed) and counts.
DatasetStats run_stats(std::span<const std::filesystem::path> nt_files);

// validate, then every stage in order, then stats.csv.
DatasetStats run_pipeline(const PipelineConfig& config);

}  // namespace peg

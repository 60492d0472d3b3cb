// peg: build a patient event graph from EMR tables and query it.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "peg/errors.hpp"
#include "peg/pipeline.hpp"
#include "peg/query.hpp"
#include "peg/store.hpp"
#include "peg/table.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kRuntimeFailure = 1;
constexpr int kUsageError = 2;

struct StageOptions {
  std::string config;
  std::optional<std::string> mode;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

void add_stage_options(CLI::App* cmd, StageOptions& opts) {
  cmd->add_option("--config", opts.config, "pipeline config (JSON)")->required();
  cmd->add_option("--mode", opts.mode, "temporal mode")
      ->check(CLI::IsMember({"full", "reduced"}));
  cmd->add_option("--seed", opts.seed, "seed for the verification sample");
  cmd->add_option("--out", opts.out, "output directory");
}

peg::PipelineConfig load_config(const StageOptions& opts) {
  auto config = peg::PipelineConfig::load(opts.config);
  if (opts.mode) config.mode = peg::parse_temporal_mode(*opts.mode);
  if (opts.seed) config.seed = *opts.seed;
  if (opts.out) config.output = fs::absolute(*opts.out);
  return config;
}

void emit(const std::optional<std::string>& out, const std::string& text) {
  if (out) {
    peg::write_text_file(*out, text);
  } else {
    std::cout << text;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Patient event graph construction and query tool"};
  app.require_subcommand(1);

  StageOptions stage_opts;
  auto* preprocess = app.add_subcommand("preprocess", "normalize the source tables");
  auto* map = app.add_subcommand("map", "map preprocessed tables to event triples");
  auto* temporal = app.add_subcommand("temporal", "establish temporal relations");
  auto* match = app.add_subcommand("match", "link entities to the terminology graph");
  auto* build = app.add_subcommand("build", "run every stage and write stats.csv");
  for (auto* cmd : {preprocess, map, temporal, match, build}) add_stage_options(cmd, stage_opts);

  std::string query_path;
  std::vector<std::string> query_stores;
  std::optional<std::string> query_out;
  auto* query = app.add_subcommand("query", "evaluate a query against .nt files");
  query->add_option("query", query_path, "query file")->required()->check(CLI::ExistingFile);
  query->add_option("stores", query_stores, "N-Triples files")->required()->check(CLI::ExistingFile);
  query->add_option("--out", query_out, "write results to a file instead of stdout");

  std::vector<std::string> stats_stores;
  std::optional<std::string> stats_out;
  auto* stats = app.add_subcommand("stats", "dataset statistics for .nt files");
  stats->add_option("stores", stats_stores, "N-Triples files")->check(CLI::ExistingFile);
  stats->add_option("--out", stats_out, "write stats.csv to a file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (build->parsed()) {
      const auto config = load_config(stage_opts);
      const auto result = peg::run_pipeline(config);
      std::cout << peg::stats_csv(result);
    } else if (preprocess->parsed() || map->parsed() || temporal->parsed() || match->parsed()) {
      const auto config = load_config(stage_opts);
      if (preprocess->parsed()) peg::run_preprocess(config);
      if (map->parsed()) peg::run_map(config);
      if (temporal->parsed()) peg::run_temporal(config);
      if (match->parsed()) peg::run_match(config);
    } else if (query->parsed()) {
      const auto q = peg::parse_query(peg::read_text_file(query_path));
      const std::vector<fs::path> paths(query_stores.begin(), query_stores.end());
      const auto store = peg::TripleStore::load_files(paths);
      emit(query_out, peg::format_result(peg::evaluate(store, q)));
    } else if (stats->parsed()) {
      const std::vector<fs::path> paths(stats_stores.begin(), stats_stores.end());
      emit(stats_out, peg::stats_csv(peg::run_stats(paths)));
    }
  } catch (const peg::QuerySyntaxError& e) {
    std::cerr << "query syntax error at " << e.what() << "\n";
    return kUsageError;
  } catch (const peg::UnboundSelectVariable& e) {
    std::cerr << "invalid query: " << e.what() << "\n";
    return kUsageError;
  } catch (const peg::DisconnectedPattern& e) {
    std::cerr << "invalid query: " << e.what() << "\n";
    return kUsageError;
  } catch (const peg::ConfigParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeFailure;
  }
  return 0;
}

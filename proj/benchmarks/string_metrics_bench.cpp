#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "peg/matcher.hpp"
#include "peg/text.hpp"

namespace {

std::vector<std::string> labels(std::size_t n, std::size_t len) {
  static const std::u32string alphabet = U"心力衰竭冠病胃癌高血压蛋白尿酸ab";
  std::mt19937_64 rng(n * 31 + len);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::u32string s;
    for (std::size_t k = 0; k < len; ++k) s.push_back(alphabet[pick(rng)]);
    out.push_back(peg::text::encode_utf8(s));
  }
  return out;
}

void BM_Score(benchmark::State& state) {
  const auto xs = labels(256, static_cast<std::size_t>(state.range(0)));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(peg::score(xs[i % 256], xs[(i * 7 + 3) % 256]));
    ++i;
  }
}
BENCHMARK(BM_Score)->Arg(4)->Arg(8)->Arg(16)->Arg(32);

void BM_EditDistance(benchmark::State& state) {
  const auto xs = labels(2, static_cast<std::size_t>(state.range(0)));
  const auto a = peg::text::decode_utf8(xs[0]);
  const auto b = peg::text::decode_utf8(xs[1]);
  for (auto _ : state) benchmark::DoNotOptimize(peg::edit_distance(a, b));
}
BENCHMARK(BM_EditDistance)->Arg(8)->Arg(64);

void BM_MatchAll(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto names = labels(n, 6);
  const auto terms = labels(n * 4, 6);
  std::vector<peg::MedicalEntity> entities;
  for (std::size_t i = 0; i < n; ++i) {
    entities.push_back({peg::peg_r("disease-" + std::to_string(i)), peg::EntityKind::Disease, names[i]});
  }
  std::vector<peg::TermEntry> kg;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    kg.push_back(peg::TermEntry::make("D" + std::to_string(i), peg::EntityKind::Disease, terms[i]));
  }
  for (auto _ : state) benchmark::DoNotOptimize(peg::match_all(entities, kg));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n * kg.size()));
}
BENCHMARK(BM_MatchAll)->Arg(50)->Arg(200);

}  // namespace

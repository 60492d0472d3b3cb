#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "peg/errors.hpp"
#include "peg/preprocess.hpp"
#include "peg/table.hpp"

using namespace peg;

namespace {

const NormalizationConfig& shipped() {
  static const NormalizationConfig cfg =
      NormalizationConfig::load(oracle::data_dir() / "config" / "normalization.json");
  return cfg;
}

RecordTable mini_table(const std::string& name) {
  return read_csv_file(oracle::data_dir() / "mini" / "tables" / (name + ".csv"), name);
}

using Strings = std::vector<std::string>;

}  // namespace

TEST(NormalizeQualitative, Examples) {
  EXPECT_EQ(normalize_qualitative("(+)", shipped()), "positive");
  EXPECT_EQ(normalize_qualitative("negative (-)", shipped()), "negative");
  EXPECT_EQ(normalize_qualitative("120", shipped()), "120");
}

TEST(NormalizeQualitative, FoldsFullwidthParensAndSpacing) {
  EXPECT_EQ(normalize_qualitative("（+）", shipped()), "positive");
  EXPECT_EQ(normalize_qualitative("  negative(-) ", shipped()), "negative");
  EXPECT_EQ(normalize_qualitative("negative （ - ）", shipped()), "negative");
  EXPECT_EQ(normalize_qualitative("阳性", shipped()), "positive");
  EXPECT_EQ(normalize_qualitative(" 未见异常 ", shipped()), "未见异常");
  EXPECT_EQ(fold_qualitative(" a   b （x） "), "a b(x)");
}

TEST(NormalizeQualitative, CanonicalValuesAreFixedPoints) {
  for (const auto& v : shipped().canonical_values()) {
    EXPECT_EQ(normalize_qualitative(v, shipped()), v);
  }
  EXPECT_TRUE(shipped().canonical_values().count("positive"));
  EXPECT_TRUE(shipped().canonical_values().count("negative"));
}

TEST(ConvertUnit, Examples) {
  auto [v1, u1] = convert_unit(Decimal::parse("12"), "hemoglobin", "g/dL", shipped());
  EXPECT_EQ(v1.to_string(), "120");
  EXPECT_EQ(u1, "g/L");
  auto [v2, u2] = convert_unit(Decimal::parse("95"), "hemoglobin", "g/L", shipped());
  EXPECT_EQ(v2.to_string(), "95");
  EXPECT_EQ(u2, "g/L");
  auto [v3, u3] = convert_unit(Decimal::parse("7.5"), "unknown-quantity", "mg", shipped());
  EXPECT_EQ(v3.to_string(), "7.5");
  EXPECT_EQ(u3, "mg");
}

TEST(ConvertUnit, SecondConversionIsIdentity) {
  for (const char* x : {"0", "1.25", "12", "0.007", "-3.5"}) {
    auto [v, u] = convert_unit(Decimal::parse(x), "血红蛋白", "g/dL", shipped());
    auto [v2, u2] = convert_unit(v, "血红蛋白", u, shipped());
    EXPECT_EQ(v2, v);
    EXPECT_EQ(u2, u);
  }
}

TEST(SplitMultivalue, Examples) {
  EXPECT_EQ(split_multivalue("冠心病, 心力衰竭", shipped()), (Strings{"冠心病", "心力衰竭"}));
  EXPECT_EQ(split_multivalue("心力衰竭", shipped()), (Strings{"心力衰竭"}));
  EXPECT_EQ(split_multivalue("a;; b ,", shipped()), (Strings{"a", "b"}));
  EXPECT_EQ(split_multivalue("替加氟；尿嘧啶氮芥、x，y", shipped()),
            (Strings{"替加氟", "尿嘧啶氮芥", "x", "y"}));
  EXPECT_TRUE(split_multivalue(" , ", shipped()).empty());
}

TEST(PreprocessTable, DiagnosisRowExplodes) {
  RecordTable dr{"DR",
                 {"DiagnosisID", "PatientID", "Date", "Disease", "Situation"},
                 {{"213", "859", "2012-01-01", "冠心病, 心力衰竭", "恶化"}}};
  const auto out = preprocess_table(dr, shipped());
  ASSERT_EQ(out.rows.size(), 2u);
  EXPECT_EQ(out.rows[0], (Strings{"213_1", "859", "2012-01-01", "冠心病", "恶化"}));
  EXPECT_EQ(out.rows[1], (Strings{"213_2", "859", "2012-01-01", "心力衰竭", "恶化"}));
}

TEST(PreprocessTable, AssayResultIsNormalized) {
  RecordTable ar{"AR",
                 {"AssayID", "PatientID", "Date", "AssayName", "Result", "Unit", "Prompt"},
                 {{"1", "859", "2012-01-01", "尿蛋白", "(+)", "", ""},
                  {"2", "859", "2012-01-01", "血红蛋白", "12", "g/dL", "↓"}}};
  const auto out = preprocess_table(ar, shipped());
  ASSERT_EQ(out.rows.size(), 2u);
  EXPECT_EQ(out.rows[0], (Strings{"1", "859", "2012-01-01", "尿蛋白", "positive", "", ""}));
  EXPECT_EQ(out.rows[1], (Strings{"2", "859", "2012-01-01", "血红蛋白", "120", "g/L", "偏低"}));
}

TEST(PreprocessTable, EmptyTableStaysEmpty) {
  RecordTable dr{"DR", {"DiagnosisID", "PatientID", "Date", "Disease", "Situation"}, {}};
  const auto out = preprocess_table(dr, shipped());
  EXPECT_TRUE(out.rows.empty());
  EXPECT_EQ(out.columns, dr.columns);
}

TEST(PreprocessTable, MissingMandatoryCellDropsOrKeeps) {
  RecordTable dr{"DR",
                 {"DiagnosisID", "PatientID", "Date", "Disease", "Situation"},
                 {{"1", "859", "", "冠心病", ""}, {"2", "859", "2012-01-01", "冠心病", ""}}};
  EXPECT_EQ(preprocess_table(dr, shipped()).rows.size(), 1u);
  auto keep = shipped();
  keep.missing_policy = MissingPolicy::KeepEmpty;
  EXPECT_EQ(preprocess_table(dr, keep).rows.size(), 2u);
}

TEST(PreprocessTable, MalformedNumberNamesTheCell) {
  RecordTable ar{"AR",
                 {"AssayID", "PatientID", "Date", "AssayName", "Result", "Unit", "Prompt"},
                 {{"1", "859", "2012-01-01", "血红蛋白", "twelve", "g/dL", ""}}};
  try {
    preprocess_table(ar, shipped());
    FAIL() << "expected MalformedNumber";
  } catch (const MalformedNumber& e) {
    EXPECT_NE(std::string(e.what()).find("Result"), std::string::npos) << e.what();
  }
}

TEST(PreprocessTable, UnknownTableOrColumnIsConfigError) {
  RecordTable xr{"XR", {"a"}, {{"1"}}};
  EXPECT_THROW(preprocess_table(xr, shipped()), ConfigValidationError);
  RecordTable dr{"DR", {"DiagnosisID", "PatientID", "Date"}, {}};
  EXPECT_THROW(preprocess_table(dr, shipped()), ConfigValidationError);
}

TEST(PreprocessTable, IdempotentOnMiniTables) {
  for (const char* name : {"PR", "HR", "DR", "MR", "AR", "SR"}) {
    const auto once = preprocess_table(mini_table(name), shipped());
    EXPECT_EQ(preprocess_table(once, shipped()), once) << name;
  }
}

TEST(PreprocessTable, ExplosionConservation) {
  // Closed form computed here: product of non-empty piece counts, rows with an
  // empty mandatory cell removed.
  std::mt19937_64 rng(7);
  const Strings pool{"冠心病", "心衰", "胃癌", ""};
  std::uniform_int_distribution<int> n_pieces(0, 3), pick(0, 3), n_rows(0, 12);
  for (int round = 0; round < 50; ++round) {
    RecordTable dr{"DR", {"DiagnosisID", "PatientID", "Date", "Disease", "Situation"}, {}};
    std::size_t expected = 0;
    const int rows = n_rows(rng);
    for (int r = 0; r < rows; ++r) {
      std::string cell;
      std::size_t pieces = 0;
      const int k = n_pieces(rng);
      for (int i = 0; i < k; ++i) {
        const auto& v = pool[static_cast<std::size_t>(pick(rng))];
        if (i) cell += i % 2 ? "，" : "; ";
        cell += v;
        if (!v.empty()) ++pieces;
      }
      const bool has_date = pick(rng) != 0;
      dr.rows.push_back({std::to_string(r), "859", has_date ? "2012-01-01" : "", cell, ""});
      if (has_date && pieces > 0) expected += pieces;
    }
    const auto out = preprocess_table(dr, shipped());
    EXPECT_EQ(out.rows.size(), expected) << "round " << round;
  }
}

TEST(PreprocessTable, MiniFixtureRowCounts) {
  const std::map<std::string, std::size_t> expected{{"PR", 6}, {"HR", 6}, {"DR", 8},
                                                    {"MR", 10}, {"AR", 9}, {"SR", 2}};
  for (const auto& [name, n] : expected) {
    EXPECT_EQ(preprocess_table(mini_table(name), shipped()).rows.size(), n) << name;
  }
}

TEST(NormalizationConfig, ValidationErrors) {
  const std::string base = R"({"qualitative": {"pos": "positive", "neg": "negative"},
    "units": [], "delimiters": [","], "missing": "DropRow", "table_policies": {}})";
  EXPECT_NO_THROW(NormalizationConfig::from_json(base));
  EXPECT_THROW(NormalizationConfig::from_json("{"), ConfigParseError);
  EXPECT_THROW(NormalizationConfig::from_json(R"({"qualitative": 3})"), ConfigParseError);

  auto with_units = [](const std::string& factor) {
    return R"({"qualitative": {"pos": "positive", "neg": "negative"}, "units": [
      {"quantity": "q", "from": "a", "to": "b", "factor": ")" +
           factor + R"("}], "delimiters": [","], "missing": "DropRow", "table_policies": {}})";
  };
  EXPECT_NO_THROW(NormalizationConfig::from_json(with_units("0.5")));
  EXPECT_THROW(NormalizationConfig::from_json(with_units("0")), ConfigValidationError);
  EXPECT_THROW(NormalizationConfig::from_json(with_units("-2")), ConfigValidationError);
}

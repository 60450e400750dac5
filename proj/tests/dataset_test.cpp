#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "praa/dataset.hpp"
#include "praa/error.hpp"
#include "test_support.hpp"

namespace praa {
namespace {

using testing::dataset_from;
using testing::schema_from;

const char* kThreeColumns = "age integer\ncolor categorical\ny decision\n";

TEST(Schema, ParsesKindsMarkersAndComments) {
  const auto schema = schema_from(
      "# comment\n"
      "age integer\n"
      "chol real NA\n"
      "\n"
      "y decision\n");
  ASSERT_EQ(schema.size(), 3u);
  EXPECT_EQ(schema[0].kind, Kind::kInteger);
  EXPECT_EQ(schema[1].missing_marker, "NA");
  EXPECT_EQ(schema[2].kind, Kind::kDecision);
}

TEST(Schema, RejectsUnknownKind) {
  try {
    schema_from("x float\ny decision\n");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("unknown kind 'float'"), std::string::npos);
  }
}

TEST(Schema, RejectsMultipleOrMisplacedDecision) {
  EXPECT_THROW(schema_from("a decision\nb decision\n"), DataError);
  EXPECT_THROW(schema_from("a decision\nb real\n"), DataError);
  EXPECT_THROW(schema_from("a real\na integer\ny decision\n"), DataError);
}

TEST(Schema, RoundTrips) {
  const auto schema = schema_from("age integer\nchol real NA\ny decision\n");
  std::ostringstream out;
  write_schema(out, schema);
  std::istringstream in(out.str());
  const auto again = parse_schema(in);
  ASSERT_EQ(again.size(), schema.size());
  for (std::size_t i = 0; i < schema.size(); ++i) {
    EXPECT_EQ(again[i].name, schema[i].name);
    EXPECT_EQ(again[i].kind, schema[i].kind);
    EXPECT_EQ(again[i].missing_marker, schema[i].missing_marker);
  }
}

TEST(Csv, MarkerBecomesMissing) {
  const auto data = dataset_from(kThreeColumns, "41,?,1\n17,red,0\n");
  EXPECT_EQ(std::get<std::int64_t>(data.cell(0, 0)), 41);
  EXPECT_TRUE(data.missing(0, 1));
  EXPECT_EQ(std::get<std::string>(data.cell(0, 2)), "1");
  EXPECT_EQ(data.missing_count(), 1u);
}

TEST(Csv, ReportsFieldCountWithRowNumber) {
  try {
    dataset_from(kThreeColumns, "41,x\n");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("row 1: expected 3 fields"), std::string::npos);
  }
}

TEST(Csv, NamesColumnOnTypedParseError) {
  try {
    dataset_from(kThreeColumns, "abc,x,1\n18,y,0\n");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("'age'"), std::string::npos);
  }
}

TEST(Csv, RejectsMissingDecisionAndThirdClass) {
  EXPECT_THROW(dataset_from(kThreeColumns, "1,a,?\n2,b,0\n"), DataError);
  EXPECT_THROW(dataset_from(kThreeColumns, "1,a,0\n2,b,1\n3,c,2\n"), DataError);
}

TEST(Csv, SingleLabelFileRejected) {
  EXPECT_THROW(dataset_from(kThreeColumns, "1,a,0\n2,b,0\n"), DataError);
  EXPECT_THROW(dataset_from(kThreeColumns, ""), DataError);
}

TEST(Dataset, InMemorySubsetMayHoldOneClass) {
  const auto data = dataset_from(kThreeColumns, "1,a,0\n2,b,1\n");
  const Dataset one(data.schema(), {data.rows()[1]});
  EXPECT_EQ(one.class_labels()[0], "1");
  EXPECT_EQ(one.class_size(1), 0u);
}

TEST(Csv, HeaderIsSkipped) {
  std::istringstream in("age,color,y\n3,a,p\n4,b,n\n");
  const auto data = parse_csv(in, schema_from(kThreeColumns), true);
  EXPECT_EQ(data.row_count(), 2u);
  EXPECT_EQ(data.class_labels()[0], "p");
}

TEST(Csv, QuotedFields) {
  const auto fields = split_csv_line(R"(1,"a,b","say ""hi""")");
  ASSERT_EQ(fields.size(), 3u);
  EXPECT_EQ(fields[1], "a,b");
  EXPECT_EQ(fields[2], "say \"hi\"");
}

TEST(Csv, RoundTripIsExact) {
  std::mt19937_64 rng(5);
  const auto data = testing::random_dataset(rng, 40, 7, 0.2);
  std::ostringstream out;
  write_csv(out, data);
  std::istringstream in(out.str());
  const auto again = parse_csv(in, data.schema());
  ASSERT_EQ(again.row_count(), data.row_count());
  for (std::size_t i = 0; i < data.row_count(); ++i) {
    for (std::size_t j = 0; j < data.column_count(); ++j) {
      EXPECT_EQ(again.cell(i, j), data.cell(i, j)) << i << "," << j;
    }
  }
}

TEST(Skewness, SymmetricAndConstantAreZero) {
  const std::vector<double> sym{1, 2, 3, 4, 5};
  const std::vector<double> flat{1, 1, 1};
  EXPECT_DOUBLE_EQ(skewness(sym), 0.0);
  EXPECT_EQ(skewness(flat), 0.0);
}

TEST(Skewness, HandEvaluatedFormula) {
  // mean 2.8; deviations -1.8 (x4), 7.2.
  // m2 = (4*3.24 + 51.84)/5 = 12.96, m3 = (4*-5.832 + 373.248)/5 = 69.984,
  // sk = 69.984 / 12.96^1.5 = 69.984 / 46.656 = 1.5.
  const std::vector<double> v{1, 1, 1, 1, 10};
  EXPECT_NEAR(skewness(v), 1.5, 1e-12);
}

TEST(Skewness, SignAntisymmetryUnderReflection) {
  std::mt19937_64 rng(11);
  std::exponential_distribution<double> exp(1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(2 + trial % 17);
    for (auto& x : v) x = exp(rng);
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    std::vector<double> reflected;
    for (double x : v) reflected.push_back(2.0 * mean - x);
    EXPECT_NEAR(skewness(v), -skewness(reflected), 1e-9);
  }
}

TEST(ColumnStats, CountsObservedOnly) {
  const auto data = dataset_from(kThreeColumns, "1,a,1\n2,?,0\n3,a,0\n");
  const auto stats = column_stats(data, 1);
  EXPECT_EQ(stats.cardinality.at("a"), 2u);
  EXPECT_EQ(stats.cardinality.size(), 1u);
}

TEST(Synthetic, ZeroRateHasNoMissing) {
  EXPECT_EQ(generate_synthetic(100, 5, 0.0, 7).missing_count(), 0u);
}

TEST(Synthetic, ExactMissingCount) {
  EXPECT_EQ(generate_synthetic(100, 5, 0.1, 7).missing_count(), 40u);
}

TEST(Synthetic, MissingCountMatchesFloorAcrossShapes) {
  for (std::size_t m : {2u, 10u, 37u, 200u}) {
    for (std::size_t n : {2u, 3u, 6u, 11u}) {
      for (double rate : {0.0, 0.05, 0.1, 0.3, 0.7, 0.99}) {
        const auto data = generate_synthetic(m, n, rate, m * 31 + n);
        const auto expected =
            static_cast<std::size_t>(std::floor(rate * static_cast<double>(m * (n - 1)) + 1e-9));
        EXPECT_EQ(data.missing_count(), expected) << m << " " << n << " " << rate;
        EXPECT_EQ(data.missing_count(data.decision_column()), 0u);
      }
    }
  }
}

TEST(Synthetic, Deterministic) {
  const auto a = generate_synthetic(100, 5, 0.1, 7);
  const auto b = generate_synthetic(100, 5, 0.1, 7);
  std::ostringstream sa;
  std::ostringstream sb;
  write_csv(sa, a);
  write_csv(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
}

TEST(Synthetic, MixesKindsAndBalancesClasses) {
  const auto data = generate_synthetic(50, 7, 0.0, 1);
  EXPECT_EQ(data.schema()[0].kind, Kind::kCategorical);
  EXPECT_EQ(data.schema()[1].kind, Kind::kInteger);
  EXPECT_EQ(data.schema()[2].kind, Kind::kReal);
  EXPECT_EQ(data.class_size(0), 25u);
  EXPECT_EQ(data.class_size(1), 25u);
}

TEST(Synthetic, RejectsBadArguments) {
  EXPECT_THROW(generate_synthetic(10, 5, 1.0, 1), ConfigError);
  EXPECT_THROW(generate_synthetic(10, 5, -0.1, 1), ConfigError);
  EXPECT_THROW(generate_synthetic(10, 1, 0.1, 1), ConfigError);
}

}  // namespace
}  // namespace praa

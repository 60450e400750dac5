#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace praa {

enum class Kind { kCategorical, kInteger, kReal, kDecision };

std::string_view to_string(Kind kind);

struct AttributeSchema {
  std::string name;
  Kind kind = Kind::kReal;
  std::string missing_marker = "?";
};

using Schema = std::vector<AttributeSchema>;

struct Missing {
  friend bool operator==(Missing, Missing) { return true; }
};

// A typed cell. Categorical and decision cells hold their label text.
using Cell = std::variant<Missing, std::string, std::int64_t, double>;

inline bool is_missing(const Cell& cell) {
  return std::holds_alternative<Missing>(cell);
}

// Numeric view of an integer or real cell.
double numeric_value(const Cell& cell);

// Renders a cell the way it is written to CSV (reals round-trip exactly).
std::string format_cell(const Cell& cell, std::string_view missing_marker);

// Checks the schema invariants: unique nonempty names, exactly one decision
// column, and that column last. Throws DataError.
void validate_schema(const Schema& schema);

// Immutable m x n table. The last column is the decision, with at most two
// labels; loaded files must carry exactly two, while in-memory subsets may
// hold a single record or a single class.
class Dataset {
 public:
  using Row = std::vector<Cell>;

  // Validates every cell against the schema; throws DataError.
  Dataset(Schema schema, std::vector<Row> rows);

  const Schema& schema() const { return schema_; }
  const std::vector<Row>& rows() const { return rows_; }
  std::size_t row_count() const { return rows_.size(); }
  std::size_t column_count() const { return schema_.size(); }
  std::size_t feature_count() const { return schema_.size() - 1; }
  std::size_t decision_column() const { return schema_.size() - 1; }

  const Cell& cell(std::size_t row, std::size_t column) const {
    return rows_[row][column];
  }
  bool missing(std::size_t row, std::size_t column) const {
    return is_missing(rows_[row][column]);
  }

  // Decision labels in order of first appearance; the second is empty when
  // only one class is present.
  const std::array<std::string, 2>& class_labels() const { return labels_; }
  // 0 or 1, indexing class_labels().
  int class_of(std::size_t row) const { return classes_[row]; }
  std::size_t class_size(int cls) const;

  std::size_t missing_count() const;
  std::size_t missing_count(std::size_t column) const;

 private:
  Schema schema_;
  std::vector<Row> rows_;
  std::array<std::string, 2> labels_;
  std::vector<int> classes_;
};

struct ColumnStats {
  std::size_t column = 0;
  double skewness = 0.0;
  double mean = 0.0;
  // Populated for categorical and integer columns only; keys are the
  // rendered cell text.
  std::map<std::string, std::size_t> cardinality;
};

// Population skewness with divisor m. Constant input yields 0.
double skewness(std::span<const double> values);

ColumnStats column_stats(const Dataset& data, std::size_t column);

Schema load_schema(const std::filesystem::path& path);
Schema parse_schema(std::istream& in);
void write_schema(std::ostream& out, const Schema& schema);

Dataset load_csv(const std::filesystem::path& path, const Schema& schema,
                 bool has_header = false);
Dataset parse_csv(std::istream& in, const Schema& schema,
                  bool has_header = false);
void write_csv(std::ostream& out, const Dataset& data);

// Splits one CSV record (RFC 4180 quoting, no embedded newlines).
std::vector<std::string> split_csv_line(std::string_view line);

struct SyntheticOptions {
  // Probability that the signal column (feature 0) agrees with the class.
  // 1.0 makes feature 0 perfectly predictive.
  double signal_strength = 0.85;
};

// Reproducible mixed-type data. Feature kinds cycle categorical, integer,
// real; feature 0 carries the class signal. Exactly
// floor(missing_rate * m * (n - 1)) feature cells are MISSING.
Dataset generate_synthetic(std::size_t rows, std::size_t columns,
                           double missing_rate, std::uint64_t seed,
                           const SyntheticOptions& options = {});

}  // namespace praa

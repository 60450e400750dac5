#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "praa/dataset.hpp"

namespace praa {

// How the cross-class real-valued index builds its second counting set.
//   kAnchored:  both sets are drawn from the first record's class column.
//   kSymmetric: the second set is drawn from the second record's class,
//               using that class's skewness sign.
enum class CrossRealSets { kAnchored, kSymmetric };

// Symmetric m x m matrix of record proximities.
class DistanceMatrix {
 public:
  explicit DistanceMatrix(std::size_t size)
      : size_(size), entries_(size * size, 0.0) {}

  std::size_t size() const { return size_; }
  double operator()(std::size_t i, std::size_t k) const {
    return entries_[i * size_ + k];
  }
  double& operator()(std::size_t i, std::size_t k) {
    return entries_[i * size_ + k];
  }
  std::span<const double> row(std::size_t i) const {
    return {entries_.data() + i * size_, size_};
  }

 private:
  std::size_t size_;
  std::vector<double> entries_;
};

// Class-conditional counting tables for every feature column. Built once
// per dataset; pairwise index queries are then table lookups.
//
// Cardinalities count observed cells only and include the record's own
// cell. For real columns the counting direction comes from the sign of the
// class-restricted skewness: values strictly greater than the reference
// when sk >= 0, values less than or equal to it when sk < 0.
class IndexContext {
 public:
  explicit IndexContext(const Dataset& data,
                        CrossRealSets cross_sets = CrossRealSets::kAnchored);

  const Dataset& data() const { return *data_; }
  CrossRealSets cross_sets() const { return cross_sets_; }
  std::size_t features() const { return features_; }

  // Observed cells of `column` within class `cls`.
  std::size_t class_observed(int cls, std::size_t column) const {
    return observed_[cls * features_ + column];
  }
  double class_skewness(int cls, std::size_t column) const {
    return skew_[cls * features_ + column];
  }
  // Nominal/integer columns: occurrences of row's value within its class.
  // Real columns: size of the counting set of row's class relative to the
  // row's value.
  double own_count(std::size_t row, std::size_t column) const {
    return own_[row * features_ + column];
  }
  // Real columns only: size of the counting set of the opposite class
  // relative to the row's value.
  double opposite_count(std::size_t row, std::size_t column) const {
    return opposite_[row * features_ + column];
  }
  bool nominal(std::size_t column) const { return nominal_[column] != 0; }
  bool observed(std::size_t row, std::size_t column) const {
    return observed_cell_[row * features_ + column] != 0;
  }

  // Counting set size in class `cls` of `column` relative to `value`.
  std::size_t count_relative(int cls, std::size_t column, double value) const;

 private:
  const Dataset* data_;
  CrossRealSets cross_sets_;
  std::size_t features_;
  std::vector<std::uint8_t> nominal_;
  std::vector<std::uint8_t> observed_cell_;
  std::vector<std::size_t> observed_;
  std::vector<double> skew_;
  std::vector<std::vector<double>> sorted_;  // [cls * features + column]
  std::vector<double> own_;
  std::vector<double> opposite_;
};

// Per-column indices. Callers guarantee the class relation and observed
// cells stated for each case; all return 0 when i == k.
double index_same_class_nominal(const IndexContext& ctx, std::size_t i,
                                std::size_t k, std::size_t column);
double index_same_class_real(const IndexContext& ctx, std::size_t i,
                             std::size_t k, std::size_t column);
double index_cross_class_nominal(const IndexContext& ctx, std::size_t i,
                                 std::size_t k, std::size_t column);
// The counting sets come from the class of row i (see CrossRealSets).
double index_cross_class_real(const IndexContext& ctx, std::size_t i,
                              std::size_t k, std::size_t column);

// Dispatches on class relation and column kind. Returns 0 when either cell
// is missing. Cross-class real columns are evaluated with the record of the
// first decision label as row i, which keeps the result symmetric.
double column_index(const IndexContext& ctx, std::size_t i, std::size_t k,
                    std::size_t column);

// sqrt of the sum of squared column indices over all feature columns.
double record_distance(const IndexContext& ctx, std::size_t i, std::size_t k);

// Distances from row i to every row, written into out (size m).
void distance_row(const IndexContext& ctx, std::size_t i,
                  std::span<double> out);

DistanceMatrix distance_matrix(const IndexContext& ctx,
                               std::size_t threads = 1);

// Debug dump: "row,column,distance" with 12 significant digits.
void write_distance_csv(std::ostream& out, const DistanceMatrix& matrix);

}  // namespace praa

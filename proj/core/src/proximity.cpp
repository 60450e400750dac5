#include "praa/proximity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <unordered_map>

#include "praa/parallel.hpp"

namespace praa {

IndexContext::IndexContext(const Dataset& data, CrossRealSets cross_sets)
    : data_(&data),
      cross_sets_(cross_sets),
      features_(data.feature_count()),
      nominal_(features_),
      observed_cell_(data.row_count() * features_),
      observed_(2 * features_, 0),
      skew_(2 * features_, 0.0),
      sorted_(2 * features_),
      own_(data.row_count() * features_, 0.0),
      opposite_(data.row_count() * features_, 0.0) {
  const std::size_t m = data.row_count();
  for (std::size_t l = 0; l < features_; ++l) {
    const Kind kind = data.schema()[l].kind;
    nominal_[l] = kind != Kind::kReal;
    for (std::size_t i = 0; i < m; ++i) {
      if (!data.missing(i, l)) {
        observed_cell_[i * features_ + l] = 1;
        ++observed_[data.class_of(i) * features_ + l];
      }
    }

    if (nominal_[l]) {
      std::array<std::unordered_map<std::string, std::size_t>, 2> counts;
      for (std::size_t i = 0; i < m; ++i) {
        if (!observed(i, l)) continue;
        ++counts[data.class_of(i)][format_cell(data.cell(i, l), "")];
      }
      for (std::size_t i = 0; i < m; ++i) {
        if (!observed(i, l)) continue;
        own_[i * features_ + l] = static_cast<double>(
            counts[data.class_of(i)][format_cell(data.cell(i, l), "")]);
      }
      continue;
    }

    for (int cls = 0; cls < 2; ++cls) {
      auto& values = sorted_[cls * features_ + l];
      for (std::size_t i = 0; i < m; ++i) {
        if (observed(i, l) && data.class_of(i) == cls) {
          values.push_back(numeric_value(data.cell(i, l)));
        }
      }
      skew_[cls * features_ + l] = skewness(values);
      std::sort(values.begin(), values.end());
    }
    for (std::size_t i = 0; i < m; ++i) {
      if (!observed(i, l)) continue;
      const int cls = data.class_of(i);
      const double v = numeric_value(data.cell(i, l));
      own_[i * features_ + l] = static_cast<double>(count_relative(cls, l, v));
      opposite_[i * features_ + l] =
          static_cast<double>(count_relative(1 - cls, l, v));
    }
  }
}

std::size_t IndexContext::count_relative(int cls, std::size_t column,
                                         double value) const {
  const auto& values = sorted_[cls * features_ + column];
  const auto upper = std::upper_bound(values.begin(), values.end(), value);
  if (skew_[cls * features_ + column] >= 0.0) {
    return static_cast<std::size_t>(values.end() - upper);
  }
  return static_cast<std::size_t>(upper - values.begin());
}

double index_same_class_nominal(const IndexContext& ctx, std::size_t i,
                                std::size_t k, std::size_t column) {
  if (i == k) return 0.0;
  const double gamma = static_cast<double>(
      ctx.class_observed(ctx.data().class_of(i), column));
  return std::min(ctx.own_count(i, column), ctx.own_count(k, column)) / gamma;
}

double index_same_class_real(const IndexContext& ctx, std::size_t i,
                             std::size_t k, std::size_t column) {
  // Same table layout as the nominal case; only the meaning of the count
  // differs.
  return index_same_class_nominal(ctx, i, k, column);
}

double index_cross_class_nominal(const IndexContext& ctx, std::size_t i,
                                 std::size_t k, std::size_t column) {
  if (i == k) return 0.0;
  const double beta = ctx.own_count(i, column);
  const double delta = ctx.own_count(k, column);
  return std::max(beta, delta) / (beta + delta);
}

double index_cross_class_real(const IndexContext& ctx, std::size_t i,
                              std::size_t k, std::size_t column) {
  if (i == k) return 0.0;
  const double lambda =
      static_cast<double>(ctx.class_observed(0, column) +
                          ctx.class_observed(1, column));
  const double first = ctx.own_count(i, column);
  const double second = ctx.cross_sets() == CrossRealSets::kAnchored
                            ? ctx.opposite_count(k, column)
                            : ctx.own_count(k, column);
  return std::min(first, second) / lambda;
}

double column_index(const IndexContext& ctx, std::size_t i, std::size_t k,
                    std::size_t column) {
  if (i == k || !ctx.observed(i, column) || !ctx.observed(k, column)) {
    return 0.0;
  }
  const auto& data = ctx.data();
  if (data.class_of(i) == data.class_of(k)) {
    return ctx.nominal(column) ? index_same_class_nominal(ctx, i, k, column)
                               : index_same_class_real(ctx, i, k, column);
  }
  if (ctx.nominal(column)) return index_cross_class_nominal(ctx, i, k, column);
  return data.class_of(i) == 0 ? index_cross_class_real(ctx, i, k, column)
                               : index_cross_class_real(ctx, k, i, column);
}

double record_distance(const IndexContext& ctx, std::size_t i, std::size_t k) {
  double sum = 0.0;
  for (std::size_t l = 0; l < ctx.features(); ++l) {
    const double v = column_index(ctx, i, k, l);
    sum += v * v;
  }
  return std::sqrt(sum);
}

void distance_row(const IndexContext& ctx, std::size_t i,
                  std::span<double> out) {
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = record_distance(ctx, i, k);
  }
}

DistanceMatrix distance_matrix(const IndexContext& ctx, std::size_t threads) {
  const std::size_t m = ctx.data().row_count();
  DistanceMatrix matrix(m);
  // Upper triangle per row; each worker writes disjoint cells.
  parallel_for(m, threads, [&](std::size_t i) {
    for (std::size_t k = i + 1; k < m; ++k) {
      const double d = record_distance(ctx, i, k);
      matrix(i, k) = d;
      matrix(k, i) = d;
    }
  });
  return matrix;
}

void write_distance_csv(std::ostream& out, const DistanceMatrix& matrix) {
  char buf[64];
  out << "row,column,distance\n";
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    for (std::size_t k = 0; k < matrix.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%zu,%zu,%.12g\n", i, k, matrix(i, k));
      out << buf;
    }
  }
}

}  // namespace praa

#include "praa/imputer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "praa/error.hpp"
#include "praa/parallel.hpp"

namespace praa {
namespace {

constexpr const char* kModule = "imputer";

struct ModeEntry {
  const Cell* value;
  std::size_t count;
  double nearest;
  std::size_t first_row;
};

// Most frequent value; ties go to the smallest nearest-distance, then the
// lowest row index.
const Cell& mode_of(const std::vector<ModeEntry>& entries) {
  const auto best = std::min_element(
      entries.begin(), entries.end(), [](const ModeEntry& a, const ModeEntry& b) {
        if (a.count != b.count) return a.count > b.count;
        if (a.nearest != b.nearest) return a.nearest < b.nearest;
        return a.first_row < b.first_row;
      });
  return *best->value;
}

void tally(std::vector<ModeEntry>& entries, const Cell& value, double distance,
           std::size_t row) {
  for (auto& e : entries) {
    if (*e.value == value) {
      ++e.count;
      if (distance < e.nearest ||
          (distance == e.nearest && row < e.first_row)) {
        e.nearest = distance;
        e.first_row = row;
      }
      return;
    }
  }
  entries.push_back({&value, 1, distance, row});
}

FilledValue global_fill(const Dataset& data, std::size_t column) {
  const bool real = data.schema()[column].kind == Kind::kReal;
  std::vector<ModeEntry> entries;
  std::vector<double> values;
  for (std::size_t r = 0; r < data.row_count(); ++r) {
    const auto& cell = data.cell(r, column);
    if (is_missing(cell)) continue;
    if (real) {
      values.push_back(std::get<double>(cell));
    } else {
      // Distance is irrelevant globally; first occurrence breaks ties.
      tally(entries, cell, 0.0, r);
    }
  }
  if (values.empty() && entries.empty()) {
    throw DataError(kModule, "column '" + data.schema()[column].name +
                                 "' has no observed values to impute from");
  }
  FilledValue out;
  out.global_fallback = true;
  out.value = real ? Cell{median(std::move(values))} : mode_of(entries);
  return out;
}

Dataset with_filled(const Dataset& data, const std::vector<CellAudit>& cells) {
  auto rows = data.rows();
  for (const auto& audit : cells) rows[audit.row][audit.column] = audit.value;
  return Dataset(data.schema(), std::move(rows));
}

ImputationReport make_report(const Dataset& data, ImputeMethod method,
                             std::vector<std::vector<CellAudit>> per_row) {
  ImputationReport report;
  report.method = method;
  report.filled_per_column.assign(data.column_count(), 0);
  for (auto& row : per_row) {
    for (auto& audit : row) {
      ++report.filled_per_column[audit.column];
      report.cells.push_back(std::move(audit));
    }
  }
  return report;
}

std::vector<std::size_t> rows_with_missing(const Dataset& data) {
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < data.row_count(); ++r) {
    for (std::size_t c = 0; c < data.feature_count(); ++c) {
      if (data.missing(r, c)) {
        rows.push_back(r);
        break;
      }
    }
  }
  return rows;
}

}  // namespace

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty list");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lower + upper);
}

double alpha_score(double x, std::span<const double> distances) {
  std::vector<double> values(distances.begin(), distances.end());
  const double med = median(values);
  for (auto& v : values) v = std::abs(v - med);
  const double mad = median(std::move(values));
  if (mad == 0.0) return x <= med ? 0.0 : 1.0;
  return (x - med) / mad;
}

NeighborSet select_neighbors(std::span<const double> distances,
                             std::size_t target) {
  NeighborSet set;
  set.target = target;
  std::vector<double> others;
  others.reserve(distances.size());
  for (std::size_t k = 0; k < distances.size(); ++k) {
    if (k != target) others.push_back(distances[k]);
  }
  if (others.empty()) return set;

  const double med = median(others);
  std::vector<double> deviations(others.size());
  std::transform(others.begin(), others.end(), deviations.begin(),
                 [med](double v) { return std::abs(v - med); });
  const double mad = median(std::move(deviations));

  for (std::size_t k = 0; k < distances.size(); ++k) {
    if (k == target) continue;
    const double x = distances[k];
    const double alpha = mad == 0.0 ? (x <= med ? 0.0 : 1.0) : (x - med) / mad;
    if (alpha <= 0.0) {
      set.rows.push_back(k);
      set.distances.push_back(x);
    }
  }
  if (set.rows.empty()) {
    std::size_t nearest = target == 0 ? 1 : 0;
    for (std::size_t k = 0; k < distances.size(); ++k) {
      if (k != target && distances[k] < distances[nearest]) nearest = k;
    }
    set.rows.push_back(nearest);
    set.distances.push_back(distances[nearest]);
  }
  return set;
}

NeighborSet select_neighbors(const DistanceMatrix& matrix, std::size_t target) {
  return select_neighbors(matrix.row(target), target);
}

std::vector<double> inverse_distance_weights(std::span<const double> distances) {
  std::vector<double> weights(distances.size());
  double total = 0.0;
  for (std::size_t j = 0; j < distances.size(); ++j) {
    weights[j] = 1.0 / distances[j];
    total += weights[j];
  }
  for (auto& w : weights) w /= total;
  return weights;
}

std::string_view to_string(ImputeMethod method) {
  return method == ImputeMethod::kPraa ? "praa" : "knni";
}

FilledValue impute_cell(const Dataset& data, const NeighborSet& neighbors,
                        std::size_t column) {
  const bool real = data.schema()[column].kind == Kind::kReal;
  FilledValue out;

  if (!real) {
    std::vector<ModeEntry> entries;
    for (std::size_t j = 0; j < neighbors.rows.size(); ++j) {
      const auto& cell = data.cell(neighbors.rows[j], column);
      if (is_missing(cell)) continue;
      tally(entries, cell, neighbors.distances[j], neighbors.rows[j]);
      ++out.contributors;
    }
    if (entries.empty()) return global_fill(data, column);
    out.value = mode_of(entries);
    return out;
  }

  // Zero-distance neighbor: indistinguishable record, copy its value.
  for (std::size_t j = 0; j < neighbors.rows.size(); ++j) {
    const auto& cell = data.cell(neighbors.rows[j], column);
    if (!is_missing(cell) && neighbors.distances[j] == 0.0) {
      out.value = cell;
      out.contributors = 1;
      return out;
    }
  }
  std::vector<double> values;
  std::vector<double> distances;
  for (std::size_t j = 0; j < neighbors.rows.size(); ++j) {
    const auto& cell = data.cell(neighbors.rows[j], column);
    if (is_missing(cell)) continue;
    values.push_back(std::get<double>(cell));
    distances.push_back(neighbors.distances[j]);
  }
  if (values.empty()) return global_fill(data, column);
  out.contributors = values.size();
  const auto weights = inverse_distance_weights(distances);
  double weighted = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) weighted += weights[j] * values[j];
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  // Rounding can push the convex combination a ulp outside its inputs.
  out.value = std::clamp(weighted, *lo, *hi);
  return out;
}

std::pair<Dataset, ImputationReport> impute_dataset(
    const Dataset& data, const ImputeOptions& options) {
  const auto targets = rows_with_missing(data);
  if (targets.empty()) {
    return {data, make_report(data, ImputeMethod::kPraa, {})};
  }
  const IndexContext ctx(data, options.cross_sets);
  std::vector<std::vector<CellAudit>> per_row(targets.size());
  parallel_for(targets.size(), options.threads, [&](std::size_t t) {
    const std::size_t i = targets[t];
    std::vector<double> distances(data.row_count());
    distance_row(ctx, i, distances);
    const auto neighbors = select_neighbors(distances, i);
    for (std::size_t l = 0; l < data.feature_count(); ++l) {
      if (!data.missing(i, l)) continue;
      auto filled = impute_cell(data, neighbors, l);
      per_row[t].push_back({i, l, std::move(filled.value), filled.contributors,
                            filled.global_fallback});
    }
  });
  auto report = make_report(data, ImputeMethod::kPraa, std::move(per_row));
  return {with_filled(data, report.cells), std::move(report)};
}

std::pair<Dataset, ImputationReport> knni_impute(const Dataset& data,
                                                 std::size_t k,
                                                 const ImputeOptions& options) {
  if (k < 1 || k >= data.row_count()) {
    throw ConfigError("knni: k must satisfy 1 <= k < " +
                      std::to_string(data.row_count()));
  }
  const auto targets = rows_with_missing(data);
  if (targets.empty()) {
    return {data, make_report(data, ImputeMethod::kKnni, {})};
  }
  const IndexContext ctx(data, options.cross_sets);
  std::vector<std::vector<CellAudit>> per_row(targets.size());
  parallel_for(targets.size(), options.threads, [&](std::size_t t) {
    const std::size_t i = targets[t];
    std::vector<double> distances(data.row_count());
    distance_row(ctx, i, distances);
    std::vector<std::size_t> order;
    for (std::size_t r = 0; r < data.row_count(); ++r) {
      if (r != i) order.push_back(r);
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return distances[a] < distances[b];
    });
    for (std::size_t l = 0; l < data.feature_count(); ++l) {
      if (!data.missing(i, l)) continue;
      NeighborSet nearest;
      nearest.target = i;
      for (std::size_t r : order) {
        if (nearest.rows.size() == k) break;
        if (data.missing(r, l)) continue;
        nearest.rows.push_back(r);
        nearest.distances.push_back(distances[r]);
      }
      CellAudit audit{i, l, Missing{}, nearest.rows.size(), false};
      if (nearest.rows.empty()) {
        auto filled = global_fill(data, l);
        audit.value = std::move(filled.value);
        audit.global_fallback = true;
      } else if (data.schema()[l].kind == Kind::kReal) {
        double sum = 0.0;
        for (std::size_t r : nearest.rows) sum += std::get<double>(data.cell(r, l));
        audit.value = sum / static_cast<double>(nearest.rows.size());
      } else {
        audit.value = impute_cell(data, nearest, l).value;
      }
      per_row[t].push_back(std::move(audit));
    }
  });
  auto report = make_report(data, ImputeMethod::kKnni, std::move(per_row));
  return {with_filled(data, report.cells), std::move(report)};
}

void write_report(std::ostream& out, const Dataset& data,
                  const ImputationReport& report) {
  out << "row,column,method,value,neighbors,source\n";
  for (const auto& audit : report.cells) {
    out << audit.row << ',' << data.schema()[audit.column].name << ','
        << to_string(report.method) << ',' << format_cell(audit.value, "?")
        << ',' << audit.neighbors << ','
        << (audit.global_fallback ? "global" : "neighbors") << '\n';
  }
}

}  // namespace praa

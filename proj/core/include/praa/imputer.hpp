#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "praa/dataset.hpp"
#include "praa/proximity.hpp"

namespace praa {

// Robust standardized distance: (x - median) / MAD. When MAD is 0 the
// score is 0 for x <= median and +1 otherwise.
double alpha_score(double x, std::span<const double> distances);

double median(std::vector<double> values);

struct NeighborSet {
  std::size_t target = 0;
  std::vector<std::size_t> rows;
  std::vector<double> distances;
};

// `distances` holds the distances from `target` to every row (self
// included). Selects every other row whose alpha score is <= 0, falling
// back to the single nearest row if nothing qualifies.
NeighborSet select_neighbors(std::span<const double> distances,
                             std::size_t target);
NeighborSet select_neighbors(const DistanceMatrix& matrix, std::size_t target);

// W(j) = (1 / d_j) / sum(1 / d). Distances must be positive.
std::vector<double> inverse_distance_weights(std::span<const double> distances);

enum class ImputeMethod { kPraa, kKnni };

std::string_view to_string(ImputeMethod method);

struct CellAudit {
  std::size_t row = 0;
  std::size_t column = 0;
  Cell value;
  std::size_t neighbors = 0;  // contributing neighbors; 0 for fallbacks
  bool global_fallback = false;
};

struct ImputationReport {
  ImputeMethod method = ImputeMethod::kPraa;
  std::vector<std::size_t> filled_per_column;
  std::vector<CellAudit> cells;  // ordered by (row, column)

  std::size_t filled() const { return cells.size(); }
};

struct FilledValue {
  Cell value;
  std::size_t contributors = 0;
  bool global_fallback = false;
};

// Mode of the neighbors' observed values (categorical/integer; ties go to
// the value held by the nearest neighbor, then the lowest row) or the
// inverse-distance weighted mean (real). A zero-distance neighbor with an
// observed value is copied outright. With no observed neighbor the global
// column mode or median is used.
FilledValue impute_cell(const Dataset& data, const NeighborSet& neighbors,
                        std::size_t column);

struct ImputeOptions {
  CrossRealSets cross_sets = CrossRealSets::kAnchored;
  std::size_t threads = 1;
};

std::pair<Dataset, ImputationReport> impute_dataset(
    const Dataset& data, const ImputeOptions& options = {});

// Classic k-nearest-neighbor imputation over the same proximity: mode or
// unweighted mean of the k nearest rows with the column observed; ties in
// distance go to the lower row index.
std::pair<Dataset, ImputationReport> knni_impute(
    const Dataset& data, std::size_t k, const ImputeOptions& options = {});

// One line per filled cell: row,column,method,value,neighbors[,fallback]
void write_report(std::ostream& out, const Dataset& data,
                  const ImputationReport& report);

}  // namespace praa

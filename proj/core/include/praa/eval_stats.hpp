#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "praa/adtree.hpp"
#include "praa/dataset.hpp"
#include "praa/imputer.hpp"
#include "praa/proximity.hpp"
#include "praa/pso_select.hpp"

namespace praa {

struct FoldPlan {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<std::size_t>> train;  // ascending row indices
  std::vector<std::vector<std::size_t>> test;
};

// Shuffles each class with the seed, then deals rows round-robin into k
// folds, continuing the fold cursor from one class to the next.
FoldPlan stratified_folds(std::span<const int> classes, std::size_t k,
                          std::uint64_t seed);
FoldPlan stratified_folds(const Dataset& data, std::size_t k, std::uint64_t seed);

struct MetricsReport {
  double accuracy = 0.0;
  std::optional<double> sensitivity;  // TP / (TP + FN)
  std::optional<double> specificity;  // TN / (TN + FP)
  std::optional<double> auc;
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

MetricsReport confusion_metrics(std::span<const std::string> actual,
                                std::span<const std::string> predicted,
                                const std::string& positive);

// Trapezoidal area under the ROC curve from a descending-score threshold
// sweep; tied scores form a single diagonal step.
double roc_auc(std::span<const double> scores,
               std::span<const std::string> labels, const std::string& positive);

struct WilcoxonResult {
  double w_plus = 0.0;
  double w_minus = 0.0;
  double statistic = 0.0;  // min(w_plus, w_minus)
  std::size_t n = 0;       // nonzero differences
  double p_value = 1.0;    // two-sided
  bool exact = true;
};

// Largest n for which the exact null distribution is used.
inline constexpr std::size_t kWilcoxonExactLimit = 25;

// Signed-rank test on (first - second). Zero differences are dropped and
// tied magnitudes share their average rank.
WilcoxonResult wilcoxon_signed_rank(
    std::span<const std::pair<double, double>> pairs);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

LinearFit fit_line(std::span<const double> x, std::span<const double> y);

struct PipelineConfig {
  SwarmConfig swarm;
  std::size_t folds = 10;
  std::size_t inner_folds = 10;
  std::size_t adt_iterations = 10;
  std::uint64_t seed = 0;
  // Run feature selection inside each outer training fold.
  bool nested = false;
  CrossRealSets cross_sets = CrossRealSets::kAnchored;
  std::size_t threads = 1;
  std::optional<std::string> positive_label;
};

struct PipelineReport {
  std::string positive_label;
  ImputationReport imputation;
  SelectionResult selection;
  std::vector<std::size_t> selected;
  std::vector<std::vector<std::size_t>> fold_selections;  // nested mode only
  // Pooled over all outer folds, in fold order.
  std::vector<std::size_t> rows;
  std::vector<double> scores;
  std::vector<std::string> actual;
  std::vector<std::string> predicted;
  MetricsReport metrics;
  AdTree tree;  // trained on every record with the selected features
  std::vector<Rule> rules;
};

// impute -> select -> stratified k-fold ADTree evaluation -> pooled metrics.
// Sub-seeds: swarm seed + 1, inner folds seed + 2, outer folds seed + 3.
PipelineReport run_praa_pipeline(const Dataset& data, const PipelineConfig& config);

void write_metrics(std::ostream& out, const Dataset& data,
                   const PipelineReport& report);

struct BenchConfig {
  std::vector<std::size_t> sizes;
  std::size_t columns = 8;
  double missing_rate = 0.1;
  std::size_t repeats = 3;
  std::uint64_t seed = 0;
  bool full_pipeline = false;
  PipelineConfig pipeline;  // used when full_pipeline is set
};

struct BenchPoint {
  std::size_t size = 0;
  double median_seconds = 0.0;
  std::size_t repeats = 0;
};

struct BenchReport {
  std::vector<BenchPoint> points;
  LinearFit fit;  // seconds = slope * size + intercept
  std::vector<std::string> warnings;
};

// Times the imputation pass (or the full pipeline) on synthetic data of each
// size and fits a least-squares line. Single-threaded.
BenchReport bench_scalability(const BenchConfig& config);

void write_bench_csv(std::ostream& out, const BenchReport& report);
std::string regression_summary(const LinearFit& fit);

}  // namespace praa

#include "praa/eval_stats.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <random>

#include "praa/error.hpp"
#include "praa/parallel.hpp"

namespace praa {
namespace {

constexpr const char* kModule = "eval_stats";

std::string format_g(double v, int digits) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string percent_or_na(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * *v);
  return buf;
}

Dataset subset(const Dataset& data, std::span<const std::size_t> rows) {
  std::vector<Dataset::Row> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(data.rows()[r]);
  return Dataset(data.schema(), std::move(out));
}

}  // namespace

FoldPlan stratified_folds(std::span<const int> classes, std::size_t k,
                          std::uint64_t seed) {
  if (k < 2) throw ConfigError("folds: k must be >= 2");
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.test.resize(k);
  plan.train.resize(k);

  std::mt19937_64 rng(seed);
  std::size_t cursor = 0;
  for (int cls = 0; cls < 2; ++cls) {
    std::vector<std::size_t> members;
    for (std::size_t r = 0; r < classes.size(); ++r) {
      if (classes[r] == cls) members.push_back(r);
    }
    if (members.size() < k) {
      throw DataError(kModule, "class " + std::to_string(cls) + " has " +
                                   std::to_string(members.size()) +
                                   " records, fewer than " + std::to_string(k) +
                                   " folds");
    }
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t r : members) {
      plan.test[cursor].push_back(r);
      cursor = (cursor + 1) % k;
    }
  }
  for (std::size_t f = 0; f < k; ++f) {
    std::sort(plan.test[f].begin(), plan.test[f].end());
    std::vector<std::uint8_t> in_test(classes.size(), 0);
    for (std::size_t r : plan.test[f]) in_test[r] = 1;
    for (std::size_t r = 0; r < classes.size(); ++r) {
      if (!in_test[r]) plan.train[f].push_back(r);
    }
  }
  return plan;
}

FoldPlan stratified_folds(const Dataset& data, std::size_t k, std::uint64_t seed) {
  std::vector<int> classes(data.row_count());
  for (std::size_t r = 0; r < data.row_count(); ++r) classes[r] = data.class_of(r);
  return stratified_folds(classes, k, seed);
}

MetricsReport confusion_metrics(std::span<const std::string> actual,
                                std::span<const std::string> predicted,
                                const std::string& positive) {
  if (actual.size() != predicted.size()) {
    throw ConfigError("metrics: actual and predicted lengths differ");
  }
  MetricsReport m;
  for (std::size_t j = 0; j < actual.size(); ++j) {
    const bool a = actual[j] == positive;
    const bool p = predicted[j] == positive;
    if (a && p) ++m.tp;
    else if (!a && p) ++m.fp;
    else if (!a && !p) ++m.tn;
    else ++m.fn;
  }
  const auto total = static_cast<double>(actual.size());
  m.accuracy = total > 0 ? static_cast<double>(m.tp + m.tn) / total : 0.0;
  if (m.tp + m.fn > 0) {
    m.sensitivity = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
  }
  if (m.tn + m.fp > 0) {
    m.specificity = static_cast<double>(m.tn) / static_cast<double>(m.tn + m.fp);
  }
  return m;
}

double roc_auc(std::span<const double> scores, std::span<const std::string> labels,
               const std::string& positive) {
  if (scores.size() != labels.size()) {
    throw ConfigError("auc: scores and labels lengths differ");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double pos_total = 0.0;
  for (const auto& l : labels) pos_total += l == positive ? 1.0 : 0.0;
  const double neg_total = static_cast<double>(labels.size()) - pos_total;
  if (pos_total == 0.0 || neg_total == 0.0) {
    throw DataError(kModule, "AUC needs both classes among the labels");
  }

  double area = 0.0;
  double tp = 0.0;
  double fp = 0.0;
  for (std::size_t j = 0; j < order.size();) {
    double dtp = 0.0;
    double dfp = 0.0;
    const double s = scores[order[j]];
    for (; j < order.size() && scores[order[j]] == s; ++j) {
      (labels[order[j]] == positive ? dtp : dfp) += 1.0;
    }
    area += dfp * (tp + 0.5 * dtp);
    tp += dtp;
    fp += dfp;
  }
  return area / (pos_total * neg_total);
}

WilcoxonResult wilcoxon_signed_rank(
    std::span<const std::pair<double, double>> pairs) {
  std::vector<double> diffs;
  for (const auto& [a, b] : pairs) {
    if (a - b != 0.0) diffs.push_back(a - b);
  }
  if (diffs.empty()) {
    throw DataError(kModule, "wilcoxon: all paired differences are zero");
  }
  const std::size_t n = diffs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(diffs[a]) < std::abs(diffs[b]);
  });
  // Doubled average ranks are integers, which keeps the exact null
  // distribution in integer arithmetic.
  std::vector<std::size_t> doubled(n);
  for (std::size_t j = 0; j < n;) {
    std::size_t end = j;
    while (end < n && std::abs(diffs[order[end]]) == std::abs(diffs[order[j]])) ++end;
    const std::size_t rank_sum_doubled = (j + 1) + end;  // 2 * mean of j+1..end
    for (std::size_t t = j; t < end; ++t) doubled[order[t]] = rank_sum_doubled;
    j = end;
  }

  WilcoxonResult result;
  result.n = n;
  std::size_t plus2 = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (diffs[j] > 0) plus2 += doubled[j];
  }
  const std::size_t total2 = n * (n + 1);
  result.w_plus = static_cast<double>(plus2) / 2.0;
  result.w_minus = static_cast<double>(total2 - plus2) / 2.0;
  const std::size_t stat2 = std::min(plus2, total2 - plus2);
  result.statistic = static_cast<double>(stat2) / 2.0;

  if (n <= kWilcoxonExactLimit) {
    // counts[s]: sign assignments whose doubled positive rank sum is s.
    std::vector<double> counts(total2 + 1, 0.0);
    counts[0] = 1.0;
    std::size_t reach = 0;
    for (std::size_t j = 0; j < n; ++j) {
      reach += doubled[j];
      for (std::size_t s = reach; s >= doubled[j]; --s) {
        counts[s] += counts[s - doubled[j]];
        if (s == doubled[j]) break;
      }
    }
    double tail = 0.0;
    for (std::size_t s = 0; s <= stat2; ++s) tail += counts[s];
    result.p_value = std::min(1.0, 2.0 * tail / std::ldexp(1.0, static_cast<int>(n)));
    result.exact = true;
  } else {
    double variance = 0.0;
    for (std::size_t d : doubled) variance += static_cast<double>(d * d) / 16.0;
    const double mean = static_cast<double>(total2) / 4.0;
    const double z = (result.statistic - mean) / std::sqrt(variance);
    result.p_value = std::min(1.0, std::erfc(-z / std::sqrt(2.0)));
    result.exact = false;
  }
  return result;
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ConfigError("fit_line: need at least two paired points");
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    sxx += (x[j] - mx) * (x[j] - mx);
    sxy += (x[j] - mx) * (y[j] - my);
    syy += (y[j] - my) * (y[j] - my);
  }
  if (sxx == 0.0) throw ConfigError("fit_line: x values are all equal");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

PipelineReport run_praa_pipeline(const Dataset& data, const PipelineConfig& config) {
  config.swarm.validate();
  PipelineReport report;
  report.positive_label = config.positive_label.value_or(data.class_labels()[0]);
  if (report.positive_label != data.class_labels()[0] &&
      report.positive_label != data.class_labels()[1]) {
    throw ConfigError("pipeline: unknown positive label '" + report.positive_label + "'");
  }

  ImputeOptions impute_options;
  impute_options.cross_sets = config.cross_sets;
  impute_options.threads = config.threads;
  auto [imputed, imputation] = impute_dataset(data, impute_options);
  report.imputation = std::move(imputation);

  SwarmConfig swarm = config.swarm;
  swarm.seed = config.seed + 1;
  swarm.threads = config.threads;
  FitnessOptions fitness_options;
  fitness_options.folds = config.inner_folds;
  fitness_options.adt_iterations = config.adt_iterations;
  fitness_options.seed = config.seed + 2;

  report.selection = run_selection(imputed, swarm, fitness_options);
  report.selected = mask_to_features(report.selection.best);

  TrainOptions train;
  train.iterations = config.adt_iterations;
  train.positive_label = report.positive_label;

  const auto plan = stratified_folds(imputed, config.folds, config.seed + 3);
  for (std::size_t f = 0; f < plan.k; ++f) {
    if (config.nested) {
      const Dataset train_part = subset(imputed, plan.train[f]);
      const auto inner = run_selection(train_part, swarm, fitness_options);
      train.features = mask_to_features(inner.best);
      report.fold_selections.push_back(*train.features);
    } else {
      train.features = report.selected;
    }
    const auto tree = train_adtree(imputed, plan.train[f], train);
    for (std::size_t r : plan.test[f]) {
      const auto margin = score(tree, imputed.rows()[r]);
      report.rows.push_back(r);
      report.scores.push_back(margin.score);
      report.actual.push_back(
          std::get<std::string>(imputed.cell(r, imputed.decision_column())));
      report.predicted.push_back(margin.label);
    }
  }

  report.metrics = confusion_metrics(report.actual, report.predicted,
                                     report.positive_label);
  report.metrics.auc = roc_auc(report.scores, report.actual, report.positive_label);

  train.features = report.selected;
  report.tree = train_adtree(imputed, train);
  report.rules = extract_rules(report.tree);
  return report;
}

void write_metrics(std::ostream& out, const Dataset& data,
                   const PipelineReport& report) {
  const auto& m = report.metrics;
  out << "records\t" << report.rows.size() << '\n';
  out << "positive_label\t" << report.positive_label << '\n';
  out << "accuracy\t" << format_g(m.accuracy, 6) << '\n';
  out << "accuracy_percent\t" << percent_or_na(m.accuracy) << '\n';
  out << "SE_percent\t" << percent_or_na(m.sensitivity) << '\n';
  out << "SP_percent\t" << percent_or_na(m.specificity) << '\n';
  out << "AUC\t" << (m.auc ? format_g(*m.auc, 6) : std::string("n/a")) << '\n';
  out << "TP\t" << m.tp << "\nFP\t" << m.fp << "\nTN\t" << m.tn << "\nFN\t" << m.fn
      << '\n';
  out << "imputed_cells\t" << report.imputation.filled() << '\n';
  out << "selection_fitness\t" << format_g(report.selection.fitness, 6) << '\n';
  out << "selected_features\t";
  for (std::size_t j = 0; j < report.selected.size(); ++j) {
    if (j) out << ',';
    out << data.schema()[report.selected[j]].name;
  }
  out << '\n';
}

BenchReport bench_scalability(const BenchConfig& config) {
  if (config.sizes.size() < 4) throw ConfigError("bench: need at least 4 sizes");
  if (!std::is_sorted(config.sizes.begin(), config.sizes.end()) ||
      std::adjacent_find(config.sizes.begin(), config.sizes.end()) !=
          config.sizes.end()) {
    throw ConfigError("bench: sizes must be strictly increasing");
  }
  if (config.repeats < 3) throw ConfigError("bench: repeats must be >= 3");

  using Clock = std::chrono::steady_clock;
  constexpr double kMinMedianSeconds = 1e-3;
  constexpr std::size_t kMaxRepeats = 96;

  BenchReport report;
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t size : config.sizes) {
    const auto data = generate_synthetic(size, config.columns, config.missing_rate,
                                         config.seed + size);
    std::size_t repeats = config.repeats;
    double med = 0.0;
    while (true) {
      std::vector<double> times;
      for (std::size_t r = 0; r < repeats; ++r) {
        const auto start = Clock::now();
        if (config.full_pipeline) {
          auto pipeline = config.pipeline;
          pipeline.threads = 1;
          (void)run_praa_pipeline(data, pipeline);
        } else {
          (void)impute_dataset(data, ImputeOptions{config.pipeline.cross_sets, 1});
        }
        times.push_back(std::chrono::duration<double>(Clock::now() - start).count());
      }
      med = median(times);
      if (med >= kMinMedianSeconds || repeats >= kMaxRepeats) break;
      report.warnings.push_back("size " + std::to_string(size) + ": median " +
                                format_g(med, 3) + " s below 1 ms; repeats " +
                                std::to_string(repeats) + " -> " +
                                std::to_string(repeats * 2));
      repeats *= 2;
    }
    report.points.push_back({size, med, repeats});
    xs.push_back(static_cast<double>(size));
    ys.push_back(med);
  }
  report.fit = fit_line(xs, ys);
  return report;
}

void write_bench_csv(std::ostream& out, const BenchReport& report) {
  out << "size,median_seconds,repeats\n";
  for (const auto& p : report.points) {
    out << p.size << ',' << format_g(p.median_seconds, 9) << ',' << p.repeats << '\n';
  }
}

std::string regression_summary(const LinearFit& fit) {
  return "T = " + format_g(fit.slope, 6) + " * D + " + format_g(fit.intercept, 6) +
         "  (a=" + format_g(fit.slope, 6) + ", b=" + format_g(fit.intercept, 6) +
         ", r2=" + format_g(fit.r2, 6) + ")";
}

}  // namespace praa

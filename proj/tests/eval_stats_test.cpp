#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "praa/error.hpp"
#include "praa/eval_stats.hpp"
#include "test_support.hpp"

namespace praa {
namespace {

std::vector<int> class_vector(std::size_t first, std::size_t second) {
  std::vector<int> out(first, 0);
  out.insert(out.end(), second, 1);
  return out;
}

void expect_partition(const FoldPlan& plan, std::span<const int> classes) {
  std::vector<int> seen(classes.size(), 0);
  for (std::size_t f = 0; f < plan.k; ++f) {
    for (std::size_t r : plan.test[f]) ++seen[r];
    EXPECT_EQ(plan.train[f].size() + plan.test[f].size(), classes.size());
    EXPECT_TRUE(std::is_sorted(plan.test[f].begin(), plan.test[f].end()));
  }
  for (int s : seen) EXPECT_EQ(s, 1);
}

TEST(Folds, ExactDivisibility) {
  const auto classes = class_vector(10, 10);
  const auto plan = stratified_folds(classes, 10, 1);
  expect_partition(plan, classes);
  for (const auto& test : plan.test) {
    ASSERT_EQ(test.size(), 2u);
    EXPECT_NE(classes[test[0]], classes[test[1]]);
  }
}

TEST(Folds, OneFoldTakesTheExtraRecord) {
  const auto classes = class_vector(11, 10);
  const auto plan = stratified_folds(classes, 10, 4);
  expect_partition(plan, classes);
  std::size_t doubled = 0;
  for (const auto& test : plan.test) {
    std::size_t larger = 0;
    for (std::size_t r : test) larger += classes[r] == 0;
    if (larger == 2) ++doubled;
    EXPECT_LE(larger, 2u);
  }
  EXPECT_EQ(doubled, 1u);
}

TEST(Folds, DeterministicAndSeedSensitive) {
  const auto classes = class_vector(30, 25);
  const auto a = stratified_folds(classes, 5, 7);
  const auto b = stratified_folds(classes, 5, 7);
  const auto c = stratified_folds(classes, 5, 8);
  EXPECT_EQ(a.test, b.test);
  EXPECT_NE(a.test, c.test);
}

TEST(Folds, Errors) {
  const auto classes = class_vector(4, 9);
  EXPECT_THROW(stratified_folds(classes, 5, 1), DataError);
  EXPECT_THROW(stratified_folds(classes, 1, 1), ConfigError);
}

TEST(Folds, StratificationProperty) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = 2 + trial % 9;
    const std::size_t a = k + rng() % 40;
    const std::size_t b = k + rng() % 40;
    std::vector<int> classes = class_vector(a, b);
    std::shuffle(classes.begin(), classes.end(), rng);
    const auto plan = stratified_folds(classes, k, trial);
    expect_partition(plan, classes);
    for (int cls = 0; cls < 2; ++cls) {
      std::size_t lo = 1 << 30;
      std::size_t hi = 0;
      for (const auto& test : plan.test) {
        std::size_t count = 0;
        for (std::size_t r : test) count += classes[r] == cls;
        lo = std::min(lo, count);
        hi = std::max(hi, count);
      }
      ASSERT_LE(hi - lo, 1u);
    }
  }
}

std::vector<std::string> labels_from(const std::string& signs) {
  std::vector<std::string> out;
  for (char c : signs) out.emplace_back(1, c);
  return out;
}

TEST(Metrics, DirectFormulas) {
  const auto actual = labels_from("++++-----");
  const auto predicted = labels_from("+++------");
  const auto m = confusion_metrics(actual, predicted, "+");
  EXPECT_EQ(m.tp, 3u);
  EXPECT_EQ(m.fn, 1u);
  EXPECT_EQ(m.tn, 5u);
  EXPECT_EQ(m.fp, 0u);
  EXPECT_DOUBLE_EQ(*m.sensitivity, 0.75);
  EXPECT_DOUBLE_EQ(*m.specificity, 1.0);
  EXPECT_DOUBLE_EQ(m.accuracy, 8.0 / 9.0);
}

TEST(Metrics, AllCorrectAndNoPositives) {
  const auto all = labels_from("+-+-");
  const auto m = confusion_metrics(all, all, "+");
  EXPECT_EQ(m.accuracy, 1.0);
  EXPECT_EQ(*m.sensitivity, 1.0);
  EXPECT_EQ(*m.specificity, 1.0);
  const auto negatives = labels_from("---");
  const auto n = confusion_metrics(negatives, labels_from("-+-"), "+");
  EXPECT_FALSE(n.sensitivity.has_value());
  EXPECT_NEAR(n.accuracy, 2.0 / 3.0, 1e-15);
  EXPECT_THROW(confusion_metrics(all, negatives, "+"), ConfigError);
}

TEST(Auc, PairCountingExample) {
  const std::vector<double> scores{0.9, 0.8, 0.7, 0.6};
  EXPECT_DOUBLE_EQ(roc_auc(scores, labels_from("+-+-"), "+"), 0.75);
}

TEST(Auc, PerfectAndReversed) {
  const std::vector<double> scores{3, 2, 1, 0};
  EXPECT_EQ(roc_auc(scores, labels_from("++--"), "+"), 1.0);
  EXPECT_EQ(roc_auc(scores, labels_from("--++"), "+"), 0.0);
}

TEST(Auc, SingleClassIsDataError) {
  const std::vector<double> scores{1, 2};
  EXPECT_THROW(roc_auc(scores, labels_from("++"), "+"), DataError);
}

double mann_whitney(const std::vector<double>& s, const std::vector<std::string>& l) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (l[i] != "+" || l[j] != "-") continue;
      pairs += 1.0;
      wins += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
    }
  }
  return wins / pairs;
}

TEST(Auc, MatchesMannWhitneyAndFlipSymmetry) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + trial % 49;
    std::vector<double> scores(n);
    std::vector<std::string> labels(n);
    std::vector<std::string> flipped(n);
    for (std::size_t j = 0; j < n; ++j) {
      scores[j] = static_cast<double>(rng() % 7);  // heavy ties
      labels[j] = j == 0 ? "+" : j == 1 ? "-" : (rng() % 2 ? "+" : "-");
      flipped[j] = labels[j] == "+" ? "-" : "+";
    }
    const double auc = roc_auc(scores, labels, "+");
    ASSERT_NEAR(auc, mann_whitney(scores, labels), 1e-12);
    ASSERT_NEAR(auc + roc_auc(scores, flipped, "+"), 1.0, 1e-12);
  }
}

std::vector<std::pair<double, double>> same_sign_pairs(int n) {
  std::vector<std::pair<double, double>> pairs;
  for (int j = 0; j < n; ++j) pairs.emplace_back(90.0 + j, 80.0 + 0.5 * j);
  return pairs;
}

TEST(Wilcoxon, UniformlySignedSeven) {
  const auto r = wilcoxon_signed_rank(same_sign_pairs(7));
  EXPECT_EQ(r.w_plus, 28.0);
  EXPECT_EQ(r.w_minus, 0.0);
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_TRUE(r.exact);
  EXPECT_DOUBLE_EQ(r.p_value, 2.0 / 128.0);
}

TEST(Wilcoxon, SinglePair) {
  const std::vector<std::pair<double, double>> pairs{{5, 3}};
  const auto r = wilcoxon_signed_rank(pairs);
  EXPECT_EQ(r.w_plus, 1.0);
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_EQ(r.p_value, 1.0);
}

TEST(Wilcoxon, TiedMagnitudes) {
  const std::vector<std::pair<double, double>> pairs{{2, 1}, {1, 2}};
  const auto r = wilcoxon_signed_rank(pairs);
  EXPECT_EQ(r.w_plus, 1.5);
  EXPECT_EQ(r.w_minus, 1.5);
  EXPECT_EQ(r.statistic, 1.5);
}

TEST(Wilcoxon, ZerosDroppedAndAllZeroRejected) {
  const std::vector<std::pair<double, double>> pairs{{1, 1}, {3, 1}, {2, 2}};
  EXPECT_EQ(wilcoxon_signed_rank(pairs).n, 1u);
  const std::vector<std::pair<double, double>> zeros{{1, 1}};
  EXPECT_THROW(wilcoxon_signed_rank(zeros), DataError);
}

TEST(Wilcoxon, NormalApproximationAboveLimit) {
  const auto r = wilcoxon_signed_rank(same_sign_pairs(30));
  EXPECT_FALSE(r.exact);
  EXPECT_EQ(r.w_plus, 465.0);
  // z = -232.5 / sqrt(30*31*61/24); two-sided p well below 1e-5.
  const double z = -232.5 / std::sqrt(30.0 * 31.0 * 61.0 / 24.0);
  EXPECT_NEAR(r.p_value, std::erfc(-z / std::sqrt(2.0)), 1e-15);
}

// Average ranks by direct counting, then all 2^n sign assignments.
double enumerated_p(const std::vector<double>& diffs, double* w_plus) {
  const std::size_t n = diffs.size();
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n; ++i) {
    double below = 0.0;
    double equal = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(diffs[j]) < std::abs(diffs[i])) below += 1.0;
      if (j != i && std::abs(diffs[j]) == std::abs(diffs[i])) equal += 1.0;
    }
    rank[i] = 1.0 + below + equal / 2.0;
  }
  double wp = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += rank[i];
    if (diffs[i] > 0) wp += rank[i];
  }
  *w_plus = wp;
  const double t = std::min(wp, total - wp);
  double hits = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1) s += rank[i];
    }
    if (s <= t + 1e-9) hits += 1.0;
  }
  return std::min(1.0, 2.0 * hits / std::ldexp(1.0, static_cast<int>(n)));
}

TEST(Wilcoxon, ExactMatchesEnumeration) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 240; ++trial) {
    const std::size_t n = 1 + trial % 12;
    std::vector<std::pair<double, double>> pairs;
    std::vector<double> diffs;
    for (std::size_t j = 0; j < n; ++j) {
      // Small integer magnitudes force tied ranks.
      double d = static_cast<double>(1 + rng() % 5);
      if (rng() % 2) d = -d;
      pairs.emplace_back(10.0 + d, 10.0);
      diffs.push_back(d);
    }
    double w_plus = 0.0;
    const double expected = enumerated_p(diffs, &w_plus);
    const auto r = wilcoxon_signed_rank(pairs);
    ASSERT_NEAR(r.p_value, expected, 1e-12) << "trial " << trial;
    ASSERT_EQ(r.w_plus, w_plus);
    ASSERT_EQ(r.w_plus + r.w_minus, n * (n + 1) / 2.0);
  }
}

TEST(FitLine, ExactLineAndErrors) {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> y{3, 5, 7, 9};
  const auto fit = fit_line(x, y);
  EXPECT_DOUBLE_EQ(fit.slope, 2.0);
  EXPECT_DOUBLE_EQ(fit.intercept, 1.0);
  EXPECT_DOUBLE_EQ(fit.r2, 1.0);
  const std::vector<double> flat{2, 2, 2, 2};
  EXPECT_THROW(fit_line(flat, y), ConfigError);
}

TEST(FitLine, SummaryFormat) {
  LinearFit fit{14.909, -104.655, 0.994};
  EXPECT_EQ(regression_summary(fit),
            "T = 14.909 * D + -104.655  (a=14.909, b=-104.655, r2=0.994)");
}

PipelineConfig small_pipeline(std::uint64_t seed) {
  PipelineConfig config;
  config.swarm.particles = 6;
  config.swarm.iterations = 4;
  config.folds = 5;
  config.inner_folds = 3;
  config.adt_iterations = 5;
  config.seed = seed;
  return config;
}

TEST(Pipeline, SeparableFixture) {
  SyntheticOptions opts;
  opts.signal_strength = 1.0;
  const auto data = generate_synthetic(80, 5, 0.0, 3, opts);
  const auto report = run_praa_pipeline(data, small_pipeline(5));
  EXPECT_EQ(report.metrics.accuracy, 1.0);
  EXPECT_EQ(*report.metrics.auc, 1.0);
  EXPECT_EQ(report.rows.size(), data.row_count());
  EXPECT_TRUE(std::find(report.selected.begin(), report.selected.end(), 0u) !=
              report.selected.end());
  std::ostringstream out;
  write_metrics(out, data, report);
  EXPECT_NE(out.str().find("accuracy\t1\n"), std::string::npos);
  EXPECT_NE(out.str().find("AUC\t1\n"), std::string::npos);
}

TEST(Pipeline, NestedModeRecordsFoldSelections) {
  SyntheticOptions opts;
  opts.signal_strength = 1.0;
  const auto data = generate_synthetic(60, 4, 0.05, 6, opts);
  auto config = small_pipeline(2);
  config.nested = true;
  const auto report = run_praa_pipeline(data, config);
  EXPECT_EQ(report.fold_selections.size(), config.folds);
  EXPECT_GE(report.metrics.accuracy, 0.9);
}

TEST(Pipeline, Deterministic) {
  const auto data = generate_synthetic(60, 6, 0.1, 9);
  const auto a = run_praa_pipeline(data, small_pipeline(4));
  const auto b = run_praa_pipeline(data, small_pipeline(4));
  EXPECT_EQ(a.scores, b.scores);
  EXPECT_EQ(a.selected, b.selected);
  EXPECT_EQ(a.selection.history, b.selection.history);
  std::ostringstream sa;
  std::ostringstream sb;
  write_metrics(sa, data, a);
  write_metrics(sb, data, b);
  EXPECT_EQ(sa.str(), sb.str());
}

TEST(Pipeline, ShuffledLabelsNearChance) {
  double total = 0.0;
  const int seeds = 8;
  for (int s = 0; s < seeds; ++s) {
    const auto base = generate_synthetic(60, 5, 0.0, 100 + s);
    auto rows = base.rows();
    std::vector<Cell> labels;
    for (const auto& row : rows) labels.push_back(row.back());
    std::mt19937_64 rng(500 + s);
    std::shuffle(labels.begin(), labels.end(), rng);
    for (std::size_t r = 0; r < rows.size(); ++r) rows[r].back() = labels[r];
    const Dataset noise(base.schema(), std::move(rows));
    total += *run_praa_pipeline(noise, small_pipeline(s)).metrics.auc;
  }
  const double mean = total / seeds;
  EXPECT_GE(mean, 0.35);
  EXPECT_LE(mean, 0.65);
}

TEST(Pipeline, UnknownPositiveLabel) {
  auto config = small_pipeline(1);
  config.positive_label = "nope";
  EXPECT_THROW(run_praa_pipeline(generate_synthetic(40, 3, 0.0, 1), config), ConfigError);
}

TEST(Bench, ReportsEachSizeAndFits) {
  BenchConfig config;
  config.sizes = {20, 40, 60, 80};
  config.columns = 4;
  const auto report = bench_scalability(config);
  ASSERT_EQ(report.points.size(), 4u);
  for (const auto& p : report.points) {
    EXPECT_GT(p.median_seconds, 0.0);
    EXPECT_GE(p.repeats, 3u);
  }
  std::ostringstream out;
  write_bench_csv(out, report);
  EXPECT_EQ(out.str().substr(0, 25), "size,median_seconds,repea");
}

TEST(Bench, RejectsBadSizes) {
  BenchConfig config;
  config.sizes = {10, 20, 30};
  EXPECT_THROW(bench_scalability(config), ConfigError);
  config.sizes = {10, 20, 20, 30};
  EXPECT_THROW(bench_scalability(config), ConfigError);
}

}  // namespace
}  // namespace praa

// praa: command-line front end for imputation, swarm feature selection,
// ADTree training and cross-validated evaluation.
//
// Exit codes: 0 success, 1 data or runtime error, 2 usage error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "praa/adtree.hpp"
#include "praa/dataset.hpp"
#include "praa/error.hpp"
#include "praa/eval_stats.hpp"
#include "praa/imputer.hpp"
#include "praa/parallel.hpp"
#include "praa/proximity.hpp"
#include "praa/pso_select.hpp"
#include "run_config.hpp"

#ifndef PRAA_VERSION
#define PRAA_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using namespace praa;
using praa::cli::RunConfig;

namespace {

constexpr int kDataError = 1;
constexpr int kUsageError = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonFlags {
  std::string config;
  std::string data;
  std::string schema;
  std::string output = ".";
  bool header = false;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::size_t inner_folds = 10;
  std::size_t adt_iterations = 10;
  std::size_t particles = 50;
  std::size_t iterations = 100;
  double c1 = 2.0;
  double c2 = 2.0;
  double vmax = 4.0;
  bool nested = false;
  std::string cross_sets = "anchored";
  std::string positive_label;
  std::map<std::string, CLI::Option*> opts;
};

void add_input_flags(CLI::App* sub, CommonFlags& f) {
  f.opts["config"] = sub->add_option("--config", f.config, "key = value configuration file");
  f.opts["data"] = sub->add_option("--data", f.data, "CSV data file");
  f.opts["schema"] = sub->add_option("--schema", f.schema, "schema file (name kind [marker])");
  f.opts["header"] = sub->add_flag("--header", f.header, "data file has a header row");
  f.opts["output"] = sub->add_option("-o,--output", f.output, "output directory");
  f.opts["seed"] = sub->add_option("--seed", f.seed, "random seed");
  f.opts["threads"] = sub->add_option("--threads", f.threads, "worker threads")
                          ->default_str(std::to_string(default_threads()));
  f.opts["cross_real_sets"] =
      sub->add_option("--cross-real-sets", f.cross_sets,
                      "cross-class real index sets: anchored|symmetric");
}

void add_model_flags(CLI::App* sub, CommonFlags& f) {
  f.opts["adt_iterations"] =
      sub->add_option("--adt-iterations", f.adt_iterations, "ADTree boosting rounds");
  f.opts["positive_label"] =
      sub->add_option("--positive-label", f.positive_label, "decision label scored positive");
}

void add_swarm_flags(CLI::App* sub, CommonFlags& f) {
  f.opts["particles"] = sub->add_option("--particles", f.particles, "swarm size Z");
  f.opts["iterations"] = sub->add_option("--iterations", f.iterations, "swarm iterations G");
  f.opts["c1"] = sub->add_option("--c1", f.c1, "cognitive factor");
  f.opts["c2"] = sub->add_option("--c2", f.c2, "social factor");
  f.opts["vmax"] = sub->add_option("--vmax", f.vmax, "velocity clamp");
  f.opts["inner_folds"] =
      sub->add_option("--folds", f.inner_folds, "cross-validation folds for fitness");
}

bool given(const CommonFlags& f, const std::string& key) {
  const auto it = f.opts.find(key);
  return it != f.opts.end() && it->second->count() > 0;
}

RunConfig resolve(const CommonFlags& f) {
  RunConfig config;
  config.threads = default_threads();
  if (given(f, "config")) praa::cli::load_config(f.config, config);
  if (given(f, "data")) config.data = f.data;
  if (given(f, "schema")) config.schema = f.schema;
  if (given(f, "output")) config.output = f.output;
  if (given(f, "header")) config.header = f.header;
  if (given(f, "seed")) config.seed = f.seed;
  if (given(f, "threads")) config.threads = f.threads;
  if (given(f, "cross_real_sets")) config.cross_sets = praa::cli::parse_cross_sets(f.cross_sets);
  if (given(f, "adt_iterations")) config.adt_iterations = f.adt_iterations;
  if (given(f, "positive_label")) config.positive_label = f.positive_label;
  if (given(f, "particles")) config.swarm.particles = f.particles;
  if (given(f, "iterations")) config.swarm.iterations = f.iterations;
  if (given(f, "c1")) config.swarm.c1 = f.c1;
  if (given(f, "c2")) config.swarm.c2 = f.c2;
  if (given(f, "vmax")) config.swarm.vmax = f.vmax;
  // `select` exposes --folds for the fitness loop; `evaluate` overrides both.
  if (given(f, "inner_folds")) config.inner_folds = f.inner_folds;
  if (given(f, "folds")) config.folds = f.inner_folds;
  if (given(f, "nested")) config.nested = f.nested;
  config.validate();

  if (config.schema.empty()) {
    throw UsageError("--schema is required (or set 'schema' in --config)");
  }
  if (config.data.empty()) {
    throw UsageError("--data is required (or set 'data' in --config)");
  }
  for (const auto& p : {config.schema, config.data}) {
    if (!fs::exists(p)) throw DataError("cli", "input file not found: " + p.string());
  }
  return config;
}

Dataset load_input(const RunConfig& config) {
  const auto schema = load_schema(config.schema);
  return load_csv(config.data, schema, config.header);
}

fs::path prepare_output(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw DataError("cli", "cannot create output directory " + dir.string());
  }
  return dir;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cli", "cannot write " + path.string());
  body(out);
  out.flush();
  if (!out) throw DataError("cli", "failed writing " + path.string());
}

Dataset imputed_if_needed(const Dataset& data, const RunConfig& config) {
  if (data.missing_count() == 0) return data;
  auto [imputed, report] = impute_dataset(data, {config.cross_sets, config.threads});
  std::cerr << "imputed " << report.filled() << " missing cells before training\n";
  return imputed;
}

void write_selection(const fs::path& dir, const SelectionResult& result) {
  write_file(dir / "selected_features.txt", [&](std::ostream& out) {
    for (const auto& name : result.selected_names) out << name << '\n';
  });
  write_file(dir / "fitness_history.csv", [&](std::ostream& out) {
    out << "iteration,global_best_fitness\n";
    char buf[32];
    for (std::size_t j = 0; j < result.history.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.10g", result.history[j]);
      out << j + 1 << ',' << buf << '\n';
    }
  });
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

int cmd_generate(std::size_t rows, std::size_t cols, double missing, std::uint64_t seed,
                 double signal, const std::string& output) {
  SyntheticOptions options;
  options.signal_strength = signal;
  const auto data = generate_synthetic(rows, cols, missing, seed, options);
  const auto dir = prepare_output(output);
  write_file(dir / "data.csv", [&](std::ostream& out) { write_csv(out, data); });
  write_file(dir / "schema.txt", [&](std::ostream& out) { write_schema(out, data.schema()); });
  std::cout << "wrote " << (dir / "data.csv").string() << " (" << data.row_count()
            << " rows, " << data.missing_count() << " missing) and "
            << (dir / "schema.txt").string() << '\n';
  return 0;
}

int cmd_impute(const CommonFlags& f, const std::string& method, std::size_t k,
               const std::string& dump) {
  const auto config = resolve(f);
  const auto data = load_input(config);
  const ImputeOptions options{config.cross_sets, config.threads};
  if (method != "praa" && method != "knni") {
    throw UsageError("--method must be 'praa' or 'knni'");
  }
  auto [imputed, report] =
      method == "praa" ? impute_dataset(data, options) : knni_impute(data, k, options);
  const auto dir = prepare_output(config.output);
  write_file(dir / "imputed.csv", [&](std::ostream& out) { write_csv(out, imputed); });
  write_file(dir / "imputation_report.csv",
             [&](std::ostream& out) { write_report(out, data, report); });
  if (!dump.empty()) {
    const IndexContext ctx(data, config.cross_sets);
    const auto matrix = distance_matrix(ctx, config.threads);
    write_file(dump, [&](std::ostream& out) { write_distance_csv(out, matrix); });
  }
  std::cout << "filled " << report.filled() << " cells (" << method << ")\n";
  return 0;
}

int cmd_select(const CommonFlags& f) {
  const auto config = resolve(f);
  const auto data = imputed_if_needed(load_input(config), config);
  SwarmConfig swarm = config.swarm;
  swarm.threads = config.threads;
  swarm.seed = config.seed + 1;
  FitnessOptions fitness_options{config.inner_folds, config.adt_iterations, config.seed + 2};
  const auto result = run_selection(data, swarm, fitness_options);
  const auto dir = prepare_output(config.output);
  write_selection(dir, result);
  std::cout << "fitness " << result.fitness << " with " << result.selected_names.size()
            << " features:";
  for (const auto& name : result.selected_names) std::cout << ' ' << name;
  std::cout << '\n';
  return 0;
}

int cmd_train(const CommonFlags& f, const std::string& features) {
  const auto config = resolve(f);
  const auto data = imputed_if_needed(load_input(config), config);
  TrainOptions train;
  train.iterations = config.adt_iterations;
  train.positive_label = config.positive_label.value_or(data.class_labels()[0]);
  if (!features.empty()) {
    std::vector<std::size_t> chosen;
    for (const auto& name : split_commas(features)) {
      std::size_t found = data.feature_count();
      for (std::size_t c = 0; c < data.feature_count(); ++c) {
        if (data.schema()[c].name == name) found = c;
      }
      if (found == data.feature_count()) throw UsageError("unknown feature '" + name + "'");
      chosen.push_back(found);
    }
    train.features = chosen;
  }
  const auto tree = train_adtree(data, train);
  if (!tree.warning.empty()) std::cerr << "warning: " << tree.warning << '\n';
  const auto rules = extract_rules(tree);
  const auto dir = prepare_output(config.output);
  write_file(dir / "tree.txt", [&](std::ostream& out) { write_tree(out, tree); });
  write_file(dir / "rules.txt", [&](std::ostream& out) { write_rules(out, rules); });
  write_rules(std::cout, rules);
  return 0;
}

int cmd_evaluate(const CommonFlags& f) {
  const auto config = resolve(f);
  const auto data = load_input(config);
  const auto report = run_praa_pipeline(data, config.pipeline());
  const auto dir = prepare_output(config.output);
  write_file(dir / "metrics.txt",
             [&](std::ostream& out) { write_metrics(out, data, report); });
  write_file(dir / "predictions.csv", [&](std::ostream& out) {
    out << "row,actual,predicted,score\n";
    char buf[32];
    for (std::size_t j = 0; j < report.rows.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.12g", report.scores[j]);
      out << report.rows[j] << ',' << report.actual[j] << ',' << report.predicted[j] << ','
          << buf << '\n';
    }
  });
  write_selection(dir, report.selection);
  write_file(dir / "tree.txt", [&](std::ostream& out) { write_tree(out, report.tree); });
  write_file(dir / "rules.txt", [&](std::ostream& out) { write_rules(out, report.rules); });
  write_metrics(std::cout, data, report);
  return 0;
}

int cmd_bench(const std::string& sizes, std::size_t cols, double missing,
              std::size_t repeats, std::uint64_t seed, bool full, const std::string& output) {
  BenchConfig config;
  for (const auto& s : split_commas(sizes)) {
    try {
      config.sizes.push_back(std::stoul(s));
    } catch (const std::exception&) {
      throw UsageError("bad size '" + s + "' in --sizes");
    }
  }
  config.columns = cols;
  config.missing_rate = missing;
  config.repeats = repeats;
  config.seed = seed;
  config.full_pipeline = full;
  if (full) {
    config.pipeline.swarm.particles = 10;
    config.pipeline.swarm.iterations = 10;
  }
  const auto report = bench_scalability(config);
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
  const auto dir = prepare_output(output);
  write_file(dir / "bench.csv", [&](std::ostream& out) { write_bench_csv(out, report); });
  write_bench_csv(std::cout, report);
  std::cout << regression_summary(report.fit) << '\n';
  return 0;
}

int cmd_wilcoxon(const std::string& path, bool header) {
  std::ifstream in(path);
  if (!in) throw DataError("cli", "cannot open pairs file " + path);
  std::vector<std::pair<double, double>> pairs;
  std::string line;
  bool skip = header;
  while (std::getline(in, line)) {
    if (skip) {
      skip = false;
      continue;
    }
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 2) throw DataError("cli", "pairs file needs two columns per line");
    try {
      pairs.emplace_back(std::stod(fields[0]), std::stod(fields[1]));
    } catch (const std::exception&) {
      throw DataError("cli", "non-numeric value in pairs file: " + line);
    }
  }
  const auto r = wilcoxon_signed_rank(pairs);
  std::printf("n\t%zu\nrank_sums\t%.1f, %.1f\nstatistic\t%.1f\np_value\t%.6g\nmethod\t%s\n",
              r.n, r.w_plus, r.w_minus, r.statistic, r.p_value,
              r.exact ? "exact" : "normal");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"praa: skew-aware proximity imputation, swarm feature selection, ADTree"};
  app.set_version_flag("--version", std::string("praa ") + PRAA_VERSION);
  app.require_subcommand(1);

  std::size_t gen_rows = 100;
  std::size_t gen_cols = 5;
  double gen_missing = 0.0;
  std::uint64_t gen_seed = 0;
  double gen_signal = 0.85;
  std::string gen_output = ".";
  auto* generate = app.add_subcommand("generate", "write a synthetic mixed-type dataset");
  generate->add_option("--rows", gen_rows, "records")->capture_default_str();
  generate->add_option("--cols", gen_cols, "columns including the decision")->capture_default_str();
  generate->add_option("--missing", gen_missing, "fraction of feature cells missing")
      ->capture_default_str();
  generate->add_option("--seed", gen_seed, "random seed")->capture_default_str();
  generate->add_option("--signal", gen_signal, "agreement of feature 1 with the class")
      ->capture_default_str();
  generate->add_option("-o,--output", gen_output, "output directory")->capture_default_str();

  CommonFlags impute_flags;
  std::string impute_method = "praa";
  std::size_t impute_k = 5;
  std::string impute_dump;
  auto* impute = app.add_subcommand("impute", "fill missing cells");
  add_input_flags(impute, impute_flags);
  impute->add_option("--method", impute_method, "praa|knni")->capture_default_str();
  impute->add_option("--k", impute_k, "neighbors for knni")->capture_default_str();
  impute->add_option("--dump-distances", impute_dump, "write the distance matrix CSV here");

  CommonFlags select_flags;
  auto* select = app.add_subcommand("select", "binary PSO feature selection");
  add_input_flags(select, select_flags);
  add_model_flags(select, select_flags);
  add_swarm_flags(select, select_flags);

  CommonFlags train_flags;
  std::string train_features;
  auto* train = app.add_subcommand("train", "train an ADTree and export its rules");
  add_input_flags(train, train_flags);
  add_model_flags(train, train_flags);
  train->add_option("--features", train_features, "comma-separated feature names");

  CommonFlags eval_flags;
  auto* evaluate = app.add_subcommand("evaluate", "impute, select, cross-validate, report");
  add_input_flags(evaluate, eval_flags);
  add_model_flags(evaluate, eval_flags);
  add_swarm_flags(evaluate, eval_flags);
  // For evaluate, --folds sets the outer and inner fold counts together.
  eval_flags.opts["folds"] = eval_flags.opts["inner_folds"];
  eval_flags.opts["nested"] =
      evaluate->add_flag("--nested", eval_flags.nested, "select features inside each fold");

  std::string bench_sizes = "1000,2000,4000,8000";
  std::size_t bench_cols = 8;
  double bench_missing = 0.1;
  std::size_t bench_repeats = 3;
  std::uint64_t bench_seed = 0;
  bool bench_full = false;
  std::string bench_output = ".";
  auto* bench = app.add_subcommand("bench", "time imputation across dataset sizes");
  bench->add_option("--sizes", bench_sizes, "comma-separated row counts")->capture_default_str();
  bench->add_option("--cols", bench_cols, "columns including the decision")->capture_default_str();
  bench->add_option("--missing", bench_missing, "missing fraction")->capture_default_str();
  bench->add_option("--repeats", bench_repeats, "timed repeats per size")->capture_default_str();
  bench->add_option("--seed", bench_seed, "random seed")->capture_default_str();
  bench->add_flag("--full-pipeline", bench_full, "time the whole pipeline instead");
  bench->add_option("-o,--output", bench_output, "output directory")->capture_default_str();

  std::string pairs_path;
  bool pairs_header = false;
  auto* wilcoxon = app.add_subcommand("wilcoxon", "signed-rank test on paired results");
  wilcoxon->add_option("--pairs", pairs_path, "CSV with two numeric columns")->required();
  wilcoxon->add_flag("--header", pairs_header, "pairs file has a header row");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  CLI::App* active = nullptr;
  try {
    if (generate->parsed()) {
      active = generate;
      return cmd_generate(gen_rows, gen_cols, gen_missing, gen_seed, gen_signal, gen_output);
    }
    if (impute->parsed()) {
      active = impute;
      return cmd_impute(impute_flags, impute_method, impute_k, impute_dump);
    }
    if (select->parsed()) {
      active = select;
      return cmd_select(select_flags);
    }
    if (train->parsed()) {
      active = train;
      return cmd_train(train_flags, train_features);
    }
    if (evaluate->parsed()) {
      active = evaluate;
      return cmd_evaluate(eval_flags);
    }
    if (bench->parsed()) {
      active = bench;
      return cmd_bench(bench_sizes, bench_cols, bench_missing, bench_repeats, bench_seed,
                       bench_full, bench_output);
    }
    if (wilcoxon->parsed()) {
      active = wilcoxon;
      return cmd_wilcoxon(pairs_path, pairs_header);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << (active ? active->help() : app.help());
    return kUsageError;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << (active ? active->help() : app.help());
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsageError;
}

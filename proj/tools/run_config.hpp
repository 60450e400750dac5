#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "praa/eval_stats.hpp"
#include "praa/proximity.hpp"
#include "praa/pso_select.hpp"

namespace praa::cli {

// Settings shared by every subcommand. Defaults: k = 10 folds, 50 particles,
// 100 swarm iterations, c1 = c2 = 2, 10 boosting rounds.
struct RunConfig {
  std::filesystem::path data;
  std::filesystem::path schema;
  std::filesystem::path output = ".";
  bool header = false;
  std::uint64_t seed = 0;
  std::size_t folds = 10;
  std::size_t inner_folds = 10;
  std::size_t adt_iterations = 10;
  std::size_t threads = 1;
  bool nested = false;
  CrossRealSets cross_sets = CrossRealSets::kAnchored;
  std::optional<std::string> positive_label;
  SwarmConfig swarm;

  PipelineConfig pipeline() const;
  // Throws ConfigError for values outside their documented ranges.
  void validate() const;
};

// Flat "key = value" lines; '#' starts a comment. Relative paths are
// resolved against `base_dir`. Unknown keys are an error.
void apply_config(std::istream& in, const std::filesystem::path& base_dir,
                  RunConfig& config);
void load_config(const std::filesystem::path& path, RunConfig& config);

CrossRealSets parse_cross_sets(const std::string& text);

}  // namespace praa::cli

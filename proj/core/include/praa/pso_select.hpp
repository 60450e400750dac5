#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "praa/dataset.hpp"

namespace praa {

using FeatureMask = std::vector<std::uint8_t>;

// Defaults follow the usual binary PSO setup: 50 particles, 100 iterations,
// c1 = c2 = 2, no inertia, velocities clamped to +-4.
struct SwarmConfig {
  std::size_t particles = 50;
  std::size_t iterations = 100;
  double c1 = 2.0;
  double c2 = 2.0;
  double vmax = 4.0;
  std::uint64_t seed = 0;
  std::size_t threads = 1;

  void validate() const;
};

struct Particle {
  FeatureMask position;
  std::vector<double> velocity;
  FeatureMask best;
  double best_fitness = 0.0;
};

struct Swarm {
  std::vector<Particle> particles;
  FeatureMask global_best;
  double global_fitness = 0.0;
  std::size_t iteration = 0;  // completed iterations, counting initialization
};

using FitnessFn = std::function<double(const FeatureMask&)>;

// Memoizes a fitness function by mask and evaluates batches of masks,
// optionally in parallel. The wrapped function must be thread-safe when
// threads > 1.
class FitnessCache {
 public:
  FitnessCache(FitnessFn fn, std::size_t threads = 1)
      : fn_(std::move(fn)), threads_(threads) {}

  std::vector<double> evaluate(const std::vector<FeatureMask>& masks);
  double evaluate(const FeatureMask& mask);
  std::size_t evaluations() const { return evaluations_; }

 private:
  FitnessFn fn_;
  std::size_t threads_;
  std::map<FeatureMask, double> cache_;
  std::size_t evaluations_ = 0;
};

inline double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

// Random positions and velocities, evaluated; counts as iteration 1.
Swarm init_swarm(std::size_t features, const SwarmConfig& config,
                 FitnessCache& fitness);

// One synchronous update: v += c1 r1 (L - x) + c2 r2 (G - x), clamp to
// +-vmax, resample each bit with probability sigmoid(v), then refresh the
// local and global bests on strict improvement (lowest particle index wins
// ties). Random draws come from an engine seeded by (seed, iteration,
// particle), in feature order: r1, r2, u.
Swarm step(Swarm swarm, const SwarmConfig& config, FitnessCache& fitness);

struct SelectionResult {
  FeatureMask best;
  double fitness = 0.0;
  std::vector<double> history;  // global best fitness after each iteration
  std::size_t evaluations = 0;
  std::vector<std::string> selected_names;
};

SelectionResult run_selection(std::size_t features, const SwarmConfig& config,
                              const FitnessFn& fitness);

struct FitnessOptions {
  std::size_t folds = 10;
  std::size_t adt_iterations = 10;
  std::uint64_t seed = 0;
};

// Mean stratified k-fold accuracy of an ADTree restricted to the masked
// features. The empty mask scores 0.
double fitness(const FeatureMask& mask, const Dataset& data,
               const FitnessOptions& options);

// Wrapper selection over an imputed dataset.
SelectionResult run_selection(const Dataset& data, const SwarmConfig& config,
                              const FitnessOptions& options);

std::vector<std::size_t> mask_to_features(const FeatureMask& mask);

}  // namespace praa

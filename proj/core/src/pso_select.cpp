#include "praa/pso_select.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "praa/adtree.hpp"
#include "praa/error.hpp"
#include "praa/eval_stats.hpp"
#include "praa/parallel.hpp"

namespace praa {
namespace {

std::mt19937_64 particle_engine(std::uint64_t seed, std::size_t iteration,
                                std::size_t particle) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(iteration),
                    static_cast<std::uint32_t>(particle)};
  return std::mt19937_64(seq);
}

void update_bests(Swarm& swarm, const std::vector<double>& scores) {
  for (std::size_t p = 0; p < swarm.particles.size(); ++p) {
    auto& particle = swarm.particles[p];
    if (scores[p] > particle.best_fitness) {
      particle.best_fitness = scores[p];
      particle.best = particle.position;
    }
  }
  for (const auto& particle : swarm.particles) {
    if (particle.best_fitness > swarm.global_fitness) {
      swarm.global_fitness = particle.best_fitness;
      swarm.global_best = particle.best;
    }
  }
}

std::vector<FeatureMask> positions(const Swarm& swarm) {
  std::vector<FeatureMask> out;
  out.reserve(swarm.particles.size());
  for (const auto& p : swarm.particles) out.push_back(p.position);
  return out;
}

}  // namespace

void SwarmConfig::validate() const {
  if (particles < 1) throw ConfigError("pso: particles must be >= 1");
  if (iterations < 1) throw ConfigError("pso: iterations must be >= 1");
  if (c1 < 0.0 || c2 < 0.0) throw ConfigError("pso: c1 and c2 must be >= 0");
  if (!(vmax > 0.0)) throw ConfigError("pso: vmax must be > 0");
}

std::vector<double> FitnessCache::evaluate(const std::vector<FeatureMask>& masks) {
  std::vector<FeatureMask> pending;
  {
    std::set<FeatureMask> seen;
    for (const auto& mask : masks) {
      if (!cache_.count(mask) && seen.insert(mask).second) pending.push_back(mask);
    }
  }
  std::vector<double> values(pending.size());
  parallel_for(pending.size(), threads_,
               [&](std::size_t j) { values[j] = fn_(pending[j]); });
  for (std::size_t j = 0; j < pending.size(); ++j) {
    cache_.emplace(pending[j], values[j]);
  }
  evaluations_ += pending.size();

  std::vector<double> out;
  out.reserve(masks.size());
  for (const auto& mask : masks) out.push_back(cache_.at(mask));
  return out;
}

double FitnessCache::evaluate(const FeatureMask& mask) {
  return evaluate(std::vector<FeatureMask>{mask}).front();
}

Swarm init_swarm(std::size_t features, const SwarmConfig& config,
                 FitnessCache& fitness) {
  config.validate();
  Swarm swarm;
  swarm.particles.resize(config.particles);
  for (std::size_t p = 0; p < config.particles; ++p) {
    auto rng = particle_engine(config.seed, 0, p);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto& particle = swarm.particles[p];
    particle.position.resize(features);
    particle.velocity.resize(features);
    for (std::size_t d = 0; d < features; ++d) {
      particle.position[d] = unit(rng) < 0.5 ? 1 : 0;
      particle.velocity[d] = (2.0 * unit(rng) - 1.0) * config.vmax;
    }
  }
  const auto scores = fitness.evaluate(positions(swarm));
  for (std::size_t p = 0; p < config.particles; ++p) {
    auto& particle = swarm.particles[p];
    particle.best = particle.position;
    particle.best_fitness = scores[p];
  }
  swarm.global_best = swarm.particles[0].best;
  swarm.global_fitness = swarm.particles[0].best_fitness;
  update_bests(swarm, scores);
  swarm.iteration = 1;
  return swarm;
}

Swarm step(Swarm swarm, const SwarmConfig& config, FitnessCache& fitness) {
  const FeatureMask global = swarm.global_best;
  for (std::size_t p = 0; p < swarm.particles.size(); ++p) {
    auto rng = particle_engine(config.seed, swarm.iteration, p);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto& particle = swarm.particles[p];
    for (std::size_t d = 0; d < particle.position.size(); ++d) {
      const double x = particle.position[d];
      const double r1 = unit(rng);
      const double r2 = unit(rng);
      double v = particle.velocity[d] + config.c1 * r1 * (particle.best[d] - x) +
                 config.c2 * r2 * (global[d] - x);
      v = std::clamp(v, -config.vmax, config.vmax);
      particle.velocity[d] = v;
      particle.position[d] = unit(rng) < sigmoid(v) ? 1 : 0;
    }
  }
  update_bests(swarm, fitness.evaluate(positions(swarm)));
  ++swarm.iteration;
  return swarm;
}

SelectionResult run_selection(std::size_t features, const SwarmConfig& config,
                              const FitnessFn& fn) {
  config.validate();
  FitnessCache cache(fn, config.threads);
  Swarm swarm = init_swarm(features, config, cache);
  SelectionResult result;
  result.history.push_back(swarm.global_fitness);
  while (swarm.iteration < config.iterations) {
    swarm = step(std::move(swarm), config, cache);
    result.history.push_back(swarm.global_fitness);
  }
  result.best = swarm.global_best;
  result.fitness = swarm.global_fitness;
  result.evaluations = cache.evaluations();
  return result;
}

std::vector<std::size_t> mask_to_features(const FeatureMask& mask) {
  std::vector<std::size_t> out;
  for (std::size_t d = 0; d < mask.size(); ++d) {
    if (mask[d]) out.push_back(d);
  }
  return out;
}

double fitness(const FeatureMask& mask, const Dataset& data,
               const FitnessOptions& options) {
  if (mask.size() != data.feature_count()) {
    throw ConfigError("pso: mask length does not match feature count");
  }
  const auto features = mask_to_features(mask);
  if (features.empty()) return 0.0;

  const auto plan = stratified_folds(data, options.folds, options.seed);
  TrainOptions train;
  train.iterations = options.adt_iterations;
  train.features = features;
  train.positive_label = data.class_labels()[0];

  double total = 0.0;
  for (std::size_t f = 0; f < plan.k; ++f) {
    const auto tree = train_adtree(data, plan.train[f], train);
    std::size_t correct = 0;
    for (std::size_t r : plan.test[f]) {
      const auto margin = score(tree, data.rows()[r]);
      if (margin.label == std::get<std::string>(data.cell(r, data.decision_column()))) {
        ++correct;
      }
    }
    total += static_cast<double>(correct) / static_cast<double>(plan.test[f].size());
  }
  return total / static_cast<double>(plan.k);
}

SelectionResult run_selection(const Dataset& data, const SwarmConfig& config,
                              const FitnessOptions& options) {
  auto result = run_selection(
      data.feature_count(), config,
      [&](const FeatureMask& mask) { return fitness(mask, data, options); });
  for (std::size_t f : mask_to_features(result.best)) {
    result.selected_names.push_back(data.schema()[f].name);
  }
  return result;
}

}  // namespace praa

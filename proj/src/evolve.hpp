#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <json.hpp>

#include "data.hpp"
#include "ensemble.hpp"

namespace ensdiv {

struct GAConfig {
    int population_size = 40;
    int generations = 60;
    double crossover_rate = 0.8;
    double mutation_rate = 0.05;
    int tournament_size = 3;
    int elitism_count = 2;
    std::uint64_t seed = 0;
};

// Parabolic fitness peaking at the target accuracy: -(accuracy - target)^2.
// Maximal (zero) exactly when the ensemble hits the target.
double fitness(double accuracy, double target);

struct GAResult {
    Ensemble best_ensemble;
    double best_fitness = 0.0;
    double achieved_accuracy = 0.0;       // on the evaluation split
    std::vector<double> fitness_history;  // per-generation best; entry 0 is the initial population
};

nlohmann::json ga_result_to_json(const GAResult& result);
GAResult ga_result_from_json(const nlohmann::json& doc);

// Searches for a fixed-size ensemble whose evaluation-split accuracy is as
// close to `target` as the pool allows. Tournament selection, uniform
// crossover, per-gene resample mutation, elitism. Deterministic per seed.
GAResult evolve(const std::vector<TrainedClassifier>& pool, const LabeledSamples& eval_data,
                double target, const GAConfig& ga, int ensemble_size);

// Same machinery with a caller-supplied fitness over achieved accuracy.
using FitnessFn = std::function<double(double accuracy)>;
GAResult evolve_with_fitness(const std::vector<TrainedClassifier>& pool,
                             const LabeledSamples& eval_data, const GAConfig& ga,
                             int ensemble_size, const FitnessFn& fitness_fn);

struct TargetProbe {
    double target = 0.0;
    double achieved = 0.0;
    bool attainable = false;
};

// Short GA probe (half the configured generations) per candidate target.
// A target counts as attainable when the probe lands within `tolerance`.
std::vector<TargetProbe> feasible_targets(const std::vector<TrainedClassifier>& pool,
                                          const LabeledSamples& eval_data,
                                          const std::vector<double>& probe_targets,
                                          const GAConfig& ga, int ensemble_size,
                                          double tolerance = 0.01);

}  // namespace ensdiv

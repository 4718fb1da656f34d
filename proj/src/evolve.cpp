#include "evolve.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

#include "errors.hpp"
#include "seeds.hpp"

namespace ensdiv {

double fitness(double accuracy, double target) {
    if (!(accuracy >= 0.0) || accuracy > 1.0) throw std::invalid_argument("accuracy out of range");
    if (!(target >= 0.0) || target > 1.0) throw std::invalid_argument("target out of range");
    const double gap = accuracy - target;
    return -gap * gap;
}

nlohmann::json ga_result_to_json(const GAResult& result) {
    return {{"member_indices", result.best_ensemble.member_indices},
            {"best_fitness", result.best_fitness},
            {"achieved_accuracy", result.achieved_accuracy},
            {"fitness_history", result.fitness_history}};
}

GAResult ga_result_from_json(const nlohmann::json& doc) {
    GAResult result;
    try {
        result.best_ensemble.member_indices = doc.at("member_indices").get<std::vector<int>>();
        result.best_fitness = doc.at("best_fitness").get<double>();
        result.achieved_accuracy = doc.at("achieved_accuracy").get<double>();
        result.fitness_history = doc.at("fitness_history").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed search result document: ") + e.what());
    }
    return result;
}

namespace {

// Thresholded member outputs, computed once per evolve call. Chromosome
// evaluation then reduces to integer sums over this table.
struct VoteTable {
    std::vector<std::vector<std::uint8_t>> votes;  // [pool member][sample]
    std::vector<int> labels;
};

VoteTable build_vote_table(const std::vector<TrainedClassifier>& pool,
                           const LabeledSamples& data) {
    VoteTable table;
    table.labels = data.y;
    table.votes.resize(pool.size());
    for (std::size_t m = 0; m < pool.size(); ++m) {
        auto& row = table.votes[m];
        row.resize(data.size());
        for (std::size_t s = 0; s < data.size(); ++s) {
            const std::span<const double> x(data.x.row(s), data.x.cols);
            row[s] = forward(pool[m], x) >= 0.5 ? 1 : 0;
        }
    }
    return table;
}

double table_accuracy(const VoteTable& table, const std::vector<int>& chromosome) {
    const int size = static_cast<int>(chromosome.size());
    const std::size_t n = table.labels.size();
    int correct = 0;
    for (std::size_t s = 0; s < n; ++s) {
        int ones = 0;
        for (const int idx : chromosome) ones += table.votes[static_cast<std::size_t>(idx)][s];
        const int predicted = 2 * ones > size ? 1 : 0;
        if (predicted == table.labels[s]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(n);
}

void check_ga_config(const GAConfig& ga) {
    if (ga.population_size < 2) throw std::invalid_argument("population size must be at least 2");
    if (ga.generations < 1) throw std::invalid_argument("generations must be positive");
    if (!(ga.crossover_rate >= 0.0) || ga.crossover_rate > 1.0)
        throw std::invalid_argument("crossover rate out of range");
    if (!(ga.mutation_rate >= 0.0) || ga.mutation_rate > 1.0)
        throw std::invalid_argument("mutation rate out of range");
    if (ga.tournament_size < 1) throw std::invalid_argument("tournament size must be positive");
    if (ga.elitism_count < 0 || ga.elitism_count >= ga.population_size)
        throw std::invalid_argument("elitism count must be in [0, population size)");
}

}  // namespace

GAResult evolve_with_fitness(const std::vector<TrainedClassifier>& pool,
                             const LabeledSamples& eval_data, const GAConfig& ga,
                             int ensemble_size, const FitnessFn& fitness_fn) {
    if (pool.empty()) throw std::invalid_argument("empty pool");
    if (eval_data.size() == 0) throw std::invalid_argument("empty evaluation split");
    if (ensemble_size < 1) throw std::invalid_argument("ensemble size must be positive");
    if (ensemble_size % 2 == 0) throw std::invalid_argument("ensemble size must be odd");
    check_ga_config(ga);

    const VoteTable table = build_vote_table(pool, eval_data);

    // Accuracy only depends on the multiset of member indices, so memoize on
    // the sorted chromosome. The GA revisits good chromosomes constantly.
    std::map<std::vector<int>, double> accuracy_cache;
    auto chromosome_accuracy = [&](const std::vector<int>& chromosome) {
        std::vector<int> key = chromosome;
        std::sort(key.begin(), key.end());
        if (const auto hit = accuracy_cache.find(key); hit != accuracy_cache.end())
            return hit->second;
        const double acc = table_accuracy(table, chromosome);
        accuracy_cache.emplace(std::move(key), acc);
        return acc;
    };

    std::mt19937_64 rng(ga.seed);
    std::uniform_int_distribution<int> pick_member(0, static_cast<int>(pool.size()) - 1);
    std::uniform_int_distribution<int> pick_slot(0, ga.population_size - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const std::size_t pop_n = static_cast<std::size_t>(ga.population_size);
    std::vector<std::vector<int>> population(pop_n);
    for (auto& chromosome : population) {
        chromosome.resize(static_cast<std::size_t>(ensemble_size));
        for (int& gene : chromosome) gene = pick_member(rng);
    }

    GAResult result;
    double best_fit = 0.0;
    double best_acc = 0.0;
    bool have_best = false;

    std::vector<double> fits(pop_n);
    std::vector<double> accs(pop_n);
    auto evaluate = [&] {
        double generation_best = 0.0;
        for (std::size_t i = 0; i < pop_n; ++i) {
            accs[i] = chromosome_accuracy(population[i]);
            fits[i] = fitness_fn(accs[i]);
            if (i == 0 || fits[i] > generation_best) generation_best = fits[i];
            if (!have_best || fits[i] > best_fit) {
                have_best = true;
                best_fit = fits[i];
                best_acc = accs[i];
                result.best_ensemble.member_indices = population[i];
            }
        }
        result.fitness_history.push_back(generation_best);
    };

    auto tournament = [&] {
        std::size_t winner = static_cast<std::size_t>(pick_slot(rng));
        for (int round = 1; round < ga.tournament_size; ++round) {
            const std::size_t challenger = static_cast<std::size_t>(pick_slot(rng));
            if (fits[challenger] > fits[winner]) winner = challenger;
        }
        return winner;
    };

    evaluate();  // generation 0: the random initial population

    std::vector<std::size_t> ranking(pop_n);
    for (int generation = 0; generation < ga.generations; ++generation) {
        std::iota(ranking.begin(), ranking.end(), 0);
        std::stable_sort(ranking.begin(), ranking.end(),
                         [&](std::size_t a, std::size_t b) { return fits[a] > fits[b]; });

        std::vector<std::vector<int>> next;
        next.reserve(pop_n);
        for (int e = 0; e < ga.elitism_count; ++e)
            next.push_back(population[ranking[static_cast<std::size_t>(e)]]);

        while (next.size() < pop_n) {
            std::vector<int> child_a = population[tournament()];
            std::vector<int> child_b = population[tournament()];
            if (unit(rng) < ga.crossover_rate)
                for (std::size_t g = 0; g < child_a.size(); ++g)
                    if (unit(rng) < 0.5) std::swap(child_a[g], child_b[g]);
            for (int& gene : child_a)
                if (unit(rng) < ga.mutation_rate) gene = pick_member(rng);
            for (int& gene : child_b)
                if (unit(rng) < ga.mutation_rate) gene = pick_member(rng);
            next.push_back(std::move(child_a));
            if (next.size() < pop_n) next.push_back(std::move(child_b));
        }
        population = std::move(next);
        evaluate();
    }

    result.best_fitness = best_fit;
    result.achieved_accuracy = best_acc;

    // With elitism the champion survives verbatim, so the recorded curve can
    // never dip. A dip here means the bookkeeping above broke.
    if (ga.elitism_count >= 1)
        for (std::size_t i = 1; i < result.fitness_history.size(); ++i)
            if (result.fitness_history[i] < result.fitness_history[i - 1])
                throw std::logic_error("fitness history regressed despite elitism");

    return result;
}

GAResult evolve(const std::vector<TrainedClassifier>& pool, const LabeledSamples& eval_data,
                double target, const GAConfig& ga, int ensemble_size) {
    if (!(target >= 0.0) || target > 1.0) throw std::invalid_argument("target out of range");
    return evolve_with_fitness(pool, eval_data, ga, ensemble_size,
                               [target](double acc) { return fitness(acc, target); });
}

std::vector<TargetProbe> feasible_targets(const std::vector<TrainedClassifier>& pool,
                                          const LabeledSamples& eval_data,
                                          const std::vector<double>& probe_targets,
                                          const GAConfig& ga, int ensemble_size,
                                          double tolerance) {
    if (probe_targets.empty()) throw std::invalid_argument("no probe targets");
    for (const double target : probe_targets)
        if (!(target >= 0.0) || target > 1.0) throw std::invalid_argument("target out of range");
    if (!(tolerance >= 0.0)) throw std::invalid_argument("tolerance out of range");

    GAConfig probe_ga = ga;
    probe_ga.generations = std::max(1, ga.generations / 2);

    std::vector<TargetProbe> probes;
    probes.reserve(probe_targets.size());
    for (std::size_t j = 0; j < probe_targets.size(); ++j) {
        probe_ga.seed = mix_seed(ga.seed, j + 1);
        const GAResult run = evolve(pool, eval_data, probe_targets[j], probe_ga, ensemble_size);
        TargetProbe probe;
        probe.target = probe_targets[j];
        probe.achieved = run.achieved_accuracy;
        probe.attainable = std::abs(run.achieved_accuracy - probe.target) <= tolerance;
        probes.push_back(probe);
    }
    return probes;
}

}  // namespace ensdiv

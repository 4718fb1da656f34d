// Command-line front end. Everything of substance happens behind the C API
// in libensdiv; this file just parses flags and moves files around.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ensdiv.h"

namespace {

int exit_code_for(ensdiv_status status) {
    switch (status) {
        case ENSDIV_OK: return 0;
        case ENSDIV_ERR_INVALID_ARGUMENT: return 1;
        default: return 2;  // data, io, internal
    }
}

int report(ensdiv_status status) {
    if (status == ENSDIV_OK) return 0;
    std::fprintf(stderr, "error: %s\n", ensdiv_last_error());
    return exit_code_for(status);
}

std::string joined(const std::string& dir, const char* name) {
    if (dir.empty() || dir == ".") return name;
    if (dir.back() == '/') return dir + name;
    return dir + "/" + name;
}

struct SplitName {
    std::string value = "validation";

    ensdiv_split resolve() const {
        if (value == "train") return ENSDIV_SPLIT_TRAIN;
        if (value == "test") return ENSDIV_SPLIT_TEST;
        return ENSDIV_SPLIT_VALIDATION;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"structural diversity and genetic ensemble selection for classifier pools"};
    app.require_subcommand(1);
    app.set_version_flag("--version", []() { return std::string(ensdiv_version()); });

    std::uint64_t seed = 0;
    std::string out_dir = ".";
    std::string config_path;
    app.add_option("--seed", seed, "seed for whichever stage the subcommand runs");
    app.add_option("--out", out_dir, "output directory")->capture_default_str();
    app.add_option("--config", config_path, "experiment config file (JSON)");

    // gen-data
    auto* gen = app.add_subcommand("gen-data", "generate a synthetic dataset");
    gen->fallthrough();
    std::int64_t gen_n = 1000;
    double gen_fraction = 0.5;
    double gen_separation = 1.5;
    double fracs[3] = {0.6, 0.2, 0.2};
    gen->add_option("--n", gen_n, "number of samples")->capture_default_str();
    gen->add_option("--class1-fraction", gen_fraction, "fraction of class-1 samples")
        ->capture_default_str();
    gen->add_option("--separation", gen_separation, "distance between class means")
        ->capture_default_str();
    gen->add_option("--train-frac", fracs[0], "train fraction")->capture_default_str();
    gen->add_option("--val-frac", fracs[1], "validation fraction")->capture_default_str();
    gen->add_option("--test-frac", fracs[2], "test fraction")->capture_default_str();

    // train-pool
    auto* train = app.add_subcommand("train-pool", "train a classifier pool on a dataset");
    train->fallthrough();
    std::string train_data;
    int pool_size = 120;
    int epochs = 100;
    train->add_option("--data", train_data, "dataset manifest (data.json)")->required();
    train->add_option("--pool-size", pool_size, "number of classifiers")->capture_default_str();
    train->add_option("--epochs", epochs, "training epochs per classifier")
        ->capture_default_str();

    // evolve
    auto* evolve = app.add_subcommand("evolve", "search for an ensemble near a target accuracy");
    evolve->fallthrough();
    std::string evolve_pool;
    std::string evolve_data;
    double target = 0.0;
    int ensemble_size = 21;
    SplitName split;
    ensdiv_ga_config ga;
    ensdiv_ga_config_init(&ga);
    evolve->add_option("--pool", evolve_pool, "pool file (pool.json)")->required();
    evolve->add_option("--data", evolve_data, "dataset manifest (data.json)")->required();
    evolve->add_option("--target", target, "target accuracy in [0, 1]")->required();
    evolve->add_option("--ensemble-size", ensemble_size, "ensemble size (odd)")
        ->capture_default_str();
    evolve->add_option("--split", split.value, "evaluation split: train|validation|test")
        ->check(CLI::IsMember({"train", "validation", "test"}))
        ->capture_default_str();
    evolve->add_option("--population", ga.population_size, "GA population")
        ->capture_default_str();
    evolve->add_option("--generations", ga.generations, "GA generations")->capture_default_str();
    evolve->add_option("--crossover", ga.crossover_rate, "crossover rate")->capture_default_str();
    evolve->add_option("--mutation", ga.mutation_rate, "per-gene mutation rate")
        ->capture_default_str();
    evolve->add_option("--tournament", ga.tournament_size, "tournament size")
        ->capture_default_str();
    evolve->add_option("--elitism", ga.elitism_count, "elites copied per generation")
        ->capture_default_str();

    // measure
    auto* measure = app.add_subcommand("measure", "diversity indices of a stored ensemble");
    measure->fallthrough();
    std::string measure_pool;
    std::string measure_ensemble;
    measure->add_option("--pool", measure_pool, "pool file (pool.json)")->required();
    measure
        ->add_option("--ensemble", measure_ensemble,
                     "ensemble file: index array or saved search result")
        ->required();

    // experiment
    auto* experiment = app.add_subcommand("experiment", "run the full diversity sweep");
    experiment->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    if (gen->parsed()) {
        ensdiv_dataset* ds = nullptr;
        ensdiv_status status = ensdiv_dataset_generate(gen_n, gen_fraction, gen_separation, seed, &ds);
        if (status != ENSDIV_OK) return report(status);
        // Partitioning gets its own stream so datasets regenerated with the
        // same seed stay byte-identical whatever the split fractions.
        status = ensdiv_dataset_partition(ds, fracs[0], fracs[1], fracs[2], seed + 1);
        if (status == ENSDIV_OK)
            status = ensdiv_dataset_save(ds, joined(out_dir, "data.csv").c_str(),
                                         joined(out_dir, "data.json").c_str());
        ensdiv_dataset_free(ds);
        if (status == ENSDIV_OK)
            std::printf("wrote %s and %s\n", joined(out_dir, "data.csv").c_str(),
                        joined(out_dir, "data.json").c_str());
        return report(status);
    }

    if (train->parsed()) {
        ensdiv_dataset* ds = nullptr;
        ensdiv_status status = ensdiv_dataset_open(train_data.c_str(), &ds);
        if (status != ENSDIV_OK) return report(status);
        ensdiv_pool* pool = nullptr;
        status = ensdiv_pool_train(ds, pool_size, epochs, seed, &pool);
        ensdiv_dataset_free(ds);
        if (status != ENSDIV_OK) return report(status);
        status = ensdiv_pool_save(pool, joined(out_dir, "pool.json").c_str());
        ensdiv_pool_free(pool);
        if (status == ENSDIV_OK)
            std::printf("wrote %s (%d classifiers)\n", joined(out_dir, "pool.json").c_str(),
                        pool_size);
        return report(status);
    }

    if (evolve->parsed()) {
        ensdiv_pool* pool = nullptr;
        ensdiv_status status = ensdiv_pool_load(evolve_pool.c_str(), &pool);
        if (status != ENSDIV_OK) return report(status);
        ensdiv_dataset* ds = nullptr;
        status = ensdiv_dataset_open(evolve_data.c_str(), &ds);
        if (status != ENSDIV_OK) {
            ensdiv_pool_free(pool);
            return report(status);
        }
        ga.seed = seed;
        ensdiv_ga_result* result = nullptr;
        status = ensdiv_evolve(pool, ds, split.resolve(), target, &ga, ensemble_size, &result);
        ensdiv_dataset_free(ds);
        ensdiv_pool_free(pool);
        if (status != ENSDIV_OK) return report(status);

        double best_fitness = 0.0;
        double achieved = 0.0;
        ensdiv_ga_result_stats(result, &best_fitness, &achieved);
        int32_t count = 0;
        ensdiv_ga_result_members(result, nullptr, 0, &count);
        std::vector<int32_t> members(static_cast<std::size_t>(count));
        ensdiv_ga_result_members(result, members.data(), count, &count);

        status = ensdiv_ga_result_save(result, joined(out_dir, "ga_result.json").c_str());
        ensdiv_ga_result_free(result);
        if (status != ENSDIV_OK) return report(status);

        std::printf("target %.6f achieved %.6f fitness %.6g\n", target, achieved, best_fitness);
        std::printf("members:");
        for (const int32_t idx : members) std::printf(" %d", idx);
        std::printf("\nwrote %s\n", joined(out_dir, "ga_result.json").c_str());
        return 0;
    }

    if (measure->parsed()) {
        ensdiv_pool* pool = nullptr;
        ensdiv_status status = ensdiv_pool_load(measure_pool.c_str(), &pool);
        if (status != ENSDIV_OK) return report(status);

        int32_t count = 0;
        status = ensdiv_ensemble_load(measure_ensemble.c_str(), nullptr, 0, &count);
        if (status != ENSDIV_OK) {
            ensdiv_pool_free(pool);
            return report(status);
        }
        std::vector<int32_t> members(static_cast<std::size_t>(count));
        status = ensdiv_ensemble_load(measure_ensemble.c_str(), members.data(), count, &count);
        if (status != ENSDIV_OK) {
            ensdiv_pool_free(pool);
            return report(status);
        }

        ensdiv_diversity_report rep;
        status = ensdiv_measure(pool, members.data(), count, &rep);
        ensdiv_pool_free(pool);
        if (status != ENSDIV_OK) return report(status);

        std::printf("members          %d\n", count);
        std::printf("species_richness %d\n", rep.species_richness);
        std::printf("shannon          %.6f\n", rep.shannon);
        std::printf("simpson          %.6f\n", rep.simpson);
        std::printf("berger_parker    %.6f\n", rep.berger_parker);
        return 0;
    }

    if (experiment->parsed()) {
        if (config_path.empty()) {
            std::fprintf(stderr, "error: experiment needs --config\n");
            return 1;
        }
        const std::uint64_t override_seed = seed;
        const uint64_t* override_ptr = app.count("--seed") > 0 ? &override_seed : nullptr;
        const ensdiv_status status =
            ensdiv_experiment_run(config_path.c_str(), out_dir.c_str(), override_ptr);
        if (status == ENSDIV_OK)
            std::printf("wrote %s\n", joined(out_dir, "experiment.csv").c_str());
        return report(status);
    }

    return 1;
}

#include "ensdiv.h"

#include <cstdint>
#include <exception>
#include <fstream>
#include <memory>
#include <new>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "classifier.hpp"
#include "data.hpp"
#include "diversity.hpp"
#include "ensemble.hpp"
#include "errors.hpp"
#include "evolve.hpp"
#include "harness.hpp"

struct ensdiv_dataset {
    ensdiv::Dataset impl;
};

struct ensdiv_pool {
    ensdiv::Pool impl;
    // Backing storage for ensdiv_pool_species_key, built lazily.
    std::vector<std::string> keys;
};

struct ensdiv_ga_result {
    ensdiv::GAResult impl;
};

namespace {

thread_local std::string g_last_error;

ensdiv_status fail(ensdiv_status code, const char* what) {
    g_last_error = what;
    return code;
}

// Runs the body and maps the library's exception taxonomy onto status codes.
template <typename Fn>
ensdiv_status guarded(Fn&& body) {
    try {
        body();
        g_last_error.clear();
        return ENSDIV_OK;
    } catch (const std::invalid_argument& e) {
        return fail(ENSDIV_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::out_of_range& e) {
        return fail(ENSDIV_ERR_INVALID_ARGUMENT, e.what());
    } catch (const ensdiv::IoError& e) {
        return fail(ENSDIV_ERR_IO, e.what());
    } catch (const ensdiv::DataError& e) {
        return fail(ENSDIV_ERR_DATA, e.what());
    } catch (const std::bad_alloc&) {
        return fail(ENSDIV_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(ENSDIV_ERR_INTERNAL, e.what());
    }
}

ensdiv_status require(bool ok, const char* what) {
    return ok ? ENSDIV_OK : fail(ENSDIV_ERR_INVALID_ARGUMENT, what);
}

ensdiv::Split to_split(ensdiv_split split) {
    switch (split) {
        case ENSDIV_SPLIT_TRAIN: return ensdiv::Split::Train;
        case ENSDIV_SPLIT_VALIDATION: return ensdiv::Split::Validation;
        case ENSDIV_SPLIT_TEST: return ensdiv::Split::Test;
    }
    throw std::invalid_argument("unknown split");
}

std::vector<int> member_vector(const int32_t* members, int32_t count) {
    if (count < 1) throw std::invalid_argument("empty ensemble");
    return std::vector<int>(members, members + count);
}

}  // namespace

extern "C" {

const char* ensdiv_version(void) { return "0.1.0"; }

const char* ensdiv_last_error(void) { return g_last_error.c_str(); }

ensdiv_status ensdiv_dataset_generate(int64_t n, double class1_fraction, double separation,
                                      uint64_t seed, ensdiv_dataset** out) {
    if (require(out != nullptr, "null output handle")) return ENSDIV_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        ensdiv::SyntheticParams params;
        params.n = n;
        params.class1_fraction = class1_fraction;
        params.separation = separation;
        auto handle = std::make_unique<ensdiv_dataset>();
        handle->impl = ensdiv::generate_synthetic(params, seed);
        *out = handle.release();
    });
}

ensdiv_status ensdiv_dataset_load_csv(const char* path, const char* label_column,
                                      ensdiv_dataset** out) {
    if (require(path && label_column && out, "null argument")) return ENSDIV_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        auto handle = std::make_unique<ensdiv_dataset>();
        handle->impl = ensdiv::load_csv(path, label_column);
        *out = handle.release();
    });
}

ensdiv_status ensdiv_dataset_partition(ensdiv_dataset* ds, double train_frac,
                                       double validation_frac, double test_frac, uint64_t seed) {
    if (require(ds != nullptr, "null dataset")) return ENSDIV_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        ds->impl = ensdiv::partition(std::move(ds->impl), train_frac, validation_frac, test_frac,
                                     seed);
    });
}

ensdiv_status ensdiv_dataset_save(const ensdiv_dataset* ds, const char* csv_path,
                                  const char* manifest_path) {
    if (require(ds && csv_path && manifest_path, "null argument"))
        return ENSDIV_ERR_INVALID_ARGUMENT;
    return guarded([&] { ensdiv::save_dataset(ds->impl, csv_path, manifest_path); });
}

ensdiv_status ensdiv_dataset_open(const char* manifest_path, ensdiv_dataset** out) {
    if (require(manifest_path && out, "null argument")) return ENSDIV_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        auto handle = std::make_unique<ensdiv_dataset>();
        handle->impl = ensdiv::open_dataset(manifest_path);
        *out = handle.release();
    });
}

ensdiv_status ensdiv_dataset_info(const ensdiv_dataset* ds, int64_t* rows, int32_t* features) {
    if (require(ds != nullptr, "null dataset")) return ENSDIV_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        if (rows) *rows = static_cast<int64_t>(ds->impl.rows());
        if (features) *features = static_cast<int32_t>(ds->impl.dims());
    });
}

void ensdiv_dataset_free(ensdiv_dataset* ds) { delete ds; }

ensdiv_status ensdiv_pool_train(const ensdiv_dataset* ds, int32_t pool_size, int32_t epochs,
                                uint64_t seed, ensdiv_pool** out) {
    if (require(ds && out, "null argument")) return ENSDIV_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        auto handle = std::make_unique<ensdiv_pool>();
        handle->impl = ensdiv::build_pool(pool_size, epochs, 32, seed,
                                          ds->impl.split(ensdiv::Split::Train));
        *out = handle.release();
    });
}

ensdiv_status ensdiv_pool_save(const ensdiv_pool* pool, const char* path) {
    if (require(pool && path, "null argument")) return ENSDIV_ERR_INVALID_ARGUMENT;
    return guarded([&] { ensdiv::save_pool(pool->impl, path); });
}

ensdiv_status ensdiv_pool_load(const char* path, ensdiv_pool** out) {
    if (require(path && out, "null argument")) return ENSDIV_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        auto handle = std::make_unique<ensdiv_pool>();
        handle->impl = ensdiv::load_pool(path);
        *out = handle.release();
    });
}

ensdiv_status ensdiv_pool_size(const ensdiv_pool* pool, int32_t* out) {
    if (require(pool && out, "null argument")) return ENSDIV_ERR_INVALID_ARGUMENT;
    *out = static_cast<int32_t>(pool->impl.size());
    g_last_error.clear();
    return ENSDIV_OK;
}

ensdiv_status ensdiv_pool_species_key(const ensdiv_pool* pool_const, int32_t index,
                                      const char** out) {
    if (require(pool_const && out, "null argument")) return ENSDIV_ERR_INVALID_ARGUMENT;
    // The key cache is part of the handle, not the library model.
    auto* pool = const_cast<ensdiv_pool*>(pool_const);
    return guarded([&] {
        if (index < 0 || static_cast<std::size_t>(index) >= pool->impl.size())
            throw std::out_of_range("member index out of pool bounds");
        if (pool->keys.empty()) {
            pool->keys.reserve(pool->impl.size());
            for (const auto& clf : pool->impl.classifiers)
                pool->keys.push_back(ensdiv::species_key(clf.config));
        }
        *out = pool->keys[static_cast<std::size_t>(index)].c_str();
    });
}

void ensdiv_pool_free(ensdiv_pool* pool) { delete pool; }

ensdiv_status ensdiv_measure(const ensdiv_pool* pool, const int32_t* members, int32_t count,
                             ensdiv_diversity_report* out) {
    if (require(pool && members && out, "null argument")) return ENSDIV_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        const std::vector<int> indices = member_vector(members, count);
        ensdiv::Ensemble ensemble{indices};
        ensdiv::validate_ensemble(ensemble, pool->impl.size());
        std::vector<ensdiv::ClassifierConfig> configs;
        configs.reserve(indices.size());
        for (const int idx : indices)
            configs.push_back(pool->impl.classifiers[static_cast<std::size_t>(idx)].config);
        const ensdiv::DiversityReport report = ensdiv::diversity_report(configs, {});
        out->shannon = report.shannon_norm;
        out->simpson = report.simpson_norm;
        out->berger_parker = report.berger_parker_norm;
        out->species_richness = report.species_richness;
    });
}

ensdiv_status ensdiv_renyi_entropy(const int32_t* counts, int32_t n_species, double alpha,
                                   double* out) {
    if (require(counts && out, "null argument")) return ENSDIV_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        if (n_species < 1) throw std::invalid_argument("empty ensemble");
        std::vector<int> abundances(counts, counts + n_species);
        *out = ensdiv::renyi_entropy(ensdiv::distribution_from_counts(abundances), alpha);
    });
}

ensdiv_status ensdiv_ensemble_accuracy(const ensdiv_pool* pool, const ensdiv_dataset* ds,
                                       ensdiv_split split, const int32_t* members, int32_t count,
                                       double* out) {
    if (require(pool && ds && members && out, "null argument"))
        return ENSDIV_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        ensdiv::Ensemble ensemble{member_vector(members, count)};
        *out = ensdiv::accuracy(pool->impl.classifiers, ensemble,
                                ds->impl.split(to_split(split)));
    });
}

void ensdiv_ga_config_init(ensdiv_ga_config* cfg) {
    if (!cfg) return;
    const ensdiv::GAConfig defaults;
    cfg->population_size = defaults.population_size;
    cfg->generations = defaults.generations;
    cfg->crossover_rate = defaults.crossover_rate;
    cfg->mutation_rate = defaults.mutation_rate;
    cfg->tournament_size = defaults.tournament_size;
    cfg->elitism_count = defaults.elitism_count;
    cfg->seed = defaults.seed;
}

ensdiv_status ensdiv_evolve(const ensdiv_pool* pool, const ensdiv_dataset* ds, ensdiv_split split,
                            double target, const ensdiv_ga_config* cfg, int32_t ensemble_size,
                            ensdiv_ga_result** out) {
    if (require(pool && ds && cfg && out, "null argument")) return ENSDIV_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        ensdiv::GAConfig ga;
        ga.population_size = cfg->population_size;
        ga.generations = cfg->generations;
        ga.crossover_rate = cfg->crossover_rate;
        ga.mutation_rate = cfg->mutation_rate;
        ga.tournament_size = cfg->tournament_size;
        ga.elitism_count = cfg->elitism_count;
        ga.seed = cfg->seed;
        auto handle = std::make_unique<ensdiv_ga_result>();
        handle->impl = ensdiv::evolve(pool->impl.classifiers, ds->impl.split(to_split(split)),
                                      target, ga, ensemble_size);
        *out = handle.release();
    });
}

ensdiv_status ensdiv_ga_result_stats(const ensdiv_ga_result* result, double* best_fitness,
                                     double* achieved_accuracy) {
    if (require(result != nullptr, "null result")) return ENSDIV_ERR_INVALID_ARGUMENT;
    if (best_fitness) *best_fitness = result->impl.best_fitness;
    if (achieved_accuracy) *achieved_accuracy = result->impl.achieved_accuracy;
    g_last_error.clear();
    return ENSDIV_OK;
}

ensdiv_status ensdiv_ga_result_members(const ensdiv_ga_result* result, int32_t* out,
                                       int32_t capacity, int32_t* count) {
    if (require(result && count, "null argument")) return ENSDIV_ERR_INVALID_ARGUMENT;
    const auto& members = result->impl.best_ensemble.member_indices;
    *count = static_cast<int32_t>(members.size());
    if (!out) {
        g_last_error.clear();
        return ENSDIV_OK;
    }
    if (capacity < *count) return fail(ENSDIV_ERR_INVALID_ARGUMENT, "buffer too small");
    for (std::size_t i = 0; i < members.size(); ++i) out[i] = members[i];
    g_last_error.clear();
    return ENSDIV_OK;
}

ensdiv_status ensdiv_ga_result_save(const ensdiv_ga_result* result, const char* path) {
    if (require(result && path, "null argument")) return ENSDIV_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        std::ofstream out(path);
        if (!out) throw ensdiv::IoError(std::string("cannot open file for writing: ") + path);
        out << ensdiv::ga_result_to_json(result->impl).dump(2) << '\n';
        out.flush();
        if (!out) throw ensdiv::IoError(std::string("write failed: ") + path);
    });
}

void ensdiv_ga_result_free(ensdiv_ga_result* result) { delete result; }

ensdiv_status ensdiv_ensemble_load(const char* path, int32_t* out, int32_t capacity,
                                   int32_t* count) {
    if (require(path && count, "null argument")) return ENSDIV_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        std::ifstream in(path);
        if (!in) throw ensdiv::IoError(std::string("cannot open file: ") + path);
        nlohmann::json doc;
        try {
            in >> doc;
        } catch (const nlohmann::json::exception& e) {
            throw ensdiv::DataError(std::string("malformed ensemble document: ") + e.what());
        }
        std::vector<int> members;
        try {
            if (doc.is_array())
                members = doc.get<std::vector<int>>();
            else
                members = doc.at("member_indices").get<std::vector<int>>();
        } catch (const nlohmann::json::exception& e) {
            throw ensdiv::DataError(std::string("malformed ensemble document: ") + e.what());
        }
        if (members.empty()) throw ensdiv::DataError("empty ensemble document");
        *count = static_cast<int32_t>(members.size());
        if (!out) return;
        if (capacity < *count) throw std::invalid_argument("buffer too small");
        for (std::size_t i = 0; i < members.size(); ++i) out[i] = members[i];
    });
}

ensdiv_status ensdiv_experiment_run(const char* config_path, const char* out_dir,
                                    const uint64_t* master_seed_override) {
    if (require(config_path && out_dir, "null argument")) return ENSDIV_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        ensdiv::ExperimentConfig cfg = ensdiv::load_config(config_path);
        if (master_seed_override) cfg.master_seed = *master_seed_override;
        ensdiv::run_experiment_to_dir(cfg, out_dir);
    });
}

}  // extern "C"

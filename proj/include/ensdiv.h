/* ensdiv: structural diversity measurement and genetic ensemble selection
 * for pools of small binary classifiers.
 *
 * Every function returns an ensdiv_status; out-parameters are written only
 * on ENSDIV_OK. Objects returned through handle out-parameters are owned by
 * the caller and released with the matching _free function. Handles are not
 * thread-safe; treat each as confined to one thread.
 */
#ifndef ENSDIV_H
#define ENSDIV_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ensdiv_status {
    ENSDIV_OK = 0,
    ENSDIV_ERR_INVALID_ARGUMENT = 1,
    ENSDIV_ERR_DATA = 2,
    ENSDIV_ERR_IO = 3,
    ENSDIV_ERR_INTERNAL = 4
} ensdiv_status;

const char* ensdiv_version(void);

/* Message for the most recent failing call on this thread; "" if none.
 * The pointer stays valid until the next library call on the thread. */
const char* ensdiv_last_error(void);

/* ---------- datasets ---------- */

typedef struct ensdiv_dataset ensdiv_dataset;

typedef enum ensdiv_split {
    ENSDIV_SPLIT_TRAIN = 0,
    ENSDIV_SPLIT_VALIDATION = 1,
    ENSDIV_SPLIT_TEST = 2
} ensdiv_split;

/* Synthetic two-Gaussian binary problem over 7 features, min-max normalized.
 * n >= 20, 0 < class1_fraction < 1, separation >= 0 (distance between the
 * class means). Identical arguments always produce identical datasets. */
ensdiv_status ensdiv_dataset_generate(int64_t n, double class1_fraction, double separation,
                                      uint64_t seed, ensdiv_dataset** out);

/* Loads a CSV with a header row, normalizes features to [0, 1], and treats
 * `label_column` as the binary label. */
ensdiv_status ensdiv_dataset_load_csv(const char* path, const char* label_column,
                                      ensdiv_dataset** out);

/* Stratified train/validation/test partition. Fractions must be positive
 * and sum to 1; every split keeps at least one sample of each class. */
ensdiv_status ensdiv_dataset_partition(ensdiv_dataset* ds, double train_frac,
                                       double validation_frac, double test_frac, uint64_t seed);

ensdiv_status ensdiv_dataset_save(const ensdiv_dataset* ds, const char* csv_path,
                                  const char* manifest_path);

/* Re-opens a dataset saved by ensdiv_dataset_save. The manifest locates the
 * CSV relative to its own directory. */
ensdiv_status ensdiv_dataset_open(const char* manifest_path, ensdiv_dataset** out);

ensdiv_status ensdiv_dataset_info(const ensdiv_dataset* ds, int64_t* rows, int32_t* features);

void ensdiv_dataset_free(ensdiv_dataset* ds);

/* ---------- classifier pools ---------- */

typedef struct ensdiv_pool ensdiv_pool;

/* Trains pool_size classifiers on the dataset's train split, sampling
 * configurations from the 225-cell grid without replacement. The dataset
 * must already be partitioned. pool_size <= 225. */
ensdiv_status ensdiv_pool_train(const ensdiv_dataset* ds, int32_t pool_size, int32_t epochs,
                                uint64_t seed, ensdiv_pool** out);

ensdiv_status ensdiv_pool_save(const ensdiv_pool* pool, const char* path);
ensdiv_status ensdiv_pool_load(const char* path, ensdiv_pool** out);
ensdiv_status ensdiv_pool_size(const ensdiv_pool* pool, int32_t* out);

/* Canonical species key ("activation:hidden:rate") of one pool member. The
 * returned pointer stays valid while the pool lives. */
ensdiv_status ensdiv_pool_species_key(const ensdiv_pool* pool, int32_t index, const char** out);

void ensdiv_pool_free(ensdiv_pool* pool);

/* ---------- diversity ---------- */

typedef struct ensdiv_diversity_report {
    double shannon;        /* Shannon entropy / log(members), in [0, 1] */
    double simpson;        /* 1 - sum p_i^2, in [0, 1 - 1/members] */
    double berger_parker;  /* (1 / p_max) / members, in [1/members, 1] */
    int32_t species_richness;
} ensdiv_diversity_report;

/* Diversity of the ensemble formed by `members` (indices into the pool;
 * repeats allowed, count must be odd and positive). */
ensdiv_status ensdiv_measure(const ensdiv_pool* pool, const int32_t* members, int32_t count,
                             ensdiv_diversity_report* out);

/* Order-alpha Renyi entropy (natural log) of an abundance vector of
 * positive species counts. alpha >= 0; alpha near 1 uses the Shannon
 * limit. */
ensdiv_status ensdiv_renyi_entropy(const int32_t* counts, int32_t n_species, double alpha,
                                   double* out);

/* ---------- ensembles ---------- */

/* Majority-vote accuracy of the given members on one split. */
ensdiv_status ensdiv_ensemble_accuracy(const ensdiv_pool* pool, const ensdiv_dataset* ds,
                                       ensdiv_split split, const int32_t* members, int32_t count,
                                       double* out);

/* ---------- genetic search ---------- */

typedef struct ensdiv_ga_config {
    int32_t population_size;
    int32_t generations;
    double crossover_rate;
    double mutation_rate;
    int32_t tournament_size;
    int32_t elitism_count;
    uint64_t seed;
} ensdiv_ga_config;

/* Fills the defaults: population 40, 60 generations, crossover 0.8,
 * mutation 0.05, tournament 3, elitism 2, seed 0. */
void ensdiv_ga_config_init(ensdiv_ga_config* cfg);

typedef struct ensdiv_ga_result ensdiv_ga_result;

/* Searches for an odd ensemble of `ensemble_size` pool members whose
 * accuracy on the chosen split is as close to `target` as possible.
 * Deterministic for a fixed config. */
ensdiv_status ensdiv_evolve(const ensdiv_pool* pool, const ensdiv_dataset* ds, ensdiv_split split,
                            double target, const ensdiv_ga_config* cfg, int32_t ensemble_size,
                            ensdiv_ga_result** out);

ensdiv_status ensdiv_ga_result_stats(const ensdiv_ga_result* result, double* best_fitness,
                                     double* achieved_accuracy);

/* Copies the winning member indices into `out` (capacity entries available);
 * *count receives the ensemble size. Call with out = NULL to query the size
 * alone. */
ensdiv_status ensdiv_ga_result_members(const ensdiv_ga_result* result, int32_t* out,
                                       int32_t capacity, int32_t* count);

ensdiv_status ensdiv_ga_result_save(const ensdiv_ga_result* result, const char* path);

void ensdiv_ga_result_free(ensdiv_ga_result* result);

/* Reads member indices from an ensemble JSON file: either a bare array of
 * indices or a saved search result. Same capacity protocol as
 * ensdiv_ga_result_members. */
ensdiv_status ensdiv_ensemble_load(const char* path, int32_t* out, int32_t capacity,
                                   int32_t* count);

/* ---------- experiments ---------- */

/* Runs the full pipeline described by a JSON config file and writes
 * experiment.csv, pool.json, data.csv, data.json, ensembles.json, and
 * manifest.json under out_dir. A non-NULL master_seed_override replaces the
 * config's master_seed. */
ensdiv_status ensdiv_experiment_run(const char* config_path, const char* out_dir,
                                    const uint64_t* master_seed_override);

#ifdef __cplusplus
}
#endif

#endif /* ENSDIV_H */

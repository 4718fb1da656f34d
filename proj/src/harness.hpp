#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "classifier.hpp"
#include "data.hpp"
#include "diversity.hpp"
#include "evolve.hpp"

namespace ensdiv {

// Seed streams fanned out from the master seed (see mix_seed). Classifier i
// additionally uses stream i of the pool seed; GA runs use streams of the
// GA base seed (0 for probing, 1 + j for final target j).
namespace stage {
inline constexpr std::uint64_t kData = 1;
inline constexpr std::uint64_t kPartition = 2;
inline constexpr std::uint64_t kPool = 3;
inline constexpr std::uint64_t kGa = 4;
}  // namespace stage

struct DataSourceConfig {
    enum class Kind { Synthetic, Csv, Manifest };
    Kind kind = Kind::Synthetic;
    SyntheticParams synthetic;
    std::string path;  // csv or manifest location
    std::string label_column = "label";
    double oversample_to = 0.0;  // minority fraction target; 0 disables
};

struct ExperimentConfig {
    int pool_size = 120;
    int ensemble_size = 21;
    std::vector<double> targets;  // probe targets; empty selects the default sweep
    GAConfig ga;
    DataSourceConfig data_source;
    int epochs = 100;
    int batch_size = 32;
    std::array<double, 3> partition_fractions{0.6, 0.2, 0.2};
    std::uint64_t master_seed = 0;
};

ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::string& path);

// Default probe sweep when the config lists no targets: 11 evenly spaced
// accuracy levels from 0.40 to 0.90.
std::vector<double> default_targets();

struct Pool {
    std::vector<TrainedClassifier> classifiers;
    std::vector<double> train_accuracies;
    std::uint64_t seed = 0;

    std::size_t size() const { return classifiers.size(); }
};

// Samples pool_size distinct configurations from the grid and trains one
// classifier per configuration on the train split.
Pool build_pool(int pool_size, int epochs, int batch_size, std::uint64_t pool_seed,
                const LabeledSamples& train_data);
Pool build_pool(const ExperimentConfig& cfg, const Dataset& data);

void save_pool(const Pool& pool, const std::string& path);
Pool load_pool(const std::string& path);

struct ExperimentRow {
    int ensemble_id = 0;
    double target_accuracy = 0.0;
    double achieved_accuracy = 0.0;  // on the test split
    double shannon_norm = 0.0;
    double simpson_norm = 0.0;
    double berger_parker_norm = 0.0;
    int species_richness = 0;
    std::vector<int> member_indices;
    std::vector<std::string> member_species_keys;
    bool failed = false;
    std::string error;
};

struct ExperimentResult {
    std::vector<ExperimentRow> rows;
    Dataset dataset;
    Pool pool;
    std::vector<TargetProbe> probes;
    std::vector<double> final_targets;
    std::vector<GAResult> ga_results;  // aligned with rows; default entry on failure
};

// Full pipeline: data -> pool -> feasibility probe -> one GA run per target
// -> test accuracy and diversity per winning ensemble. A GA failure turns
// into a failed row rather than aborting the sweep.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

void write_experiment_csv(const std::vector<ExperimentRow>& rows, std::ostream& out);

// Runs the experiment and writes experiment.csv, pool.json, data.csv,
// data.json, ensembles.json, and manifest.json under out_dir.
void run_experiment_to_dir(const ExperimentConfig& cfg, const std::string& out_dir);

}  // namespace ensdiv

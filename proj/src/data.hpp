#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "matrix.hpp"

namespace ensdiv {

enum class Split { Train, Validation, Test };

const char* to_string(Split split);
Split split_from_string(const std::string& name);

// One partition slice, materialized as a feature matrix plus labels.
struct LabeledSamples {
    Matrix x;
    std::vector<int> y;

    std::size_t size() const { return y.size(); }
};

struct NormalizationResult {
    Matrix values;
    std::vector<std::pair<double, double>> ranges;  // per-column (min, max) before scaling
    std::vector<int> degenerate_columns;            // columns where max == min, emitted as zeros
};

// Column-wise min-max scaling into [0, 1]. Constant columns become zeros
// and are reported rather than dividing by zero.
NormalizationResult minmax_normalize(const Matrix& features);

struct Dataset {
    Matrix features;  // normalized to [0, 1]
    std::vector<int> labels;
    std::vector<Split> partition;  // empty until partitioned; else one tag per row
    std::vector<std::string> feature_names;
    std::vector<std::pair<double, double>> ranges;  // pre-normalization column ranges
    std::vector<int> degenerate_columns;
    std::string label_name = "label";
    std::uint64_t seed = 0;            // generation seed (0 for loaded files)
    std::uint64_t partition_seed = 0;

    std::size_t rows() const { return labels.size(); }
    std::size_t dims() const { return features.cols; }
    bool is_partitioned() const { return !partition.empty(); }

    LabeledSamples split(Split which) const;
    LabeledSamples all() const;
};

struct SyntheticParams {
    std::int64_t n = 1000;
    double class1_fraction = 0.5;
    double separation = 1.5;  // Euclidean distance between the class means
};

// Two-Gaussian binary problem over 7 features: class 0 centered at the
// origin, class 1 shifted along the diagonal by `separation`, unit
// covariance, then min-max normalized. Rows are shuffled so class blocks
// do not survive into the file layout.
Dataset generate_synthetic(const SyntheticParams& params, std::uint64_t seed);

Dataset load_csv(const std::string& path, const std::string& label_column);

// Stratified split: each partition keeps the overall class ratio to within
// one sample per class. Fractions must be positive and sum to 1.
Dataset partition(Dataset ds, double train_frac, double validation_frac, double test_frac,
                  std::uint64_t seed);

// Duplicates minority rows (cycling in row order) until the minority class
// reaches `target_fraction` of the dataset. Must run before partitioning.
Dataset oversample_minority(Dataset ds, double target_fraction);

void save_dataset(const Dataset& ds, const std::string& csv_path,
                  const std::string& manifest_path);

// Re-opens a dataset saved by save_dataset; the manifest locates the CSV
// relative to its own directory.
Dataset open_dataset(const std::string& manifest_path);

}  // namespace ensdiv

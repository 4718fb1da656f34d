#include "data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "errors.hpp"

namespace ensdiv {

const char* to_string(Split split) {
    switch (split) {
        case Split::Train: return "train";
        case Split::Validation: return "validation";
        case Split::Test: return "test";
    }
    return "?";
}

Split split_from_string(const std::string& name) {
    if (name == "train") return Split::Train;
    if (name == "validation") return Split::Validation;
    if (name == "test") return Split::Test;
    throw std::invalid_argument("unknown split: " + name);
}

NormalizationResult minmax_normalize(const Matrix& features) {
    if (features.rows == 0 || features.cols == 0)
        throw std::invalid_argument("empty matrix");
    if (features.rows < 2)
        throw std::invalid_argument("need at least two rows");

    NormalizationResult result;
    result.values = Matrix(features.rows, features.cols);
    result.ranges.resize(features.cols);
    for (std::size_t c = 0; c < features.cols; ++c) {
        double lo = features.at(0, c);
        double hi = lo;
        for (std::size_t r = 1; r < features.rows; ++r) {
            lo = std::min(lo, features.at(r, c));
            hi = std::max(hi, features.at(r, c));
        }
        result.ranges[c] = {lo, hi};
        if (lo == hi) {
            // A constant column carries no information; map it to zero and
            // let the caller decide whether to warn or drop it.
            result.degenerate_columns.push_back(static_cast<int>(c));
            continue;
        }
        const double span = hi - lo;
        for (std::size_t r = 0; r < features.rows; ++r)
            result.values.at(r, c) = (features.at(r, c) - lo) / span;
    }
    return result;
}

LabeledSamples Dataset::split(Split which) const {
    if (!is_partitioned()) throw std::invalid_argument("dataset is not partitioned");
    LabeledSamples out;
    std::size_t count = 0;
    for (const Split tag : partition)
        if (tag == which) ++count;
    out.x = Matrix(count, features.cols);
    out.y.reserve(count);
    std::size_t w = 0;
    for (std::size_t r = 0; r < rows(); ++r) {
        if (partition[r] != which) continue;
        std::copy(features.row(r), features.row(r) + features.cols, out.x.row(w));
        out.y.push_back(labels[r]);
        ++w;
    }
    return out;
}

LabeledSamples Dataset::all() const {
    LabeledSamples out;
    out.x = features;
    out.y = labels;
    return out;
}

namespace {

constexpr std::size_t kSyntheticDims = 7;

}  // namespace

Dataset generate_synthetic(const SyntheticParams& params, std::uint64_t seed) {
    if (params.n < 20) throw std::invalid_argument("need at least 20 samples");
    if (!(params.class1_fraction > 0.0) || params.class1_fraction >= 1.0)
        throw std::invalid_argument("class fraction out of range");
    if (!(params.separation >= 0.0)) throw std::invalid_argument("separation must be non-negative");

    const std::size_t n = static_cast<std::size_t>(params.n);
    std::size_t n1 = static_cast<std::size_t>(
        std::lround(static_cast<double>(params.n) * params.class1_fraction));
    n1 = std::clamp<std::size_t>(n1, 1, n - 1);
    const std::size_t n0 = n - n1;

    // Class 1 sits `separation` away from class 0 along the all-ones
    // diagonal, split evenly across the feature axes.
    const double offset = params.separation / std::sqrt(static_cast<double>(kSyntheticDims));

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);

    Matrix raw(n, kSyntheticDims);
    std::vector<int> raw_labels(n);
    for (std::size_t r = 0; r < n; ++r) {
        const int label = r < n0 ? 0 : 1;
        raw_labels[r] = label;
        for (std::size_t c = 0; c < kSyntheticDims; ++c)
            raw.at(r, c) = (label == 1 ? offset : 0.0) + noise(rng);
    }

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);

    Matrix shuffled(n, kSyntheticDims);
    Dataset ds;
    ds.labels.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
        std::copy(raw.row(perm[r]), raw.row(perm[r]) + kSyntheticDims, shuffled.row(r));
        ds.labels[r] = raw_labels[perm[r]];
    }

    NormalizationResult norm = minmax_normalize(shuffled);
    ds.features = std::move(norm.values);
    ds.ranges = std::move(norm.ranges);
    ds.degenerate_columns = std::move(norm.degenerate_columns);
    ds.feature_names.reserve(kSyntheticDims);
    for (std::size_t c = 0; c < kSyntheticDims; ++c)
        ds.feature_names.push_back("f" + std::to_string(c + 1));
    ds.seed = seed;
    return ds;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r')) ++a;
    while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

CsvTable read_csv_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open file: " + path);

    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty file: " + path);
    table.header = split_line(line);
    if (table.header.empty()) throw DataError("empty header: " + path);

    std::size_t row_number = 0;
    while (std::getline(in, line)) {
        ++row_number;
        if (trim(line).empty()) continue;
        const std::vector<std::string> cells = split_line(line);
        if (cells.size() != table.header.size())
            throw DataError("row " + std::to_string(row_number) + " has " +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(table.header.size()));
        std::vector<double> values(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const std::string& cell = cells[c];
            const char* first = cell.data();
            const char* last = first + cell.size();
            auto [ptr, ec] = std::from_chars(first, last, values[c]);
            if (ec != std::errc() || ptr != last)
                throw DataError("non-numeric cell at row " + std::to_string(row_number) +
                                ", column '" + table.header[c] + "'");
        }
        table.rows.push_back(std::move(values));
    }
    return table;
}

int label_from_cell(double value, std::size_t row_number) {
    if (value == 0.0) return 0;
    if (value == 1.0) return 1;
    throw DataError("non-binary label at row " + std::to_string(row_number));
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& label_column) {
    const CsvTable table = read_csv_table(path);

    std::size_t label_idx = table.header.size();
    for (std::size_t c = 0; c < table.header.size(); ++c)
        if (table.header[c] == label_column) {
            label_idx = c;
            break;
        }
    if (label_idx == table.header.size())
        throw DataError("label column not found: " + label_column);
    if (table.header.size() < 2) throw DataError("no feature columns");
    if (table.rows.size() < 2) throw DataError("need at least two data rows");

    const std::size_t d = table.header.size() - 1;
    Matrix raw(table.rows.size(), d);
    Dataset ds;
    ds.labels.resize(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        ds.labels[r] = label_from_cell(table.rows[r][label_idx], r + 1);
        std::size_t w = 0;
        for (std::size_t c = 0; c < table.header.size(); ++c) {
            if (c == label_idx) continue;
            raw.at(r, w++) = table.rows[r][c];
        }
    }

    NormalizationResult norm = minmax_normalize(raw);
    ds.features = std::move(norm.values);
    ds.ranges = std::move(norm.ranges);
    ds.degenerate_columns = std::move(norm.degenerate_columns);
    for (std::size_t c = 0; c < table.header.size(); ++c)
        if (c != label_idx) ds.feature_names.push_back(table.header[c]);
    ds.label_name = label_column;
    return ds;
}

Dataset partition(Dataset ds, double train_frac, double validation_frac, double test_frac,
                  std::uint64_t seed) {
    const double fracs[3] = {train_frac, validation_frac, test_frac};
    double sum = 0.0;
    for (const double f : fracs) {
        if (!(f > 0.0)) throw std::invalid_argument("fractions must be positive and sum to 1");
        sum += f;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("fractions must be positive and sum to 1");
    if (ds.rows() == 0) throw std::invalid_argument("empty dataset");

    std::vector<std::size_t> by_class[2];
    for (std::size_t r = 0; r < ds.rows(); ++r)
        by_class[ds.labels[r] == 1 ? 1 : 0].push_back(r);
    if (by_class[0].empty() || by_class[1].empty())
        throw std::invalid_argument("dataset must contain both classes");

    std::mt19937_64 rng(seed);
    ds.partition.assign(ds.rows(), Split::Train);

    for (auto& members : by_class) {
        std::shuffle(members.begin(), members.end(), rng);

        // Largest-remainder apportionment keeps every split within one
        // sample of the exact class share.
        const std::size_t n = members.size();
        std::size_t counts[3];
        double remainders[3];
        std::size_t assigned = 0;
        for (int k = 0; k < 3; ++k) {
            const double exact = fracs[k] * static_cast<double>(n);
            counts[k] = static_cast<std::size_t>(std::floor(exact));
            remainders[k] = exact - std::floor(exact);
            assigned += counts[k];
        }
        int order[3] = {0, 1, 2};
        std::stable_sort(order, order + 3,
                         [&](int a, int b) { return remainders[a] > remainders[b]; });
        for (std::size_t leftover = n - assigned, i = 0; i < leftover; ++i)
            ++counts[order[i % 3]];

        for (int k = 0; k < 3; ++k)
            if (counts[k] == 0)
                throw std::invalid_argument("a split would receive no samples of one class");

        std::size_t cursor = 0;
        const Split tags[3] = {Split::Train, Split::Validation, Split::Test};
        for (int k = 0; k < 3; ++k)
            for (std::size_t i = 0; i < counts[k]; ++i) ds.partition[members[cursor++]] = tags[k];
    }

    ds.partition_seed = seed;
    return ds;
}

Dataset oversample_minority(Dataset ds, double target_fraction) {
    if (!(target_fraction > 0.0) || target_fraction > 0.5)
        throw std::invalid_argument("target fraction must be in (0, 0.5]");
    if (ds.is_partitioned()) throw std::invalid_argument("oversample before partitioning");
    if (ds.rows() == 0) throw std::invalid_argument("empty dataset");

    std::size_t count1 = 0;
    for (const int label : ds.labels) count1 += label == 1 ? 1 : 0;
    const std::size_t count0 = ds.rows() - count1;
    if (count0 == 0 || count1 == 0)
        throw std::invalid_argument("dataset must contain both classes");

    const int minority_label = count1 <= count0 ? 1 : 0;
    const std::size_t n_minority = std::min(count0, count1);
    const std::size_t n_majority = std::max(count0, count1);

    // Want m / (n_majority + m) >= target, i.e. m >= t * n_majority / (1 - t).
    const std::size_t wanted = static_cast<std::size_t>(std::ceil(
        target_fraction * static_cast<double>(n_majority) / (1.0 - target_fraction)));
    if (wanted <= n_minority) return ds;

    std::vector<std::size_t> minority_rows;
    for (std::size_t r = 0; r < ds.rows(); ++r)
        if (ds.labels[r] == minority_label) minority_rows.push_back(r);

    const std::size_t additions = wanted - n_minority;
    const std::size_t original_rows = ds.rows();
    Matrix grown(original_rows + additions, ds.features.cols);
    std::copy(ds.features.data.begin(), ds.features.data.end(), grown.data.begin());
    for (std::size_t i = 0; i < additions; ++i) {
        const std::size_t src = minority_rows[i % minority_rows.size()];
        std::copy(ds.features.row(src), ds.features.row(src) + ds.features.cols,
                  grown.row(original_rows + i));
        ds.labels.push_back(minority_label);
    }
    ds.features = std::move(grown);
    return ds;
}

void save_dataset(const Dataset& ds, const std::string& csv_path,
                  const std::string& manifest_path) {
    if (ds.rows() == 0) throw std::invalid_argument("empty dataset");

    std::ofstream csv(csv_path);
    if (!csv) throw IoError("cannot open file for writing: " + csv_path);
    for (std::size_t c = 0; c < ds.feature_names.size(); ++c) csv << ds.feature_names[c] << ',';
    csv << ds.label_name << '\n';
    char buf[40];
    for (std::size_t r = 0; r < ds.rows(); ++r) {
        for (std::size_t c = 0; c < ds.features.cols; ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", ds.features.at(r, c));
            csv << buf << ',';
        }
        csv << ds.labels[r] << '\n';
    }
    csv.flush();
    if (!csv) throw IoError("write failed: " + csv_path);

    nlohmann::json ranges = nlohmann::json::array();
    for (const auto& [lo, hi] : ds.ranges) ranges.push_back({lo, hi});
    nlohmann::json tags = nlohmann::json::array();
    for (const Split tag : ds.partition) tags.push_back(to_string(tag));

    const nlohmann::json manifest = {
        {"csv", std::filesystem::path(csv_path).filename().string()},
        {"label_column", ds.label_name},
        {"feature_names", ds.feature_names},
        {"ranges", ranges},
        {"degenerate_columns", ds.degenerate_columns},
        {"partition", tags},
        {"seed", ds.seed},
        {"partition_seed", ds.partition_seed},
        {"rows", ds.rows()},
        {"features", ds.dims()}};

    std::ofstream out(manifest_path);
    if (!out) throw IoError("cannot open file for writing: " + manifest_path);
    out << manifest.dump(2) << '\n';
    out.flush();
    if (!out) throw IoError("write failed: " + manifest_path);
}

Dataset open_dataset(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw IoError("cannot open file: " + manifest_path);
    nlohmann::json manifest;
    try {
        in >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed manifest: ") + e.what());
    }

    Dataset ds;
    std::string csv_name;
    std::vector<std::string> tags;
    try {
        csv_name = manifest.at("csv").get<std::string>();
        ds.label_name = manifest.at("label_column").get<std::string>();
        ds.feature_names = manifest.at("feature_names").get<std::vector<std::string>>();
        for (const auto& pair : manifest.at("ranges"))
            ds.ranges.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
        ds.degenerate_columns = manifest.at("degenerate_columns").get<std::vector<int>>();
        tags = manifest.at("partition").get<std::vector<std::string>>();
        ds.seed = manifest.at("seed").get<std::uint64_t>();
        ds.partition_seed = manifest.at("partition_seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed manifest: ") + e.what());
    }

    const std::filesystem::path csv_path =
        std::filesystem::path(manifest_path).parent_path() / csv_name;
    const CsvTable table = read_csv_table(csv_path.string());
    if (table.header.size() != ds.feature_names.size() + 1)
        throw DataError("csv does not match manifest: column count");
    for (std::size_t c = 0; c < ds.feature_names.size(); ++c)
        if (table.header[c] != ds.feature_names[c])
            throw DataError("csv does not match manifest: column '" + table.header[c] + "'");
    if (table.header.back() != ds.label_name)
        throw DataError("csv does not match manifest: label column");

    const std::size_t d = ds.feature_names.size();
    ds.features = Matrix(table.rows.size(), d);
    ds.labels.resize(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        for (std::size_t c = 0; c < d; ++c) {
            const double v = table.rows[r][c];
            if (v < -1e-9 || v > 1.0 + 1e-9)
                throw DataError("value outside [0, 1] at row " + std::to_string(r + 1) +
                                "; expected normalized data");
            ds.features.at(r, c) = v;
        }
        ds.labels[r] = label_from_cell(table.rows[r][d], r + 1);
    }

    if (!tags.empty()) {
        if (tags.size() != ds.rows()) throw DataError("partition length does not match rows");
        ds.partition.reserve(tags.size());
        for (const std::string& tag : tags) {
            try {
                ds.partition.push_back(split_from_string(tag));
            } catch (const std::invalid_argument& e) {
                throw DataError(e.what());
            }
        }
    }
    return ds;
}

}  // namespace ensdiv

// Exercises the shared library strictly through the public C header, the
// same way the CLI does.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ensdiv.h"

namespace {

std::filesystem::path scratch() {
    const std::filesystem::path dir = std::filesystem::temp_directory_path() / "ensdiv_capi";
    std::filesystem::create_directories(dir);
    return dir;
}

struct DatasetHandle {
    ensdiv_dataset* ptr = nullptr;
    ~DatasetHandle() { ensdiv_dataset_free(ptr); }
};

struct PoolHandle {
    ensdiv_pool* ptr = nullptr;
    ~PoolHandle() { ensdiv_pool_free(ptr); }
};

struct ResultHandle {
    ensdiv_ga_result* ptr = nullptr;
    ~ResultHandle() { ensdiv_ga_result_free(ptr); }
};

// One shared partitioned dataset and trained pool; building a pool is the
// slow part, so the suite reuses it.
struct Fixture {
    DatasetHandle ds;
    PoolHandle pool;

    Fixture() {
        REQUIRE(ensdiv_dataset_generate(300, 0.5, 2.0, 7, &ds.ptr) == ENSDIV_OK);
        REQUIRE(ensdiv_dataset_partition(ds.ptr, 0.6, 0.2, 0.2, 8) == ENSDIV_OK);
        REQUIRE(ensdiv_pool_train(ds.ptr, 5, 3, 9, &pool.ptr) == ENSDIV_OK);
    }
};

Fixture& fixture() {
    static Fixture fx;
    return fx;
}

}  // namespace

TEST_CASE("version and quiescent error state") {
    CHECK(std::strcmp(ensdiv_version(), "0.1.0") == 0);
    ensdiv_diversity_report report;
    const int32_t members[1] = {0};
    ensdiv_measure(fixture().pool.ptr, members, 1, &report);
    CHECK(std::strcmp(ensdiv_last_error(), "") == 0);  // cleared by a successful call
}

TEST_CASE("argument failures set a readable message") {
    ensdiv_dataset* ds = nullptr;
    CHECK(ensdiv_dataset_generate(5, 0.5, 1.0, 0, &ds) == ENSDIV_ERR_INVALID_ARGUMENT);
    CHECK(ds == nullptr);
    CHECK(std::strlen(ensdiv_last_error()) > 0);

    CHECK(ensdiv_dataset_generate(100, 0.5, 1.0, 0, nullptr) == ENSDIV_ERR_INVALID_ARGUMENT);
    CHECK(ensdiv_dataset_load_csv(nullptr, "label", &ds) == ENSDIV_ERR_INVALID_ARGUMENT);
}

TEST_CASE("dataset lifecycle: generate, partition, save, reopen") {
    Fixture& fx = fixture();
    int64_t rows = 0;
    int32_t features = 0;
    REQUIRE(ensdiv_dataset_info(fx.ds.ptr, &rows, &features) == ENSDIV_OK);
    CHECK(rows == 300);
    CHECK(features == 7);

    const auto dir = scratch();
    const std::string csv = (dir / "ds.csv").string();
    const std::string manifest = (dir / "ds.json").string();
    REQUIRE(ensdiv_dataset_save(fx.ds.ptr, csv.c_str(), manifest.c_str()) == ENSDIV_OK);

    DatasetHandle reopened;
    REQUIRE(ensdiv_dataset_open(manifest.c_str(), &reopened.ptr) == ENSDIV_OK);
    REQUIRE(ensdiv_dataset_info(reopened.ptr, &rows, &features) == ENSDIV_OK);
    CHECK(rows == 300);
    CHECK(features == 7);

    CHECK(ensdiv_dataset_open((dir / "nope.json").string().c_str(), &reopened.ptr) ==
          ENSDIV_ERR_IO);
}

TEST_CASE("training on an unpartitioned dataset is an argument error") {
    DatasetHandle ds;
    REQUIRE(ensdiv_dataset_generate(60, 0.5, 1.5, 3, &ds.ptr) == ENSDIV_OK);
    ensdiv_pool* pool = nullptr;
    CHECK(ensdiv_pool_train(ds.ptr, 3, 2, 4, &pool) == ENSDIV_ERR_INVALID_ARGUMENT);
    CHECK(pool == nullptr);
}

TEST_CASE("pool inspection and species keys") {
    Fixture& fx = fixture();
    int32_t size = 0;
    REQUIRE(ensdiv_pool_size(fx.pool.ptr, &size) == ENSDIV_OK);
    CHECK(size == 5);

    const char* key = nullptr;
    REQUIRE(ensdiv_pool_species_key(fx.pool.ptr, 0, &key) == ENSDIV_OK);
    REQUIRE(key != nullptr);
    // "activation:hidden:rate" with exactly two separators.
    int colons = 0;
    for (const char* p = key; *p; ++p) colons += *p == ':' ? 1 : 0;
    CHECK(colons == 2);

    CHECK(ensdiv_pool_species_key(fx.pool.ptr, 99, &key) == ENSDIV_ERR_INVALID_ARGUMENT);
    CHECK(ensdiv_pool_species_key(fx.pool.ptr, -1, &key) == ENSDIV_ERR_INVALID_ARGUMENT);
}

TEST_CASE("pool save and load through the C surface") {
    Fixture& fx = fixture();
    const auto dir = scratch();
    const std::string path = (dir / "pool.json").string();
    REQUIRE(ensdiv_pool_save(fx.pool.ptr, path.c_str()) == ENSDIV_OK);

    PoolHandle loaded;
    REQUIRE(ensdiv_pool_load(path.c_str(), &loaded.ptr) == ENSDIV_OK);
    int32_t size = 0;
    REQUIRE(ensdiv_pool_size(loaded.ptr, &size) == ENSDIV_OK);
    CHECK(size == 5);

    std::ofstream(dir / "torn_pool.json") << "{";
    CHECK(ensdiv_pool_load((dir / "torn_pool.json").string().c_str(), &loaded.ptr) ==
          ENSDIV_ERR_DATA);
    CHECK(ensdiv_pool_load((dir / "gone.json").string().c_str(), &loaded.ptr) == ENSDIV_ERR_IO);
}

TEST_CASE("diversity of a degenerate ensemble through the C API") {
    Fixture& fx = fixture();
    const int32_t members[3] = {0, 0, 0};
    ensdiv_diversity_report report;
    REQUIRE(ensdiv_measure(fx.pool.ptr, members, 3, &report) == ENSDIV_OK);
    CHECK(report.shannon == 0.0);
    CHECK(report.simpson == 0.0);
    CHECK(report.berger_parker == 1.0 / 3.0);
    CHECK(report.species_richness == 1);

    const int32_t even[2] = {0, 1};
    CHECK(ensdiv_measure(fx.pool.ptr, even, 2, &report) == ENSDIV_ERR_INVALID_ARGUMENT);
    const int32_t stray[3] = {0, 1, 7};
    CHECK(ensdiv_measure(fx.pool.ptr, stray, 3, &report) == ENSDIV_ERR_INVALID_ARGUMENT);
}

TEST_CASE("renyi entropy over raw counts") {
    const int32_t counts[2] = {14, 7};
    double h = 0.0;
    REQUIRE(ensdiv_renyi_entropy(counts, 2, 1.0, &h) == ENSDIV_OK);
    CHECK(h == doctest::Approx(0.63651416829481282).epsilon(1e-12));
    REQUIRE(ensdiv_renyi_entropy(counts, 2, 0.0, &h) == ENSDIV_OK);
    CHECK(h == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    CHECK(ensdiv_renyi_entropy(counts, 2, -1.0, &h) == ENSDIV_ERR_INVALID_ARGUMENT);
    CHECK(ensdiv_renyi_entropy(counts, 0, 1.0, &h) == ENSDIV_ERR_INVALID_ARGUMENT);
    const int32_t zero_count[2] = {3, 0};
    CHECK(ensdiv_renyi_entropy(zero_count, 2, 1.0, &h) == ENSDIV_ERR_INVALID_ARGUMENT);
}

TEST_CASE("ensemble accuracy on a chosen split") {
    Fixture& fx = fixture();
    const int32_t members[3] = {0, 1, 2};
    double acc = -1.0;
    REQUIRE(ensdiv_ensemble_accuracy(fx.pool.ptr, fx.ds.ptr, ENSDIV_SPLIT_TEST, members, 3,
                                     &acc) == ENSDIV_OK);
    CHECK(acc >= 0.0);
    CHECK(acc <= 1.0);
}

TEST_CASE("evolution end to end over the C surface") {
    Fixture& fx = fixture();
    ensdiv_ga_config ga;
    ensdiv_ga_config_init(&ga);
    CHECK(ga.population_size == 40);
    CHECK(ga.generations == 60);
    CHECK(ga.crossover_rate == 0.8);
    CHECK(ga.mutation_rate == 0.05);
    CHECK(ga.tournament_size == 3);
    CHECK(ga.elitism_count == 2);
    ga.population_size = 10;
    ga.generations = 5;
    ga.seed = 13;

    ResultHandle result;
    REQUIRE(ensdiv_evolve(fx.pool.ptr, fx.ds.ptr, ENSDIV_SPLIT_VALIDATION, 0.7, &ga, 3,
                          &result.ptr) == ENSDIV_OK);

    double best_fitness = 1.0;
    double achieved = -1.0;
    REQUIRE(ensdiv_ga_result_stats(result.ptr, &best_fitness, &achieved) == ENSDIV_OK);
    CHECK(best_fitness <= 0.0);
    CHECK(achieved >= 0.0);
    CHECK(achieved <= 1.0);

    int32_t count = 0;
    REQUIRE(ensdiv_ga_result_members(result.ptr, nullptr, 0, &count) == ENSDIV_OK);
    REQUIRE(count == 3);
    std::vector<int32_t> members(3);
    REQUIRE(ensdiv_ga_result_members(result.ptr, members.data(), 3, &count) == ENSDIV_OK);
    int32_t short_buffer[1];
    CHECK(ensdiv_ga_result_members(result.ptr, short_buffer, 1, &count) ==
          ENSDIV_ERR_INVALID_ARGUMENT);

    // Determinism through the C path as well.
    ResultHandle again;
    REQUIRE(ensdiv_evolve(fx.pool.ptr, fx.ds.ptr, ENSDIV_SPLIT_VALIDATION, 0.7, &ga, 3,
                          &again.ptr) == ENSDIV_OK);
    std::vector<int32_t> members_again(3);
    REQUIRE(ensdiv_ga_result_members(again.ptr, members_again.data(), 3, &count) == ENSDIV_OK);
    CHECK(members == members_again);

    CHECK(ensdiv_evolve(fx.pool.ptr, fx.ds.ptr, ENSDIV_SPLIT_VALIDATION, 0.7, &ga, 4,
                        &again.ptr) == ENSDIV_ERR_INVALID_ARGUMENT);
}

TEST_CASE("saved results feed back into ensemble loading") {
    Fixture& fx = fixture();
    ensdiv_ga_config ga;
    ensdiv_ga_config_init(&ga);
    ga.population_size = 8;
    ga.generations = 3;
    ResultHandle result;
    REQUIRE(ensdiv_evolve(fx.pool.ptr, fx.ds.ptr, ENSDIV_SPLIT_VALIDATION, 0.6, &ga, 3,
                          &result.ptr) == ENSDIV_OK);

    const auto dir = scratch();
    const std::string path = (dir / "result.json").string();
    REQUIRE(ensdiv_ga_result_save(result.ptr, path.c_str()) == ENSDIV_OK);

    int32_t count = 0;
    REQUIRE(ensdiv_ensemble_load(path.c_str(), nullptr, 0, &count) == ENSDIV_OK);
    REQUIRE(count == 3);
    std::vector<int32_t> members(3);
    REQUIRE(ensdiv_ensemble_load(path.c_str(), members.data(), 3, &count) == ENSDIV_OK);

    std::vector<int32_t> direct(3);
    REQUIRE(ensdiv_ga_result_members(result.ptr, direct.data(), 3, &count) == ENSDIV_OK);
    CHECK(members == direct);

    // Bare index arrays load too.
    std::ofstream(dir / "bare.json") << "[4, 0, 4]";
    REQUIRE(ensdiv_ensemble_load((dir / "bare.json").string().c_str(), members.data(), 3,
                                 &count) == ENSDIV_OK);
    CHECK(count == 3);
    CHECK(members == std::vector<int32_t>{4, 0, 4});

    std::ofstream(dir / "empty.json") << "[]";
    CHECK(ensdiv_ensemble_load((dir / "empty.json").string().c_str(), nullptr, 0, &count) ==
          ENSDIV_ERR_DATA);
}

TEST_CASE("experiments run from a config file") {
    const auto dir = scratch();
    const std::string config_path = (dir / "config.json").string();
    std::ofstream(config_path) << R"({
        "pool_size": 4,
        "ensemble_size": 3,
        "targets": [0.5, 0.7],
        "epochs": 2,
        "ga": {"population_size": 8, "generations": 3},
        "data_source": {"type": "synthetic", "n": 150},
        "master_seed": 5
    })";

    const std::string out_dir = (dir / "exp").string();
    std::filesystem::remove_all(out_dir);
    REQUIRE(ensdiv_experiment_run(config_path.c_str(), out_dir.c_str(), nullptr) == ENSDIV_OK);
    CHECK(std::filesystem::exists(dir / "exp" / "experiment.csv"));
    CHECK(std::filesystem::exists(dir / "exp" / "pool.json"));
    CHECK(std::filesystem::exists(dir / "exp" / "manifest.json"));

    // Seed override must change the outputs.
    const uint64_t other_seed = 6;
    const std::string out_dir2 = (dir / "exp2").string();
    std::filesystem::remove_all(out_dir2);
    REQUIRE(ensdiv_experiment_run(config_path.c_str(), out_dir2.c_str(), &other_seed) ==
            ENSDIV_OK);
    std::ifstream a(dir / "exp" / "pool.json");
    std::ifstream b(dir / "exp2" / "pool.json");
    const std::string text_a((std::istreambuf_iterator<char>(a)),
                             std::istreambuf_iterator<char>());
    const std::string text_b((std::istreambuf_iterator<char>(b)),
                             std::istreambuf_iterator<char>());
    CHECK(text_a != text_b);

    CHECK(ensdiv_experiment_run((dir / "ghost.json").string().c_str(), out_dir.c_str(),
                                nullptr) == ENSDIV_ERR_IO);
    std::ofstream(dir / "torn.json") << "{";
    CHECK(ensdiv_experiment_run((dir / "torn.json").string().c_str(), out_dir.c_str(),
                                nullptr) == ENSDIV_ERR_DATA);
}

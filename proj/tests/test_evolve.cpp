#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "errors.hpp"
#include "evolve.hpp"

using namespace ensdiv;

namespace {

TrainedClassifier constant_classifier(double bias) {
    TrainedClassifier clf = init_classifier({Activation::Logistic, 7, 0.01}, 2, 0);
    std::fill(clf.weights_hidden.data.begin(), clf.weights_hidden.data.end(), 0.0);
    std::fill(clf.weights_output.data.begin(), clf.weights_output.data.end(), 0.0);
    clf.weights_output.at(0, 0) = bias;
    return clf;
}

LabeledSamples labeled(const std::vector<int>& labels) {
    LabeledSamples data;
    data.x = Matrix(labels.size(), 2, 0.5);
    data.y = labels;
    return data;
}

// Pool where member 0 always votes 1 and member 1 always votes 0; with six
// ones in ten labels, every size-3 ensemble scores either 0.6 or 0.4.
struct TwoLevelFixture {
    std::vector<TrainedClassifier> pool = {constant_classifier(3.0), constant_classifier(-3.0)};
    LabeledSamples data = labeled({1, 1, 1, 1, 1, 1, 0, 0, 0, 0});
};

GAConfig small_ga(std::uint64_t seed) {
    GAConfig ga;
    ga.population_size = 12;
    ga.generations = 8;
    ga.seed = seed;
    return ga;
}

}  // namespace

TEST_CASE("fitness peaks at the target and is symmetric around it") {
    CHECK(fitness(0.71, 0.75) == doctest::Approx(-0.0016).epsilon(1e-9));
    CHECK(fitness(0.75, 0.75) == 0.0);
    CHECK(fitness(0.0, 1.0) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(fitness(0.6, 0.7) == doctest::Approx(fitness(0.8, 0.7)).epsilon(1e-12));
    for (const double acc : {0.0, 0.3, 0.9, 1.0})
        CHECK(fitness(acc, 0.5) <= 0.0);
}

TEST_CASE("fitness rejects values outside the unit interval") {
    CHECK_THROWS_AS(fitness(-0.1, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(fitness(1.1, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(fitness(0.5, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(fitness(0.5, 1.1), std::invalid_argument);
    CHECK_THROWS_AS(fitness(std::nan(""), 0.5), std::invalid_argument);
}

TEST_CASE("search result serialization round-trips") {
    GAResult result;
    result.best_ensemble.member_indices = {4, 4, 9};
    result.best_fitness = -0.0025;
    result.achieved_accuracy = 0.65;
    result.fitness_history = {-0.09, -0.04, -0.0025};
    const GAResult back = ga_result_from_json(ga_result_to_json(result));
    CHECK(back.best_ensemble.member_indices == result.best_ensemble.member_indices);
    CHECK(back.best_fitness == result.best_fitness);
    CHECK(back.achieved_accuracy == result.achieved_accuracy);
    CHECK(back.fitness_history == result.fitness_history);

    CHECK_THROWS_AS(ga_result_from_json(nlohmann::json{{"best_fitness", 1.0}}), DataError);
}

TEST_CASE("evolve finds the attainable accuracy level closest to the target") {
    TwoLevelFixture fx;
    const GAResult run = evolve(fx.pool, fx.data, 0.55, small_ga(1), 3);
    CHECK(run.achieved_accuracy == 0.6);
    CHECK(run.best_fitness == doctest::Approx(fitness(0.6, 0.55)).epsilon(1e-12));
    REQUIRE(run.best_ensemble.member_indices.size() == 3);
    // Majority of the winning ensemble must be the always-one member.
    int zeros = 0;
    for (const int idx : run.best_ensemble.member_indices) zeros += idx == 1 ? 1 : 0;
    CHECK(zeros <= 1);

    const GAResult low = evolve(fx.pool, fx.data, 0.42, small_ga(2), 3);
    CHECK(low.achieved_accuracy == 0.4);
}

TEST_CASE("evolve is deterministic per seed") {
    TwoLevelFixture fx;
    const GAResult a = evolve(fx.pool, fx.data, 0.55, small_ga(7), 3);
    const GAResult b = evolve(fx.pool, fx.data, 0.55, small_ga(7), 3);
    CHECK(a.best_ensemble.member_indices == b.best_ensemble.member_indices);
    CHECK(a.fitness_history == b.fitness_history);
    CHECK(a.best_fitness == b.best_fitness);
    CHECK(a.achieved_accuracy == b.achieved_accuracy);
}

TEST_CASE("fitness history spans every generation and never regresses") {
    TwoLevelFixture fx;
    GAConfig ga = small_ga(3);
    ga.generations = 15;
    const GAResult run = evolve(fx.pool, fx.data, 0.47, ga, 5);
    REQUIRE(run.fitness_history.size() == 16);  // initial population plus each generation
    for (std::size_t i = 1; i < run.fitness_history.size(); ++i)
        CHECK(run.fitness_history[i] >= run.fitness_history[i - 1]);
    CHECK(run.fitness_history.back() == run.best_fitness);
}

TEST_CASE("the best fitness equals the fitness of the achieved accuracy") {
    TwoLevelFixture fx;
    for (const double target : {0.40, 0.52, 0.60, 0.75}) {
        const GAResult run = evolve(fx.pool, fx.data, target, small_ga(11), 3);
        CHECK(run.best_fitness == doctest::Approx(fitness(run.achieved_accuracy, target))
                                      .epsilon(1e-15));
    }
}

TEST_CASE("a custom fitness hook steers the search") {
    TwoLevelFixture fx;
    // Plain accuracy maximization instead of target matching.
    const GAResult run = evolve_with_fitness(fx.pool, fx.data, small_ga(5), 3,
                                             [](double acc) { return acc; });
    CHECK(run.achieved_accuracy == 0.6);
    CHECK(run.best_fitness == 0.6);
}

TEST_CASE("evolve matches exhaustive enumeration on a small pool") {
    // Five distinguishable constant members, labels 7/12 positive. All 125
    // ordered chromosomes are cheap to enumerate independently.
    std::vector<TrainedClassifier> pool;
    for (const double bias : {3.0, -3.0, 3.0, -3.0, 3.0}) pool.push_back(constant_classifier(bias));
    const LabeledSamples data = labeled({1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0});

    const double target = 0.55;
    double oracle_best = -1.0;
    std::vector<int> votes1(pool.size());
    for (std::size_t m = 0; m < pool.size(); ++m)
        votes1[m] = forward(pool[m], std::vector<double>{0.5, 0.5}) >= 0.5 ? 1 : 0;
    for (int a = 0; a < 5; ++a)
        for (int b = 0; b < 5; ++b)
            for (int c = 0; c < 5; ++c) {
                const int ones = votes1[a] + votes1[b] + votes1[c];
                const int prediction = 2 * ones > 3 ? 1 : 0;
                int correct = 0;
                for (const int label : data.y) correct += prediction == label ? 1 : 0;
                const double acc = static_cast<double>(correct) / 12.0;
                oracle_best = std::max(oracle_best, fitness(acc, target));
            }

    int matches = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const GAResult run = evolve(pool, data, target, small_ga(seed), 3);
        if (std::abs(run.best_fitness - oracle_best) < 1e-15) ++matches;
    }
    CHECK(matches == 10);
}

TEST_CASE("feasible targets report what the pool can reach") {
    TwoLevelFixture fx;
    GAConfig ga = small_ga(9);
    const std::vector<TargetProbe> probes =
        feasible_targets(fx.pool, fx.data, {0.40, 0.60, 0.99}, ga, 3);
    REQUIRE(probes.size() == 3);
    CHECK(probes[0].target == 0.40);
    CHECK(probes[0].achieved == 0.4);
    CHECK(probes[0].attainable);
    CHECK(probes[1].achieved == 0.6);
    CHECK(probes[1].attainable);
    CHECK(probes[2].achieved == 0.6);
    CHECK_FALSE(probes[2].attainable);
}

TEST_CASE("evolve validates its inputs") {
    TwoLevelFixture fx;
    const GAConfig ga = small_ga(1);
    CHECK_THROWS_AS(evolve({}, fx.data, 0.5, ga, 3), std::invalid_argument);
    CHECK_THROWS_AS(evolve(fx.pool, LabeledSamples{}, 0.5, ga, 3), std::invalid_argument);
    CHECK_THROWS_AS(evolve(fx.pool, fx.data, 0.5, ga, 4), std::invalid_argument);
    CHECK_THROWS_AS(evolve(fx.pool, fx.data, 0.5, ga, 0), std::invalid_argument);
    CHECK_THROWS_AS(evolve(fx.pool, fx.data, 0.5, ga, -3), std::invalid_argument);
    CHECK_THROWS_AS(evolve(fx.pool, fx.data, 1.5, ga, 3), std::invalid_argument);
    CHECK_THROWS_AS(evolve(fx.pool, fx.data, -0.5, ga, 3), std::invalid_argument);

    GAConfig bad = ga;
    bad.population_size = 1;
    CHECK_THROWS_AS(evolve(fx.pool, fx.data, 0.5, bad, 3), std::invalid_argument);
    bad = ga;
    bad.generations = 0;
    CHECK_THROWS_AS(evolve(fx.pool, fx.data, 0.5, bad, 3), std::invalid_argument);
    bad = ga;
    bad.crossover_rate = 1.5;
    CHECK_THROWS_AS(evolve(fx.pool, fx.data, 0.5, bad, 3), std::invalid_argument);
    bad = ga;
    bad.mutation_rate = -0.1;
    CHECK_THROWS_AS(evolve(fx.pool, fx.data, 0.5, bad, 3), std::invalid_argument);
    bad = ga;
    bad.tournament_size = 0;
    CHECK_THROWS_AS(evolve(fx.pool, fx.data, 0.5, bad, 3), std::invalid_argument);
    bad = ga;
    bad.elitism_count = bad.population_size;
    CHECK_THROWS_AS(evolve(fx.pool, fx.data, 0.5, bad, 3), std::invalid_argument);

    CHECK_THROWS_AS(feasible_targets(fx.pool, fx.data, {}, ga, 3), std::invalid_argument);
    CHECK_THROWS_AS(feasible_targets(fx.pool, fx.data, {0.5, 1.2}, ga, 3),
                    std::invalid_argument);
}

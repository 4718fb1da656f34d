#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "data.hpp"
#include "matrix.hpp"

namespace ensdiv {

enum class Activation { Linear, Logistic, Softmax };

const char* to_string(Activation activation);
Activation activation_from_string(const std::string& name);

inline constexpr int kMinHiddenNodes = 7;
inline constexpr int kMaxHiddenNodes = 21;
inline constexpr double kLearningRates[] = {0.01, 0.02, 0.03, 0.04, 0.05};

// The structural identity triple. Two classifiers with the same triple are
// the same species no matter what their weights ended up as.
struct ClassifierConfig {
    Activation activation = Activation::Logistic;
    int hidden_nodes = kMinHiddenNodes;
    double learning_rate = 0.01;

    bool operator==(const ClassifierConfig&) const = default;
};

bool is_valid(const ClassifierConfig& config);

// Canonical key, e.g. "logistic:9:0.03". Injective over the grid.
std::string species_key(const ClassifierConfig& config);

// All 225 distinct configurations: 3 activations x 15 hidden sizes x 5 rates.
std::vector<ClassifierConfig> config_grid();

struct TrainedClassifier {
    ClassifierConfig config;
    Matrix weights_hidden;  // hidden_nodes x (input_dim + 1); column 0 holds the bias
    Matrix weights_output;  // outputs x (hidden_nodes + 1); column 0 holds the bias
    int input_dim = 0;
    std::uint64_t seed = 0;
    int epochs_trained = 0;
    std::vector<double> loss_history;  // mean training loss per epoch; not serialized

    int outputs() const { return config.activation == Activation::Softmax ? 2 : 1; }
};

// Fresh network with weights drawn from N(0, 1/fan_in) per layer.
TrainedClassifier init_classifier(const ClassifierConfig& config, int input_dim,
                                  std::uint64_t seed);

// Class-1 probability for one feature vector. Hidden units are tanh; the
// head is the configured output activation (linear heads are clamped to
// [0, 1]).
double forward(const TrainedClassifier& clf, std::span<const double> x);

// Mini-batch gradient descent at the configured learning rate. Returns the
// updated classifier; the argument is taken by value and left alone.
TrainedClassifier train(TrainedClassifier clf, const LabeledSamples& data, int epochs,
                        int batch_size = 32);

// Loss of one sample under the classifier's training objective: squared
// error for linear heads, cross-entropy for logistic and softmax.
double sample_loss(const TrainedClassifier& clf, std::span<const double> x, int label);

// Max over all weights of |backprop - central difference| / max(1, |backprop|).
double gradient_check(const TrainedClassifier& clf, std::span<const double> x, int label);

// Fraction of samples where thresholding forward() at 0.5 matches the label.
double single_accuracy(const TrainedClassifier& clf, const LabeledSamples& data);

nlohmann::json classifier_to_json(const TrainedClassifier& clf);
TrainedClassifier classifier_from_json(const nlohmann::json& doc);

}  // namespace ensdiv

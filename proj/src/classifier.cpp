#include "classifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <stdexcept>

#include "errors.hpp"
#include "seeds.hpp"

namespace ensdiv {

const char* to_string(Activation activation) {
    switch (activation) {
        case Activation::Linear: return "linear";
        case Activation::Logistic: return "logistic";
        case Activation::Softmax: return "softmax";
    }
    return "?";
}

Activation activation_from_string(const std::string& name) {
    if (name == "linear") return Activation::Linear;
    if (name == "logistic") return Activation::Logistic;
    if (name == "softmax") return Activation::Softmax;
    throw std::invalid_argument("unknown activation: " + name);
}

bool is_valid(const ClassifierConfig& config) {
    if (config.hidden_nodes < kMinHiddenNodes || config.hidden_nodes > kMaxHiddenNodes)
        return false;
    for (const double rate : kLearningRates)
        if (std::abs(config.learning_rate - rate) < 1e-9) return true;
    return false;
}

std::string species_key(const ClassifierConfig& config) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s:%d:%.2f", to_string(config.activation),
                  config.hidden_nodes, config.learning_rate);
    return buf;
}

std::vector<ClassifierConfig> config_grid() {
    std::vector<ClassifierConfig> grid;
    grid.reserve(225);
    for (const Activation act : {Activation::Linear, Activation::Logistic, Activation::Softmax})
        for (int hidden = kMinHiddenNodes; hidden <= kMaxHiddenNodes; ++hidden)
            for (const double rate : kLearningRates)
                grid.push_back({act, hidden, rate});
    return grid;
}

TrainedClassifier init_classifier(const ClassifierConfig& config, int input_dim,
                                  std::uint64_t seed) {
    if (!is_valid(config)) throw std::invalid_argument("classifier config outside the grid");
    if (input_dim < 1) throw std::invalid_argument("input dimension must be positive");

    TrainedClassifier clf;
    clf.config = config;
    clf.input_dim = input_dim;
    clf.seed = seed;
    clf.weights_hidden = Matrix(static_cast<std::size_t>(config.hidden_nodes),
                                static_cast<std::size_t>(input_dim) + 1);
    clf.weights_output = Matrix(static_cast<std::size_t>(clf.outputs()),
                                static_cast<std::size_t>(config.hidden_nodes) + 1);

    std::mt19937_64 rng(seed);
    auto fill = [&rng](Matrix& w) {
        std::normal_distribution<double> dist(0.0, 1.0 / std::sqrt(static_cast<double>(w.cols)));
        for (double& v : w.data) v = dist(rng);
    };
    fill(clf.weights_hidden);
    fill(clf.weights_output);
    return clf;
}

namespace {

constexpr double kProbFloor = 1e-12;

struct Trace {
    std::vector<double> hidden;  // tanh activations
    std::vector<double> raw;     // pre-activation head values
};

Trace forward_trace(const TrainedClassifier& clf, std::span<const double> x) {
    if (x.size() != static_cast<std::size_t>(clf.input_dim))
        throw std::invalid_argument("feature vector length mismatch");
    Trace t;
    t.hidden.resize(clf.weights_hidden.rows);
    for (std::size_t j = 0; j < clf.weights_hidden.rows; ++j) {
        const double* w = clf.weights_hidden.row(j);
        double z = w[0];
        for (std::size_t i = 0; i < x.size(); ++i) z += w[i + 1] * x[i];
        t.hidden[j] = std::tanh(z);
    }
    t.raw.resize(clf.weights_output.rows);
    for (std::size_t k = 0; k < clf.weights_output.rows; ++k) {
        const double* w = clf.weights_output.row(k);
        double z = w[0];
        for (std::size_t j = 0; j < t.hidden.size(); ++j) z += w[j + 1] * t.hidden[j];
        t.raw[k] = z;
    }
    return t;
}

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Two-way softmax probabilities, stabilized by the usual max shift.
void softmax2(const std::vector<double>& raw, double out[2]) {
    const double m = std::max(raw[0], raw[1]);
    const double e0 = std::exp(raw[0] - m);
    const double e1 = std::exp(raw[1] - m);
    out[0] = e0 / (e0 + e1);
    out[1] = e1 / (e0 + e1);
}

double class1_from_trace(const TrainedClassifier& clf, const Trace& t) {
    switch (clf.config.activation) {
        case Activation::Linear: return std::clamp(t.raw[0], 0.0, 1.0);
        case Activation::Logistic: return logistic(t.raw[0]);
        case Activation::Softmax: {
            double p[2];
            softmax2(t.raw, p);
            return p[1];
        }
    }
    return 0.0;
}

double loss_from_trace(const TrainedClassifier& clf, const Trace& t, int label) {
    const double target = static_cast<double>(label);
    switch (clf.config.activation) {
        case Activation::Linear: {
            const double y = std::clamp(t.raw[0], 0.0, 1.0);
            return 0.5 * (y - target) * (y - target);
        }
        case Activation::Logistic: {
            const double y = std::clamp(logistic(t.raw[0]), kProbFloor, 1.0 - kProbFloor);
            return -(target * std::log(y) + (1.0 - target) * std::log(1.0 - y));
        }
        case Activation::Softmax: {
            double p[2];
            softmax2(t.raw, p);
            return -std::log(std::max(p[label], kProbFloor));
        }
    }
    return 0.0;
}

// Backprop for one sample; adds dL/dw into the accumulators and returns the
// sample loss so training can record it without a second forward pass.
double accumulate_gradients(const TrainedClassifier& clf, std::span<const double> x, int label,
                            Matrix& grad_hidden, Matrix& grad_output) {
    const Trace t = forward_trace(clf, x);
    const double target = static_cast<double>(label);

    // dL/draw for each head unit.
    std::vector<double> delta(t.raw.size(), 0.0);
    switch (clf.config.activation) {
        case Activation::Linear: {
            // The clamp gates the gradient: outside (0, 1) the head is flat.
            if (t.raw[0] > 0.0 && t.raw[0] < 1.0) delta[0] = t.raw[0] - target;
            break;
        }
        case Activation::Logistic:
            delta[0] = logistic(t.raw[0]) - target;
            break;
        case Activation::Softmax: {
            double p[2];
            softmax2(t.raw, p);
            delta[0] = p[0] - (1.0 - target);
            delta[1] = p[1] - target;
            break;
        }
    }

    for (std::size_t k = 0; k < delta.size(); ++k) {
        double* g = grad_output.row(k);
        g[0] += delta[k];
        for (std::size_t j = 0; j < t.hidden.size(); ++j) g[j + 1] += delta[k] * t.hidden[j];
    }
    for (std::size_t j = 0; j < t.hidden.size(); ++j) {
        double back = 0.0;
        for (std::size_t k = 0; k < delta.size(); ++k)
            back += delta[k] * clf.weights_output.at(k, j + 1);
        const double dh = back * (1.0 - t.hidden[j] * t.hidden[j]);
        double* g = grad_hidden.row(j);
        g[0] += dh;
        for (std::size_t i = 0; i < x.size(); ++i) g[i + 1] += dh * x[i];
    }
    return loss_from_trace(clf, t, label);
}

void check_samples(const TrainedClassifier& clf, const LabeledSamples& data) {
    if (data.size() == 0) throw std::invalid_argument("empty training split");
    if (data.x.cols != static_cast<std::size_t>(clf.input_dim))
        throw std::invalid_argument("feature vector length mismatch");
    for (const int label : data.y)
        if (label != 0 && label != 1) throw std::invalid_argument("labels must be 0 or 1");
}

}  // namespace

double forward(const TrainedClassifier& clf, std::span<const double> x) {
    return class1_from_trace(clf, forward_trace(clf, x));
}

double sample_loss(const TrainedClassifier& clf, std::span<const double> x, int label) {
    if (label != 0 && label != 1) throw std::invalid_argument("labels must be 0 or 1");
    return loss_from_trace(clf, forward_trace(clf, x), label);
}

TrainedClassifier train(TrainedClassifier clf, const LabeledSamples& data, int epochs,
                        int batch_size) {
    if (epochs < 1) throw std::invalid_argument("epochs must be positive");
    if (batch_size < 1) throw std::invalid_argument("batch size must be positive");
    check_samples(clf, data);

    const std::size_t n = data.size();
    std::mt19937_64 rng(mix_seed(clf.seed, 1));  // stream 1 of the classifier seed: batch order
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    Matrix grad_hidden(clf.weights_hidden.rows, clf.weights_hidden.cols);
    Matrix grad_output(clf.weights_output.rows, clf.weights_output.cols);

    for (int epoch = 0; epoch < epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(batch_size)) {
            const std::size_t stop = std::min(n, start + static_cast<std::size_t>(batch_size));
            std::fill(grad_hidden.data.begin(), grad_hidden.data.end(), 0.0);
            std::fill(grad_output.data.begin(), grad_output.data.end(), 0.0);
            for (std::size_t s = start; s < stop; ++s) {
                const std::size_t r = order[s];
                epoch_loss += accumulate_gradients(
                    clf, std::span<const double>(data.x.row(r), data.x.cols), data.y[r],
                    grad_hidden, grad_output);
            }
            const double scale = clf.config.learning_rate / static_cast<double>(stop - start);
            for (std::size_t i = 0; i < grad_hidden.data.size(); ++i)
                clf.weights_hidden.data[i] -= scale * grad_hidden.data[i];
            for (std::size_t i = 0; i < grad_output.data.size(); ++i)
                clf.weights_output.data[i] -= scale * grad_output.data[i];
        }
        clf.loss_history.push_back(epoch_loss / static_cast<double>(n));
    }
    clf.epochs_trained += epochs;
    return clf;
}

double gradient_check(const TrainedClassifier& clf, std::span<const double> x, int label) {
    if (label != 0 && label != 1) throw std::invalid_argument("labels must be 0 or 1");

    Matrix grad_hidden(clf.weights_hidden.rows, clf.weights_hidden.cols);
    Matrix grad_output(clf.weights_output.rows, clf.weights_output.cols);
    accumulate_gradients(clf, x, label, grad_hidden, grad_output);

    constexpr double h = 1e-5;
    double worst = 0.0;
    TrainedClassifier probe = clf;
    auto sweep = [&](Matrix TrainedClassifier::* weights, const Matrix& analytic) {
        Matrix& w = probe.*weights;
        for (std::size_t i = 0; i < w.data.size(); ++i) {
            const double saved = w.data[i];
            w.data[i] = saved + h;
            const double up = sample_loss(probe, x, label);
            w.data[i] = saved - h;
            const double down = sample_loss(probe, x, label);
            w.data[i] = saved;
            const double numeric = (up - down) / (2.0 * h);
            const double gap = std::abs(analytic.data[i] - numeric) /
                               std::max(1.0, std::abs(analytic.data[i]));
            worst = std::max(worst, gap);
        }
    };
    sweep(&TrainedClassifier::weights_hidden, grad_hidden);
    sweep(&TrainedClassifier::weights_output, grad_output);
    return worst;
}

double single_accuracy(const TrainedClassifier& clf, const LabeledSamples& data) {
    check_samples(clf, data);
    int correct = 0;
    for (std::size_t r = 0; r < data.size(); ++r) {
        const double y = forward(clf, std::span<const double>(data.x.row(r), data.x.cols));
        const int predicted = y >= 0.5 ? 1 : 0;
        if (predicted == data.y[r]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

namespace {

nlohmann::json matrix_to_json(const Matrix& m) {
    return {{"rows", m.rows}, {"cols", m.cols}, {"data", m.data}};
}

Matrix matrix_from_json(const nlohmann::json& doc) {
    Matrix m(doc.at("rows").get<std::size_t>(), doc.at("cols").get<std::size_t>());
    const auto& data = doc.at("data");
    if (data.size() != m.data.size()) throw DataError("weight matrix shape mismatch");
    for (std::size_t i = 0; i < m.data.size(); ++i) {
        m.data[i] = data[i].get<double>();
        if (!std::isfinite(m.data[i])) throw DataError("non-finite weight");
    }
    return m;
}

}  // namespace

nlohmann::json classifier_to_json(const TrainedClassifier& clf) {
    return {{"activation", to_string(clf.config.activation)},
            {"hidden_nodes", clf.config.hidden_nodes},
            {"learning_rate", clf.config.learning_rate},
            {"input_dim", clf.input_dim},
            {"seed", clf.seed},
            {"epochs_trained", clf.epochs_trained},
            {"weights_hidden", matrix_to_json(clf.weights_hidden)},
            {"weights_output", matrix_to_json(clf.weights_output)}};
}

TrainedClassifier classifier_from_json(const nlohmann::json& doc) {
    TrainedClassifier clf;
    try {
        clf.config.activation = activation_from_string(doc.at("activation").get<std::string>());
        clf.config.hidden_nodes = doc.at("hidden_nodes").get<int>();
        clf.config.learning_rate = doc.at("learning_rate").get<double>();
        clf.input_dim = doc.at("input_dim").get<int>();
        clf.seed = doc.at("seed").get<std::uint64_t>();
        clf.epochs_trained = doc.at("epochs_trained").get<int>();
        clf.weights_hidden = matrix_from_json(doc.at("weights_hidden"));
        clf.weights_output = matrix_from_json(doc.at("weights_output"));
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed classifier document: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string("malformed classifier document: ") + e.what());
    }
    if (!is_valid(clf.config)) throw DataError("classifier config outside the grid");
    if (clf.input_dim < 1) throw DataError("classifier input dimension must be positive");
    const std::size_t hidden = static_cast<std::size_t>(clf.config.hidden_nodes);
    if (clf.weights_hidden.rows != hidden ||
        clf.weights_hidden.cols != static_cast<std::size_t>(clf.input_dim) + 1 ||
        clf.weights_output.rows != static_cast<std::size_t>(clf.outputs()) ||
        clf.weights_output.cols != hidden + 1)
        throw DataError("weight matrix shape mismatch");
    return clf;
}

}  // namespace ensdiv

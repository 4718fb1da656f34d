#include "ensemble.hpp"

#include <stdexcept>

namespace ensdiv {

void validate_ensemble(const Ensemble& ensemble, std::size_t pool_size) {
    if (ensemble.member_indices.empty()) throw std::invalid_argument("empty ensemble");
    if (ensemble.member_indices.size() % 2 == 0)
        throw std::invalid_argument("ensemble size must be odd");
    for (const int idx : ensemble.member_indices)
        if (idx < 0 || static_cast<std::size_t>(idx) >= pool_size)
            throw std::out_of_range("member index out of pool bounds");
}

namespace {

int vote_unchecked(const std::vector<TrainedClassifier>& pool, const Ensemble& ensemble,
                   std::span<const double> x) {
    int ones = 0;
    for (const int idx : ensemble.member_indices)
        if (forward(pool[static_cast<std::size_t>(idx)], x) >= 0.5) ++ones;
    return 2 * ones > ensemble.size() ? 1 : 0;
}

}  // namespace

int vote(const std::vector<TrainedClassifier>& pool, const Ensemble& ensemble,
         std::span<const double> x) {
    validate_ensemble(ensemble, pool.size());
    return vote_unchecked(pool, ensemble, x);
}

double accuracy(const std::vector<TrainedClassifier>& pool, const Ensemble& ensemble,
                const LabeledSamples& data) {
    validate_ensemble(ensemble, pool.size());
    if (data.size() == 0) throw std::invalid_argument("empty evaluation split");
    int correct = 0;
    for (std::size_t r = 0; r < data.size(); ++r) {
        const std::span<const double> x(data.x.row(r), data.x.cols);
        if (vote_unchecked(pool, ensemble, x) == data.y[r]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

}  // namespace ensdiv

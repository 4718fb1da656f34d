#pragma once

#include <span>
#include <vector>

#include "classifier.hpp"
#include "data.hpp"

namespace ensdiv {

// An ensemble is a bag of pool indices. Repeats are allowed; the size must
// be odd so majority votes cannot tie.
struct Ensemble {
    std::vector<int> member_indices;

    int size() const { return static_cast<int>(member_indices.size()); }
};

// Throws unless the ensemble is non-empty, odd-sized, and every index is
// within [0, pool_size).
void validate_ensemble(const Ensemble& ensemble, std::size_t pool_size);

// Majority vote over the members' thresholded outputs. A member output of
// exactly 0.5 counts as a vote for class 1.
int vote(const std::vector<TrainedClassifier>& pool, const Ensemble& ensemble,
         std::span<const double> x);

// Fraction of rows whose majority vote matches the label.
double accuracy(const std::vector<TrainedClassifier>& pool, const Ensemble& ensemble,
                const LabeledSamples& data);

}  // namespace ensdiv

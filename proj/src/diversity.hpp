#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "classifier.hpp"

namespace ensdiv {

// Species abundances within one ensemble. Keys are canonical species keys;
// the map keeps them sorted so every derived quantity sums in a fixed order.
struct SpeciesDistribution {
    std::map<std::string, int> counts;
    int total = 0;

    int richness() const { return static_cast<int>(counts.size()); }
    std::vector<double> proportions() const;  // key order, sums to 1
};

SpeciesDistribution species_distribution(const std::vector<ClassifierConfig>& members);
SpeciesDistribution species_distribution(const std::vector<std::string>& keys);

// Anonymous distribution from raw abundance counts (each >= 1).
SpeciesDistribution distribution_from_counts(const std::vector<int>& counts);

// Order-alpha Renyi entropy, natural log. alpha >= 0; the alpha = 1 pole
// dispatches to the analytic Shannon limit.
double renyi_entropy(const SpeciesDistribution& dist, double alpha);

// Shannon entropy normalized by log(total members); 0 for a single member.
double shannon_index(const SpeciesDistribution& dist);

// 1 - sum(p_i^2): probability two random members differ in species.
double simpson_index(const SpeciesDistribution& dist);

// (1 / p_max) / total: inverse dominance per member, in [1/total, 1].
double berger_parker_index(const SpeciesDistribution& dist);

// Surprise -log(p) of one outcome probability.
double uncertainty(double p);

struct DiversityReport {
    double shannon_norm = 0.0;
    double simpson_norm = 0.0;
    double berger_parker_norm = 0.0;
    int species_richness = 0;
    std::vector<std::pair<double, double>> renyi_profile;  // (alpha, H_alpha)
};

DiversityReport diversity_report(const SpeciesDistribution& dist,
                                 const std::vector<double>& alphas);
DiversityReport diversity_report(const std::vector<ClassifierConfig>& members,
                                 const std::vector<double>& alphas);

}  // namespace ensdiv

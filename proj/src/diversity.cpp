#include "diversity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ensdiv {

std::vector<double> SpeciesDistribution::proportions() const {
    std::vector<double> p;
    p.reserve(counts.size());
    for (const auto& [key, count] : counts)
        p.push_back(static_cast<double>(count) / static_cast<double>(total));
    return p;
}

SpeciesDistribution species_distribution(const std::vector<ClassifierConfig>& members) {
    if (members.empty()) throw std::invalid_argument("empty ensemble");
    SpeciesDistribution dist;
    for (const auto& member : members) ++dist.counts[species_key(member)];
    dist.total = static_cast<int>(members.size());
    return dist;
}

SpeciesDistribution species_distribution(const std::vector<std::string>& keys) {
    if (keys.empty()) throw std::invalid_argument("empty ensemble");
    SpeciesDistribution dist;
    for (const auto& key : keys) ++dist.counts[key];
    dist.total = static_cast<int>(keys.size());
    return dist;
}

SpeciesDistribution distribution_from_counts(const std::vector<int>& counts) {
    if (counts.empty()) throw std::invalid_argument("empty ensemble");
    SpeciesDistribution dist;
    int total = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] < 1) throw std::invalid_argument("species count must be positive");
        dist.counts["s" + std::to_string(i)] = counts[i];
        total += counts[i];
    }
    dist.total = total;
    return dist;
}

namespace {

double shannon_unnormalized(const SpeciesDistribution& dist) {
    double h = 0.0;
    for (const double p : dist.proportions()) h -= p * std::log(p);
    return h;
}

}  // namespace

double renyi_entropy(const SpeciesDistribution& dist, double alpha) {
    if (!(alpha >= 0.0)) throw std::invalid_argument("alpha out of range");
    if (std::abs(alpha - 1.0) < 1e-9) return shannon_unnormalized(dist);
    const std::vector<double> props = dist.proportions();
    // Sum p^alpha in the log domain: for large alpha the raw sum underflows
    // to zero long before the entropy itself degenerates.
    const double log_pmax = std::log(*std::max_element(props.begin(), props.end()));
    double scaled = 0.0;
    for (const double p : props) scaled += std::exp(alpha * (std::log(p) - log_pmax));
    return (alpha * log_pmax + std::log(scaled)) / (1.0 - alpha);
}

double shannon_index(const SpeciesDistribution& dist) {
    if (dist.total == 1) return 0.0;
    return shannon_unnormalized(dist) / std::log(static_cast<double>(dist.total));
}

double simpson_index(const SpeciesDistribution& dist) {
    double sum = 0.0;
    for (const double p : dist.proportions()) sum += p * p;
    return 1.0 - sum;
}

double berger_parker_index(const SpeciesDistribution& dist) {
    double p_max = 0.0;
    for (const double p : dist.proportions()) p_max = std::max(p_max, p);
    return (1.0 / p_max) / static_cast<double>(dist.total);
}

double uncertainty(double p) {
    if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("probability out of range");
    return -std::log(p);
}

DiversityReport diversity_report(const SpeciesDistribution& dist,
                                 const std::vector<double>& alphas) {
    DiversityReport report;
    report.shannon_norm = shannon_index(dist);
    report.simpson_norm = simpson_index(dist);
    report.berger_parker_norm = berger_parker_index(dist);
    report.species_richness = dist.richness();
    report.renyi_profile.reserve(alphas.size());
    for (const double a : alphas) report.renyi_profile.emplace_back(a, renyi_entropy(dist, a));
    return report;
}

DiversityReport diversity_report(const std::vector<ClassifierConfig>& members,
                                 const std::vector<double>& alphas) {
    return diversity_report(species_distribution(members), alphas);
}

}  // namespace ensdiv

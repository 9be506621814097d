#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace wxmood {

struct Correlation {
    double r = 0.0;
    double p = 1.0; // two-tailed
    std::size_t n = 0;
};

/// Product-moment correlation with a two-tailed p from Student's t on n - 2
/// degrees of freedom. nullopt for unequal lengths, n < 3 or zero variance.
std::optional<Correlation> pearson_r_p(std::span<const double> x, std::span<const double> y);

/// Two-tailed p for a correlation r over n points (|r| = 1 gives 0).
double correlation_p_value(double r, std::size_t n);

/// Ranks starting at 1; ties get their average rank.
std::vector<double> average_ranks(std::span<const double> values);

/// Pearson correlation of the average ranks.
std::optional<Correlation> spearman(std::span<const double> x, std::span<const double> y);

struct MeanSd {
    double mean = 0.0;
    double sd = 0.0; // population
};

MeanSd mean_sd(std::span<const double> values);

} // namespace wxmood

#include "wxmood/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/beta.hpp>

namespace wxmood {

double correlation_p_value(double r, std::size_t n) {
    const double r2 = r * r;
    if (r2 >= 1.0)
        return 0.0;
    const double df = static_cast<double>(n) - 2.0;
    // P(|T| > t) with t^2 = df r^2 / (1 - r^2) is I_{1-r^2}(df/2, 1/2).
    return boost::math::ibeta(df / 2.0, 0.5, 1.0 - r2);
}

std::optional<Correlation> pearson_r_p(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 3)
        return std::nullopt;
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (!(sxx > 0.0) || !(syy > 0.0))
        return std::nullopt;
    const double r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    return Correlation{r, correlation_p_value(r, n), n};
}

std::vector<double> average_ranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && values[order[j]] == values[order[i]])
            ++j;
        const double avg = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k)
            ranks[order[k]] = avg;
        i = j;
    }
    return ranks;
}

std::optional<Correlation> spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        return std::nullopt;
    const auto rx = average_ranks(x), ry = average_ranks(y);
    return pearson_r_p(rx, ry);
}

MeanSd mean_sd(std::span<const double> values) {
    if (values.empty())
        return {};
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values)
        ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / n)};
}

} // namespace wxmood

#include "cupid/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cupid {

std::vector<double> rank_normalize(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n == 0) {
        return {};
    }
    if (n == 1) {
        return {0.5};
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> out(n, 0.0);
    const double denom = static_cast<double>(n - 1);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) {
            ++j;
        }
        // average grid position across the tie block
        const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) / denom;
        for (std::size_t k = i; k <= j; ++k) {
            out[order[k]] = avg;
        }
        i = j + 1;
    }
    return out;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw DimensionError("pearson: size mismatch");
    }
    const std::size_t n = x.size();
    if (n < 2) {
        throw ConfigError("pearson: need at least 2 points");
    }
    const double mx = mean(x);
    const double my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw NumericError("correlation undefined: zero-variance input");
    }
    return sxy / std::sqrt(sxx * syy);
}

double spearman(std::span<const double> x, std::span<const double> y) {
    const auto rx = rank_normalize(x);
    const auto ry = rank_normalize(y);
    return pearson(rx, ry);
}

double mean(std::span<const double> x) {
    if (x.empty()) {
        throw ConfigError("mean of empty span");
    }
    double s = 0.0;
    for (double v : x) {
        s += v;
    }
    return s / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
    if (x.size() < 2) {
        throw ConfigError("variance: need at least 2 points");
    }
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) {
        s += (v - m) * (v - m);
    }
    return s / static_cast<double>(x.size() - 1);
}

double linear_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw ConfigError("linear_slope: need matched inputs with >= 2 points");
    }
    const double mx = mean(x);
    const double my = mean(y);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (sxx == 0.0) {
        throw NumericError("linear_slope: degenerate x values");
    }
    return sxy / sxx;
}

}  // namespace cupid

#pragma once

#include <span>
#include <vector>

#include "cupid/errors.hpp"

namespace cupid {

// Ranks mapped onto a uniform grid in [0,1]: lowest -> 0, highest -> 1,
// ties averaged. A single element (or an all-equal column) maps to 0.5.
std::vector<double> rank_normalize(std::span<const double> values);

double pearson(std::span<const double> x, std::span<const double> y);
double spearman(std::span<const double> x, std::span<const double> y);

double mean(std::span<const double> x);
double variance(std::span<const double> x);  // unbiased

// Least-squares slope of y over x.
double linear_slope(std::span<const double> x, std::span<const double> y);

}  // namespace cupid

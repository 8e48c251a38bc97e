#pragma once

#include <span>
#include <vector>

#include "cupid/errors.hpp"

namespace cupid {

// Cholesky factor of a symmetric positive-definite matrix, kept for repeated
// solves. Hand-rolled so results are bit-identical regardless of thread
// count or build flags.
class CholeskyFactor {
public:
    CholeskyFactor() = default;

    // a: n*n row-major symmetric. Throws NumericError on a non-positive pivot.
    static CholeskyFactor factor(std::span<const double> a, int n);

    // Solves (L L^T) x = b in place.
    void solve_in_place(std::span<double> b) const;
    std::vector<double> solve(std::span<const double> b) const;

    int dim() const { return n_; }
    bool valid() const { return n_ > 0; }

private:
    int n_ = 0;
    std::vector<double> l_;  // lower triangular, row-major n*n
};

// y = A x for row-major A (rows x cols).
std::vector<double> matvec(std::span<const double> a, int rows, int cols,
                           std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);

}  // namespace cupid

#include "cupid/linalg.hpp"

#include <cmath>
#include <string>

namespace cupid {

CholeskyFactor CholeskyFactor::factor(std::span<const double> a, int n) {
    if (static_cast<std::size_t>(n) * static_cast<std::size_t>(n) != a.size()) {
        throw DimensionError("cholesky: matrix size mismatch");
    }
    CholeskyFactor f;
    f.n_ = n;
    f.l_.assign(a.begin(), a.end());
    auto& l = f.l_;
    for (int j = 0; j < n; ++j) {
        double d = l[static_cast<std::size_t>(j) * n + j];
        for (int k = 0; k < j; ++k) {
            const double v = l[static_cast<std::size_t>(j) * n + k];
            d -= v * v;
        }
        if (!(d > 0.0) || !std::isfinite(d)) {
            throw NumericError("cholesky: non-positive pivot at column " + std::to_string(j) +
                               "; matrix is not positive definite (increase damping)");
        }
        const double dj = std::sqrt(d);
        l[static_cast<std::size_t>(j) * n + j] = dj;
        for (int i = j + 1; i < n; ++i) {
            double s = l[static_cast<std::size_t>(i) * n + j];
            for (int k = 0; k < j; ++k) {
                s -= l[static_cast<std::size_t>(i) * n + k] * l[static_cast<std::size_t>(j) * n + k];
            }
            l[static_cast<std::size_t>(i) * n + j] = s / dj;
        }
        for (int k = j + 1; k < n; ++k) {
            l[static_cast<std::size_t>(j) * n + k] = 0.0;
        }
    }
    return f;
}

void CholeskyFactor::solve_in_place(std::span<double> b) const {
    if (static_cast<int>(b.size()) != n_) {
        throw DimensionError("cholesky solve: rhs size mismatch");
    }
    // forward: L y = b
    for (int i = 0; i < n_; ++i) {
        double s = b[static_cast<std::size_t>(i)];
        const double* row = l_.data() + static_cast<std::size_t>(i) * n_;
        for (int k = 0; k < i; ++k) {
            s -= row[k] * b[static_cast<std::size_t>(k)];
        }
        b[static_cast<std::size_t>(i)] = s / row[i];
    }
    // backward: L^T x = y
    for (int i = n_ - 1; i >= 0; --i) {
        double s = b[static_cast<std::size_t>(i)];
        for (int k = i + 1; k < n_; ++k) {
            s -= l_[static_cast<std::size_t>(k) * n_ + i] * b[static_cast<std::size_t>(k)];
        }
        b[static_cast<std::size_t>(i)] = s / l_[static_cast<std::size_t>(i) * n_ + i];
    }
}

std::vector<double> CholeskyFactor::solve(std::span<const double> b) const {
    std::vector<double> x(b.begin(), b.end());
    solve_in_place(x);
    return x;
}

std::vector<double> matvec(std::span<const double> a, int rows, int cols,
                           std::span<const double> x) {
    if (a.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) ||
        static_cast<int>(x.size()) != cols) {
        throw DimensionError("matvec: size mismatch");
    }
    std::vector<double> y(static_cast<std::size_t>(rows));
    for (int r = 0; r < rows; ++r) {
        const double* row = a.data() + static_cast<std::size_t>(r) * cols;
        double acc = 0.0;
        for (int c = 0; c < cols; ++c) {
            acc += row[c] * x[static_cast<std::size_t>(c)];
        }
        y[static_cast<std::size_t>(r)] = acc;
    }
    return y;
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw DimensionError("dot: size mismatch");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += a[i] * b[i];
    }
    return acc;
}

}  // namespace cupid

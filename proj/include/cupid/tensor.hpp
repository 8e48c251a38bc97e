#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "cupid/errors.hpp"

namespace cupid {

inline std::size_t shape_numel(const std::vector<int>& shape) {
    std::size_t n = 1;
    for (int d : shape) {
        if (d < 0) {
            throw DimensionError("negative dimension in shape");
        }
        n *= static_cast<std::size_t>(d);
    }
    return n;
}

// Dense row-major tensor of 64-bit floats.
struct Tensor {
    std::vector<int> shape;
    std::vector<double> data;

    Tensor() = default;
    Tensor(std::vector<int> s, std::vector<double> d) : shape(std::move(s)), data(std::move(d)) {
        if (data.size() != shape_numel(shape)) {
            throw DimensionError("tensor data length does not match shape");
        }
    }

    static Tensor zeros(std::vector<int> s) {
        const std::size_t n = shape_numel(s);
        return Tensor(std::move(s), std::vector<double>(n, 0.0));
    }

    static Tensor vec(std::vector<double> d) {
        const int n = static_cast<int>(d.size());
        return Tensor({n}, std::move(d));
    }

    std::size_t numel() const { return data.size(); }

    bool all_finite() const {
        for (double v : data) {
            if (!std::isfinite(v)) {
                return false;
            }
        }
        return true;
    }
};

}  // namespace cupid

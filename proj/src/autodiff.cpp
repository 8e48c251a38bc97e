#include "cupid/autodiff.hpp"

#include <cmath>

namespace cupid {

std::vector<ad::Graph::NodeId> param_leaves(ad::Graph& g, const ParameterVector& params) {
    params.validate();
    std::vector<ad::Graph::NodeId> ids;
    ids.reserve(params.layout.entries().size());
    for (const auto& e : params.layout.entries()) {
        std::vector<double> v(params.values.begin() + static_cast<std::ptrdiff_t>(e.offset),
                              params.values.begin() + static_cast<std::ptrdiff_t>(e.offset + e.count));
        ids.push_back(g.leaf(e.shape, std::move(v), /*needs_grad=*/true));
    }
    return ids;
}

double eval_loss(const ParameterVector& params, const LossBuilder& build) {
    ad::Graph g;
    const auto leaves = param_leaves(g, params);
    const auto loss = build(g, leaves);
    return g.scalar_value(loss);
}

GradientVector per_sample_gradient(const ParameterVector& params, const LossBuilder& build) {
    ad::Graph g;
    const auto leaves = param_leaves(g, params);
    const auto loss = build(g, leaves);
    g.backward(loss);

    GradientVector out;
    out.values.resize(params.size());
    const auto& entries = params.layout.entries();
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto grad = g.grad(leaves[i]);
        std::copy(grad.begin(), grad.end(),
                  out.values.begin() + static_cast<std::ptrdiff_t>(entries[i].offset));
    }
    if (!out.all_finite()) {
        throw NumericError("non-finite per-sample gradient");
    }
    return out;
}

GradientVector finite_diff_gradient(const ParameterVector& params,
                                    const std::function<double(const ParameterVector&)>& loss,
                                    double step) {
    if (!(step > 0.0)) {
        throw ConfigError("finite_diff_gradient requires step > 0");
    }
    ParameterVector work = params;
    GradientVector out;
    out.values.resize(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double orig = work.values[i];
        work.values[i] = orig + step;
        const double up = loss(work);
        work.values[i] = orig - step;
        const double down = loss(work);
        work.values[i] = orig;
        out.values[i] = (up - down) / (2.0 * step);
    }
    return out;
}

}  // namespace cupid

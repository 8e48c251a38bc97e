#include "cupid/mlp.hpp"

#include <cmath>

namespace cupid {

void append_mlp_layout(ParamLayout& layout, const MlpArch& arch) {
    const auto widths = arch.layer_widths();
    for (int l = 0; l < arch.layer_count(); ++l) {
        const int in = widths[static_cast<std::size_t>(l)];
        const int out = widths[static_cast<std::size_t>(l) + 1];
        layout.add("W" + std::to_string(l), {out, in});
        layout.add("b" + std::to_string(l), {out});
    }
}

void init_mlp_params(ParameterVector& params, const MlpArch& arch, Rng& rng) {
    const auto widths = arch.layer_widths();
    for (int l = 0; l < arch.layer_count(); ++l) {
        const int in = widths[static_cast<std::size_t>(l)];
        auto w = params.view("W" + std::to_string(l));
        const double std = 1.0 / std::sqrt(static_cast<double>(in));
        for (auto& v : w) {
            v = std * rng.normal();
        }
        auto b = params.view("b" + std::to_string(l));
        for (auto& v : b) {
            v = 0.0;
        }
    }
}

std::vector<double> mlp_eval(const ParameterVector& params, const MlpArch& arch,
                             std::span<const double> input) {
    if (static_cast<int>(input.size()) != arch.input_dim) {
        throw DimensionError("mlp input width does not match arch");
    }
    std::vector<double> cur(input.begin(), input.end());
    const auto widths = arch.layer_widths();
    for (int l = 0; l < arch.layer_count(); ++l) {
        const int in = widths[static_cast<std::size_t>(l)];
        const int out = widths[static_cast<std::size_t>(l) + 1];
        const auto w = params.view("W" + std::to_string(l));
        const auto b = params.view("b" + std::to_string(l));
        std::vector<double> next(static_cast<std::size_t>(out));
        for (int o = 0; o < out; ++o) {
            double acc = b[static_cast<std::size_t>(o)];
            const double* row = w.data() + static_cast<std::size_t>(o) * in;
            for (int i = 0; i < in; ++i) {
                acc += row[i] * cur[static_cast<std::size_t>(i)];
            }
            next[static_cast<std::size_t>(o)] = acc;
        }
        if (l + 1 < arch.layer_count()) {
            for (auto& v : next) {
                v = arch.activation == Activation::tanh ? std::tanh(v) : (v > 0.0 ? v : 0.0);
            }
        }
        cur = std::move(next);
    }
    return cur;
}

Tensor mlp_forward(const ParameterVector& params, const MlpArch& arch, const Tensor& input) {
    auto out = mlp_eval(params, arch, std::span<const double>(input.data));
    return Tensor::vec(std::move(out));
}

ad::Graph::NodeId mlp_apply(ad::Graph& g, const MlpArch& arch,
                            std::span<const ad::Graph::NodeId> param_nodes,
                            ad::Graph::NodeId x) {
    if (param_nodes.size() < static_cast<std::size_t>(2 * arch.layer_count())) {
        throw DimensionError("mlp_apply: not enough parameter nodes");
    }
    ad::Graph::NodeId cur = x;
    for (int l = 0; l < arch.layer_count(); ++l) {
        const auto w = param_nodes[static_cast<std::size_t>(2 * l)];
        const auto b = param_nodes[static_cast<std::size_t>(2 * l) + 1];
        cur = g.affine(w, b, cur);
        if (l + 1 < arch.layer_count()) {
            cur = arch.activation == Activation::tanh ? g.tanh(cur) : g.relu(cur);
        }
    }
    return cur;
}

}  // namespace cupid

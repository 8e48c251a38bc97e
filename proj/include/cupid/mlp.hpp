#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cupid/graph.hpp"
#include "cupid/param.hpp"
#include "cupid/rng.hpp"
#include "cupid/tensor.hpp"

namespace cupid {

enum class Activation : std::uint8_t { tanh, relu };

// Feed-forward network description. Layers are affine with the chosen
// activation between them; the output layer is linear.
struct MlpArch {
    int input_dim = 0;
    std::vector<int> hidden;
    int output_dim = 0;
    Activation activation = Activation::tanh;

    std::vector<int> layer_widths() const {
        std::vector<int> w;
        w.push_back(input_dim);
        for (int h : hidden) {
            w.push_back(h);
        }
        w.push_back(output_dim);
        return w;
    }

    int layer_count() const { return static_cast<int>(hidden.size()) + 1; }

    bool operator==(const MlpArch&) const = default;
};

// Appends W0,b0,W1,b1,... entries in declaration order.
void append_mlp_layout(ParamLayout& layout, const MlpArch& arch);

// W ~ N(0, 1/fan_in), b = 0; seeded and deterministic.
void init_mlp_params(ParameterVector& params, const MlpArch& arch, Rng& rng);

// Plain forward pass, no tape. Used on hot inference paths (rollouts,
// denoising); the tape-based path below must agree bit-for-bit.
std::vector<double> mlp_eval(const ParameterVector& params, const MlpArch& arch,
                             std::span<const double> input);

// Spec-level entry point over Tensors.
Tensor mlp_forward(const ParameterVector& params, const MlpArch& arch, const Tensor& input);

// Tape forward: param_nodes holds one graph leaf per layout entry in layout
// order (W0,b0,...); x is the input node.
ad::Graph::NodeId mlp_apply(ad::Graph& g, const MlpArch& arch,
                            std::span<const ad::Graph::NodeId> param_nodes,
                            ad::Graph::NodeId x);

}  // namespace cupid

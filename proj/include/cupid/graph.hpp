#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cupid/errors.hpp"
#include "cupid/tensor.hpp"

namespace cupid::ad {

enum class Op : std::uint8_t {
    leaf,
    affine,        // W [out,in], b [out], x [in] -> [out]
    tanh_act,
    relu_act,
    softmax_act,
    gaussian_nll,  // mean [k], log_std [k], target [k] -> scalar
    squared_norm,  // [k] -> scalar
    sub,
    add,
    add_n,
    scale,
    concat,
};

// Reverse-mode tape over dense vectors. Nodes are appended in evaluation
// order, so walking the tape backwards is a valid topological order.
class Graph {
public:
    using NodeId = int;

    NodeId leaf(std::vector<int> shape, std::vector<double> value, bool needs_grad = false);
    NodeId scalar_leaf(double value, bool needs_grad = false);

    NodeId affine(NodeId w, NodeId b, NodeId x);
    NodeId tanh(NodeId x);
    NodeId relu(NodeId x);
    NodeId softmax(NodeId x);
    NodeId gaussian_nll(NodeId mean, NodeId log_std, NodeId target);
    NodeId squared_norm(NodeId x);
    NodeId sub(NodeId a, NodeId b);
    NodeId add(NodeId a, NodeId b);
    NodeId add_n(const std::vector<NodeId>& xs);
    NodeId scale(NodeId x, double c);
    NodeId concat(const std::vector<NodeId>& xs);

    const std::vector<int>& shape(NodeId id) const { return nodes_[checked(id)].shape; }
    std::span<const double> value(NodeId id) const;
    double scalar_value(NodeId id) const;
    std::span<const double> grad(NodeId id) const;

    // Seeds d(loss)/d(loss) = 1 at a scalar node and runs the tape backwards.
    void backward(NodeId loss);

    std::size_t node_count() const { return nodes_.size(); }
    void clear();

private:
    struct Node {
        Op op = Op::leaf;
        std::vector<int> shape;
        std::vector<double> value;
        std::vector<double> grad;
        std::vector<NodeId> inputs;
        double aux = 0.0;
        bool needs_grad = false;
    };

    int checked(NodeId id) const {
        if (id < 0 || id >= static_cast<NodeId>(nodes_.size())) {
            throw DimensionError("graph node id out of range");
        }
        return id;
    }

    NodeId push(Node n);
    void check_finite(const Node& n, NodeId id) const;
    bool any_needs_grad(const std::vector<NodeId>& ids) const;

    std::vector<Node> nodes_;
};

}  // namespace cupid::ad

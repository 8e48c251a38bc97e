#include "cupid/graph.hpp"

#include <cmath>
#include <string>

namespace cupid::ad {

namespace {

const char* op_name(Op op) {
    switch (op) {
        case Op::leaf: return "leaf";
        case Op::affine: return "affine";
        case Op::tanh_act: return "tanh";
        case Op::relu_act: return "relu";
        case Op::softmax_act: return "softmax";
        case Op::gaussian_nll: return "gaussian_nll";
        case Op::squared_norm: return "squared_norm";
        case Op::sub: return "sub";
        case Op::add: return "add";
        case Op::add_n: return "add_n";
        case Op::scale: return "scale";
        case Op::concat: return "concat";
    }
    return "?";
}

constexpr double kLogTwoPi = 1.8378770664093454836;

}  // namespace

Graph::NodeId Graph::push(Node n) {
    const NodeId id = static_cast<NodeId>(nodes_.size());
    if (n.needs_grad) {
        n.grad.assign(n.value.size(), 0.0);
    }
    nodes_.push_back(std::move(n));
    check_finite(nodes_.back(), id);
    return id;
}

void Graph::check_finite(const Node& n, NodeId id) const {
    for (double v : n.value) {
        if (!std::isfinite(v)) {
            throw NumericError(std::string("non-finite value in ") + op_name(n.op) +
                               " node " + std::to_string(id));
        }
    }
}

bool Graph::any_needs_grad(const std::vector<NodeId>& ids) const {
    for (NodeId id : ids) {
        if (nodes_[checked(id)].needs_grad) {
            return true;
        }
    }
    return false;
}

Graph::NodeId Graph::leaf(std::vector<int> shape, std::vector<double> value, bool needs_grad) {
    if (value.size() != shape_numel(shape)) {
        throw DimensionError("leaf value length does not match shape");
    }
    Node n;
    n.op = Op::leaf;
    n.shape = std::move(shape);
    n.value = std::move(value);
    n.needs_grad = needs_grad;
    return push(std::move(n));
}

Graph::NodeId Graph::scalar_leaf(double value, bool needs_grad) {
    return leaf({1}, {value}, needs_grad);
}

Graph::NodeId Graph::affine(NodeId w, NodeId b, NodeId x) {
    const Node& wn = nodes_[checked(w)];
    const Node& bn = nodes_[checked(b)];
    const Node& xn = nodes_[checked(x)];
    if (wn.shape.size() != 2) {
        throw DimensionError("affine weight must be rank 2");
    }
    const int out = wn.shape[0];
    const int in = wn.shape[1];
    if (static_cast<int>(xn.value.size()) != in) {
        throw DimensionError("affine input width mismatch");
    }
    if (static_cast<int>(bn.value.size()) != out) {
        throw DimensionError("affine bias width mismatch");
    }
    Node n;
    n.op = Op::affine;
    n.shape = {out};
    n.inputs = {w, b, x};
    n.needs_grad = any_needs_grad(n.inputs);
    n.value.resize(static_cast<std::size_t>(out));
    for (int o = 0; o < out; ++o) {
        double acc = bn.value[static_cast<std::size_t>(o)];
        const double* row = wn.value.data() + static_cast<std::size_t>(o) * in;
        for (int i = 0; i < in; ++i) {
            acc += row[i] * xn.value[static_cast<std::size_t>(i)];
        }
        n.value[static_cast<std::size_t>(o)] = acc;
    }
    return push(std::move(n));
}

Graph::NodeId Graph::tanh(NodeId x) {
    const Node& xn = nodes_[checked(x)];
    Node n;
    n.op = Op::tanh_act;
    n.shape = xn.shape;
    n.inputs = {x};
    n.needs_grad = xn.needs_grad;
    n.value.resize(xn.value.size());
    for (std::size_t i = 0; i < xn.value.size(); ++i) {
        n.value[i] = std::tanh(xn.value[i]);
    }
    return push(std::move(n));
}

Graph::NodeId Graph::relu(NodeId x) {
    const Node& xn = nodes_[checked(x)];
    Node n;
    n.op = Op::relu_act;
    n.shape = xn.shape;
    n.inputs = {x};
    n.needs_grad = xn.needs_grad;
    n.value.resize(xn.value.size());
    for (std::size_t i = 0; i < xn.value.size(); ++i) {
        n.value[i] = xn.value[i] > 0.0 ? xn.value[i] : 0.0;
    }
    return push(std::move(n));
}

Graph::NodeId Graph::softmax(NodeId x) {
    const Node& xn = nodes_[checked(x)];
    Node n;
    n.op = Op::softmax_act;
    n.shape = xn.shape;
    n.inputs = {x};
    n.needs_grad = xn.needs_grad;
    n.value.resize(xn.value.size());
    double mx = -1e300;
    for (double v : xn.value) {
        mx = std::max(mx, v);
    }
    double z = 0.0;
    for (std::size_t i = 0; i < xn.value.size(); ++i) {
        n.value[i] = std::exp(xn.value[i] - mx);
        z += n.value[i];
    }
    for (auto& v : n.value) {
        v /= z;
    }
    return push(std::move(n));
}

Graph::NodeId Graph::gaussian_nll(NodeId mean, NodeId log_std, NodeId target) {
    const Node& mn = nodes_[checked(mean)];
    const Node& sn = nodes_[checked(log_std)];
    const Node& tn = nodes_[checked(target)];
    if (mn.value.size() != sn.value.size() || mn.value.size() != tn.value.size()) {
        throw DimensionError("gaussian_nll operand width mismatch");
    }
    Node n;
    n.op = Op::gaussian_nll;
    n.shape = {1};
    n.inputs = {mean, log_std, target};
    n.needs_grad = any_needs_grad(n.inputs);
    double acc = 0.0;
    for (std::size_t i = 0; i < mn.value.size(); ++i) {
        const double z = (tn.value[i] - mn.value[i]) * std::exp(-sn.value[i]);
        acc += 0.5 * z * z + sn.value[i] + 0.5 * kLogTwoPi;
    }
    n.value = {acc};
    return push(std::move(n));
}

Graph::NodeId Graph::squared_norm(NodeId x) {
    const Node& xn = nodes_[checked(x)];
    Node n;
    n.op = Op::squared_norm;
    n.shape = {1};
    n.inputs = {x};
    n.needs_grad = xn.needs_grad;
    double acc = 0.0;
    for (double v : xn.value) {
        acc += v * v;
    }
    n.value = {acc};
    return push(std::move(n));
}

Graph::NodeId Graph::sub(NodeId a, NodeId b) {
    const Node& an = nodes_[checked(a)];
    const Node& bn = nodes_[checked(b)];
    if (an.value.size() != bn.value.size()) {
        throw DimensionError("sub operand width mismatch");
    }
    Node n;
    n.op = Op::sub;
    n.shape = an.shape;
    n.inputs = {a, b};
    n.needs_grad = any_needs_grad(n.inputs);
    n.value.resize(an.value.size());
    for (std::size_t i = 0; i < an.value.size(); ++i) {
        n.value[i] = an.value[i] - bn.value[i];
    }
    return push(std::move(n));
}

Graph::NodeId Graph::add(NodeId a, NodeId b) {
    const Node& an = nodes_[checked(a)];
    const Node& bn = nodes_[checked(b)];
    if (an.value.size() != bn.value.size()) {
        throw DimensionError("add operand width mismatch");
    }
    Node n;
    n.op = Op::add;
    n.shape = an.shape;
    n.inputs = {a, b};
    n.needs_grad = any_needs_grad(n.inputs);
    n.value.resize(an.value.size());
    for (std::size_t i = 0; i < an.value.size(); ++i) {
        n.value[i] = an.value[i] + bn.value[i];
    }
    return push(std::move(n));
}

Graph::NodeId Graph::add_n(const std::vector<NodeId>& xs) {
    if (xs.empty()) {
        throw DimensionError("add_n needs at least one input");
    }
    const Node& first = nodes_[checked(xs[0])];
    Node n;
    n.op = Op::add_n;
    n.shape = first.shape;
    n.inputs = xs;
    n.needs_grad = any_needs_grad(xs);
    n.value.assign(first.value.size(), 0.0);
    for (NodeId id : xs) {
        const Node& xn = nodes_[checked(id)];
        if (xn.value.size() != n.value.size()) {
            throw DimensionError("add_n operand width mismatch");
        }
        for (std::size_t i = 0; i < n.value.size(); ++i) {
            n.value[i] += xn.value[i];
        }
    }
    return push(std::move(n));
}

Graph::NodeId Graph::scale(NodeId x, double c) {
    const Node& xn = nodes_[checked(x)];
    Node n;
    n.op = Op::scale;
    n.shape = xn.shape;
    n.inputs = {x};
    n.aux = c;
    n.needs_grad = xn.needs_grad;
    n.value.resize(xn.value.size());
    for (std::size_t i = 0; i < xn.value.size(); ++i) {
        n.value[i] = c * xn.value[i];
    }
    return push(std::move(n));
}

Graph::NodeId Graph::concat(const std::vector<NodeId>& xs) {
    if (xs.empty()) {
        throw DimensionError("concat needs at least one input");
    }
    Node n;
    n.op = Op::concat;
    n.inputs = xs;
    n.needs_grad = any_needs_grad(xs);
    for (NodeId id : xs) {
        const Node& xn = nodes_[checked(id)];
        n.value.insert(n.value.end(), xn.value.begin(), xn.value.end());
    }
    n.shape = {static_cast<int>(n.value.size())};
    return push(std::move(n));
}

std::span<const double> Graph::value(NodeId id) const {
    const Node& n = nodes_[checked(id)];
    return std::span<const double>(n.value.data(), n.value.size());
}

double Graph::scalar_value(NodeId id) const {
    const Node& n = nodes_[checked(id)];
    if (n.value.size() != 1) {
        throw DimensionError("node is not scalar");
    }
    return n.value[0];
}

std::span<const double> Graph::grad(NodeId id) const {
    const Node& n = nodes_[checked(id)];
    if (!n.needs_grad) {
        throw DimensionError("node does not carry a gradient");
    }
    return std::span<const double>(n.grad.data(), n.grad.size());
}

void Graph::backward(NodeId loss) {
    Node& ln = nodes_[checked(loss)];
    if (ln.value.size() != 1) {
        throw DimensionError("backward requires a scalar loss node");
    }
    for (auto& n : nodes_) {
        if (n.needs_grad) {
            std::fill(n.grad.begin(), n.grad.end(), 0.0);
        }
    }
    if (!ln.needs_grad) {
        return;  // loss does not depend on any parameter
    }
    ln.grad[0] = 1.0;

    for (NodeId id = loss; id >= 0; --id) {
        Node& n = nodes_[static_cast<std::size_t>(id)];
        if (!n.needs_grad || n.op == Op::leaf) {
            continue;
        }
        bool touched = false;
        for (double g : n.grad) {
            if (g != 0.0) {
                touched = true;
                break;
            }
        }
        if (!touched) {
            continue;
        }
        switch (n.op) {
            case Op::affine: {
                Node& wn = nodes_[static_cast<std::size_t>(n.inputs[0])];
                Node& bn = nodes_[static_cast<std::size_t>(n.inputs[1])];
                Node& xn = nodes_[static_cast<std::size_t>(n.inputs[2])];
                const int out = wn.shape[0];
                const int in = wn.shape[1];
                for (int o = 0; o < out; ++o) {
                    const double go = n.grad[static_cast<std::size_t>(o)];
                    if (go == 0.0) {
                        continue;
                    }
                    if (bn.needs_grad) {
                        bn.grad[static_cast<std::size_t>(o)] += go;
                    }
                    if (wn.needs_grad) {
                        double* wrow = wn.grad.data() + static_cast<std::size_t>(o) * in;
                        for (int i = 0; i < in; ++i) {
                            wrow[i] += go * xn.value[static_cast<std::size_t>(i)];
                        }
                    }
                    if (xn.needs_grad) {
                        const double* wrow = wn.value.data() + static_cast<std::size_t>(o) * in;
                        for (int i = 0; i < in; ++i) {
                            xn.grad[static_cast<std::size_t>(i)] += go * wrow[i];
                        }
                    }
                }
                break;
            }
            case Op::tanh_act: {
                Node& xn = nodes_[static_cast<std::size_t>(n.inputs[0])];
                if (xn.needs_grad) {
                    for (std::size_t i = 0; i < n.value.size(); ++i) {
                        xn.grad[i] += n.grad[i] * (1.0 - n.value[i] * n.value[i]);
                    }
                }
                break;
            }
            case Op::relu_act: {
                Node& xn = nodes_[static_cast<std::size_t>(n.inputs[0])];
                if (xn.needs_grad) {
                    for (std::size_t i = 0; i < n.value.size(); ++i) {
                        if (xn.value[i] > 0.0) {
                            xn.grad[i] += n.grad[i];
                        }
                    }
                }
                break;
            }
            case Op::softmax_act: {
                Node& xn = nodes_[static_cast<std::size_t>(n.inputs[0])];
                if (xn.needs_grad) {
                    double dot = 0.0;
                    for (std::size_t i = 0; i < n.value.size(); ++i) {
                        dot += n.grad[i] * n.value[i];
                    }
                    for (std::size_t i = 0; i < n.value.size(); ++i) {
                        xn.grad[i] += n.value[i] * (n.grad[i] - dot);
                    }
                }
                break;
            }
            case Op::gaussian_nll: {
                Node& mn = nodes_[static_cast<std::size_t>(n.inputs[0])];
                Node& sn = nodes_[static_cast<std::size_t>(n.inputs[1])];
                Node& tn = nodes_[static_cast<std::size_t>(n.inputs[2])];
                const double g = n.grad[0];
                for (std::size_t i = 0; i < mn.value.size(); ++i) {
                    const double inv_var = std::exp(-2.0 * sn.value[i]);
                    const double diff = mn.value[i] - tn.value[i];
                    if (mn.needs_grad) {
                        mn.grad[i] += g * diff * inv_var;
                    }
                    if (sn.needs_grad) {
                        sn.grad[i] += g * (1.0 - diff * diff * inv_var);
                    }
                    if (tn.needs_grad) {
                        tn.grad[i] -= g * diff * inv_var;
                    }
                }
                break;
            }
            case Op::squared_norm: {
                Node& xn = nodes_[static_cast<std::size_t>(n.inputs[0])];
                if (xn.needs_grad) {
                    const double g = n.grad[0];
                    for (std::size_t i = 0; i < xn.value.size(); ++i) {
                        xn.grad[i] += 2.0 * g * xn.value[i];
                    }
                }
                break;
            }
            case Op::sub: {
                Node& an = nodes_[static_cast<std::size_t>(n.inputs[0])];
                Node& bn = nodes_[static_cast<std::size_t>(n.inputs[1])];
                for (std::size_t i = 0; i < n.value.size(); ++i) {
                    if (an.needs_grad) {
                        an.grad[i] += n.grad[i];
                    }
                    if (bn.needs_grad) {
                        bn.grad[i] -= n.grad[i];
                    }
                }
                break;
            }
            case Op::add: {
                Node& an = nodes_[static_cast<std::size_t>(n.inputs[0])];
                Node& bn = nodes_[static_cast<std::size_t>(n.inputs[1])];
                for (std::size_t i = 0; i < n.value.size(); ++i) {
                    if (an.needs_grad) {
                        an.grad[i] += n.grad[i];
                    }
                    if (bn.needs_grad) {
                        bn.grad[i] += n.grad[i];
                    }
                }
                break;
            }
            case Op::add_n: {
                for (NodeId in_id : n.inputs) {
                    Node& xn = nodes_[static_cast<std::size_t>(in_id)];
                    if (!xn.needs_grad) {
                        continue;
                    }
                    for (std::size_t i = 0; i < n.value.size(); ++i) {
                        xn.grad[i] += n.grad[i];
                    }
                }
                break;
            }
            case Op::scale: {
                Node& xn = nodes_[static_cast<std::size_t>(n.inputs[0])];
                if (xn.needs_grad) {
                    for (std::size_t i = 0; i < n.value.size(); ++i) {
                        xn.grad[i] += n.aux * n.grad[i];
                    }
                }
                break;
            }
            case Op::concat: {
                std::size_t off = 0;
                for (NodeId in_id : n.inputs) {
                    Node& xn = nodes_[static_cast<std::size_t>(in_id)];
                    if (xn.needs_grad) {
                        for (std::size_t i = 0; i < xn.value.size(); ++i) {
                            xn.grad[i] += n.grad[off + i];
                        }
                    }
                    off += xn.value.size();
                }
                break;
            }
            case Op::leaf:
                break;
        }
    }
}

void Graph::clear() { nodes_.clear(); }

}  // namespace cupid::ad

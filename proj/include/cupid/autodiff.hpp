#pragma once

#include <functional>
#include <vector>

#include "cupid/graph.hpp"
#include "cupid/param.hpp"

namespace cupid {

// Builds a scalar loss node from parameter leaves (one per layout entry, in
// layout order) on the given tape.
using LossBuilder =
    std::function<ad::Graph::NodeId(ad::Graph&, const std::vector<ad::Graph::NodeId>&)>;

// Creates one gradient leaf per layout entry and returns the node ids.
std::vector<ad::Graph::NodeId> param_leaves(ad::Graph& g, const ParameterVector& params);

double eval_loss(const ParameterVector& params, const LossBuilder& build);

// Exact reverse-mode gradient of the built loss at params, flattened in
// layout order.
GradientVector per_sample_gradient(const ParameterVector& params, const LossBuilder& build);

// Central differences, one coordinate at a time. Validation oracle for the
// reverse-mode path; O(p) loss evaluations.
GradientVector finite_diff_gradient(const ParameterVector& params,
                                    const std::function<double(const ParameterVector&)>& loss,
                                    double step);

}  // namespace cupid

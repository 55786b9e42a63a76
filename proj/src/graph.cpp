#include "fcnscape/graph.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace fcnscape {

const Tensor& Var::value() const {
    return graph->value(id);
}

Var Graph::constant(Tensor value) {
    nodes_.push_back(Node{std::move(value), {}, false, {}, {}, std::nullopt});
    return Var{this, nodes_.size() - 1};
}

Var Graph::parameter(Tensor value, std::size_t flat_offset) {
    nodes_.push_back(Node{std::move(value), {}, true, {}, {}, flat_offset});
    return Var{this, nodes_.size() - 1};
}

Var Graph::record(Tensor value, std::vector<std::size_t> inputs, BackwardFn backward) {
    const bool needs = std::any_of(inputs.begin(), inputs.end(), [&](std::size_t i) { return nodes_.at(i).requires_grad; });
    nodes_.push_back(Node{std::move(value), {}, needs, std::move(inputs), needs ? std::move(backward) : BackwardFn{},
                          std::nullopt});
    return Var{this, nodes_.size() - 1};
}

Tensor& Graph::grad(std::size_t id) {
    Node& node = nodes_.at(id);
    if (node.grad.empty()) node.grad = Tensor(node.value.shape(), 0.0);
    return node.grad;
}

std::vector<double> Graph::backward(Var loss, std::size_t param_count) {
    if (loss.graph != this) throw std::invalid_argument("backward: loss node belongs to another graph");
    if (value(loss.id).size() != 1)
        throw std::invalid_argument("backward: root must be scalar, got shape " + to_string(value(loss.id).shape()));

    std::vector<double> flat(param_count, 0.0);
    if (!nodes_[loss.id].requires_grad) return flat;

    grad(loss.id)[0] = 1.0;
    for (std::size_t id = loss.id + 1; id-- > 0;) {
        Node& node = nodes_[id];
        if (!node.requires_grad || node.grad.empty()) continue;
        if (node.param_offset) {
            const std::size_t offset = *node.param_offset;
            if (offset + node.grad.size() > param_count)
                throw std::out_of_range("backward: parameter leaf exceeds flat gradient of " +
                                        std::to_string(param_count));
            for (std::size_t i = 0; i < node.grad.size(); ++i) flat[offset + i] += node.grad[i];
        } else if (node.backward) {
            node.backward(*this, node.grad);
        }
        // Release intermediate gradients as soon as they have been propagated.
        if (!node.param_offset) node.grad = Tensor();
    }
    return flat;
}

}  // namespace fcnscape

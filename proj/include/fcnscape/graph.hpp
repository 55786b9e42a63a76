#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "fcnscape/tensor.hpp"

namespace fcnscape {

class Graph;

// Handle to a node of a Graph. Cheap to copy; valid while the graph lives.
struct Var {
    Graph* graph = nullptr;
    std::size_t id = 0;

    const Tensor& value() const;
    const Shape& shape() const { return value().shape(); }
};

// Define-by-run tape for reverse-mode differentiation. Nodes are appended in
// creation order, which is a topological order, so backward walks ids in
// reverse and visits each node once.
class Graph {
public:
    using BackwardFn = std::function<void(Graph&, const Tensor& upstream)>;

    Graph() = default;
    Graph(const Graph&) = delete;
    Graph& operator=(const Graph&) = delete;

    // Constant input; receives no gradient.
    Var constant(Tensor value);

    // Leaf whose gradient is written to [offset, offset + size) of the flat
    // gradient returned by backward().
    Var parameter(Tensor value, std::size_t flat_offset);

    // Records an operation result. `backward` receives the gradient of the
    // loss w.r.t. this node and must accumulate into inputs via grad().
    Var record(Tensor value, std::vector<std::size_t> inputs, BackwardFn backward);

    const Tensor& value(std::size_t id) const { return nodes_.at(id).value; }
    bool requires_grad(std::size_t id) const { return nodes_.at(id).requires_grad; }

    // Mutable gradient buffer of a node, zero-initialized on first access.
    Tensor& grad(std::size_t id);

    std::size_t size() const { return nodes_.size(); }

    // Gradient of a scalar node w.r.t. every parameter leaf, scattered into a
    // flat vector of `param_count` entries. Parameters that do not reach the
    // loss get zero.
    std::vector<double> backward(Var loss, std::size_t param_count);

private:
    struct Node {
        Tensor value;
        Tensor grad;
        bool requires_grad = false;
        std::vector<std::size_t> inputs;
        BackwardFn backward;
        std::optional<std::size_t> param_offset;
    };
    std::vector<Node> nodes_;
};

}  // namespace fcnscape

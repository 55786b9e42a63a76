#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "fcnscape/gradcheck.hpp"
#include "fcnscape/graph.hpp"
#include "fcnscape/ops.hpp"
#include "toy_losses.hpp"

namespace fcnscape::testing {

// Builds an op whose inputs are parameter leaves read from a flat point.
using Builder = std::function<Var(Graph&, std::span<const double>)>;

// Scalar sum(op(p) * probe) with a fixed random probe, so every output
// element contributes to the gradient.
inline DifferentiableFn probe_fn(const Builder& build, std::size_t dim) {
    return [build, dim](std::span<const double> p, std::vector<double>* grad) {
        Graph g;
        const Var out = build(g, p);
        std::mt19937_64 rng(99);
        const Var probe = g.constant(random_tensor(out.shape(), rng));
        const Var loss = sum(mul(out, probe));
        if (grad) *grad = g.backward(loss, dim);
        return loss.value()[0];
    };
}

inline std::vector<double> random_point(std::size_t n, std::mt19937_64& rng, double min_abs = 0.0) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<double> p(n);
    for (double& x : p) {
        do x = d(rng);
        while (std::abs(x) < min_abs);
    }
    return p;
}

inline Var leaf(Graph& g, std::span<const double> p, std::size_t offset, Shape shape) {
    const std::size_t n = shape_size(shape);
    return g.parameter(Tensor(std::move(shape), std::vector<double>(p.begin() + offset, p.begin() + offset + n)),
                       offset);
}

}  // namespace fcnscape::testing

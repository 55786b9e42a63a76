#pragma once

#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fcnscape/objective.hpp"
#include "fcnscape/param_set.hpp"
#include "fcnscape/tensor.hpp"

namespace fcnscape::testing {

// L(theta) = sum_i w_i theta_i^2.
class WeightedQuadratic final : public LossFunction {
public:
    explicit WeightedQuadratic(std::vector<double> weights) : w_(std::move(weights)) {}
    std::size_t dimension() const override { return w_.size(); }
    double value(std::span<const double> p) const override {
        double s = 0.0;
        for (std::size_t i = 0; i < w_.size(); ++i) s += w_[i] * p[i] * p[i];
        return s;
    }
    double value_and_gradient(std::span<const double> p, std::vector<double>& g) const override {
        g.resize(w_.size());
        for (std::size_t i = 0; i < w_.size(); ++i) g[i] = 2.0 * w_[i] * p[i];
        return value(p);
    }
    std::string description() const override { return "weighted-quadratic"; }

private:
    std::vector<double> w_;
};

// Loss defined by a value function and its analytic gradient.
class FunctionLoss final : public LossFunction {
public:
    using Value = std::function<double(std::span<const double>)>;
    using Gradient = std::function<void(std::span<const double>, std::vector<double>&)>;

    FunctionLoss(std::size_t dim, Value value, Gradient gradient)
        : dim_(dim), value_(std::move(value)), gradient_(std::move(gradient)) {}
    std::size_t dimension() const override { return dim_; }
    double value(std::span<const double> p) const override { return value_(p); }
    double value_and_gradient(std::span<const double> p, std::vector<double>& g) const override {
        g.assign(dim_, 0.0);
        gradient_(p, g);
        return value_(p);
    }

private:
    std::size_t dim_;
    Value value_;
    Gradient gradient_;
};

// One conv-filter group holding all coordinates.
inline ParamSet flat_params(std::vector<double> values) {
    const std::size_t n = values.size();
    return ParamSet({FilterGroup{"theta", GroupRole::ConvFilter, {n}, 0}}, std::move(values));
}

inline Tensor random_tensor(Shape shape, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
    Tensor t(std::move(shape));
    std::uniform_real_distribution<double> d(lo, hi);
    for (double& x : t.data()) x = d(rng);
    return t;
}

}  // namespace fcnscape::testing

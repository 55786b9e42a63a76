#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fcnscape/data.hpp"
#include "fcnscape/graph.hpp"
#include "fcnscape/models.hpp"

namespace fcnscape {

// SumPerSample: (1/N) sum_i sum_t (y - yhat)^2.
// MeanPerElement: the same divided by the per-sample element count M.
enum class Reduction { SumPerSample, MeanPerElement };

std::string to_string(Reduction r);
Reduction parse_reduction(const std::string& name);

struct LossValue {
    double value = 0.0;
    std::size_t n_samples = 0;
    std::size_t n_elements_per_sample = 0;
    Reduction reduction = Reduction::SumPerSample;
};

// Squared error summed over each sample, one entry per leading index.
std::vector<double> per_sample_squared_error(const Tensor& pred, const Tensor& target);

LossValue mse(const Tensor& pred, const Tensor& target, Reduction reduction = Reduction::SumPerSample);

// Differentiable MSE node. `sample_divisor` replaces N, which lets a chunk of
// a larger dataset contribute its exact share of the full-dataset mean.
Var mse_loss(Var pred, const Tensor& target, Reduction reduction = Reduction::SumPerSample,
             std::optional<std::size_t> sample_divisor = std::nullopt);

// Scalar loss over a flat parameter vector.
class LossFunction {
public:
    virtual ~LossFunction() = default;
    virtual std::size_t dimension() const = 0;
    virtual double value(std::span<const double> params) const = 0;
    // Fills `gradient` (resized to dimension()) and returns the loss.
    virtual double value_and_gradient(std::span<const double> params, std::vector<double>& gradient) const = 0;
    virtual std::string description() const { return {}; }
};

// Loss of a model over a whole dataset. The value is the ordered sum of
// per-sample losses divided by N, so it does not depend on the chunk size.
// Evaluations are const and build a private graph, so one instance may serve
// concurrent callers.
class NetworkLoss final : public LossFunction {
public:
    NetworkLoss(const Network& model, const Dataset& data, Reduction reduction, std::size_t chunk = 16);

    std::size_t dimension() const override { return model_.param_count(); }
    double value(std::span<const double> params) const override;
    double value_and_gradient(std::span<const double> params, std::vector<double>& gradient) const override;
    std::string description() const override;

    Reduction reduction() const { return reduction_; }

private:
    const Network& model_;
    const Dataset& data_;
    Reduction reduction_;
    std::size_t chunk_;
    std::vector<std::vector<std::size_t>> chunks_;
    std::vector<Tensor> inputs_;
    std::vector<Tensor> targets_;
};

double dataset_loss(const Network& model, const ParamSet& params, const Dataset& data,
                    Reduction reduction = Reduction::SumPerSample);

}  // namespace fcnscape

#include "fcnscape/objective.hpp"

#include <stdexcept>

namespace fcnscape {

std::string to_string(Reduction r) {
    return r == Reduction::SumPerSample ? "sum_per_sample" : "mean_per_element";
}

Reduction parse_reduction(const std::string& name) {
    if (name == "sum_per_sample" || name == "sum") return Reduction::SumPerSample;
    if (name == "mean_per_element" || name == "mean") return Reduction::MeanPerElement;
    throw std::invalid_argument("unknown reduction '" + name + "', expected sum_per_sample or mean_per_element");
}

namespace {

void require_same_shape(const Tensor& pred, const Tensor& target) {
    if (pred.shape() != target.shape())
        throw std::invalid_argument("mse: prediction " + to_string(pred.shape()) + " and target " +
                                    to_string(target.shape()) + " differ in shape");
    if (pred.rank() == 0 || pred.empty()) throw std::invalid_argument("mse: empty tensors");
}

double normalizer(Reduction reduction, std::size_t samples, std::size_t per_sample) {
    const double n = static_cast<double>(samples);
    return reduction == Reduction::MeanPerElement ? n * static_cast<double>(per_sample) : n;
}

}  // namespace

std::vector<double> per_sample_squared_error(const Tensor& pred, const Tensor& target) {
    require_same_shape(pred, target);
    const std::size_t samples = pred.dim(0);
    const std::size_t per_sample = pred.size() / samples;
    std::vector<double> sums(samples, 0.0);
    for (std::size_t i = 0; i < samples; ++i) {
        double s = 0.0;
        for (std::size_t t = 0; t < per_sample; ++t) {
            const double d = target[i * per_sample + t] - pred[i * per_sample + t];
            s += d * d;
        }
        sums[i] = s;
    }
    return sums;
}

LossValue mse(const Tensor& pred, const Tensor& target, Reduction reduction) {
    const auto sums = per_sample_squared_error(pred, target);
    const std::size_t per_sample = pred.size() / sums.size();
    double total = 0.0;
    for (double s : sums) total += s;
    return LossValue{total / normalizer(reduction, sums.size(), per_sample), sums.size(), per_sample, reduction};
}

Var mse_loss(Var pred, const Tensor& target, Reduction reduction, std::optional<std::size_t> sample_divisor) {
    const Tensor& p = pred.value();
    const auto sums = per_sample_squared_error(p, target);
    const std::size_t per_sample = p.size() / sums.size();
    const std::size_t samples = sample_divisor.value_or(sums.size());
    if (samples == 0) throw std::invalid_argument("mse_loss: sample divisor must be positive");
    const double denom = normalizer(reduction, samples, per_sample);
    double total = 0.0;
    for (double s : sums) total += s;

    const std::size_t pi = pred.id;
    return pred.graph->record(Tensor({1}, total / denom), {pi}, [pi, target, denom](Graph& g, const Tensor& dy) {
        const Tensor& pv = g.value(pi);
        Tensor& dp = g.grad(pi);
        const double scale = 2.0 * dy[0] / denom;
        for (std::size_t i = 0; i < dp.size(); ++i) dp[i] += scale * (pv[i] - target[i]);
    });
}

NetworkLoss::NetworkLoss(const Network& model, const Dataset& data, Reduction reduction, std::size_t chunk)
    : model_(model), data_(data), reduction_(reduction), chunk_(chunk) {
    if (data.empty()) throw std::invalid_argument("NetworkLoss: dataset is empty");
    if (chunk == 0) throw std::invalid_argument("NetworkLoss: chunk must be positive");
    for (std::size_t start = 0; start < data.size(); start += chunk) {
        std::vector<std::size_t> idx;
        for (std::size_t i = start; i < std::min(data.size(), start + chunk); ++i) idx.push_back(i);
        inputs_.push_back(stack_inputs(data, idx));
        targets_.push_back(stack_targets(data, idx));
        chunks_.push_back(std::move(idx));
    }
}

double NetworkLoss::value(std::span<const double> params) const {
    double total = 0.0;
    std::size_t per_sample = 0;
    for (std::size_t c = 0; c < chunks_.size(); ++c) {
        Graph graph;
        const Var out = model_.forward(graph, params, graph.constant(inputs_[c]));
        per_sample = targets_[c].size() / chunks_[c].size();
        for (double s : per_sample_squared_error(out.value(), targets_[c])) total += s;
    }
    return total / normalizer(reduction_, data_.size(), per_sample);
}

double NetworkLoss::value_and_gradient(std::span<const double> params, std::vector<double>& gradient) const {
    gradient.assign(model_.param_count(), 0.0);
    double total = 0.0;
    std::size_t per_sample = 0;
    for (std::size_t c = 0; c < chunks_.size(); ++c) {
        Graph graph;
        const Var out = model_.forward(graph, params, graph.constant(inputs_[c]));
        per_sample = targets_[c].size() / chunks_[c].size();
        for (double s : per_sample_squared_error(out.value(), targets_[c])) total += s;
        const Var loss = mse_loss(out, targets_[c], reduction_, data_.size());
        const auto g = graph.backward(loss, model_.param_count());
        for (std::size_t i = 0; i < g.size(); ++i) gradient[i] += g[i];
    }
    return total / normalizer(reduction_, data_.size(), per_sample);
}

std::string NetworkLoss::description() const {
    return model_.name() + " on " + data_.provenance.source + " (" + std::to_string(data_.size()) + " samples, " +
           to_string(reduction_) + ")";
}

double dataset_loss(const Network& model, const ParamSet& params, const Dataset& data, Reduction reduction) {
    if (!params.same_layout(model.layout())) throw std::invalid_argument("dataset_loss: parameter layout mismatch");
    return NetworkLoss(model, data, reduction).value(params.values());
}

}  // namespace fcnscape

#include "fcnscape/sharpness.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "fcnscape/random.hpp"

namespace fcnscape {

namespace {

void validate(double epsilon, const MaximizerConfig& m) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
        throw std::invalid_argument("sharpness: epsilon must be positive, got " + std::to_string(epsilon));
    if (m.starts < 1) throw std::invalid_argument("sharpness: need at least one start");
    if (!(m.step_fraction > 0.0)) throw std::invalid_argument("sharpness: step fraction must be positive");
}

SharpnessResult maximize(const LossFunction& loss, std::span<const double> theta, double center_loss, double epsilon,
                         const MaximizerConfig& m, const std::optional<std::vector<double>>& warm_start,
                         double warm_loss) {
    const std::size_t dim = theta.size();
    std::vector<double> half_width(dim);
    for (std::size_t i = 0; i < dim; ++i) half_width[i] = epsilon * (std::abs(theta[i]) + 1.0);

    SharpnessResult result;
    result.epsilon = epsilon;
    result.center_loss = center_loss;
    result.max_loss = center_loss;
    result.best_perturbation.assign(dim, 0.0);
    if (warm_start && warm_loss > result.max_loss) {
        result.max_loss = warm_loss;
        result.best_perturbation = *warm_start;
    }

    std::vector<double> sigma(dim), point(dim), grad;
    auto consider = [&](double value) {
        if (value > result.max_loss) {
            result.max_loss = value;
            result.best_perturbation = sigma;
        }
    };

    const std::size_t total_starts = m.starts + (warm_start ? 1 : 0);
    for (std::size_t start = 0; start < total_starts; ++start) {
        if (warm_start && start == m.starts) {
            sigma = *warm_start;
        } else if (start == 0) {
            std::fill(sigma.begin(), sigma.end(), 0.0);
        } else {
            auto rng = make_rng(m.seed, start);
            std::uniform_real_distribution<double> unit(-1.0, 1.0);
            for (std::size_t i = 0; i < dim; ++i) sigma[i] = unit(rng) * half_width[i];
        }
        for (std::size_t step = 0; step <= m.steps; ++step) {
            for (std::size_t i = 0; i < dim; ++i) point[i] = theta[i] + sigma[i];
            if (step == m.steps) {
                consider(loss.value(point));
                break;
            }
            consider(loss.value_and_gradient(point, grad));
            for (std::size_t i = 0; i < dim; ++i) {
                const double direction = grad[i] > 0.0 ? 1.0 : (grad[i] < 0.0 ? -1.0 : 0.0);
                sigma[i] = std::clamp(sigma[i] + m.step_fraction * half_width[i] * direction, -half_width[i],
                                      half_width[i]);
            }
        }
    }
    result.phi = (result.max_loss - center_loss) / (1.0 + center_loss);
    return result;
}

}  // namespace

SharpnessResult sharpness(const LossFunction& loss, const ParamSet& center, const SharpnessSpec& spec) {
    validate(spec.epsilon, spec.maximizer);
    const auto theta = center.values();
    if (theta.size() != loss.dimension())
        throw std::invalid_argument("sharpness: parameter count does not match the loss function");
    return maximize(loss, theta, loss.value(theta), spec.epsilon, spec.maximizer, std::nullopt, 0.0);
}

std::vector<SharpnessResult> sharpness_sweep(const LossFunction& loss, const ParamSet& center,
                                             std::vector<double> epsilons, const MaximizerConfig& maximizer) {
    if (epsilons.empty()) return {};
    for (double e : epsilons) validate(e, maximizer);
    const auto theta = center.values();
    if (theta.size() != loss.dimension())
        throw std::invalid_argument("sharpness: parameter count does not match the loss function");
    std::sort(epsilons.begin(), epsilons.end());
    const double center_loss = loss.value(theta);
    std::vector<SharpnessResult> results;
    std::optional<std::vector<double>> warm;
    double warm_loss = center_loss;
    for (double e : epsilons) {
        results.push_back(maximize(loss, theta, center_loss, e, maximizer, warm, warm_loss));
        warm = results.back().best_perturbation;
        warm_loss = results.back().max_loss;
    }
    return results;
}

}  // namespace fcnscape

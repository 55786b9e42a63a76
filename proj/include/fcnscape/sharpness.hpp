#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fcnscape/objective.hpp"
#include "fcnscape/param_set.hpp"

namespace fcnscape {

// Box-constrained ascent used to approximate max L(theta + sigma) over
//   |sigma_i| <= epsilon (|theta_i| + 1)   for every parameter i.
// Start 0 is the centre; the others are uniform in the box. Each step moves
// every coordinate by step_fraction of its half-width in the direction of the
// gradient sign, then clamps to the box. The largest loss seen is kept, so the
// result is a lower bound on the true maximum.
struct MaximizerConfig {
    std::size_t starts = 5;
    std::size_t steps = 20;
    double step_fraction = 0.1;
    std::uint64_t seed = 0;
};

struct SharpnessSpec {
    double epsilon = 0.1;
    MaximizerConfig maximizer;
};

struct SharpnessResult {
    double epsilon = 0.0;
    double phi = 0.0;
    double center_loss = 0.0;
    double max_loss = 0.0;
    std::vector<double> best_perturbation;
};

// phi = (max L(theta + sigma) - L(theta)) / (1 + L(theta)).
SharpnessResult sharpness(const LossFunction& loss, const ParamSet& center, const SharpnessSpec& spec);

// Evaluates several budgets in ascending order, seeding each larger box with
// the best perturbation of the previous one. The sets are nested, so phi is
// non-decreasing in epsilon. Results are returned in ascending epsilon order.
std::vector<SharpnessResult> sharpness_sweep(const LossFunction& loss, const ParamSet& center,
                                             std::vector<double> epsilons, const MaximizerConfig& maximizer);

}  // namespace fcnscape

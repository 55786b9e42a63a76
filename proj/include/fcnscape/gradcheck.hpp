#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace fcnscape {

// Scalar function of a flat parameter vector. When `gradient` is non-null it
// must be filled with the analytic gradient (same length as the point).
using DifferentiableFn = std::function<double(std::span<const double> point, std::vector<double>* gradient)>;

struct GradCheckResult {
    double max_relative_error = 0.0;
    std::size_t worst_index = 0;
};

// Compares the analytic gradient against central finite differences on the
// given coordinates (all coordinates when `indices` is empty). The error of a
// coordinate is |analytic - numeric| / max(1, |numeric|).
GradCheckResult grad_check(const DifferentiableFn& fn, std::span<const double> point, double fd_step = 1e-5,
                           std::span<const std::size_t> indices = {});

}  // namespace fcnscape

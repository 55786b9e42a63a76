#include "fcnscape/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fcnscape {

GradCheckResult grad_check(const DifferentiableFn& fn, std::span<const double> point, double fd_step,
                           std::span<const std::size_t> indices) {
    if (fd_step <= 0.0) throw std::invalid_argument("grad_check: fd_step must be positive");
    std::vector<double> analytic(point.size(), 0.0);
    fn(point, &analytic);
    if (analytic.size() != point.size()) throw std::logic_error("grad_check: gradient length differs from point");

    std::vector<std::size_t> all;
    if (indices.empty()) {
        all.resize(point.size());
        std::iota(all.begin(), all.end(), std::size_t{0});
        indices = all;
    }

    std::vector<double> probe(point.begin(), point.end());
    GradCheckResult result;
    for (std::size_t i : indices) {
        const double saved = probe.at(i);
        probe[i] = saved + fd_step;
        const double up = fn(probe, nullptr);
        probe[i] = saved - fd_step;
        const double down = fn(probe, nullptr);
        probe[i] = saved;
        const double numeric = (up - down) / (2.0 * fd_step);
        const double err = std::abs(analytic[i] - numeric) / std::max(1.0, std::abs(numeric));
        if (err > result.max_relative_error || std::isnan(err)) {
            result.max_relative_error = err;
            result.worst_index = i;
        }
    }
    return result;
}

}  // namespace fcnscape

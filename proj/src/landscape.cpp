#include "fcnscape/landscape.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "fcnscape/random.hpp"

namespace fcnscape {

DirectionPair DirectionPair::negated() const {
    DirectionPair out = *this;
    for (double& x : out.u) x = -x;
    for (double& x : out.v) x = -x;
    return out;
}

namespace {

void fill_normalized(std::span<double> group, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    double norm = 0.0;
    while (norm == 0.0) {
        double sq = 0.0;
        for (double& x : group) {
            x = normal(rng);
            sq += x * x;
        }
        norm = std::sqrt(sq);
    }
    for (double& x : group) x /= norm;
}

}  // namespace

DirectionPair sample_directions(const ParamSet& layout, std::uint64_t seed) {
    DirectionPair dirs;
    dirs.seed = seed;
    dirs.u.assign(layout.size(), 0.0);
    dirs.v.assign(layout.size(), 0.0);
    auto rng_u = make_rng(seed, 0);
    auto rng_v = make_rng(seed, 1);
    for (std::size_t g : layout.filter_indices()) {
        const auto& group = layout.group(g);
        fill_normalized(std::span<double>(dirs.u).subspan(group.offset, group.size()), rng_u);
        fill_normalized(std::span<double>(dirs.v).subspan(group.offset, group.size()), rng_v);
    }
    return dirs;
}

double GridSpec::coordinate(std::size_t t) const {
    const double signed_step = static_cast<double>(2 * static_cast<std::ptrdiff_t>(t) - static_cast<std::ptrdiff_t>(n));
    return r * (signed_step / static_cast<double>(n));
}

void validate(const GridSpec& grid) {
    if (grid.n < 2) throw std::invalid_argument("grid resolution n must be at least 2");
    if (!(grid.r > 0.0) || !std::isfinite(grid.r)) throw std::invalid_argument("grid radius r must be positive");
}

std::vector<double> displaced(const ParamSet& center, const DirectionPair& dirs, double alpha, double beta) {
    const auto theta = center.values();
    if (dirs.u.size() != theta.size() || dirs.v.size() != theta.size())
        throw std::invalid_argument("directions do not match the parameter layout (" + std::to_string(dirs.u.size()) +
                                    " vs " + std::to_string(theta.size()) + ")");
    std::vector<double> out(theta.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = theta[i] + alpha * dirs.u[i] + beta * dirs.v[i];
    return out;
}

double point_loss(const LossFunction& loss, const ParamSet& center, const DirectionPair& dirs, double alpha,
                  double beta) {
    return loss.value(displaced(center, dirs, alpha, beta));
}

LossSurface evaluate_surface(const LossFunction& loss, const ParamSet& center, const DirectionPair& dirs,
                             const GridSpec& grid, const SurfaceOptions& options) {
    validate(grid);
    LossSurface surface;
    surface.grid = grid;
    surface.direction_seed = dirs.seed;
    surface.model = options.model;
    surface.dataset = options.dataset;
    surface.reduction = options.reduction;
    surface.center_loss = loss.value(center.values());

    const std::size_t side = grid.points();
    surface.values.assign(side * side, 0.0);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t cell = next++; cell < side * side; cell = next++) {
            try {
                surface.values[cell] =
                    point_loss(loss, center, dirs, grid.coordinate(cell / side), grid.coordinate(cell % side));
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = side * side;
            }
        }
    };
    const std::size_t threads = std::max<std::size_t>(1, options.threads);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    return surface;
}

}  // namespace fcnscape

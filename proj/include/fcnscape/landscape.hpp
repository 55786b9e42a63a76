#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fcnscape/objective.hpp"
#include "fcnscape/param_set.hpp"

namespace fcnscape {

// Two random directions in parameter space, flat and aligned with a ParamSet
// layout. Each conv-filter group of u and v has unit L2 norm; bias entries
// are exactly zero.
struct DirectionPair {
    std::vector<double> u;
    std::vector<double> v;
    std::uint64_t seed = 0;

    DirectionPair negated() const;
};

DirectionPair sample_directions(const ParamSet& layout, std::uint64_t seed);

// n + 1 coordinates per axis: -r + 2r t / n for t = 0..n. The centre is
// exactly zero when n is even and the endpoints are exactly -r and r.
struct GridSpec {
    std::size_t n = 40;
    double r = 0.5;

    double coordinate(std::size_t t) const;
    std::size_t points() const { return n + 1; }
};

void validate(const GridSpec& grid);

struct LossSurface {
    GridSpec grid;
    // Row-major (n+1) x (n+1): row t is alpha_t, column k is beta_k.
    std::vector<double> values;
    double center_loss = 0.0;
    std::uint64_t direction_seed = 0;
    std::string model;
    std::string dataset;
    Reduction reduction = Reduction::SumPerSample;

    double at(std::size_t t, std::size_t k) const { return values[t * grid.points() + k]; }
};

// theta'_i + alpha u_i + beta v_i, evaluated elementwise in that order.
std::vector<double> displaced(const ParamSet& center, const DirectionPair& dirs, double alpha, double beta);

double point_loss(const LossFunction& loss, const ParamSet& center, const DirectionPair& dirs, double alpha,
                  double beta);

struct SurfaceOptions {
    // Worker threads over grid cells; results do not depend on this.
    std::size_t threads = 1;
    std::string model;
    std::string dataset;
    Reduction reduction = Reduction::SumPerSample;
};

LossSurface evaluate_surface(const LossFunction& loss, const ParamSet& center, const DirectionPair& dirs,
                             const GridSpec& grid, const SurfaceOptions& options = {});

}  // namespace fcnscape

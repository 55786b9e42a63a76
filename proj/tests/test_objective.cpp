#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "fcnscape/data.hpp"
#include "fcnscape/gradcheck.hpp"
#include "fcnscape/objective.hpp"
#include "toy_losses.hpp"

using namespace fcnscape;
using fcnscape::testing::random_tensor;

TEST(Mse, ZeroForIdenticalInputs) {
    std::mt19937_64 rng(1);
    const Tensor a = random_tensor({2, 1, 4, 4}, rng);
    EXPECT_EQ(mse(a, a).value, 0.0);
}

TEST(Mse, SumsOverElementsAndAveragesOverSamples) {
    const LossValue l = mse(Tensor({1, 3}, {1, 1, 1}), Tensor({1, 3}, {0, 0, 0}));
    EXPECT_EQ(l.value, 3.0);
    EXPECT_EQ(l.n_samples, 1u);
    EXPECT_EQ(l.n_elements_per_sample, 3u);
    EXPECT_EQ(mse(Tensor({1, 3}, {1, 1, 1}), Tensor({1, 3}, 0.0), Reduction::MeanPerElement).value, 1.0);
}

TEST(Mse, MatchesScalarLoop) {
    std::mt19937_64 rng(2);
    const Tensor p = random_tensor({2, 1, 4, 4}, rng), t = random_tensor({2, 1, 4, 4}, rng);
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += (p[i] - t[i]) * (p[i] - t[i]);
    EXPECT_NEAR(mse(p, t).value, s / 2.0, 1e-12);
    EXPECT_NEAR(mse(p, t, Reduction::MeanPerElement).value, s / 32.0, 1e-12);
}

TEST(Mse, SymmetricAndPermutationInvariant) {
    std::mt19937_64 rng(3);
    const Tensor p = random_tensor({1, 1, 5, 5}, rng), t = random_tensor({1, 1, 5, 5}, rng);
    EXPECT_NEAR(mse(p, t).value, mse(t, p).value, 1e-15);
    std::vector<std::size_t> perm(25);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Tensor pp(p.shape()), tp(t.shape());
    for (std::size_t i = 0; i < 25; ++i) pp[i] = p[perm[i]], tp[i] = t[perm[i]];
    EXPECT_NEAR(mse(pp, tp).value, mse(p, t).value, 1e-12);
}

TEST(Mse, RejectsShapeMismatch) { EXPECT_THROW(mse(Tensor({1, 4}), Tensor({1, 3})), std::invalid_argument); }

TEST(Mse, ReductionNamesRoundTrip) {
    for (auto r : {Reduction::SumPerSample, Reduction::MeanPerElement}) EXPECT_EQ(parse_reduction(to_string(r)), r);
    EXPECT_THROW(parse_reduction("median"), std::invalid_argument);
}

TEST(MseLoss, GradientIsTwoOverNTimesResidual) {
    std::mt19937_64 rng(4);
    const Tensor p = random_tensor({3, 1, 2, 2}, rng), t = random_tensor({3, 1, 2, 2}, rng);
    Graph g;
    const Var loss = mse_loss(g.parameter(p, 0), t);
    EXPECT_NEAR(loss.value()[0], mse(p, t).value, 1e-15);
    const auto grad = g.backward(loss, p.size());
    for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(grad[i], 2.0 / 3.0 * (p[i] - t[i]), 1e-15);
}

namespace {

Dataset tiny_dataset(std::size_t count, std::uint64_t seed) {
    SynthOptions o;
    o.count = count;
    o.size = 8;
    o.seed = seed;
    return synth_generate(o);
}

ArchitectureSpec tiny_spec() {
    ArchitectureSpec s;
    s.depth = 2;
    s.base_channels = 2;
    return s;
}

}  // namespace

TEST(NetworkLoss, ValueIsIndependentOfChunkSize) {
    const Dataset data = tiny_dataset(11, 1);
    const Model model(tiny_spec());
    const ParamSet params = init_params(model, 2);
    for (auto reduction : {Reduction::SumPerSample, Reduction::MeanPerElement}) {
        const double reference = NetworkLoss(model, data, reduction, 16).value(params.values());
        for (std::size_t chunk : {1u, 3u, 5u, 11u}) {
            const NetworkLoss loss(model, data, reduction, chunk);
            EXPECT_EQ(loss.value(params.values()), reference);
            std::vector<double> g;
            EXPECT_EQ(loss.value_and_gradient(params.values(), g), reference);
        }
    }
}

TEST(NetworkLoss, MatchesDirectMse) {
    const Dataset data = tiny_dataset(5, 3);
    const Model model(tiny_spec());
    const ParamSet params = init_params(model, 4);
    std::vector<std::size_t> all(5);
    std::iota(all.begin(), all.end(), 0);
    const Tensor pred = model.forward(params, stack_inputs(data, all));
    EXPECT_NEAR(dataset_loss(model, params, data), mse(pred, stack_targets(data, all)).value, 1e-12);
}

TEST(NetworkLoss, FullBatchGradientIsSizeWeightedMeanOfPerSampleGradients) {
    const Dataset data = tiny_dataset(6, 5);
    const Model model(tiny_spec());
    const ParamSet params = init_params(model, 6);
    std::vector<double> full;
    NetworkLoss(model, data, Reduction::SumPerSample).value_and_gradient(params.values(), full);
    std::vector<double> mean(full.size(), 0.0);
    for (std::size_t i = 0; i < data.size(); ++i) {
        Dataset one;
        one.pairs = {data.pairs[i]};
        std::vector<double> g;
        NetworkLoss(model, one, Reduction::SumPerSample).value_and_gradient(params.values(), g);
        for (std::size_t k = 0; k < g.size(); ++k) mean[k] += g[k] / static_cast<double>(data.size());
    }
    for (std::size_t k = 0; k < full.size(); ++k) EXPECT_NEAR(full[k], mean[k], 1e-10 * (1.0 + std::abs(full[k])));
}

TEST(NetworkLoss, GradientMatchesFiniteDifferences) {
    const Dataset data = tiny_dataset(4, 7);
    const Model model(tiny_spec());
    const NetworkLoss loss(model, data, Reduction::MeanPerElement, 3);
    const DifferentiableFn fn = [&](std::span<const double> p, std::vector<double>* g) {
        return g ? loss.value_and_gradient(p, *g) : loss.value(p);
    };
    std::mt19937_64 rng(8);
    std::vector<std::size_t> idx(10);
    std::uniform_int_distribution<std::size_t> pick(0, model.param_count() - 1);
    for (auto& i : idx) i = pick(rng);
    EXPECT_LT(grad_check(fn, init_params(model, 9).values(), 1e-5, idx).max_relative_error, 1e-3);
}

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fcnscape/gradcheck.hpp"
#include "fcnscape/graph.hpp"
#include "fcnscape/objective.hpp"
#include "fcnscape/ops.hpp"
#include "grad_probes.hpp"
#include "toy_losses.hpp"

using namespace fcnscape;
using namespace fcnscape::testing;

namespace {

Tensor run_conv(const Tensor& x, const Tensor& w, const Tensor& b, std::size_t stride, std::size_t pad) {
    Graph g;
    return conv2d(g.constant(x), g.constant(w), g.constant(b), stride, pad).value();
}

Tensor naive_conv(const Tensor& x, const Tensor& w, const Tensor& b, std::size_t stride, std::size_t pad) {
    const std::size_t B = x.dim(0), Cin = x.dim(1), H = x.dim(2), W = x.dim(3);
    const std::size_t Cout = w.dim(0), k = w.dim(2);
    const std::size_t Ho = (H + 2 * pad - k) / stride + 1, Wo = (W + 2 * pad - k) / stride + 1;
    Tensor y({B, Cout, Ho, Wo});
    for (std::size_t n = 0; n < B; ++n)
        for (std::size_t o = 0; o < Cout; ++o)
            for (std::size_t i = 0; i < Ho; ++i)
                for (std::size_t j = 0; j < Wo; ++j) {
                    double s = b[o];
                    for (std::size_t c = 0; c < Cin; ++c)
                        for (std::size_t a = 0; a < k; ++a)
                            for (std::size_t d = 0; d < k; ++d) {
                                const long r = static_cast<long>(i * stride + a) - static_cast<long>(pad);
                                const long q = static_cast<long>(j * stride + d) - static_cast<long>(pad);
                                if (r < 0 || q < 0 || r >= static_cast<long>(H) || q >= static_cast<long>(W))
                                    continue;
                                s += x.at(n, c, r, q) * w.at(o, c, a, d);
                            }
                    y.at(n, o, i, j) = s;
                }
    return y;
}

}  // namespace

TEST(Conv2d, OnesTimesTwo) {
    const Tensor y = run_conv(Tensor({1, 1, 3, 3}, 1.0), Tensor({1, 1, 1, 1}, 2.0), Tensor({1}, 0.0), 1, 0);
    EXPECT_EQ(y.shape(), (Shape{1, 1, 3, 3}));
    for (double v : y.data()) EXPECT_EQ(v, 2.0);
}

TEST(Conv2d, OnesKernelSumsNeighbourhood) {
    std::mt19937_64 rng(1);
    const Tensor x = random_tensor({1, 1, 5, 5}, rng);
    const Tensor y = run_conv(x, Tensor({1, 1, 3, 3}, 1.0), Tensor({1}, 0.0), 1, 1);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            double s = 0.0;
            for (int a = -1; a <= 1; ++a)
                for (int b = -1; b <= 1; ++b)
                    if (i + a >= 0 && i + a < 5 && j + b >= 0 && j + b < 5) s += x.at(0, 0, i + a, j + b);
            EXPECT_NEAR(y.at(0, 0, i, j), s, 1e-12);
        }
}

TEST(Conv2d, ZeroWeightGivesBias) {
    std::mt19937_64 rng(2);
    const Tensor y = run_conv(random_tensor({2, 3, 6, 6}, rng), Tensor({2, 3, 3, 3}, 0.0), Tensor({2}, {0.5, -1.5}), 1, 1);
    for (std::size_t n = 0; n < 2; ++n)
        for (std::size_t i = 0; i < 36; ++i) {
            EXPECT_EQ(y[(n * 2 + 0) * 36 + i], 0.5);
            EXPECT_EQ(y[(n * 2 + 1) * 36 + i], -1.5);
        }
}

TEST(Conv2d, MatchesNestedLoopReferenceUpTo2x4x8x8) {
    std::mt19937_64 rng(3);
    for (std::size_t B : {1u, 2u})
        for (std::size_t Cin : {1u, 3u, 4u})
            for (std::size_t H : {3u, 5u, 8u})
                for (std::size_t k : {1u, 3u, 5u})
                    for (std::size_t stride : {1u, 2u})
                        for (std::size_t pad : {std::size_t{0}, k / 2}) {
                            if (H + 2 * pad < k) continue;
                            const Tensor x = random_tensor({B, Cin, H, 8}, rng);
                            const Tensor w = random_tensor({2, Cin, k, k}, rng);
                            const Tensor b = random_tensor({2}, rng);
                            const Tensor got = run_conv(x, w, b, stride, pad);
                            const Tensor want = naive_conv(x, w, b, stride, pad);
                            ASSERT_EQ(got.shape(), want.shape());
                            for (std::size_t i = 0; i < got.size(); ++i) ASSERT_NEAR(got[i], want[i], 1e-12);
                        }
}

TEST(Conv2d, RejectsChannelMismatchWithShapes) {
    try {
        run_conv(Tensor({1, 2, 4, 4}), Tensor({1, 3, 3, 3}), Tensor({1}), 1, 1);
        FAIL();
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("channels"), std::string::npos);
    }
}

TEST(Conv2d, RejectsEvenOrOversizedKernels) {
    EXPECT_THROW(run_conv(Tensor({1, 1, 9, 9}), Tensor({1, 1, 2, 2}), Tensor({1}), 1, 0), std::invalid_argument);
    EXPECT_THROW(run_conv(Tensor({1, 1, 9, 9}), Tensor({1, 1, 9, 9}), Tensor({1}), 1, 0), std::invalid_argument);
}

TEST(MaxPool, PicksWindowMaximum) {
    Graph g;
    const Tensor y = maxpool2d(g.constant(Tensor({1, 1, 2, 2}, {1, 2, 3, 4})), 2).value();
    EXPECT_EQ(y.shape(), (Shape{1, 1, 1, 1}));
    EXPECT_EQ(y[0], 4.0);
}

TEST(MaxPool, MatchesBruteForceOnRandomInputs) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 10; ++trial) {
        const Tensor x = random_tensor({2, 3, 4, 4}, rng);
        Graph g;
        const Tensor y = maxpool2d(g.constant(x), 2).value();
        for (std::size_t n = 0; n < 2; ++n)
            for (std::size_t c = 0; c < 3; ++c)
                for (std::size_t i = 0; i < 2; ++i)
                    for (std::size_t j = 0; j < 2; ++j) {
                        double m = -1e9;
                        for (std::size_t a = 0; a < 2; ++a)
                            for (std::size_t b = 0; b < 2; ++b) m = std::max(m, x.at(n, c, 2 * i + a, 2 * j + b));
                        EXPECT_EQ(y.at(n, c, i, j), m);
                    }
    }
}

TEST(MaxPool, TiesRouteGradientToFirstElementOnly) {
    Graph g;
    const Var x = g.parameter(Tensor({1, 1, 4, 4}, 0.7), 0);
    const auto grad = g.backward(sum(maxpool2d(x, 2)), 16);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(grad[i * 4 + j], (i % 2 == 0 && j % 2 == 0) ? 1.0 : 0.0);
}

TEST(MaxPool, GradientMassLandsOnArgmaxAndIsConserved) {
    std::mt19937_64 rng(5);
    const Tensor x = random_tensor({1, 2, 6, 6}, rng);
    const Tensor up = random_tensor({1, 2, 3, 3}, rng);
    Graph g;
    const Var xv = g.parameter(x, 0);
    const auto grad = g.backward(sum(mul(maxpool2d(xv, 2), g.constant(up))), x.size());
    double deposited = 0.0, upstream = 0.0;
    for (double v : up.data()) upstream += v;
    for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) {
                std::size_t best = 0;
                double m = -1e9;
                for (std::size_t a = 0; a < 2; ++a)
                    for (std::size_t b = 0; b < 2; ++b) {
                        const std::size_t idx = (c * 6 + 2 * i + a) * 6 + 2 * j + b;
                        if (x[idx] > m) m = x[idx], best = idx;
                    }
                for (std::size_t a = 0; a < 2; ++a)
                    for (std::size_t b = 0; b < 2; ++b) {
                        const std::size_t idx = (c * 6 + 2 * i + a) * 6 + 2 * j + b;
                        EXPECT_EQ(grad[idx], idx == best ? up.at(0, c, i, j) : 0.0);
                    }
            }
    for (double v : grad) deposited += v;
    EXPECT_NEAR(deposited, upstream, 1e-12);
}

TEST(MaxPool, RejectsIndivisibleExtents) {
    Graph g;
    EXPECT_THROW(maxpool2d(g.constant(Tensor({1, 1, 5, 4})), 2), std::invalid_argument);
}

TEST(Upsample, SingleInputWithOnesKernelFillsBlock) {
    Graph g;
    const Tensor y = upsample2x(g.constant(Tensor({1, 1, 1, 1}, {3.5})), g.constant(Tensor({1, 1, 2, 2}, 1.0))).value();
    EXPECT_EQ(y.shape(), (Shape{1, 1, 2, 2}));
    for (double v : y.data()) EXPECT_EQ(v, 3.5);
}

TEST(Upsample, MatchesScatterReference) {
    std::mt19937_64 rng(6);
    const Tensor x = random_tensor({2, 3, 3, 4}, rng);
    const Tensor w = random_tensor({5, 3, 2, 2}, rng);
    Graph g;
    const Tensor y = upsample2x(g.constant(x), g.constant(w)).value();
    ASSERT_EQ(y.shape(), (Shape{2, 5, 6, 8}));
    Tensor want({2, 5, 6, 8});
    for (std::size_t n = 0; n < 2; ++n)
        for (std::size_t c = 0; c < 3; ++c)
            for (std::size_t i = 0; i < 3; ++i)
                for (std::size_t j = 0; j < 4; ++j)
                    for (std::size_t o = 0; o < 5; ++o)
                        for (std::size_t a = 0; a < 2; ++a)
                            for (std::size_t b = 0; b < 2; ++b)
                                want.at(n, o, 2 * i + a, 2 * j + b) += x.at(n, c, i, j) * w.at(o, c, a, b);
    for (std::size_t i = 0; i < y.size(); ++i) EXPECT_NEAR(y[i], want[i], 1e-12);
}

TEST(Upsample, IdentityKernelDuplicatesNearestNeighbour) {
    std::mt19937_64 rng(7);
    const Tensor x = random_tensor({1, 2, 3, 3}, rng);
    Tensor w({2, 2, 2, 2});
    for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t a = 0; a < 2; ++a)
            for (std::size_t b = 0; b < 2; ++b) w.at(c, c, a, b) = 1.0;
    Graph g;
    const Tensor y = upsample2x(g.constant(x), g.constant(w)).value();
    for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t j = 0; j < 6; ++j) EXPECT_EQ(y.at(0, c, i, j), x.at(0, c, i / 2, j / 2));
}

TEST(Upsample, ZeroKernelGivesZero) {
    std::mt19937_64 rng(8);
    Graph g;
    const Tensor y = upsample2x(g.constant(random_tensor({1, 2, 2, 2}, rng)), g.constant(Tensor({3, 2, 2, 2}))).value();
    for (double v : y.data()) EXPECT_EQ(v, 0.0);
}

TEST(Elementwise, ReluAddConcat) {
    Graph g;
    EXPECT_EQ(relu(g.constant(Tensor({3}, {-1, 0, 2}))).value().to_vector(), (std::vector<double>{0, 0, 2}));
    std::mt19937_64 rng(9);
    const Tensor a = random_tensor({2, 3, 4, 4}, rng);
    const Tensor b = random_tensor({2, 5, 4, 4}, rng);
    EXPECT_EQ(add(g.constant(a), g.constant(Tensor(a.shape()))).value(), a);
    const Tensor c = concat_channels(g.constant(a), g.constant(b)).value();
    EXPECT_EQ(c.dim(1), 8u);
    EXPECT_EQ(slice_channels(c, 0, 3), a);
    EXPECT_EQ(slice_channels(c, 3, 5), b);
    EXPECT_THROW(add(g.constant(a), g.constant(b)), std::invalid_argument);
    EXPECT_THROW(concat_channels(g.constant(a), g.constant(Tensor({2, 1, 2, 4}))), std::invalid_argument);
}

TEST(GradCheck, Conv2dAtRandomPoints) {
    std::mt19937_64 rng(10);
    const Tensor x = random_tensor({2, 3, 5, 5}, rng);
    const std::size_t nx = x.size(), nw = 2 * 3 * 9, nb = 2;
    for (std::size_t stride : {1u, 2u}) {
        const Builder build = [&](Graph& g, std::span<const double> p) {
            return conv2d(leaf(g, p, 0, {2, 3, 5, 5}), leaf(g, p, nx, {2, 3, 3, 3}), leaf(g, p, nx + nw, {2}), stride,
                          1);
        };
        const auto fn = probe_fn(build, nx + nw + nb);
        for (int trial = 0; trial < 10; ++trial) {
            const auto point = random_point(nx + nw + nb, rng);
            EXPECT_LT(grad_check(fn, point).max_relative_error, 1e-4);
        }
    }
}

TEST(GradCheck, MaxPoolAwayFromTies) {
    std::mt19937_64 rng(11);
    const Builder build = [](Graph& g, std::span<const double> p) { return maxpool2d(leaf(g, p, 0, {1, 2, 4, 4}), 2); };
    const auto fn = probe_fn(build, 32);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> point(32);
        for (std::size_t i = 0; i < 32; ++i) point[i] = 0.05 * static_cast<double>(i);
        std::shuffle(point.begin(), point.end(), rng);
        EXPECT_LT(grad_check(fn, point).max_relative_error, 1e-4);
    }
}

TEST(GradCheck, UpsampleAtRandomPoints) {
    std::mt19937_64 rng(12);
    const std::size_t nx = 2 * 3 * 3 * 3, nw = 4 * 3 * 4;
    const Builder build = [&](Graph& g, std::span<const double> p) {
        return upsample2x(leaf(g, p, 0, {2, 3, 3, 3}), leaf(g, p, nx, {4, 3, 2, 2}));
    };
    const auto fn = probe_fn(build, nx + nw);
    for (int trial = 0; trial < 10; ++trial)
        EXPECT_LT(grad_check(fn, random_point(nx + nw, rng)).max_relative_error, 1e-4);
}

TEST(GradCheck, ReluAwayFromKink) {
    std::mt19937_64 rng(13);
    const Builder build = [](Graph& g, std::span<const double> p) { return relu(leaf(g, p, 0, {2, 2, 3, 3})); };
    const auto fn = probe_fn(build, 36);
    for (int trial = 0; trial < 10; ++trial)
        EXPECT_LT(grad_check(fn, random_point(36, rng, 0.1)).max_relative_error, 1e-6);
}

TEST(GradCheck, AddMulConcat) {
    std::mt19937_64 rng(14);
    const Builder build = [](Graph& g, std::span<const double> p) {
        const Var a = leaf(g, p, 0, {1, 2, 3, 3});
        const Var b = leaf(g, p, 18, {1, 2, 3, 3});
        const Var c = leaf(g, p, 36, {1, 1, 3, 3});
        return concat_channels(mul(add(a, b), b), c);
    };
    const auto fn = probe_fn(build, 45);
    for (int trial = 0; trial < 10; ++trial)
        EXPECT_LT(grad_check(fn, random_point(45, rng)).max_relative_error, 1e-4);
}

TEST(GradCheck, MseLoss) {
    std::mt19937_64 rng(15);
    const Tensor target = random_tensor({2, 1, 3, 3}, rng);
    for (auto reduction : {Reduction::SumPerSample, Reduction::MeanPerElement}) {
        const DifferentiableFn fn = [&](std::span<const double> p, std::vector<double>* grad) {
            Graph g;
            const Var loss = mse_loss(leaf(g, p, 0, {2, 1, 3, 3}), target, reduction);
            if (grad) *grad = g.backward(loss, 18);
            return loss.value()[0];
        };
        for (int trial = 0; trial < 10; ++trial)
            EXPECT_LT(grad_check(fn, random_point(18, rng)).max_relative_error, 1e-6);
    }
}

TEST(GradCheck, ReportsLargeErrorForWrongGradient) {
    const DifferentiableFn wrong = [](std::span<const double> p, std::vector<double>* grad) {
        if (grad) *grad = {p[0]};
        return p[0] * p[0];
    };
    const std::vector<double> point{1.0};
    EXPECT_GT(grad_check(wrong, point).max_relative_error, 0.4);
}

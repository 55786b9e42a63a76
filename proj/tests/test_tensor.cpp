#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "fcnscape/graph.hpp"
#include "fcnscape/ops.hpp"
#include "fcnscape/tensor.hpp"

using namespace fcnscape;

TEST(Tensor, ShapeMatchesDataLength) {
    Tensor t({2, 3, 4});
    EXPECT_EQ(t.size(), 24u);
    EXPECT_EQ(t.rank(), 3u);
    EXPECT_EQ(t.dim(1), 3u);
    EXPECT_THROW(Tensor({2, 2}, std::vector<double>(3)), std::invalid_argument);
}

TEST(Tensor, RejectsZeroExtent) { EXPECT_THROW(Tensor({2, 0}), std::invalid_argument); }

TEST(Tensor, FourDimensionalIndexingIsRowMajor) {
    Tensor t({2, 3, 4, 5});
    t.at(1, 2, 3, 4) = 7.0;
    EXPECT_EQ(t[((1 * 3 + 2) * 4 + 3) * 5 + 4], 7.0);
}

TEST(Tensor, ReshapeKeepsData) {
    Tensor t({2, 3}, {1, 2, 3, 4, 5, 6});
    const Tensor r = t.reshaped({3, 2});
    EXPECT_EQ(r.shape(), (Shape{3, 2}));
    EXPECT_EQ(r.to_vector(), t.to_vector());
    EXPECT_THROW(t.reshaped({4, 2}), std::invalid_argument);
}

TEST(Tensor, AllFiniteDetectsNanAndInf) {
    std::vector<double> ok{1.0, -2.0};
    std::vector<double> nan{1.0, std::numeric_limits<double>::quiet_NaN()};
    std::vector<double> inf{std::numeric_limits<double>::infinity()};
    EXPECT_TRUE(all_finite(ok));
    EXPECT_FALSE(all_finite(nan));
    EXPECT_FALSE(all_finite(inf));
}

TEST(Graph, BackwardOfDotProductIsTheFixedOperand) {
    Graph g;
    const Tensor x({1, 1, 1, 4}, {1.5, -2.0, 0.25, 3.0});
    const Var w = g.parameter(Tensor({1, 1, 1, 4}, {0.1, 0.2, 0.3, 0.4}), 0);
    const Var loss = sum(mul(w, g.constant(x)));
    const auto grad = g.backward(loss, 4);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(grad[i], x[i]);
}

TEST(Graph, RejectsNonScalarRoot) {
    Graph g;
    const Var w = g.parameter(Tensor({2}, {1.0, 2.0}), 0);
    const Var y = relu(w);
    EXPECT_THROW(g.backward(y, 2), std::invalid_argument);
}

TEST(Graph, UnusedParametersGetZeroGradient) {
    Graph g;
    const Var used = g.parameter(Tensor({1}, {2.0}), 0);
    g.parameter(Tensor({1}, {5.0}), 1);
    const auto grad = g.backward(sum(mul(used, used)), 3);
    EXPECT_EQ(grad[0], 4.0);
    EXPECT_EQ(grad[1], 0.0);
    EXPECT_EQ(grad[2], 0.0);
}

TEST(Graph, ZeroUpstreamGivesZeroGradient) {
    Graph g;
    const Var w = g.parameter(Tensor({3}, {1.0, -1.0, 2.0}), 0);
    const Var zero = g.constant(Tensor({3}, 0.0));
    const auto grad = g.backward(sum(mul(relu(w), zero)), 3);
    for (double x : grad) EXPECT_EQ(x, 0.0);
}

TEST(Graph, SharedNodeAccumulatesGradientFromBothUses) {
    Graph g;
    const Var w = g.parameter(Tensor({1}, {3.0}), 0);
    const Var y = add(w, w);
    const auto grad = g.backward(sum(mul(y, w)), 1);
    // d/dw (2w * w) = 4w
    EXPECT_EQ(grad[0], 12.0);
}

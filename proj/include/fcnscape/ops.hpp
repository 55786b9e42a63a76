#pragma once

#include <cstddef>

#include "fcnscape/graph.hpp"

namespace fcnscape {

inline constexpr std::size_t kMaxKernel = 7;

// Cross-correlation. input [B,Cin,H,W], weight [Cout,Cin,k,k], bias [Cout];
// k odd and at most kMaxKernel.
Var conv2d(Var input, Var weight, Var bias, std::size_t stride = 1, std::size_t padding = 0);

// Non-overlapping max pooling. Ties resolve to the first element of the
// window in row-major order.
Var maxpool2d(Var input, std::size_t window = 2);

// Stride-2 transposed convolution with a 2x2 kernel. weight is laid out
// [Cout,Cin,2,2] so every output-channel filter is contiguous.
Var upsample2x(Var input, Var weight);

Var relu(Var input);
Var add(Var a, Var b);
Var mul(Var a, Var b);
Var concat_channels(Var a, Var b);
Var sum(Var input);

}  // namespace fcnscape

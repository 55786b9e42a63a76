#include "fcnscape/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace fcnscape {

std::size_t shape_size(const Shape& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string to_string(const Shape& shape) {
    std::string out = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(shape[i]);
    }
    return out + "]";
}

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)), data_(shape_size(shape_), fill) {
    for (auto extent : shape_)
        if (extent == 0) throw std::invalid_argument("tensor extents must be positive, got " + to_string(shape_));
}

Tensor::Tensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(data.begin(), data.end()) {
    for (auto extent : shape_)
        if (extent == 0) throw std::invalid_argument("tensor extents must be positive, got " + to_string(shape_));
    if (shape_size(shape_) != data_.size())
        throw std::invalid_argument("tensor shape " + to_string(shape_) + " does not match " +
                                    std::to_string(data_.size()) + " elements");
}

double& Tensor::at(std::size_t n, std::size_t c, std::size_t h, std::size_t w) {
    return data_[((n * shape_[1] + c) * shape_[2] + h) * shape_[3] + w];
}

double Tensor::at(std::size_t n, std::size_t c, std::size_t h, std::size_t w) const {
    return data_[((n * shape_[1] + c) * shape_[2] + h) * shape_[3] + w];
}

Tensor Tensor::reshaped(Shape shape) const {
    if (shape_size(shape) != data_.size())
        throw std::invalid_argument("reshape: cannot view " + std::to_string(data_.size()) + " elements as " +
                                    to_string(shape));
    Tensor out = *this;
    out.shape_ = std::move(shape);
    return out;
}

Tensor slice_channels(const Tensor& t, std::size_t first, std::size_t count) {
    if (t.rank() != 4 || first + count > t.dim(1) || count == 0)
        throw std::invalid_argument("slice_channels: cannot take " + std::to_string(count) + " channels from " +
                                    std::to_string(first) + " of " + to_string(t.shape()));
    const std::size_t batch = t.dim(0), channels = t.dim(1), plane = t.dim(2) * t.dim(3);
    Tensor out({batch, count, t.dim(2), t.dim(3)});
    for (std::size_t n = 0; n < batch; ++n) {
        auto src = t.data().begin() + static_cast<std::ptrdiff_t>((n * channels + first) * plane);
        std::copy(src, src + static_cast<std::ptrdiff_t>(count * plane),
                  out.data().begin() + static_cast<std::ptrdiff_t>(n * count * plane));
    }
    return out;
}

bool all_finite(std::span<const double> values) {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace fcnscape

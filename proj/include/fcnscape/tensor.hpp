#pragma once

#include <cstddef>
#include <new>
#include <span>
#include <string>
#include <vector>

namespace fcnscape {

using Shape = std::vector<std::size_t>;

// Cache-line aligned storage, so vectorized kernels see the same alignment on
// every run and produce bit-identical sums.
template <class T>
struct AlignedAllocator {
    using value_type = T;
    static constexpr std::align_val_t alignment{64};

    AlignedAllocator() = default;
    template <class U>
    AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

    T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), alignment)); }
    void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, alignment); }

    template <class U>
    bool operator==(const AlignedAllocator<U>&) const noexcept {
        return true;
    }
};

using AlignedVector = std::vector<double, AlignedAllocator<double>>;

std::size_t shape_size(const Shape& shape);
std::string to_string(const Shape& shape);

// Dense row-major array of doubles. 4-D tensors are laid out (batch, channel, height, width).
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(Shape shape, double fill = 0.0);
    Tensor(Shape shape, std::vector<double> data);

    const Shape& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }
    std::vector<double> to_vector() const { return {data_.begin(), data_.end()}; }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    double& at(std::size_t n, std::size_t c, std::size_t h, std::size_t w);
    double at(std::size_t n, std::size_t c, std::size_t h, std::size_t w) const;

    Tensor reshaped(Shape shape) const;

    bool operator==(const Tensor& other) const = default;

private:
    Shape shape_;
    AlignedVector data_;
};

// Copies channels [first, first + count) of a 4-D tensor.
Tensor slice_channels(const Tensor& t, std::size_t first, std::size_t count);

bool all_finite(std::span<const double> values);

}  // namespace fcnscape

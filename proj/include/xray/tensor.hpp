#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "xray/error.hpp"

namespace xray {

using Shape = std::vector<std::size_t>;

inline std::size_t shape_size(const Shape& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>{});
}

inline std::string shape_string(const Shape& shape) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << ',';
        os << shape[i];
    }
    os << ']';
    return os.str();
}

/// Dense row-major n-dimensional array. `float` for training and inference,
/// `double` for gradient checking.
template <typename T>
class BasicTensor {
public:
    using value_type = T;

    BasicTensor() = default;

    explicit BasicTensor(Shape shape, T fill = T{0}) : shape_(std::move(shape)) {
        for (auto extent : shape_) {
            if (extent == 0) {
                throw Error(ErrorCode::shape, "tensor extent must be positive, got " + shape_string(shape_));
            }
        }
        data_.assign(shape_size(shape_), fill);
    }

    BasicTensor(Shape shape, std::vector<T> data) : shape_(std::move(shape)), data_(std::move(data)) {
        if (shape_size(shape_) != data_.size()) {
            throw Error(ErrorCode::shape, "tensor data length " + std::to_string(data_.size()) +
                                              " does not match shape " + shape_string(shape_));
        }
    }

    const Shape& shape() const noexcept { return shape_; }
    std::size_t rank() const noexcept { return shape_.size(); }
    std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    std::span<T> data() noexcept { return data_; }
    std::span<const T> data() const noexcept { return data_; }
    T* raw() noexcept { return data_.data(); }
    const T* raw() const noexcept { return data_.data(); }

    T& operator[](std::size_t i) noexcept { return data_[i]; }
    const T& operator[](std::size_t i) const noexcept { return data_[i]; }

    T& at(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }
    const T& at(std::size_t i, std::size_t j) const { return data_[i * shape_[1] + j]; }
    T& at(std::size_t i, std::size_t j, std::size_t k) { return data_[(i * shape_[1] + j) * shape_[2] + k]; }
    const T& at(std::size_t i, std::size_t j, std::size_t k) const {
        return data_[(i * shape_[1] + j) * shape_[2] + k];
    }
    T& at(std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
        return data_[((i * shape_[1] + j) * shape_[2] + k) * shape_[3] + l];
    }
    const T& at(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
        return data_[((i * shape_[1] + j) * shape_[2] + k) * shape_[3] + l];
    }

    void fill(T value) { std::fill(data_.begin(), data_.end(), value); }

    /// Same data, new shape of equal element count.
    BasicTensor reshaped(Shape shape) const { return BasicTensor(std::move(shape), data_); }

    template <typename U>
    BasicTensor<U> cast() const {
        return BasicTensor<U>(shape_, std::vector<U>(data_.begin(), data_.end()));
    }

    bool all_finite() const;

    friend bool operator==(const BasicTensor&, const BasicTensor&) = default;

private:
    Shape shape_;
    std::vector<T> data_;
};

template <typename T>
bool BasicTensor<T>::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](T v) { return v - v == T{0}; });
}

using Tensor = BasicTensor<float>;
using Tensor64 = BasicTensor<double>;

/// Throws a shape error naming `what` unless `actual` equals `expected`.
inline void expect_extent(std::size_t actual, std::size_t expected, const std::string& what) {
    if (actual != expected) {
        throw Error(ErrorCode::shape, what + ": expected " + std::to_string(expected) + ", got " +
                                          std::to_string(actual));
    }
}

inline void expect_rank(const Shape& shape, std::size_t rank, const std::string& what) {
    if (shape.size() != rank) {
        throw Error(ErrorCode::shape, what + ": expected rank " + std::to_string(rank) + ", got shape " +
                                          shape_string(shape));
    }
}

}  // namespace xray

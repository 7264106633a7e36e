#pragma once

#include <cstdint>
#include <vector>

#include "xray/rng.hpp"
#include "xray/tensor.hpp"

// Layer kernels of the network. Two implementations share one interface:
//
//   xray::kernels    loop-ordered for vectorization and split across OpenMP
//                    threads along an output axis. Every output element is
//                    reduced in a fixed order, so results are bit-identical for
//                    any thread count.
//   xray::reference  straightforward single-threaded loops, kept as the
//                    baseline for tests and benchmarks. Agrees with the
//                    parallel kernels to 1e-5 relative.
//
// Layouts: feature maps [C,H,W], convolution kernels [K,C,S,S] (S = kernel side),
// dense weights [M,N] mapping an N-vector to an M-vector.

namespace xray {

template <typename T>
struct Conv2dGrads {
    BasicTensor<T> input;  // empty when not requested
    BasicTensor<T> kernels;
    BasicTensor<T> bias;
};

template <typename T>
struct PoolResult {
    BasicTensor<T> output;
    /// Flat index into the pooled input of each output cell's maximum.
    std::vector<std::uint32_t> argmax;
    Shape input_shape;
};

template <typename T>
struct DenseGrads {
    BasicTensor<T> input;
    BasicTensor<T> weights;
    BasicTensor<T> bias;
};

template <typename T>
struct DropoutResult {
    BasicTensor<T> output;
    /// Per-element multiplier: 0 for dropped, 1/(1-rate) for kept.
    BasicTensor<T> mask;
};

/// Output extent of a valid (unpadded, stride 1) convolution.
constexpr std::size_t conv_extent(std::size_t in, std::size_t kernel_side) {
    return in >= kernel_side ? in - kernel_side + 1 : 0;
}

/// Output extent of non-overlapping pooling; trailing rows/columns are dropped.
constexpr std::size_t pool_extent(std::size_t in, std::size_t pool_side) { return in / pool_side; }

namespace kernels {

template <typename T>
BasicTensor<T> conv2d_forward(const BasicTensor<T>& input, const BasicTensor<T>& kernels,
                              const BasicTensor<T>& bias);

/// Gradients of conv2d_forward given the forward input and dL/d(output).
/// The input gradient is skipped when `need_input_grad` is false (first layer).
template <typename T>
Conv2dGrads<T> conv2d_backward(const BasicTensor<T>& input, const BasicTensor<T>& kernels,
                               const BasicTensor<T>& upstream, bool need_input_grad = true);

template <typename T>
PoolResult<T> maxpool2d_forward(const BasicTensor<T>& input, std::size_t pool_side = 2);

template <typename T>
BasicTensor<T> maxpool2d_backward(const std::vector<std::uint32_t>& argmax, const Shape& input_shape,
                                  const BasicTensor<T>& upstream);

template <typename T>
BasicTensor<T> dense_forward(const BasicTensor<T>& input, const BasicTensor<T>& weights,
                             const BasicTensor<T>& bias);

template <typename T>
DenseGrads<T> dense_backward(const BasicTensor<T>& input, const BasicTensor<T>& weights,
                             const BasicTensor<T>& upstream);

template <typename T>
BasicTensor<T> relu(const BasicTensor<T>& input);

/// Passes upstream where input > 0; zero elsewhere, including input == 0.
template <typename T>
BasicTensor<T> relu_backward(const BasicTensor<T>& input, const BasicTensor<T>& upstream);

/// Inverted dropout. Identity (with an all-ones mask) outside training.
template <typename T>
DropoutResult<T> dropout(const BasicTensor<T>& input, double rate, bool training, Rng& rng);

template <typename T>
BasicTensor<T> dropout_backward(const BasicTensor<T>& mask, const BasicTensor<T>& upstream);

template <typename T>
BasicTensor<T> sigmoid(const BasicTensor<T>& input);

}  // namespace kernels

namespace reference {

template <typename T>
BasicTensor<T> conv2d_forward(const BasicTensor<T>& input, const BasicTensor<T>& kernels,
                              const BasicTensor<T>& bias);

template <typename T>
Conv2dGrads<T> conv2d_backward(const BasicTensor<T>& input, const BasicTensor<T>& kernels,
                               const BasicTensor<T>& upstream, bool need_input_grad = true);

template <typename T>
PoolResult<T> maxpool2d_forward(const BasicTensor<T>& input, std::size_t pool_side = 2);

template <typename T>
BasicTensor<T> dense_forward(const BasicTensor<T>& input, const BasicTensor<T>& weights,
                             const BasicTensor<T>& bias);

template <typename T>
DenseGrads<T> dense_backward(const BasicTensor<T>& input, const BasicTensor<T>& weights,
                             const BasicTensor<T>& upstream);

}  // namespace reference

namespace detail {

struct ConvDims {
    std::size_t channels, height, width, kernel_count, kernel_side, out_height, out_width;
};

template <typename T>
ConvDims check_conv(const BasicTensor<T>& input, const BasicTensor<T>& kernels, const BasicTensor<T>& bias);

template <typename T>
void check_dense(const BasicTensor<T>& input, const BasicTensor<T>& weights, const BasicTensor<T>& bias);

}  // namespace detail

}  // namespace xray

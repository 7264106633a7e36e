#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xray/kernels.hpp"
#include "xray/rng.hpp"
#include "xray/tensor.hpp"

namespace xray {

enum class Head { sigmoid, svm };

std::string to_string(Head head);
Head parse_head(const std::string& text);

struct ConvBlock {
    std::size_t kernel_count;
    std::size_t kernel_side = 3;
    std::size_t pool_side = 2;

    friend bool operator==(const ConvBlock&, const ConvBlock&) = default;
};

/// Architecture of the classifier:
///   [conv(k x k, valid) -> ReLU -> maxpool] per conv block -> flatten
///   -> [dense -> ReLU -> dropout] per hidden width -> dense(output_units) -> head
/// Defaults: two blocks of 128 and 256 3x3 kernels with 2x2 pooling,
/// hidden widths 64/32/16, 2 outputs, dropout 0.2, 64x64 grayscale input.
struct NetworkSpec {
    std::size_t input_side = 64;
    std::vector<ConvBlock> conv_blocks{{128, 3, 2}, {256, 3, 2}};
    std::vector<std::size_t> dense_widths{64, 32, 16};
    std::size_t output_units = 2;
    double dropout_rate = 0.2;
    Head head = Head::sigmoid;

    /// Throws ErrorCode::shape if any spatial extent along the forward pass falls below 1.
    void validate() const;

    /// Spatial side after each stage: input, conv1, pool1, conv2, pool2, ...
    std::vector<std::size_t> spatial_sides() const;

    std::size_t flatten_length() const;

    /// Parameter tensor shapes in declaration order (weights then bias per layer).
    std::vector<Shape> param_shapes() const;
    std::vector<std::string> param_names() const;

    friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

/// Learnable tensors in declaration order: conv1.{w,b}, conv2.{w,b}, ...,
/// dense1.{w,b}, ..., output.{w,b}. Also used for gradients and Adam moments.
template <typename T>
struct BasicParamSet {
    std::vector<BasicTensor<T>> tensors;

    static BasicParamSet zeros(const NetworkSpec& spec);

    std::size_t element_count() const;
    /// Throws ErrorCode::shape unless every tensor matches `spec`.
    void check(const NetworkSpec& spec) const;

    template <typename U>
    BasicParamSet<U> cast() const {
        BasicParamSet<U> out;
        for (const auto& t : tensors) out.tensors.push_back(t.template cast<U>());
        return out;
    }

    friend bool operator==(const BasicParamSet&, const BasicParamSet&) = default;
};

using ParamSet = BasicParamSet<float>;
using ParamSet64 = BasicParamSet<double>;

/// Everything the backward pass needs for one sample.
template <typename T>
struct SampleTrace {
    BasicTensor<T> input;
    std::vector<BasicTensor<T>> conv_pre;  // conv outputs before ReLU
    std::vector<PoolResult<T>> pools;
    std::vector<BasicTensor<T>> dense_inputs;  // input vector of each dense layer, output layer last
    std::vector<BasicTensor<T>> dense_pre;     // hidden pre-activations
    std::vector<BasicTensor<T>> dropout_masks;
    BasicTensor<T> logits;
    BasicTensor<T> outputs;
};

template <typename T>
struct ForwardTrace {
    bool training = false;
    std::vector<SampleTrace<T>> samples;
};

template <typename T>
struct ForwardResult {
    BasicTensor<T> outputs;  // [B, output_units]
    ForwardTrace<T> trace;
};

/// Glorot-uniform weights (bound sqrt(6 / (fan_in + fan_out))), zero biases.
/// For a convolution fan_in = C*k*k and fan_out = K*k*k.
template <typename T>
BasicParamSet<T> init_params(const NetworkSpec& spec, std::uint64_t seed);

double glorot_bound(std::size_t fan_in, std::size_t fan_out);

/// Runs a batch [B,1,S,S]. Sigmoid head squashes the outputs; svm head leaves raw margins.
/// Dropout masks are drawn from `rng` sample by sample when training.
template <typename T>
ForwardResult<T> forward(const NetworkSpec& spec, const BasicParamSet<T>& params, const BasicTensor<T>& batch,
                         bool training, Rng& rng);

/// Inference-mode outputs without keeping a trace.
template <typename T>
BasicTensor<T> predict(const NetworkSpec& spec, const BasicParamSet<T>& params, const BasicTensor<T>& batch);

/// Gradient of (1/B) * sum_b <output_grad[b], outputs[b]> with respect to every parameter.
/// Pass per-sample loss derivatives in `output_grad` to get the batch-mean loss gradient.
template <typename T>
BasicParamSet<T> backward(const NetworkSpec& spec, const BasicParamSet<T>& params, const ForwardTrace<T>& trace,
                          const BasicTensor<T>& output_grad);

}  // namespace xray

#pragma once

#include <cstdint>

#include "xray/network.hpp"

namespace xray {

struct AdamConfig {
    double learning_rate = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-7;
};

template <typename T>
struct AdamState {
    BasicParamSet<T> first_moment;
    BasicParamSet<T> second_moment;
    std::uint64_t step = 0;

    /// Zero moments shaped like `params`.
    static AdamState zeros_like(const BasicParamSet<T>& params);
};

/// One bias-corrected Adam update, in place:
///   t += 1; m = b1 m + (1-b1) g; v = b2 v + (1-b2) g^2
///   p -= lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps)
template <typename T>
void adam_step(BasicParamSet<T>& params, const BasicParamSet<T>& grads, AdamState<T>& state,
               const AdamConfig& config);

}  // namespace xray

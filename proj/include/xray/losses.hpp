#pragma once

#include <span>

#include "xray/dataset.hpp"
#include "xray/tensor.hpp"

namespace xray {

/// Output unit 1 is the positive (COVID-19) class, unit 0 the negative one.
inline constexpr std::size_t positive_unit = 1;

template <typename T>
struct LossResult {
    double loss = 0.0;
    /// d(loss)/d(input), same shape as the scores.
    BasicTensor<T> grad;
};

inline constexpr double bce_clamp = 1e-7;

/// Binary cross-entropy averaged over all B*2 entries. Predictions are clamped
/// to [1e-7, 1 - 1e-7]; the gradient is the derivative of the loss formula
/// evaluated at the clamped value.
template <typename T>
LossResult<T> bce_loss(const BasicTensor<T>& predictions, const BasicTensor<T>& targets);

/// Hinge loss max(0, 1 - t*s) averaged over all B*2 entries, targets in {-1, +1}
/// with exactly one +1 per row. Subgradient is -t/(2B) inside the margin and 0
/// at or beyond it.
template <typename T>
LossResult<T> hinge_loss(const BasicTensor<T>& scores, const BasicTensor<T>& targets);

/// [B,2] one-hot targets.
template <typename T>
BasicTensor<T> one_hot(std::span<const Label> labels);

/// [B,2] targets mapped to +1 for the true class and -1 otherwise.
template <typename T>
BasicTensor<T> signed_targets(std::span<const Label> labels);

/// Argmax of the two head outputs; ties go to the negative class.
template <typename T>
Label predicted_label(const BasicTensor<T>& outputs, std::size_t row) {
    return outputs.at(row, positive_unit) > outputs.at(row, 1 - positive_unit) ? Label::positive : Label::negative;
}

}  // namespace xray

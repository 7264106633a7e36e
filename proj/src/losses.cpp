#include "xray/losses.hpp"

#include <algorithm>
#include <cmath>

namespace xray {

namespace {

template <typename T>
void check_pair(const BasicTensor<T>& scores, const BasicTensor<T>& targets, const char* what) {
    expect_rank(scores.shape(), 2, std::string(what) + " scores");
    if (targets.shape() != scores.shape()) {
        throw Error(ErrorCode::shape, std::string(what) + ": targets shape " + shape_string(targets.shape()) +
                                          " differs from scores shape " + shape_string(scores.shape()));
    }
}

}  // namespace

template <typename T>
LossResult<T> bce_loss(const BasicTensor<T>& predictions, const BasicTensor<T>& targets) {
    check_pair(predictions, targets, "bce_loss");
    const double n = static_cast<double>(predictions.size());
    LossResult<T> r{0.0, BasicTensor<T>(predictions.shape())};
    double sum = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double p = std::clamp(static_cast<double>(predictions[i]), bce_clamp, 1.0 - bce_clamp);
        const double t = targets[i];
        sum += t * std::log(p) + (1.0 - t) * std::log(1.0 - p);
        r.grad[i] = static_cast<T>((-t / p + (1.0 - t) / (1.0 - p)) / n);
    }
    r.loss = -sum / n;
    return r;
}

template <typename T>
LossResult<T> hinge_loss(const BasicTensor<T>& scores, const BasicTensor<T>& targets) {
    check_pair(scores, targets, "hinge_loss");
    for (std::size_t b = 0; b < targets.dim(0); ++b) {
        std::size_t plus = 0;
        for (std::size_t o = 0; o < targets.dim(1); ++o) {
            const T t = targets.at(b, o);
            if (t != T{1} && t != T{-1}) {
                throw Error(ErrorCode::usage, "hinge targets must be +1 or -1 (row " + std::to_string(b) + ")");
            }
            plus += t == T{1};
        }
        if (plus != 1) {
            throw Error(ErrorCode::usage, "hinge targets need exactly one +1 per row (row " + std::to_string(b) + ")");
        }
    }
    const double n = static_cast<double>(scores.size());
    LossResult<T> r{0.0, BasicTensor<T>(scores.shape())};
    double sum = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const double t = targets[i];
        const double margin = 1.0 - t * static_cast<double>(scores[i]);
        if (margin > 0.0) {
            sum += margin;
            r.grad[i] = static_cast<T>(-t / n);
        }
    }
    r.loss = sum / n;
    return r;
}

template <typename T>
BasicTensor<T> one_hot(std::span<const Label> labels) {
    BasicTensor<T> t({labels.size(), 2});
    for (std::size_t b = 0; b < labels.size(); ++b) {
        t.at(b, labels[b] == Label::positive ? positive_unit : 1 - positive_unit) = T{1};
    }
    return t;
}

template <typename T>
BasicTensor<T> signed_targets(std::span<const Label> labels) {
    BasicTensor<T> t = one_hot<T>(labels);
    for (auto& v : t.data()) v = v == T{1} ? T{1} : T{-1};
    return t;
}

template LossResult<float> bce_loss(const Tensor&, const Tensor&);
template LossResult<double> bce_loss(const Tensor64&, const Tensor64&);
template LossResult<float> hinge_loss(const Tensor&, const Tensor&);
template LossResult<double> hinge_loss(const Tensor64&, const Tensor64&);
template Tensor one_hot<float>(std::span<const Label>);
template Tensor64 one_hot<double>(std::span<const Label>);
template Tensor signed_targets<float>(std::span<const Label>);
template Tensor64 signed_targets<double>(std::span<const Label>);

}  // namespace xray

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "xray/dataset.hpp"

namespace xray {

/// Counts with COVID-19 as the positive class.
struct ConfusionMatrix {
    std::size_t tp = 0;
    std::size_t tn = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;

    std::size_t total() const { return tp + tn + fp + fn; }
    ConfusionMatrix& operator+=(const ConfusionMatrix& o) {
        tp += o.tp;
        tn += o.tn;
        fp += o.fp;
        fn += o.fn;
        return *this;
    }
    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

ConfusionMatrix confusion(std::span<const Label> predicted, std::span<const Label> actual);

struct MetricsReport {
    ConfusionMatrix counts;
    double accuracy = 0.0;     // (TP+TN) / (TP+TN+FP+FN)
    double sensitivity = 0.0;  // TP / (TP+FN)
    double precision = 0.0;    // TP / (TP+FP)
    double f1 = 0.0;           // 2TP / (2TP+FP+FN)
    double specificity = 0.0;  // TN / (TN+FP)
    double auc = 0.0;
    double loss = 0.0;
    /// Names of metrics whose denominator was zero (reported as 0).
    std::vector<std::string> degenerate;

    bool is_degenerate(const std::string& metric) const;
};

/// The five count-based metrics. AUC and loss are left for the caller.
MetricsReport metrics(const ConfusionMatrix& cm);

/// Area under the ROC curve by the trapezoidal rule over score thresholds,
/// with tied scores forming one diagonal step. Equals the Mann-Whitney
/// probability that a positive outscores a negative, ties counting 1/2.
/// Throws ErrorCode::single_class unless both labels occur.
double roc_auc(std::span<const double> scores, std::span<const Label> labels);

/// Partition of [0, labels.size()) into k folds. Each class is shuffled and
/// dealt round-robin, continuing across classes, so per-class fold counts
/// differ by at most one. Every class present needs at least k members.
std::vector<std::vector<std::size_t>> stratified_kfold(std::span<const Label> labels, std::size_t k,
                                                       std::uint64_t seed);

/// Unstratified variant: one shuffle of all indices dealt round-robin.
std::vector<std::vector<std::size_t>> plain_kfold(std::size_t n, std::size_t k, std::uint64_t seed);

}  // namespace xray

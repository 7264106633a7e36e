#include "xray/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "xray/error.hpp"
#include "xray/rng.hpp"

namespace xray {

ConfusionMatrix confusion(std::span<const Label> predicted, std::span<const Label> actual) {
    if (predicted.size() != actual.size()) {
        throw Error(ErrorCode::shape, "confusion: " + std::to_string(predicted.size()) + " predictions for " +
                                          std::to_string(actual.size()) + " labels");
    }
    if (predicted.empty()) throw Error(ErrorCode::shape, "confusion: no samples");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const bool p = predicted[i] == Label::positive;
        const bool a = actual[i] == Label::positive;
        if (p && a) ++cm.tp;
        else if (!p && !a) ++cm.tn;
        else if (p) ++cm.fp;
        else ++cm.fn;
    }
    return cm;
}

bool MetricsReport::is_degenerate(const std::string& metric) const {
    return std::find(degenerate.begin(), degenerate.end(), metric) != degenerate.end();
}

MetricsReport metrics(const ConfusionMatrix& cm) {
    MetricsReport r;
    r.counts = cm;
    auto ratio = [&](std::size_t num, std::size_t den, const char* name) {
        if (den == 0) {
            r.degenerate.emplace_back(name);
            return 0.0;
        }
        return static_cast<double>(num) / static_cast<double>(den);
    };
    r.accuracy = ratio(cm.tp + cm.tn, cm.total(), "accuracy");
    r.sensitivity = ratio(cm.tp, cm.tp + cm.fn, "sensitivity");
    r.precision = ratio(cm.tp, cm.tp + cm.fp, "precision");
    r.f1 = ratio(2 * cm.tp, 2 * cm.tp + cm.fp + cm.fn, "f1");
    r.specificity = ratio(cm.tn, cm.tn + cm.fp, "specificity");
    return r;
}

double roc_auc(std::span<const double> scores, std::span<const Label> labels) {
    if (scores.size() != labels.size()) {
        throw Error(ErrorCode::shape, "roc_auc: " + std::to_string(scores.size()) + " scores for " +
                                          std::to_string(labels.size()) + " labels");
    }
    const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), Label::positive));
    const std::size_t negatives = labels.size() - positives;
    if (positives == 0 || negatives == 0) {
        throw Error(ErrorCode::single_class, "roc_auc needs at least one positive and one negative sample");
    }

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    // Walk thresholds from high to low; each group of tied scores is one ROC
    // step. Areas are kept doubled so every increment is an exact integer.
    double doubled_area = 0.0;
    double tp = 0.0, fp = 0.0;
    for (std::size_t i = 0; i < order.size();) {
        double group_tp = 0.0, group_fp = 0.0;
        std::size_t j = i;
        for (; j < order.size() && scores[order[j]] == scores[order[i]]; ++j) {
            (labels[order[j]] == Label::positive ? group_tp : group_fp) += 1.0;
        }
        doubled_area += group_fp * (2.0 * tp + group_tp);
        tp += group_tp;
        fp += group_fp;
        i = j;
    }
    return doubled_area / (2.0 * static_cast<double>(positives) * static_cast<double>(negatives));
}

std::vector<std::vector<std::size_t>> stratified_kfold(std::span<const Label> labels, std::size_t k,
                                                       std::uint64_t seed) {
    if (k < 2) throw Error(ErrorCode::usage, "k-fold needs k >= 2, got " + std::to_string(k));
    Rng rng(seed);
    std::vector<std::vector<std::size_t>> folds(k);
    std::size_t next = 0;
    for (Label cls : {Label::positive, Label::negative}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == cls) members.push_back(i);
        }
        if (members.empty()) continue;
        if (members.size() < k) {
            throw Error(ErrorCode::too_few_samples, std::string("class ") + class_dir(cls) + " has " +
                                                        std::to_string(members.size()) + " samples, fewer than " +
                                                        std::to_string(k) + " folds");
        }
        rng.shuffle(members);
        for (auto idx : members) folds[next++ % k].push_back(idx);
    }
    if (labels.empty()) throw Error(ErrorCode::too_few_samples, "k-fold over an empty label list");
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

std::vector<std::vector<std::size_t>> plain_kfold(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw Error(ErrorCode::usage, "k-fold needs k >= 2, got " + std::to_string(k));
    if (n < k) {
        throw Error(ErrorCode::too_few_samples,
                    std::to_string(n) + " samples cannot fill " + std::to_string(k) + " folds");
    }
    Rng rng(seed);
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    rng.shuffle(all);
    std::vector<std::vector<std::size_t>> folds(k);
    for (std::size_t i = 0; i < n; ++i) folds[i % k].push_back(all[i]);
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

}  // namespace xray

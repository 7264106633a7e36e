#include "xray/cross_validation.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace xray {

std::vector<FoldSplit> make_fold_splits(const LabeledDataset& dataset, const TrainConfig& config) {
    config.validate();
    dataset.require_both_classes();
    const auto labels = dataset.labels();
    const std::size_t n = dataset.samples.size();

    // Units the folds are drawn over: every sample, or originals only.
    std::vector<std::size_t> units;
    for (std::size_t i = 0; i < n; ++i) {
        if (config.leakage == LeakageMode::paper_faithful || dataset.samples[i].lineage == Lineage::original) {
            units.push_back(i);
        }
    }
    std::vector<Label> unit_labels;
    for (auto i : units) unit_labels.push_back(labels[i]);
    const auto unit_folds = config.stratified ? stratified_kfold(unit_labels, config.folds, config.seed)
                                              : plain_kfold(units.size(), config.folds, config.seed);

    std::vector<FoldSplit> splits(config.folds);
    for (std::size_t f = 0; f < config.folds; ++f) {
        auto& split = splits[f];
        for (auto u : unit_folds[f]) split.test.push_back(units[u]);
        std::sort(split.test.begin(), split.test.end());
        if (config.leakage == LeakageMode::paper_faithful) {
            std::vector<bool> in_test(n, false);
            for (auto i : split.test) in_test[i] = true;
            for (std::size_t i = 0; i < n; ++i) {
                if (!in_test[i]) split.train.push_back(i);
            }
        } else {
            std::set<std::string> held_out;
            for (auto i : split.test) held_out.insert(dataset.samples[i].source_id);
            for (std::size_t i = 0; i < n; ++i) {
                if (!held_out.contains(dataset.samples[i].source_id)) split.train.push_back(i);
            }
        }
    }
    return splits;
}

MetricsReport fold_metrics(std::span<const Label> predicted, std::span<const Label> actual,
                           std::span<const double> scores, double loss) {
    MetricsReport r = metrics(confusion(predicted, actual));
    const bool both = std::count(actual.begin(), actual.end(), Label::positive) > 0 &&
                      std::count(actual.begin(), actual.end(), Label::negative) > 0;
    if (both) {
        r.auc = roc_auc(scores, actual);
    } else {
        r.auc = 0.0;
        r.degenerate.emplace_back("auc");
    }
    r.loss = loss;
    return r;
}

CvResult cross_validate(const NetworkSpec& spec, const TrainConfig& config, const LabeledDataset& dataset,
                        const FoldCallback& on_fold) {
    const auto splits = make_fold_splits(dataset, config);
    CvResult result;
    result.spec = spec;
    result.spec.head = config.head;
    result.config = config;

    std::vector<Label> pooled_predicted, pooled_actual;
    std::vector<double> pooled_scores;
    double loss_sum = 0.0;
    for (std::size_t f = 0; f < splits.size(); ++f) {
        const auto& split = splits[f];
        std::vector<LabeledSample> train, test;
        for (auto i : split.train) train.push_back(dataset.samples[i]);
        for (auto i : split.test) test.push_back(dataset.samples[i]);

        TrainConfig fold_config = config;
        fold_config.seed = config.seed + f;
        FoldOutput out = train_fold(spec, fold_config, train, test);
        if (on_fold) on_fold(f, out);

        std::vector<Label> actual;
        for (const auto& s : test) actual.push_back(s.label);

        FoldReport report;
        report.fold = f;
        report.metrics = fold_metrics(out.test.predicted, actual, out.test.scores, out.test.loss);
        report.history = std::move(out.history);
        report.train_count = train.size();
        report.test_indices = split.test;
        report.predicted = out.test.predicted;
        report.scores = out.test.scores;

        pooled_predicted.insert(pooled_predicted.end(), out.test.predicted.begin(), out.test.predicted.end());
        pooled_actual.insert(pooled_actual.end(), actual.begin(), actual.end());
        pooled_scores.insert(pooled_scores.end(), out.test.scores.begin(), out.test.scores.end());
        loss_sum += out.test.loss * static_cast<double>(test.size());
        result.folds.push_back(std::move(report));
    }

    ConfusionMatrix total;
    for (const auto& fr : result.folds) total += fr.metrics.counts;
    result.pooled = fold_metrics(pooled_predicted, pooled_actual, pooled_scores,
                                 loss_sum / static_cast<double>(pooled_actual.size()));
    // pooling by concatenation and by count addition must agree
    if (!(result.pooled.counts == total)) {
        throw Error(ErrorCode::shape, "pooled confusion counts disagree with the per-fold sum");
    }
    return result;
}

}  // namespace xray

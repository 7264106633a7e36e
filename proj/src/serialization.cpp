#include "xray/serialization.hpp"

namespace xray {

ordered_json to_json(const NetworkSpec& spec) {
    ordered_json blocks = ordered_json::array();
    for (const auto& b : spec.conv_blocks) {
        blocks.push_back({{"kernel_count", b.kernel_count}, {"kernel_side", b.kernel_side}, {"pool_side", b.pool_side}});
    }
    return {{"input_side", spec.input_side},     {"conv_blocks", blocks},
            {"dense_widths", spec.dense_widths}, {"output_units", spec.output_units},
            {"dropout_rate", spec.dropout_rate}, {"head", to_string(spec.head)}};
}

NetworkSpec network_spec_from_json(const ordered_json& j) {
    NetworkSpec spec;
    spec.input_side = j.at("input_side").get<std::size_t>();
    spec.conv_blocks.clear();
    for (const auto& b : j.at("conv_blocks")) {
        spec.conv_blocks.push_back({b.at("kernel_count").get<std::size_t>(), b.at("kernel_side").get<std::size_t>(),
                                    b.at("pool_side").get<std::size_t>()});
    }
    spec.dense_widths = j.at("dense_widths").get<std::vector<std::size_t>>();
    spec.output_units = j.at("output_units").get<std::size_t>();
    spec.dropout_rate = j.at("dropout_rate").get<double>();
    spec.head = parse_head(j.at("head").get<std::string>());
    spec.validate();
    return spec;
}

ordered_json to_json(const TrainConfig& c) {
    return {{"epochs", c.epochs},
            {"batch_size", c.batch_size},
            {"learning_rate", c.learning_rate},
            {"adam_beta1", c.adam_beta1},
            {"adam_beta2", c.adam_beta2},
            {"adam_epsilon", c.adam_epsilon},
            {"validation_fraction", c.validation_fraction},
            {"head", to_string(c.head)},
            {"sobel", c.sobel},
            {"seed", c.seed},
            {"folds", c.folds},
            {"leakage_mode", to_string(c.leakage)},
            {"stratified", c.stratified}};
}

TrainConfig train_config_from_json(const ordered_json& j) {
    TrainConfig c;
    c.epochs = j.at("epochs").get<std::size_t>();
    c.batch_size = j.at("batch_size").get<std::size_t>();
    c.learning_rate = j.at("learning_rate").get<double>();
    c.adam_beta1 = j.at("adam_beta1").get<double>();
    c.adam_beta2 = j.at("adam_beta2").get<double>();
    c.adam_epsilon = j.at("adam_epsilon").get<double>();
    c.validation_fraction = j.at("validation_fraction").get<double>();
    c.head = parse_head(j.at("head").get<std::string>());
    c.sobel = j.at("sobel").get<bool>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.folds = j.at("folds").get<std::size_t>();
    c.leakage = parse_leakage_mode(j.at("leakage_mode").get<std::string>());
    c.stratified = j.at("stratified").get<bool>();
    c.validate();
    return c;
}

ordered_json to_json(const MetricsReport& r) {
    return {{"tp", r.counts.tp},
            {"tn", r.counts.tn},
            {"fp", r.counts.fp},
            {"fn", r.counts.fn},
            {"accuracy", r.accuracy},
            {"sensitivity", r.sensitivity},
            {"precision", r.precision},
            {"f1", r.f1},
            {"specificity", r.specificity},
            {"auc", r.auc},
            {"loss", r.loss},
            {"degenerate", r.degenerate}};
}

MetricsReport metrics_report_from_json(const ordered_json& j) {
    MetricsReport r;
    r.counts = {j.at("tp").get<std::size_t>(), j.at("tn").get<std::size_t>(), j.at("fp").get<std::size_t>(),
                j.at("fn").get<std::size_t>()};
    r.accuracy = j.at("accuracy").get<double>();
    r.sensitivity = j.at("sensitivity").get<double>();
    r.precision = j.at("precision").get<double>();
    r.f1 = j.at("f1").get<double>();
    r.specificity = j.at("specificity").get<double>();
    r.auc = j.at("auc").get<double>();
    r.loss = j.at("loss").get<double>();
    r.degenerate = j.at("degenerate").get<std::vector<std::string>>();
    return r;
}

ordered_json to_json(const RunHistory& history) {
    ordered_json arr = ordered_json::array();
    for (std::size_t e = 0; e < history.size(); ++e) {
        const auto& h = history[e];
        arr.push_back({{"epoch", e + 1},
                       {"train_loss", h.train_loss},
                       {"train_acc", h.train_accuracy},
                       {"val_loss", h.val_loss},
                       {"val_acc", h.val_accuracy}});
    }
    return arr;
}

RunHistory run_history_from_json(const ordered_json& j) {
    RunHistory h;
    for (const auto& e : j) {
        h.push_back({e.at("train_loss").get<double>(), e.at("train_acc").get<double>(), e.at("val_loss").get<double>(),
                     e.at("val_acc").get<double>()});
    }
    return h;
}

ordered_json to_json(const CvResult& result) {
    ordered_json folds = ordered_json::array();
    for (const auto& f : result.folds) {
        folds.push_back({{"fold", f.fold},
                         {"train_count", f.train_count},
                         {"test_count", f.test_indices.size()},
                         {"metrics", to_json(f.metrics)},
                         {"history", to_json(f.history)}});
    }
    return {{"config", to_json(result.config)},
            {"network", to_json(result.spec)},
            {"seed", result.config.seed},
            {"folds", folds},
            {"pooled", to_json(result.pooled)}};
}

}  // namespace xray

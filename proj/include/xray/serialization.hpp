#pragma once

#include <json.hpp>

#include "xray/cross_validation.hpp"
#include "xray/metrics.hpp"
#include "xray/network.hpp"
#include "xray/trainer.hpp"

// JSON forms of the configuration and report types. Keys are emitted in a
// fixed order so identical runs serialize to identical bytes.

namespace xray {

using ordered_json = nlohmann::ordered_json;

ordered_json to_json(const NetworkSpec& spec);
NetworkSpec network_spec_from_json(const ordered_json& j);

ordered_json to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const ordered_json& j);

ordered_json to_json(const MetricsReport& report);
MetricsReport metrics_report_from_json(const ordered_json& j);

ordered_json to_json(const RunHistory& history);
RunHistory run_history_from_json(const ordered_json& j);

/// report.json body: config echo, per-fold and pooled metrics, histories.
ordered_json to_json(const CvResult& result);

}  // namespace xray

#pragma once

#include <string>
#include <vector>

#include "xray/trainer.hpp"

namespace xray {

/// `fold,epoch,train_loss,train_acc,val_loss,val_acc`, one row per (fold, epoch).
std::string history_csv(const std::vector<RunHistory>& folds);

enum class CurveKind { loss, accuracy };

/// Standalone SVG line chart with one polyline per fold (training series).
std::string curves_svg(const std::vector<RunHistory>& folds, CurveKind kind);

}  // namespace xray

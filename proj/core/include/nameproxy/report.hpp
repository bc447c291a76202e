#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nameproxy/evaluation.hpp"

namespace nameproxy {

struct ModelEvaluation {
  std::string model;
  ClassReport report;
  std::vector<std::optional<RocCurve>> roc;  // per race; nullopt when undefined
};

// `race,accuracy,precision,recall,f1,coverage,support`, six decimals.
std::string format_metrics_table(const ClassReport& report);
// `model,race,fpr,tpr`
std::string format_roc_points(const std::string& model, const std::string& race, const RocCurve& curve);
// `model,race,f1` across every model, in the given model order.
std::string format_f1_comparison(std::span<const ModelEvaluation> models);
// `model,race,auc`; blank where the curve is undefined.
std::string format_auc_table(std::span<const ModelEvaluation> models);

// Writes metrics_<model>.csv, roc_<model>_<race>.csv, f1_comparison.csv and
// auc.csv under `dir`. Returns the written paths in a fixed order.
std::vector<std::string> emit_report(std::span<const ModelEvaluation> models, const std::string& dir);

}  // namespace nameproxy

#include "nameproxy/ensemble.hpp"

#include <cmath>

#include "nameproxy/error.hpp"

namespace nameproxy {

void EnsembleSpec::validate() const {
  if (members.empty()) fail(ErrorCode::invalid_argument, "ensemble needs at least one member");
  if (weights.size() != members.size()) fail(ErrorCode::invalid_argument, "one weight per ensemble member");
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) fail(ErrorCode::invalid_argument, "ensemble weights must be positive");
  }
}

std::optional<ProbVector> ensemble_predict(std::span<const std::optional<ProbVector>> predictions,
                                           const EnsembleSpec& spec) {
  spec.validate();
  if (predictions.size() != spec.members.size()) {
    fail(ErrorCode::length_mismatch, "predictions are not aligned with ensemble members");
  }
  std::vector<double> mixed;
  double weight_sum = 0.0;
  for (std::size_t m = 0; m < predictions.size(); ++m) {
    if (!predictions[m]) continue;
    const auto p = predictions[m]->values();
    if (mixed.empty()) mixed.assign(p.size(), 0.0);
    if (p.size() != mixed.size()) fail(ErrorCode::shape_mismatch, "ensemble members disagree on race count");
    for (std::size_t r = 0; r < p.size(); ++r) mixed[r] += spec.weights[m] * p[r];
    weight_sum += spec.weights[m];
  }
  if (mixed.empty()) return std::nullopt;
  for (double& v : mixed) v /= weight_sum;
  return renormalize(mixed);
}

}  // namespace nameproxy

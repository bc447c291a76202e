#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nameproxy/race.hpp"

namespace nameproxy {

struct EnsembleSpec {
  std::vector<std::string> members{"first_last_zcta", "ibisg", "ibifsg"};
  std::vector<double> weights{1.0, 1.0, 1.0};

  // Throws invalid_argument unless there is at least one member and every
  // weight is positive and matched to a member.
  void validate() const;
};

// Weighted mean over the members that produced a prediction, with weights
// renormalized over those members. nullopt only when every member declined.
std::optional<ProbVector> ensemble_predict(std::span<const std::optional<ProbVector>> predictions,
                                           const EnsembleSpec& spec);

}  // namespace nameproxy

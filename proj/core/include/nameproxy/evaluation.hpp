#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nameproxy/race.hpp"

namespace nameproxy {

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;
};

struct ClassMetrics {
  ConfusionCounts counts;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double coverage = 0.0;
  std::size_t support = 0;  // covered records whose truth is this class
  std::size_t truth_count = 0;
};

struct ClassReport {
  RaceSet races;
  std::vector<ClassMetrics> per_race;
  std::size_t records = 0;
  std::size_t covered = 0;
};

struct MetricOptions {
  // Score declined records as misses instead of excluding them.
  bool strict = false;
};

// Metrics from integer confusion counts; zero denominators give 0.
ClassMetrics metrics_from_counts(const ConfusionCounts& counts);

// One-vs-rest confusion counts per race over covered records. Throws
// Error{length_mismatch}.
ClassReport class_metrics(std::span<const std::size_t> truths,
                          std::span<const std::optional<std::size_t>> predictions, const RaceSet& races,
                          const MetricOptions& options = {});

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;  // (0,0) ... (1,1)
  double auc = 0.0;
};

// One-vs-rest sweep over the distinct values of `scores` (the probability of
// the positive race), equal scores forming one step; trapezoidal AUC.
// Throws Error{single_class} when `positives` is all true or all false.
RocCurve roc_curve(std::span<const double> scores, const std::vector<bool>& positives);
RocCurve roc_curve(std::span<const std::size_t> truths, std::span<const ProbVector> scores, std::size_t race);

// Indices where every model produced a prediction.
std::vector<std::size_t> intersect_covered(std::span<const std::vector<bool>> coverage);

}  // namespace nameproxy

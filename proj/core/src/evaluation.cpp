#include "nameproxy/evaluation.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "nameproxy/error.hpp"

namespace nameproxy {
namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ClassMetrics metrics_from_counts(const ConfusionCounts& c) {
  ClassMetrics m;
  m.counts = c;
  m.accuracy = ratio(c.tp + c.tn, c.tp + c.tn + c.fp + c.fn);
  m.precision = ratio(c.tp, c.tp + c.fp);
  m.recall = ratio(c.tp, c.tp + c.fn);
  m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

ClassReport class_metrics(std::span<const std::size_t> truths,
                          std::span<const std::optional<std::size_t>> predictions, const RaceSet& races,
                          const MetricOptions& options) {
  if (truths.size() != predictions.size()) {
    fail(ErrorCode::length_mismatch,
         fmt::format("{} truths but {} predictions", truths.size(), predictions.size()));
  }
  const std::size_t k = races.size();
  std::vector<ConfusionCounts> counts(k);
  std::vector<std::size_t> truth_count(k, 0);
  std::vector<std::size_t> support(k, 0);
  ClassReport report{races, {}, truths.size(), 0};

  for (std::size_t i = 0; i < truths.size(); ++i) {
    const std::size_t truth = truths[i];
    if (truth >= k) fail(ErrorCode::invalid_argument, fmt::format("truth label {} outside the race set", truth));
    ++truth_count[truth];
    const auto& pred = predictions[i];
    if (pred && *pred >= k) fail(ErrorCode::invalid_argument, fmt::format("predicted label {} outside the race set", *pred));
    if (!pred && !options.strict) continue;
    if (pred) {
      ++report.covered;
      ++support[truth];
    }
    for (std::size_t r = 0; r < k; ++r) {
      const bool actual = truth == r;
      const bool predicted = pred && *pred == r;
      auto& c = counts[r];
      if (actual && predicted) ++c.tp;
      else if (!actual && predicted) ++c.fp;
      else if (actual) ++c.fn;
      else ++c.tn;
    }
  }

  for (std::size_t r = 0; r < k; ++r) {
    ClassMetrics m = metrics_from_counts(counts[r]);
    m.truth_count = truth_count[r];
    m.support = support[r];
    m.coverage = ratio(support[r], truth_count[r]);
    report.per_race.push_back(m);
  }
  return report;
}

RocCurve roc_curve(std::span<const double> scores, const std::vector<bool>& positives) {
  if (scores.size() != positives.size()) fail(ErrorCode::length_mismatch, "scores and labels differ in length");
  const auto pos = static_cast<std::size_t>(std::count(positives.begin(), positives.end(), true));
  const std::size_t neg = positives.size() - pos;
  if (pos == 0 || neg == 0) fail(ErrorCode::single_class, "one-vs-rest truth set has a single class");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve curve;
  curve.points.push_back({0.0, 0.0});
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double threshold = scores[order[i]];
    for (; i < order.size() && scores[order[i]] == threshold; ++i) {
      if (positives[order[i]]) ++tp;
      else ++fp;
    }
    const RocPoint next{ratio(fp, neg), ratio(tp, pos)};
    const RocPoint& prev = curve.points.back();
    curve.auc += (next.fpr - prev.fpr) * (next.tpr + prev.tpr) / 2.0;
    curve.points.push_back(next);
  }
  return curve;
}

RocCurve roc_curve(std::span<const std::size_t> truths, std::span<const ProbVector> scores, std::size_t race) {
  if (truths.size() != scores.size()) fail(ErrorCode::length_mismatch, "truths and scores differ in length");
  std::vector<double> s(scores.size());
  std::vector<bool> positives(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (race >= scores[i].size()) fail(ErrorCode::invalid_argument, "race index outside the score vector");
    s[i] = scores[i][race];
    positives[i] = truths[i] == race;
  }
  return roc_curve(s, positives);
}

std::vector<std::size_t> intersect_covered(std::span<const std::vector<bool>> coverage) {
  std::vector<std::size_t> out;
  if (coverage.empty()) return out;
  const std::size_t n = coverage.front().size();
  for (const auto& c : coverage) {
    if (c.size() != n) fail(ErrorCode::length_mismatch, "coverage vectors differ in length");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (std::all_of(coverage.begin(), coverage.end(), [i](const std::vector<bool>& c) { return c[i]; })) {
      out.push_back(i);
    }
  }
  return out;
}

}  // namespace nameproxy

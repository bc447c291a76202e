#pragma once

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nameproxy {

inline constexpr double kProbabilityTolerance = 1e-9;

// Ordered race taxonomy. Index i names the same category for the whole run.
class RaceSet {
 public:
  // asian, black, hispanic, white
  RaceSet();
  explicit RaceSet(std::vector<std::string> labels);
  RaceSet(std::initializer_list<std::string> labels)
      : RaceSet(std::vector<std::string>(labels)) {}

  std::size_t size() const noexcept { return labels_.size(); }
  const std::string& label(std::size_t index) const { return labels_.at(index); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  std::optional<std::size_t> index_of(std::string_view label) const;
  // Throws invalid_argument for labels outside the set.
  std::size_t require_index(std::string_view label) const;

  bool operator==(const RaceSet&) const = default;

 private:
  std::vector<std::string> labels_;
};

// A probability distribution over a RaceSet: non-negative, sums to one.
class ProbVector {
 public:
  // Validates; throws invalid_argument when the invariants do not hold.
  explicit ProbVector(std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }

  bool operator==(const ProbVector&) const = default;

 private:
  std::vector<double> values_;
};

bool is_probability_vector(std::span<const double> values,
                           double tolerance = kProbabilityTolerance);

// Divides by the sum. Throws Error{zero_mass} when the sum is zero.
ProbVector renormalize(std::span<const double> raw);

// Max decision rule; ties go to the lowest index.
std::size_t argmax_index(const ProbVector& p);
const std::string& argmax_race(const ProbVector& p, const RaceSet& races);

struct PersonRecord {
  std::string row_id;
  std::string first;
  std::string last;
  std::string geo;
  std::optional<std::size_t> race;  // index into the run's RaceSet
};

struct Prediction {
  std::string model_id;
  std::optional<ProbVector> probs;

  bool covered() const noexcept { return probs.has_value(); }
};

}  // namespace nameproxy

#include "nameproxy/race.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "nameproxy/error.hpp"

namespace nameproxy {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::zero_mass: return "ZeroMass";
    case ErrorCode::empty_after_normalization: return "EmptyAfterNormalization";
    case ErrorCode::unknown_character: return "UnknownCharacter";
    case ErrorCode::insufficient_class: return "InsufficientClass";
    case ErrorCode::empty_table: return "EmptyTable";
    case ErrorCode::kind_mismatch: return "KindMismatch";
    case ErrorCode::missing_firstname_table: return "MissingFirstnameTable";
    case ErrorCode::shape_mismatch: return "ShapeMismatch";
    case ErrorCode::corrupt_file: return "CorruptFile";
    case ErrorCode::length_mismatch: return "LengthMismatch";
    case ErrorCode::single_class: return "SingleClass";
    case ErrorCode::missing_artifact: return "MissingArtifact";
    case ErrorCode::schema: return "SchemaError";
    case ErrorCode::row_id_mismatch: return "RowIdMismatch";
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::io: return "IoError";
  }
  return "Unknown";
}

void fail(ErrorCode code, const std::string& message) {
  throw Error(code, fmt::format("{}: {}", to_string(code), message));
}

RaceSet::RaceSet() : labels_{"asian", "black", "hispanic", "white"} {}

RaceSet::RaceSet(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) fail(ErrorCode::invalid_argument, "race set is empty");
  std::set<std::string> seen;
  for (const auto& l : labels_) {
    if (l.empty()) fail(ErrorCode::invalid_argument, "empty race label");
    if (!seen.insert(l).second) {
      fail(ErrorCode::invalid_argument, fmt::format("duplicate race label '{}'", l));
    }
  }
}

std::optional<std::size_t> RaceSet::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) return i;
  }
  return std::nullopt;
}

std::size_t RaceSet::require_index(std::string_view label) const {
  auto idx = index_of(label);
  if (!idx) fail(ErrorCode::invalid_argument, fmt::format("unknown race label '{}'", label));
  return *idx;
}

bool is_probability_vector(std::span<const double> values, double tolerance) {
  if (values.empty()) return false;
  double sum = 0.0;
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0) return false;
    sum += v;
  }
  return std::abs(sum - 1.0) <= tolerance;
}

ProbVector::ProbVector(std::vector<double> values) : values_(std::move(values)) {
  if (!is_probability_vector(values_)) {
    fail(ErrorCode::invalid_argument, "values do not form a probability vector");
  }
}

ProbVector renormalize(std::span<const double> raw) {
  double sum = 0.0;
  for (double v : raw) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      fail(ErrorCode::invalid_argument, "renormalize requires finite non-negative entries");
    }
    sum += v;
  }
  if (sum <= 0.0) fail(ErrorCode::zero_mass, "all entries are zero");
  std::vector<double> out(raw.begin(), raw.end());
  // A sum that is one up to accumulated rounding is left alone; dividing
  // again would perturb the last bits and break idempotence.
  const double rounding = 8.0 * static_cast<double>(raw.size()) *
                          std::numeric_limits<double>::epsilon();
  if (std::abs(sum - 1.0) <= rounding) return ProbVector(std::move(out));
  for (double& v : out) v /= sum;
  return ProbVector(std::move(out));
}

std::size_t argmax_index(const ProbVector& p) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (p[i] > p[best]) best = i;
  }
  return best;
}

const std::string& argmax_race(const ProbVector& p, const RaceSet& races) {
  return races.label(argmax_index(p));
}

}  // namespace nameproxy

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nameproxy/ensemble.hpp"
#include "nameproxy/normalize.hpp"
#include "nameproxy/race.hpp"
#include "nameproxy/sampling.hpp"
#include "nameproxy/tables.hpp"
#include "nameproxy/trainer.hpp"

namespace nameproxy {

struct TableConfig {
  std::optional<std::vector<double>> target_shares;
  double pseudo_count = 0.0;
};

struct EvaluationConfig {
  bool strict = false;
  bool intersect_covered = false;
  std::optional<std::size_t> sample_size;
  std::vector<double> shares{std::begin(kNationalShares), std::end(kNationalShares)};
};

struct SampleConfig {
  std::size_t size = 200000;
  std::vector<double> shares{std::begin(kNationalShares), std::end(kNationalShares)};
};

// Everything a command needs beyond its file arguments. All randomness
// derives from `seed`.
struct RunConfig {
  RaceSet races;
  std::uint64_t seed = 0;
  NormalizeOptions normalize;
  std::optional<std::string> filter_words_file;
  TableConfig tables;
  nn::TrainConfig training;
  EnsembleSpec ensemble;
  EvaluationConfig evaluation;
  SampleConfig sample;

  // Default-shaped network and trainer settings follow the race set size.
  RunConfig();
};

// JSON config; unknown keys are rejected. Share vectors default to the
// national shares for the four default races and to uniform otherwise.
RunConfig parse_run_config(std::string_view json_text, std::string_view source);
RunConfig load_run_config(const std::string& path);

}  // namespace nameproxy

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nameproxy/config.hpp"
#include "nameproxy/tables.hpp"

namespace nameproxy {

// Library entry points behind the `nameproxy` subcommands. Each writes its
// outputs and returns a summary for the caller to log.

inline constexpr const char* kSurnameTableFile = "surnames.csv";
inline constexpr const char* kFirstnameTableFile = "firstnames.csv";
inline constexpr const char* kGeoTableFile = "geo.csv";
inline constexpr const char* kManifestFile = "manifest.json";

struct BuildTablesArgs {
  std::string voter_csv;
  std::optional<std::string> external_surname_csv;
  std::optional<std::string> external_firstname_csv;
  std::string out_dir;
};

struct BuildTablesSummary {
  TableBuildStats surname_stats;
  TableBuildStats firstname_stats;
  std::size_t surnames = 0;
  std::size_t firstnames = 0;
  std::size_t geos = 0;
  std::vector<std::string> files;
};

BuildTablesSummary cmd_build_tables(const BuildTablesArgs& args, const RunConfig& config);

struct TrainArgs {
  std::string voter_csv;
  std::string params_out;
  std::string log_out;
};

struct TrainSummary {
  std::size_t train_examples = 0;
  std::size_t validation_examples = 0;
  std::size_t dropped_invalid = 0;
  std::size_t best_epoch = 0;
  double best_val_accuracy = 0.0;
};

TrainSummary cmd_train(const TrainArgs& args, const RunConfig& config);

// first_last, first_last_zcta, bisg, bifsg, ensemble. Ensemble members may
// also use the aliases ibisg and ibifsg.
const std::vector<std::string>& known_models();

struct PredictArgs {
  std::string input_csv;
  std::vector<std::string> models;
  std::optional<std::string> tables_dir;
  std::optional<std::string> params;
  std::string output_csv;
};

struct PredictSummary {
  std::size_t rows = 0;
  std::map<std::string, std::size_t> covered;               // per model
  std::map<std::string, std::size_t> declines_by_reason;    // "<model>:<reason>"
};

PredictSummary cmd_predict(const PredictArgs& args, const RunConfig& config);

struct EvaluateArgs {
  std::vector<std::string> prediction_csvs;
  std::string truth_csv;
  std::string out_dir;
};

struct EvaluateSummary {
  std::vector<std::string> models;
  std::size_t evaluated_records = 0;
  std::vector<std::string> warnings;
  std::vector<std::string> files;
};

EvaluateSummary cmd_evaluate(const EvaluateArgs& args, const RunConfig& config);

struct SampleArgs {
  std::string input_csv;
  std::string output_csv;
};

struct SampleSummary {
  std::size_t input_rows = 0;
  std::size_t filtered_out = 0;
  std::size_t duplicates = 0;
  std::size_t written = 0;
};

SampleSummary cmd_sample(const SampleArgs& args, const RunConfig& config);

}  // namespace nameproxy

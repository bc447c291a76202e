// nameproxy: build tables, train, predict, evaluate and sample from the
// command line. Exit status 0 on success, 1 on validation errors, 2 on IO
// errors. NAMEPROXY_LOG_LEVEL (trace, debug, info, warn, error, off) sets
// log verbosity.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "nameproxy/commands.hpp"
#include "nameproxy/config.hpp"
#include "nameproxy/error.hpp"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

void configure_logging() {
  spdlog::set_pattern("[%l] %v");
  if (const char* level = std::getenv("NAMEPROXY_LOG_LEVEL")) {
    spdlog::set_level(spdlog::level::from_str(level));
  }
}

std::optional<std::string> as_optional(const std::string& s) {
  return s.empty() ? std::nullopt : std::optional(s);
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  CLI::App app{"Race/ethnicity proxy toolkit: BISG, BIFSG, BiLSTM name model, ensemble, evaluation"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);

  nameproxy::BuildTablesArgs build_args;
  std::string ext_surnames;
  std::string ext_firstnames;
  auto* build = app.add_subcommand("build-tables", "Build surname, first-name and geography tables");
  build->add_option("--voter", build_args.voter_csv, "Voter CSV: first_name,last_name,geo_id,race")->required();
  build->add_option("--external-surnames", ext_surnames, "Census-style surname table to merge (preferred on overlap)");
  build->add_option("--external-firstnames", ext_firstnames, "First-name table to merge (internal preferred on overlap)");
  build->add_option("--out", build_args.out_dir, "Output directory")->required();

  nameproxy::TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Train the character-level BiLSTM name model");
  train->add_option("--voter", train_args.voter_csv, "Voter CSV with race labels")->required();
  train->add_option("--params-out", train_args.params_out, "Parameter file to write")->required();
  train->add_option("--log-out", train_args.log_out, "Per-epoch training log CSV")->required();

  nameproxy::PredictArgs predict_args;
  std::string tables_dir;
  std::string params_path;
  auto* predict = app.add_subcommand("predict", "Score records with one or more models");
  predict->add_option("--input", predict_args.input_csv, "Input CSV: first_name,last_name,geo_id[,race]")->required();
  predict->add_option("--models", predict_args.models, "first_last, first_last_zcta, bisg, bifsg, ensemble")
      ->required()
      ->delimiter(',');
  predict->add_option("--tables", tables_dir, "Directory written by build-tables");
  predict->add_option("--params", params_path, "Parameter file written by train");
  predict->add_option("--out", predict_args.output_csv, "Predictions CSV to write")->required();

  nameproxy::EvaluateArgs eval_args;
  std::optional<std::size_t> sample_size;
  bool intersect = false;
  bool strict = false;
  auto* evaluate = app.add_subcommand("evaluate", "Metric tables and ROC points for prediction files");
  evaluate->add_option("--predictions", eval_args.prediction_csvs, "Prediction CSVs (any producer)")->required();
  evaluate->add_option("--truth", eval_args.truth_csv, "Truth CSV with race labels")->required();
  evaluate->add_option("--out", eval_args.out_dir, "Report directory")->required();
  evaluate->add_option("--sample-size", sample_size, "Representative sample of the truth set before scoring");
  evaluate->add_flag("--intersect-covered", intersect, "Score only records every model covers");
  evaluate->add_flag("--strict", strict, "Count declined predictions as misses");

  nameproxy::SampleArgs sample_args;
  std::optional<std::size_t> sample_n;
  auto* sample = app.add_subcommand("sample", "Filter, deduplicate and draw a representative sample");
  sample->add_option("--input", sample_args.input_csv, "Input CSV with race labels")->required();
  sample->add_option("--out", sample_args.output_csv, "Sampled CSV to write")->required();
  sample->add_option("-n,--size", sample_n, "Sample size (default from config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    nameproxy::RunConfig config = config_path.empty() ? nameproxy::RunConfig{} : nameproxy::load_run_config(config_path);

    if (*build) {
      build_args.external_surname_csv = as_optional(ext_surnames);
      build_args.external_firstname_csv = as_optional(ext_firstnames);
      const auto s = nameproxy::cmd_build_tables(build_args, config);
      spdlog::info("surnames: {} kept, {} suppressed; first names: {} kept, {} suppressed; {} geographies",
                   s.surname_stats.names_kept, s.surname_stats.names_suppressed, s.firstname_stats.names_kept,
                   s.firstname_stats.names_suppressed, s.geos);
      for (const auto& f : s.files) spdlog::debug("wrote {}", f);
    } else if (*train) {
      const auto s = nameproxy::cmd_train(train_args, config);
      spdlog::info("trained on {} examples ({} validation, {} dropped); best epoch {} with accuracy {:.4f}",
                   s.train_examples, s.validation_examples, s.dropped_invalid, s.best_epoch, s.best_val_accuracy);
    } else if (*predict) {
      predict_args.tables_dir = as_optional(tables_dir);
      predict_args.params = as_optional(params_path);
      const auto s = nameproxy::cmd_predict(predict_args, config);
      for (const auto& m : predict_args.models) {
        const auto it = s.covered.find(m);
        spdlog::info("{}: {} of {} rows covered", m, it == s.covered.end() ? 0 : it->second, s.rows);
      }
      for (const auto& [reason, n] : s.declines_by_reason) spdlog::debug("declined {} ({} rows)", reason, n);
    } else if (*evaluate) {
      if (sample_size) config.evaluation.sample_size = sample_size;
      config.evaluation.intersect_covered = config.evaluation.intersect_covered || intersect;
      config.evaluation.strict = config.evaluation.strict || strict;
      const auto s = nameproxy::cmd_evaluate(eval_args, config);
      for (const auto& w : s.warnings) spdlog::warn("{}", w);
      spdlog::info("evaluated {} models on {} records", s.models.size(), s.evaluated_records);
    } else if (*sample) {
      if (sample_n) config.sample.size = *sample_n;
      const auto s = nameproxy::cmd_sample(sample_args, config);
      spdlog::info("{} rows in, {} filtered, {} duplicates, {} written", s.input_rows, s.filtered_out, s.duplicates,
                   s.written);
    }
  } catch (const nameproxy::Error& e) {
    spdlog::error("{}", e.what());
    return e.code() == nameproxy::ErrorCode::io ? kExitIo : kExitValidation;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitValidation;
  }
  return 0;
}

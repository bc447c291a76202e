#include "nameproxy/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <set>
#include <unordered_map>

#include <fmt/format.h>
#include <json.hpp>

#include "nameproxy/bayes.hpp"
#include "nameproxy/bilstm.hpp"
#include "nameproxy/csv.hpp"
#include "nameproxy/dataset.hpp"
#include "nameproxy/ensemble.hpp"
#include "nameproxy/error.hpp"
#include "nameproxy/evaluation.hpp"
#include "nameproxy/report.hpp"
#include "nameproxy/sampling.hpp"

namespace nameproxy {
namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

ordered_json stats_json(const TableBuildStats& s) {
  return ordered_json{{"records_in", s.records_in},         {"records_used", s.records_used},
                      {"invalid_names", s.invalid_names},   {"distinct_names", s.distinct_names},
                      {"names_kept", s.names_kept},         {"names_suppressed", s.names_suppressed}};
}

ordered_json provenance_json(const NameTable& table) {
  std::size_t internal = 0;
  for (const auto& [name, entry] : table.entries()) internal += entry.source == Source::internal;
  return ordered_json{{"entries", table.size()}, {"internal", internal}, {"external", table.size() - internal}};
}

void require_file(const std::string& path, std::string_view what) {
  if (!fs::is_regular_file(path)) fail(ErrorCode::missing_artifact, fmt::format("{} '{}' does not exist", what, path));
}

}  // namespace

BuildTablesSummary cmd_build_tables(const BuildTablesArgs& args, const RunConfig& config) {
  const auto records = read_person_records(args.voter_csv, config.races, RaceColumn::required);

  TableBuildOptions options;
  options.seed = config.seed;
  options.target_shares = config.tables.target_shares;
  options.normalize = config.normalize;

  auto surnames = build_name_table(records, config.races, NameKind::surname, options);
  auto firstnames = build_name_table(records, config.races, NameKind::firstname, options);
  const GeoTable geo = build_geo_table(records, config.races);

  NameTable surname_table = std::move(surnames.table);
  NameTable firstname_table = std::move(firstnames.table);
  if (args.external_surname_csv) {
    const auto external = read_external_name_table(*args.external_surname_csv, config.races, NameKind::surname,
                                                   config.normalize);
    surname_table = merge_tables(surname_table, external, default_preference(NameKind::surname));
  }
  if (args.external_firstname_csv) {
    const auto external = read_external_name_table(*args.external_firstname_csv, config.races, NameKind::firstname,
                                                   config.normalize);
    firstname_table = merge_tables(firstname_table, external, default_preference(NameKind::firstname));
  }

  const fs::path dir(args.out_dir);
  BuildTablesSummary summary{surnames.stats, firstnames.stats, surname_table.size(), firstname_table.size(),
                             geo.entries.size(), {}};
  auto write = [&](const fs::path& path, const std::string& body) {
    csv::write_text_file(path.string(), body);
    summary.files.push_back(path.string());
  };
  write(dir / kSurnameTableFile, format_name_table(surname_table));
  write(dir / kFirstnameTableFile, format_name_table(firstname_table));
  write(dir / kGeoTableFile, format_geo_table(geo));

  ordered_json manifest{
      {"races", config.races.labels()},
      {"seed", config.seed},
      {"records", records.size()},
      {"target_shares", config.tables.target_shares ? ordered_json(*config.tables.target_shares) : ordered_json()},
      {"surname", {{"build", stats_json(surnames.stats)}, {"table", provenance_json(surname_table)}}},
      {"firstname", {{"build", stats_json(firstnames.stats)}, {"table", provenance_json(firstname_table)}}},
      {"geo", {{"entries", geo.entries.size()}, {"race_totals", geo.race_totals}}},
  };
  write(dir / kManifestFile, manifest.dump(2) + "\n");
  return summary;
}

TrainSummary cmd_train(const TrainArgs& args, const RunConfig& config) {
  const auto records = read_person_records(args.voter_csv, config.races, RaceColumn::required);
  auto train_config = config.training;
  train_config.seed = config.seed;
  train_config.shape.classes = static_cast<int>(config.races.size());

  const auto data = nn::prepare_training_data(records, config.races, train_config);
  const auto result = nn::train(data, train_config);
  nn::save_params(result.params, args.params_out);
  csv::write_text_file(args.log_out, nn::format_training_log(result.log));

  TrainSummary summary;
  summary.train_examples = data.train_inputs.size();
  summary.validation_examples = data.validation_inputs.size();
  summary.dropped_invalid = data.dropped_invalid;
  summary.best_epoch = result.best_epoch;
  if (result.best_epoch > 0) summary.best_val_accuracy = result.log[result.best_epoch - 1].val_accuracy;
  return summary;
}

const std::vector<std::string>& known_models() {
  static const std::vector<std::string> models{"first_last", "first_last_zcta", "bisg", "bifsg", "ensemble"};
  return models;
}

namespace {

std::string resolve_member(const std::string& id) {
  if (id == "ibisg") return "bisg";
  if (id == "ibifsg") return "bifsg";
  const auto& known = known_models();
  if (id == "ensemble" || std::find(known.begin(), known.end(), id) == known.end()) {
    fail(ErrorCode::invalid_argument, fmt::format("'{}' cannot be an ensemble member", id));
  }
  return id;
}

// Eval-mode name model over every record, batched; nullopt for names that
// normalize to nothing.
std::vector<std::optional<ProbVector>> score_names(const nn::NetworkParams& params,
                                                   const std::vector<PersonRecord>& records) {
  std::vector<std::optional<ProbVector>> out(records.size());
  std::vector<std::size_t> index;
  nn::TokenBatch batch;
  auto flush = [&] {
    if (batch.empty()) return;
    const auto probs = nn::forward(params, batch);
    for (std::size_t k = 0; k < probs.size(); ++k) out[index[k]] = probs[k];
    batch.clear();
    index.clear();
  };
  for (std::size_t i = 0; i < records.size(); ++i) {
    try {
      const auto first = normalize(records[i].first, NormalizationProfile::neural);
      const auto last = normalize(records[i].last, NormalizationProfile::neural);
      const auto encoded = encode_name(first, last);
      batch.emplace_back(encoded.codes.begin(), encoded.codes.end());
      index.push_back(i);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::empty_after_normalization) throw;
    }
    if (batch.size() == 512) flush();
  }
  flush();
  return out;
}

}  // namespace

PredictSummary cmd_predict(const PredictArgs& args, const RunConfig& config) {
  if (args.models.empty()) fail(ErrorCode::invalid_argument, "no models requested");
  const auto& known = known_models();
  for (const auto& m : args.models) {
    if (std::find(known.begin(), known.end(), m) == known.end()) {
      fail(ErrorCode::invalid_argument, fmt::format("unknown model '{}'", m));
    }
  }
  std::vector<std::string> member_ids;
  std::set<std::string> needed(args.models.begin(), args.models.end());
  if (needed.contains("ensemble")) {
    config.ensemble.validate();
    for (const auto& m : config.ensemble.members) member_ids.push_back(resolve_member(m));
    needed.insert(member_ids.begin(), member_ids.end());
  }
  const bool need_network = needed.contains("first_last") || needed.contains("first_last_zcta");
  const bool need_geo = needed.contains("first_last_zcta") || needed.contains("bisg") || needed.contains("bifsg");
  const bool need_surnames = needed.contains("bisg") || needed.contains("bifsg");
  const bool need_firstnames = needed.contains("bifsg");

  auto table_path = [&](const char* file) {
    if (!args.tables_dir) fail(ErrorCode::missing_artifact, fmt::format("models need {} but no tables directory was given", file));
    const auto path = (fs::path(*args.tables_dir) / file).string();
    require_file(path, "table");
    return path;
  };

  std::optional<nn::NetworkParams> params;
  if (need_network) {
    if (!args.params) fail(ErrorCode::missing_artifact, "name models need a parameter file");
    require_file(*args.params, "parameter file");
    params = nn::load_params(*args.params);
    if (static_cast<std::size_t>(params->shape.classes) != config.races.size()) {
      fail(ErrorCode::shape_mismatch, "parameter file class count differs from the configured race set");
    }
  }
  std::optional<GeoTable> geo;
  if (need_geo) geo = read_geo_table(table_path(kGeoTableFile), config.races);
  std::optional<BayesContext> bayes;
  if (need_surnames) {
    std::optional<NameTable> firstnames;
    if (need_firstnames) firstnames = read_name_table(table_path(kFirstnameTableFile), config.races);
    bayes.emplace(read_name_table(table_path(kSurnameTableFile), config.races), std::move(firstnames), *geo);
    bayes->normalize = config.normalize;
    bayes->query.pseudo_count = config.tables.pseudo_count;
  }

  const auto records = read_person_records(args.input_csv, config.races, RaceColumn::optional);
  PredictSummary summary;
  summary.rows = records.size();

  std::unordered_map<std::string, std::vector<std::optional<ProbVector>>> scored;
  auto note = [&](const std::string& model, const Posterior& p) {
    if (!p.covered()) ++summary.declines_by_reason[fmt::format("{}:{}", model, to_string(p.reason))];
    return p.probs;
  };
  QueryOptions geo_query{config.tables.pseudo_count};

  if (need_network) {
    scored["first_last"] = score_names(*params, records);
    if (needed.contains("first_last_zcta")) {
      auto& out = scored["first_last_zcta"];
      const auto& names = scored["first_last"];
      for (std::size_t i = 0; i < records.size(); ++i) {
        if (!names[i]) {
          out.emplace_back();
          continue;
        }
        out.push_back(note("first_last_zcta", geo_augment(*names[i], geo_given_race(*geo, records[i].geo, geo_query))));
      }
    }
  }
  if (needed.contains("bisg")) {
    auto& out = scored["bisg"];
    for (const auto& rec : records) out.push_back(note("bisg", bisg(*bayes, rec.last, rec.geo)));
  }
  if (needed.contains("bifsg")) {
    auto& out = scored["bifsg"];
    for (const auto& rec : records) out.push_back(note("bifsg", bifsg(*bayes, rec.first, rec.last, rec.geo)));
  }
  if (needed.contains("ensemble")) {
    auto& out = scored["ensemble"];
    std::vector<std::optional<ProbVector>> members(member_ids.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
      for (std::size_t m = 0; m < member_ids.size(); ++m) members[m] = scored[member_ids[m]][i];
      out.push_back(ensemble_predict(members, config.ensemble));
    }
  }

  std::vector<PredictionRow> rows;
  rows.reserve(records.size() * args.models.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    for (const auto& model : args.models) {
      const auto& p = scored[model][i];
      rows.push_back(PredictionRow{records[i].row_id, model, p});
      if (p) ++summary.covered[model];
    }
  }
  csv::write_text_file(args.output_csv, format_predictions(rows, config.races));
  return summary;
}

EvaluateSummary cmd_evaluate(const EvaluateArgs& args, const RunConfig& config) {
  if (args.prediction_csvs.empty()) fail(ErrorCode::invalid_argument, "no prediction files given");
  const auto truth = read_person_records(args.truth_csv, config.races, RaceColumn::required);
  std::unordered_map<std::string, std::size_t> truth_index;
  for (std::size_t i = 0; i < truth.size(); ++i) truth_index.emplace(truth[i].row_id, i);

  // model -> per-truth-row prediction, in first-seen model order
  std::vector<std::string> models;
  std::unordered_map<std::string, std::vector<std::optional<ProbVector>>> preds;
  std::unordered_map<std::string, std::vector<bool>> seen;
  for (const auto& path : args.prediction_csvs) {
    for (auto& row : read_predictions(path, config.races)) {
      auto it = truth_index.find(row.row_id);
      if (it == truth_index.end()) {
        fail(ErrorCode::row_id_mismatch, fmt::format("{}: row_id '{}' is not in the truth file", path, row.row_id));
      }
      if (!preds.contains(row.model)) {
        models.push_back(row.model);
        preds[row.model].resize(truth.size());
        seen[row.model].assign(truth.size(), false);
      }
      if (seen[row.model][it->second]) {
        fail(ErrorCode::row_id_mismatch, fmt::format("{}: row_id '{}' appears twice for model '{}'", path, row.row_id, row.model));
      }
      seen[row.model][it->second] = true;
      preds[row.model][it->second] = std::move(row.probs);
    }
  }
  for (const auto& model : models) {
    const auto& s = seen[model];
    if (auto miss = std::find(s.begin(), s.end(), false); miss != s.end()) {
      fail(ErrorCode::row_id_mismatch, fmt::format("model '{}' has no prediction for row_id '{}'", model,
                                                   truth[static_cast<std::size_t>(miss - s.begin())].row_id));
    }
  }

  std::vector<std::size_t> subset(truth.size());
  for (std::size_t i = 0; i < subset.size(); ++i) subset[i] = i;
  if (config.evaluation.sample_size) {
    subset = representative_sample_indices(truth, *config.evaluation.sample_size, config.evaluation.shares, config.seed);
  }

  EvaluateSummary summary;
  summary.models = models;
  if (config.evaluation.intersect_covered) {
    std::vector<std::vector<bool>> coverage;
    for (const auto& model : models) {
      std::vector<bool> c(subset.size());
      for (std::size_t k = 0; k < subset.size(); ++k) c[k] = preds[model][subset[k]].has_value();
      coverage.push_back(std::move(c));
    }
    std::vector<std::size_t> kept;
    for (auto k : intersect_covered(coverage)) kept.push_back(subset[k]);
    subset = std::move(kept);
    if (subset.empty()) summary.warnings.emplace_back("no record is covered by every model; metrics are undefined");
  }
  summary.evaluated_records = subset.size();

  std::vector<ModelEvaluation> evaluations;
  for (const auto& model : models) {
    std::vector<std::size_t> truths;
    std::vector<std::optional<std::size_t>> decisions;
    std::vector<std::size_t> covered_truths;
    std::vector<ProbVector> covered_scores;
    for (auto i : subset) {
      truths.push_back(*truth[i].race);
      const auto& p = preds[model][i];
      decisions.push_back(p ? std::optional(argmax_index(*p)) : std::nullopt);
      if (p) {
        covered_truths.push_back(*truth[i].race);
        covered_scores.push_back(*p);
      }
    }
    ModelEvaluation eval{model, class_metrics(truths, decisions, config.races, {config.evaluation.strict}), {}};
    for (std::size_t r = 0; r < config.races.size(); ++r) {
      try {
        eval.roc.emplace_back(roc_curve(covered_truths, covered_scores, r));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::single_class) throw;
        eval.roc.emplace_back(std::nullopt);
        summary.warnings.push_back(
            fmt::format("model '{}': ROC for '{}' undefined (single class)", model, config.races.label(r)));
      }
    }
    evaluations.push_back(std::move(eval));
  }
  summary.files = emit_report(evaluations, args.out_dir);
  return summary;
}

SampleSummary cmd_sample(const SampleArgs& args, const RunConfig& config) {
  const auto records = read_person_records(args.input_csv, config.races, RaceColumn::required);
  FilterWords filter = default_filter_words();
  if (config.filter_words_file) {
    for (auto& w : load_filter_words(*config.filter_words_file)) filter.insert(w);
  }

  SampleSummary summary;
  summary.input_rows = records.size();
  std::vector<PersonRecord> kept;
  std::set<std::tuple<std::string, std::string, std::string>> keys;
  auto key_part = [](const std::string& raw) {
    try {
      return normalize(raw, NormalizationProfile::neural);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::empty_after_normalization) throw;
      return std::string();
    }
  };
  for (const auto& rec : records) {
    if (!is_person_name(rec.first + " " + rec.last, filter)) {
      ++summary.filtered_out;
      continue;
    }
    if (!keys.emplace(key_part(rec.first), key_part(rec.last), rec.geo).second) {
      ++summary.duplicates;
      continue;
    }
    kept.push_back(rec);
  }
  const auto sampled = representative_sample(kept, config.sample.size, config.sample.shares, config.seed);
  summary.written = sampled.size();
  csv::write_text_file(args.output_csv, format_person_records(sampled, config.races));
  return summary;
}

}  // namespace nameproxy

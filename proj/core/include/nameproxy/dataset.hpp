#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nameproxy/race.hpp"

namespace nameproxy {

enum class RaceColumn { required, optional };

// Reads `first_name,last_name,geo_id,race` (header required, extra columns
// ignored). A `row_id` column is used when present; otherwise row ids are
// the 0-based data row index. Violations raise Error{schema} naming the line.
std::vector<PersonRecord> read_person_records(const std::string& path, const RaceSet& races,
                                              RaceColumn race_column = RaceColumn::required);
std::vector<PersonRecord> parse_person_records(std::string_view text, std::string_view source, const RaceSet& races,
                                               RaceColumn race_column = RaceColumn::required);

// `row_id,first_name,last_name,geo_id,race`
std::string format_person_records(std::span<const PersonRecord> records, const RaceSet& races);

struct PredictionRow {
  std::string row_id;
  std::string model;
  std::optional<ProbVector> probs;
};

// `row_id,model,p_<race>...,max_race,covered`; declined rows leave the
// probability and max_race fields empty with covered=0.
std::string format_predictions(std::span<const PredictionRow> rows, const RaceSet& races);

// Accepts files from this tool or any third party following the layout;
// max_race and covered may be omitted.
// Probability rows summing to one within 1e-3 are renormalized (rounded
// output from other packages); anything further off is a schema error.
std::vector<PredictionRow> read_predictions(const std::string& path, const RaceSet& races);
std::vector<PredictionRow> parse_predictions(std::string_view text, std::string_view source, const RaceSet& races);

}  // namespace nameproxy

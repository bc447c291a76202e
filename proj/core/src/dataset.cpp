#include "nameproxy/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include <fmt/format.h>

#include "nameproxy/csv.hpp"
#include "nameproxy/error.hpp"

namespace nameproxy {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string lower(std::string s) {
  for (char& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return s;
}

constexpr double kIngestTolerance = 1e-3;

}  // namespace

std::vector<PersonRecord> parse_person_records(std::string_view text, std::string_view source, const RaceSet& races,
                                               RaceColumn race_column) {
  const auto doc = csv::parse(text, source);
  const auto first_col = doc.require_column("first_name", source);
  const auto last_col = doc.require_column("last_name", source);
  const auto geo_col = doc.require_column("geo_id", source);
  const auto race_col = race_column == RaceColumn::required ? std::optional(doc.require_column("race", source))
                                                            : doc.column("race");
  const auto id_col = doc.column("row_id");

  std::vector<PersonRecord> out;
  out.reserve(doc.rows.size());
  std::unordered_set<std::string> ids;
  for (std::size_t i = 0; i < doc.rows.size(); ++i) {
    const auto& row = doc.rows[i];
    PersonRecord rec;
    rec.row_id = id_col ? trim(row.fields[*id_col]) : std::to_string(i);
    rec.first = trim(row.fields[first_col]);
    rec.last = trim(row.fields[last_col]);
    rec.geo = trim(row.fields[geo_col]);
    if (rec.row_id.empty()) fail(ErrorCode::schema, fmt::format("{}: line {}: empty row_id", source, row.line));
    if (rec.first.empty() || rec.last.empty()) {
      fail(ErrorCode::schema, fmt::format("{}: line {}: first_name and last_name must be non-empty", source, row.line));
    }
    if (race_col) {
      const auto label = lower(trim(row.fields[*race_col]));
      if (!label.empty()) {
        rec.race = races.index_of(label);
        if (!rec.race) fail(ErrorCode::schema, fmt::format("{}: line {}: unknown race '{}'", source, row.line, label));
      } else if (race_column == RaceColumn::required) {
        fail(ErrorCode::schema, fmt::format("{}: line {}: missing race", source, row.line));
      }
    }
    if (!ids.insert(rec.row_id).second) {
      fail(ErrorCode::schema, fmt::format("{}: line {}: duplicate row_id '{}'", source, row.line, rec.row_id));
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<PersonRecord> read_person_records(const std::string& path, const RaceSet& races, RaceColumn race_column) {
  return parse_person_records(csv::read_text_file(path), path, races, race_column);
}

std::string format_person_records(std::span<const PersonRecord> records, const RaceSet& races) {
  std::string out = "row_id,first_name,last_name,geo_id,race\n";
  for (const auto& r : records) {
    out += csv::join({r.row_id, r.first, r.last, r.geo, r.race ? races.label(*r.race) : std::string()});
    out.push_back('\n');
  }
  return out;
}

std::string format_predictions(std::span<const PredictionRow> rows, const RaceSet& races) {
  std::vector<std::string> header{"row_id", "model"};
  for (const auto& l : races.labels()) header.push_back("p_" + l);
  header.emplace_back("max_race");
  header.emplace_back("covered");
  std::string out = csv::join(header) + "\n";
  for (const auto& row : rows) {
    out += csv::escape(row.row_id);
    out.push_back(',');
    out += csv::escape(row.model);
    for (std::size_t r = 0; r < races.size(); ++r) {
      out.push_back(',');
      if (row.probs) out += fmt::format("{:.17g}", (*row.probs)[r]);
    }
    out.push_back(',');
    if (row.probs) out += csv::escape(argmax_race(*row.probs, races));
    out += row.probs ? ",1\n" : ",0\n";
  }
  return out;
}

std::vector<PredictionRow> parse_predictions(std::string_view text, std::string_view source, const RaceSet& races) {
  const auto doc = csv::parse(text, source);
  const auto id_col = doc.require_column("row_id", source);
  const auto model_col = doc.require_column("model", source);
  // optional: without it, a row with every probability blank is a decline
  const auto covered_col = doc.column("covered");
  std::vector<std::size_t> p_cols;
  for (const auto& l : races.labels()) p_cols.push_back(doc.require_column("p_" + l, source));

  std::vector<PredictionRow> out;
  out.reserve(doc.rows.size());
  for (const auto& row : doc.rows) {
    const auto where = fmt::format("{}: line {}", source, row.line);
    PredictionRow pred{trim(row.fields[id_col]), trim(row.fields[model_col]), std::nullopt};
    if (pred.model.empty()) fail(ErrorCode::schema, fmt::format("{}: empty model id", where));
    std::string covered;
    if (covered_col) {
      covered = trim(row.fields[*covered_col]);
      if (covered != "0" && covered != "1") fail(ErrorCode::schema, fmt::format("{}: covered must be 0 or 1", where));
    } else {
      const bool blank = std::all_of(p_cols.begin(), p_cols.end(), [&](std::size_t c) { return trim(row.fields[c]).empty(); });
      covered = blank ? "0" : "1";
    }
    if (covered == "1") {
      std::vector<double> p;
      for (auto c : p_cols) {
        const auto field = trim(row.fields[c]);
        char* end = nullptr;
        const double v = std::strtod(field.c_str(), &end);
        if (field.empty() || end != field.c_str() + field.size() || !std::isfinite(v) || v < 0.0) {
          fail(ErrorCode::schema, fmt::format("{}: '{}' is not a probability", where, field));
        }
        p.push_back(v);
      }
      double sum = 0.0;
      for (double v : p) sum += v;
      if (std::abs(sum - 1.0) > kIngestTolerance) {
        fail(ErrorCode::schema, fmt::format("{}: probabilities sum to {}", where, sum));
      }
      pred.probs = renormalize(p);
    }
    out.push_back(std::move(pred));
  }
  return out;
}

std::vector<PredictionRow> read_predictions(const std::string& path, const RaceSet& races) {
  return parse_predictions(csv::read_text_file(path), path, races);
}

}  // namespace nameproxy

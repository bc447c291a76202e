#include "nameproxy/tables.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "nameproxy/csv.hpp"
#include "nameproxy/error.hpp"
#include "nameproxy/sampling.hpp"

namespace nameproxy {

std::string_view to_string(NameKind kind) noexcept {
  return kind == NameKind::surname ? "surname" : "firstname";
}

std::string_view to_string(Source source) noexcept {
  return source == Source::internal ? "internal" : "external";
}

std::int64_t NameEntry::total() const { return std::accumulate(counts.begin(), counts.end(), std::int64_t{0}); }

bool passes_suppression(std::span<const std::int64_t> counts) {
  std::int64_t total = 0;
  std::size_t nonzero = 0;
  for (auto c : counts) {
    total += c;
    if (c != 0) ++nonzero;
  }
  if (total >= 30) return true;
  return total >= 15 && nonzero == 1;
}

NameTable::NameTable(RaceSet races, NameKind kind) : races_(std::move(races)), kind_(kind) {
  totals_[0].assign(races_.size(), 0);
  totals_[1].assign(races_.size(), 0);
}

const NameEntry* NameTable::find(std::string_view name) const {
  auto it = entries_.find(name);
  return it == entries_.end() ? nullptr : &it->second;
}

void NameTable::insert(std::string name, NameEntry entry) {
  if (entry.counts.size() != races_.size()) {
    fail(ErrorCode::shape_mismatch, fmt::format("entry '{}' has {} counts for {} races", name,
                                                entry.counts.size(), races_.size()));
  }
  entries_.insert_or_assign(std::move(name), std::move(entry));
}

void NameTable::set_race_totals(Source source, Counts totals) {
  if (totals.size() != races_.size()) fail(ErrorCode::shape_mismatch, "race totals length differs from race set");
  totals_[index(source)] = std::move(totals);
}

namespace {

void require_labels(std::span<const PersonRecord> records, std::size_t race_count) {
  std::vector<std::size_t> seen(race_count, 0);
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!records[i].race || *records[i].race >= race_count) {
      fail(ErrorCode::invalid_argument, fmt::format("record {} has no valid race label", i));
    }
    ++seen[*records[i].race];
  }
  for (std::size_t r = 0; r < race_count; ++r) {
    if (seen[r] == 0) fail(ErrorCode::insufficient_class, fmt::format("race index {} has no records", r));
  }
}

}  // namespace

NameTableBuild build_name_table(std::span<const PersonRecord> records, const RaceSet& races, NameKind kind,
                                const TableBuildOptions& options) {
  require_labels(records, races.size());

  std::vector<PersonRecord> resampled;
  std::span<const PersonRecord> pool = records;
  if (options.target_shares) {
    if (options.target_shares->size() != races.size()) {
      fail(ErrorCode::length_mismatch, "target shares length differs from race set");
    }
    std::vector<std::size_t> available(races.size(), 0);
    for (const auto& rec : records) ++available[*rec.race];
    const auto n = max_representative_size(available, *options.target_shares);
    resampled = representative_sample(records, n, *options.target_shares, options.seed);
    pool = resampled;
  }

  TableBuildStats stats;
  stats.records_in = records.size();
  Counts totals(races.size(), 0);
  std::map<std::string, Counts, std::less<>> counts;
  for (const auto& rec : pool) {
    std::string key;
    try {
      key = normalize(kind == NameKind::surname ? rec.last : rec.first, NormalizationProfile::table,
                      options.normalize);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::empty_after_normalization) throw;
    }
    if (key.size() <= 1) {
      ++stats.invalid_names;
      continue;
    }
    auto [it, inserted] = counts.try_emplace(std::move(key), Counts(races.size(), 0));
    ++it->second[*rec.race];
    ++totals[*rec.race];
    ++stats.records_used;
  }

  NameTable table(races, kind);
  table.set_race_totals(Source::internal, totals);
  stats.distinct_names = counts.size();
  for (auto& [name, c] : counts) {
    if (passes_suppression(c)) {
      table.insert(name, NameEntry{std::move(c), Source::internal});
      ++stats.names_kept;
    } else {
      ++stats.names_suppressed;
    }
  }
  if (table.size() == 0) {
    fail(ErrorCode::empty_table, fmt::format("no {} survives the suppression rule", to_string(kind)));
  }
  return NameTableBuild{std::move(table), stats};
}

GeoTable build_geo_table(std::span<const PersonRecord> records, const RaceSet& races) {
  if (records.empty()) fail(ErrorCode::empty_table, "no records to build a geography table from");
  GeoTable table{races, {}, Counts(races.size(), 0)};
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    if (!rec.race || *rec.race >= races.size()) {
      fail(ErrorCode::invalid_argument, fmt::format("record {} has no valid race label", i));
    }
    if (rec.geo.empty()) fail(ErrorCode::invalid_argument, fmt::format("record {} has an empty geo id", i));
    auto [it, inserted] = table.entries.try_emplace(rec.geo, Counts(races.size(), 0));
    ++it->second[*rec.race];
    ++table.race_totals[*rec.race];
  }
  return table;
}

Prefer default_preference(NameKind kind) noexcept {
  return kind == NameKind::surname ? Prefer::external : Prefer::internal;
}

NameTable merge_tables(const NameTable& internal, const NameTable& external, Prefer prefer) {
  if (internal.kind() != external.kind()) {
    fail(ErrorCode::kind_mismatch, fmt::format("cannot merge a {} table with a {} table",
                                               to_string(internal.kind()), to_string(external.kind())));
  }
  if (internal.races() != external.races()) {
    fail(ErrorCode::kind_mismatch, "tables use different race sets");
  }
  const NameTable& winner = prefer == Prefer::internal ? internal : external;
  const NameTable& loser = prefer == Prefer::internal ? external : internal;

  NameTable merged = winner;
  for (const auto& [name, entry] : loser.entries()) {
    if (!merged.find(name)) merged.insert(name, entry);
  }
  merged.set_race_totals(Source::internal, internal.race_totals(Source::internal));
  merged.set_race_totals(Source::external, external.race_totals(Source::external));
  return merged;
}

std::optional<ProbVector> race_given_name(const NameTable& table, std::string_view name,
                                          const QueryOptions& options) {
  const NameEntry* entry = table.find(name);
  if (!entry) return std::nullopt;
  std::vector<double> raw(entry->counts.size());
  for (std::size_t r = 0; r < raw.size(); ++r) {
    raw[r] = static_cast<double>(entry->counts[r]) + options.pseudo_count;
  }
  if (std::all_of(raw.begin(), raw.end(), [](double v) { return v == 0.0; })) return std::nullopt;
  return renormalize(raw);
}

std::optional<Likelihood> name_given_race(const NameTable& table, std::string_view name,
                                          const QueryOptions& options) {
  const NameEntry* entry = table.find(name);
  if (!entry) return std::nullopt;
  const Counts& totals = table.race_totals(entry->source);
  const double vocab = static_cast<double>(table.size());
  Likelihood out(entry->counts.size(), 0.0);
  for (std::size_t r = 0; r < out.size(); ++r) {
    const double denom = static_cast<double>(totals[r]) + options.pseudo_count * vocab;
    if (denom > 0.0) out[r] = (static_cast<double>(entry->counts[r]) + options.pseudo_count) / denom;
  }
  return out;
}

std::optional<Likelihood> geo_given_race(const GeoTable& table, std::string_view geo,
                                         const QueryOptions& options) {
  auto it = table.entries.find(geo);
  if (it == table.entries.end()) return std::nullopt;
  const double vocab = static_cast<double>(table.entries.size());
  Likelihood out(it->second.size(), 0.0);
  for (std::size_t r = 0; r < out.size(); ++r) {
    const double denom = static_cast<double>(table.race_totals[r]) + options.pseudo_count * vocab;
    if (denom > 0.0) out[r] = (static_cast<double>(it->second[r]) + options.pseudo_count) / denom;
  }
  return out;
}

// --- persistence ------------------------------------------------------------

namespace {

std::string join_counts(const Counts& c) {
  return fmt::format("{}", fmt::join(c, ","));
}

std::vector<std::string> count_header(std::string first, const RaceSet& races) {
  std::vector<std::string> h{std::move(first)};
  for (const auto& l : races.labels()) h.push_back("count_" + l);
  return h;
}

std::int64_t parse_count(std::string_view text, std::string_view where) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || v < 0) {
    fail(ErrorCode::schema, fmt::format("{}: '{}' is not a non-negative integer count", where, text));
  }
  return v;
}

double parse_real(std::string_view text, std::string_view where) {
  std::string s(text);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) {
    fail(ErrorCode::schema, fmt::format("{}: '{}' is not a number", where, text));
  }
  return v;
}

struct TableMeta {
  std::string kind;
  std::optional<Counts> internal_totals;
  std::optional<Counts> external_totals;
};

Counts parse_count_list(std::string_view text, std::size_t expected, std::string_view where) {
  Counts out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    out.push_back(parse_count(text.substr(start, end - start), where));
    start = end + 1;
  }
  if (out.size() != expected) {
    fail(ErrorCode::schema, fmt::format("{}: expected {} race totals, found {}", where, expected, out.size()));
  }
  return out;
}

std::optional<TableMeta> parse_meta(const csv::Document& doc, std::size_t races, const std::string& path) {
  for (const auto& line : doc.comments) {
    std::string_view rest = line;
    while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
    if (!rest.starts_with("nameproxy-table")) continue;
    TableMeta meta;
    std::size_t pos = 0;
    while (pos < rest.size()) {
      auto end = rest.find(' ', pos);
      if (end == std::string_view::npos) end = rest.size();
      auto tok = rest.substr(pos, end - pos);
      if (auto eq = tok.find('='); eq != std::string_view::npos) {
        auto key = tok.substr(0, eq);
        auto value = tok.substr(eq + 1);
        if (key == "kind") meta.kind = std::string(value);
        if (key == "internal_totals") meta.internal_totals = parse_count_list(value, races, path);
        if (key == "external_totals") meta.external_totals = parse_count_list(value, races, path);
      }
      pos = end + 1;
    }
    return meta;
  }
  return std::nullopt;
}

void check_count_columns(const csv::Document& doc, const std::string& key_column, const RaceSet& races,
                         const std::string& path) {
  const auto expected = count_header(key_column, races);
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i >= doc.header.size() || doc.header[i] != expected[i]) {
      fail(ErrorCode::schema, fmt::format("{}: header column {} should be '{}'", path, i + 1, expected[i]));
    }
  }
}

Counts row_counts(const csv::Row& row, std::size_t races, const std::string& path) {
  Counts c(races);
  const auto where = fmt::format("{}: line {}", path, row.line);
  for (std::size_t r = 0; r < races; ++r) c[r] = parse_count(row.fields[r + 1], where);
  return c;
}

}  // namespace

std::string format_name_table(const NameTable& table) {
  std::string out = fmt::format("# nameproxy-table kind={} internal_totals={} external_totals={}\n",
                                to_string(table.kind()), join_counts(table.race_totals(Source::internal)),
                                join_counts(table.race_totals(Source::external)));
  auto header = count_header("name", table.races());
  header.emplace_back("source");
  out += csv::join(header) + "\n";
  for (const auto& [name, entry] : table.entries()) {
    out += fmt::format("{},{},{}\n", csv::escape(name), join_counts(entry.counts), to_string(entry.source));
  }
  return out;
}

std::string format_geo_table(const GeoTable& table) {
  std::string out = fmt::format("# nameproxy-table kind=geo internal_totals={}\n", join_counts(table.race_totals));
  out += csv::join(count_header("geo_id", table.races)) + "\n";
  for (const auto& [geo, counts] : table.entries) {
    out += fmt::format("{},{}\n", csv::escape(geo), join_counts(counts));
  }
  return out;
}

void write_name_table(const NameTable& table, const std::string& path) {
  csv::write_text_file(path, format_name_table(table));
}

void write_geo_table(const GeoTable& table, const std::string& path) {
  csv::write_text_file(path, format_geo_table(table));
}

NameTable read_name_table(const std::string& path, const RaceSet& races) {
  const auto doc = csv::read_file(path);
  const auto meta = parse_meta(doc, races.size(), path);
  if (!meta || (meta->kind != "surname" && meta->kind != "firstname")) {
    fail(ErrorCode::schema, fmt::format("{}: missing or invalid name-table metadata line", path));
  }
  check_count_columns(doc, "name", races, path);
  const auto source_col = doc.require_column("source", path);
  NameTable table(races, meta->kind == "surname" ? NameKind::surname : NameKind::firstname);
  if (meta->internal_totals) table.set_race_totals(Source::internal, *meta->internal_totals);
  if (meta->external_totals) table.set_race_totals(Source::external, *meta->external_totals);
  for (const auto& row : doc.rows) {
    const auto& src = row.fields[source_col];
    if (src != "internal" && src != "external") {
      fail(ErrorCode::schema, fmt::format("{}: line {}: unknown source '{}'", path, row.line, src));
    }
    table.insert(row.fields[0], NameEntry{row_counts(row, races.size(), path),
                                          src == "internal" ? Source::internal : Source::external});
  }
  return table;
}

GeoTable read_geo_table(const std::string& path, const RaceSet& races) {
  const auto doc = csv::read_file(path);
  check_count_columns(doc, "geo_id", races, path);
  GeoTable table{races, {}, Counts(races.size(), 0)};
  for (const auto& row : doc.rows) {
    auto counts = row_counts(row, races.size(), path);
    for (std::size_t r = 0; r < counts.size(); ++r) table.race_totals[r] += counts[r];
    auto [it, inserted] = table.entries.try_emplace(row.fields[0], Counts(races.size(), 0));
    for (std::size_t r = 0; r < counts.size(); ++r) it->second[r] += counts[r];
  }
  if (const auto meta = parse_meta(doc, races.size(), path); meta && meta->internal_totals) {
    for (std::size_t r = 0; r < races.size(); ++r) {
      if ((*meta->internal_totals)[r] != table.race_totals[r]) {
        fail(ErrorCode::schema, fmt::format("{}: race totals in the metadata line disagree with the rows", path));
      }
    }
  }
  return table;
}

NameTable read_external_name_table(const std::string& path, const RaceSet& races, NameKind kind,
                                   const NormalizeOptions& normalize_options) {
  const auto doc = csv::read_file(path);
  NameTable table(races, kind);
  std::map<std::string, Counts, std::less<>> counts;

  const auto name_col = doc.require_column("name", path);
  const bool probability_layout = doc.column("count").has_value();
  std::vector<std::size_t> cols;
  for (const auto& l : races.labels()) {
    cols.push_back(doc.require_column((probability_layout ? "p_" : "count_") + l, path));
  }
  const auto count_col = doc.column("count");

  for (const auto& row : doc.rows) {
    const auto where = fmt::format("{}: line {}", path, row.line);
    std::string key;
    try {
      key = normalize(row.fields[name_col], NormalizationProfile::table, normalize_options);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::empty_after_normalization) throw;
      continue;
    }
    Counts c(races.size(), 0);
    if (probability_layout) {
      const double total = static_cast<double>(parse_count(row.fields[*count_col], where));
      for (std::size_t r = 0; r < cols.size(); ++r) {
        const double p = parse_real(row.fields[cols[r]], where);
        if (p < 0.0 || p > 1.0) fail(ErrorCode::schema, fmt::format("{}: probability {} outside [0, 1]", where, p));
        c[r] = std::llround(p * total);
      }
    } else {
      for (std::size_t r = 0; r < cols.size(); ++r) c[r] = parse_count(row.fields[cols[r]], where);
    }
    auto [it, inserted] = counts.try_emplace(std::move(key), Counts(races.size(), 0));
    for (std::size_t r = 0; r < c.size(); ++r) it->second[r] += c[r];
  }

  Counts totals(races.size(), 0);
  for (auto& [name, c] : counts) {
    for (std::size_t r = 0; r < c.size(); ++r) totals[r] += c[r];
    table.insert(name, NameEntry{std::move(c), Source::external});
  }
  table.set_race_totals(Source::external, std::move(totals));
  return table;
}

}  // namespace nameproxy

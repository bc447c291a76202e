#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nameproxy/normalize.hpp"
#include "nameproxy/race.hpp"

namespace nameproxy {

enum class NameKind { surname, firstname };
enum class Source { internal, external };

std::string_view to_string(NameKind kind) noexcept;
std::string_view to_string(Source source) noexcept;

using Counts = std::vector<std::int64_t>;
// Per-race conditional likelihoods P(x | r). Not a distribution over races.
using Likelihood = std::vector<double>;

struct NameEntry {
  Counts counts;
  Source source = Source::internal;

  std::int64_t total() const;
  bool operator==(const NameEntry&) const = default;
};

// Kept iff total >= 30, or 15 <= total <= 29 with exactly one nonzero race.
bool passes_suppression(std::span<const std::int64_t> counts);

// Counts per race keyed by table-normalized name. Each source keeps its own
// race totals so P(name | r) of a merged entry uses the population the
// entry was counted in.
class NameTable {
 public:
  NameTable(RaceSet races, NameKind kind);

  const RaceSet& races() const noexcept { return races_; }
  NameKind kind() const noexcept { return kind_; }
  const std::map<std::string, NameEntry, std::less<>>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

  const NameEntry* find(std::string_view name) const;
  void insert(std::string name, NameEntry entry);

  const Counts& race_totals(Source source) const { return totals_[index(source)]; }
  void set_race_totals(Source source, Counts totals);

  bool operator==(const NameTable&) const = default;

 private:
  static std::size_t index(Source s) { return s == Source::internal ? 0 : 1; }

  RaceSet races_;
  NameKind kind_;
  std::map<std::string, NameEntry, std::less<>> entries_;
  std::array<Counts, 2> totals_;
};

struct GeoTable {
  RaceSet races;
  std::map<std::string, Counts, std::less<>> entries;
  Counts race_totals;

  bool operator==(const GeoTable&) const = default;
};

struct TableBuildOptions {
  std::uint64_t seed = 0;
  // Resample to these race proportions before counting (largest feasible n).
  std::optional<std::vector<double>> target_shares;
  NormalizeOptions normalize;
};

struct TableBuildStats {
  std::size_t records_in = 0;
  std::size_t records_used = 0;  // after resampling and the length rule
  std::size_t invalid_names = 0;
  std::size_t distinct_names = 0;
  std::size_t names_kept = 0;
  std::size_t names_suppressed = 0;
};

struct NameTableBuild {
  NameTable table;
  TableBuildStats stats;
};

// Every record must carry a race. Throws Error{insufficient_class} when a
// race has no records and Error{empty_table} when nothing survives.
NameTableBuild build_name_table(std::span<const PersonRecord> records, const RaceSet& races,
                                NameKind kind, const TableBuildOptions& options = {});

GeoTable build_geo_table(std::span<const PersonRecord> records, const RaceSet& races);

enum class Prefer { internal, external };

// Union of names; on collision the preferred side's entry wins whole.
// Throws Error{kind_mismatch} for differing kinds or race sets.
NameTable merge_tables(const NameTable& internal, const NameTable& external, Prefer prefer);

// Default preference: surnames keep the external (Census) entry, first names
// keep the internal (voter file) entry.
Prefer default_preference(NameKind kind) noexcept;

struct QueryOptions {
  double pseudo_count = 0.0;  // additive smoothing; 0 keeps exact zeros
};

// Keys must already be table-normalized. Absent keys yield nullopt.
std::optional<ProbVector> race_given_name(const NameTable& table, std::string_view name,
                                          const QueryOptions& options = {});
std::optional<Likelihood> name_given_race(const NameTable& table, std::string_view name,
                                          const QueryOptions& options = {});
std::optional<Likelihood> geo_given_race(const GeoTable& table, std::string_view geo,
                                         const QueryOptions& options = {});

// Persistence. Layout:
//   # nameproxy-table kind=<surname|firstname|geo> internal_totals=a,b,.. external_totals=..
//   name,count_<race>...,source
std::string format_name_table(const NameTable& table);
std::string format_geo_table(const GeoTable& table);
void write_name_table(const NameTable& table, const std::string& path);
void write_geo_table(const GeoTable& table, const std::string& path);
NameTable read_name_table(const std::string& path, const RaceSet& races);
GeoTable read_geo_table(const std::string& path, const RaceSet& races);

// External name tables come either in the table layout above or as
// probabilities with an aggregate count (`name,count,p_<race>...`, Census
// style). Probabilities are turned into pseudo-counts by rounding p * count.
// Names are table-normalized on load; every entry is tagged external.
NameTable read_external_name_table(const std::string& path, const RaceSet& races, NameKind kind,
                                   const NormalizeOptions& normalize = {});

}  // namespace nameproxy

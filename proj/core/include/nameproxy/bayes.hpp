#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "nameproxy/race.hpp"
#include "nameproxy/tables.hpp"

namespace nameproxy {

enum class DeclineReason { none, unknown_surname, unknown_firstname, unknown_geo, zero_mass };

std::string_view to_string(DeclineReason reason) noexcept;

// A posterior, or the reason there is none.
struct Posterior {
  std::optional<ProbVector> probs;
  DeclineReason reason = DeclineReason::none;

  bool covered() const noexcept { return probs.has_value(); }
};

struct BayesContext {
  NameTable surnames;
  std::optional<NameTable> firstnames;
  GeoTable geo;
  RaceSet races;
  NormalizeOptions normalize;
  QueryOptions query;

  BayesContext(NameTable surnames, std::optional<NameTable> firstnames, GeoTable geo);
};

// P(r|s) P(g|r), renormalized. Raw names are table-normalized here.
Posterior bisg(const BayesContext& ctx, std::string_view last, std::string_view geo);

// P(r|s) P(f|r) P(g|r), renormalized. Throws Error{missing_firstname_table}.
Posterior bifsg(const BayesContext& ctx, std::string_view first, std::string_view last,
                std::string_view geo);

// P(r|n) P(g|r), renormalized, for any name-only model's output. An absent
// likelihood means the geography is unknown.
Posterior geo_augment(const ProbVector& name_probs, const std::optional<Likelihood>& geo_likelihood);

// Shared core: elementwise product of the prior with every likelihood.
Posterior combine(std::span<const double> prior, std::span<const Likelihood> likelihoods);

}  // namespace nameproxy

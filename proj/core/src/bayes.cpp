#include "nameproxy/bayes.hpp"

#include <fmt/format.h>

#include "nameproxy/error.hpp"

namespace nameproxy {

std::string_view to_string(DeclineReason reason) noexcept {
  switch (reason) {
    case DeclineReason::none: return "none";
    case DeclineReason::unknown_surname: return "unknown_surname";
    case DeclineReason::unknown_firstname: return "unknown_firstname";
    case DeclineReason::unknown_geo: return "unknown_geo";
    case DeclineReason::zero_mass: return "zero_mass";
  }
  return "unknown";
}

BayesContext::BayesContext(NameTable surnames_in, std::optional<NameTable> firstnames_in, GeoTable geo_in)
    : surnames(std::move(surnames_in)),
      firstnames(std::move(firstnames_in)),
      geo(std::move(geo_in)),
      races(surnames.races()) {
  if (geo.races != races || (firstnames && firstnames->races() != races)) {
    fail(ErrorCode::invalid_argument, "all tables in a Bayes context must share one race set");
  }
  if (surnames.kind() != NameKind::surname) fail(ErrorCode::kind_mismatch, "surname slot holds a first-name table");
  if (firstnames && firstnames->kind() != NameKind::firstname) {
    fail(ErrorCode::kind_mismatch, "first-name slot holds a surname table");
  }
}

Posterior combine(std::span<const double> prior, std::span<const Likelihood> likelihoods) {
  std::vector<double> numerator(prior.begin(), prior.end());
  for (const auto& lk : likelihoods) {
    if (lk.size() != numerator.size()) fail(ErrorCode::shape_mismatch, "likelihood length differs from prior");
    for (std::size_t r = 0; r < numerator.size(); ++r) numerator[r] *= lk[r];
  }
  double sum = 0.0;
  for (double v : numerator) sum += v;
  if (!(sum > 0.0)) return Posterior{std::nullopt, DeclineReason::zero_mass};
  return Posterior{renormalize(numerator), DeclineReason::none};
}

namespace {

std::optional<std::string> table_key(std::string_view raw, const NormalizeOptions& options) {
  try {
    return normalize(raw, NormalizationProfile::table, options);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::empty_after_normalization) return std::nullopt;
    throw;
  }
}

}  // namespace

Posterior bisg(const BayesContext& ctx, std::string_view last, std::string_view geo) {
  const auto key = table_key(last, ctx.normalize);
  const auto prior = key ? race_given_name(ctx.surnames, *key, ctx.query) : std::nullopt;
  if (!prior) return Posterior{std::nullopt, DeclineReason::unknown_surname};
  auto geo_lk = geo_given_race(ctx.geo, geo, ctx.query);
  if (!geo_lk) return Posterior{std::nullopt, DeclineReason::unknown_geo};
  const Likelihood terms[] = {std::move(*geo_lk)};
  return combine(prior->values(), terms);
}

Posterior bifsg(const BayesContext& ctx, std::string_view first, std::string_view last, std::string_view geo) {
  if (!ctx.firstnames) fail(ErrorCode::missing_firstname_table, "BIFSG needs a first-name table");
  const auto surname_key = table_key(last, ctx.normalize);
  const auto prior = surname_key ? race_given_name(ctx.surnames, *surname_key, ctx.query) : std::nullopt;
  if (!prior) return Posterior{std::nullopt, DeclineReason::unknown_surname};
  const auto first_key = table_key(first, ctx.normalize);
  auto first_lk = first_key ? name_given_race(*ctx.firstnames, *first_key, ctx.query) : std::nullopt;
  if (!first_lk) return Posterior{std::nullopt, DeclineReason::unknown_firstname};
  auto geo_lk = geo_given_race(ctx.geo, geo, ctx.query);
  if (!geo_lk) return Posterior{std::nullopt, DeclineReason::unknown_geo};
  const Likelihood terms[] = {std::move(*first_lk), std::move(*geo_lk)};
  return combine(prior->values(), terms);
}

Posterior geo_augment(const ProbVector& name_probs, const std::optional<Likelihood>& geo_likelihood) {
  if (!geo_likelihood) return Posterior{std::nullopt, DeclineReason::unknown_geo};
  return combine(name_probs.values(), std::span<const Likelihood>(&*geo_likelihood, 1));
}

}  // namespace nameproxy

#include "nameproxy/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "nameproxy/error.hpp"
#include "nameproxy/rng.hpp"

namespace nameproxy {
namespace {

std::vector<double> rescaled(std::span<const double> shares) {
  if (shares.empty()) fail(ErrorCode::invalid_argument, "no shares given");
  double sum = 0.0;
  for (double s : shares) {
    if (!(s >= 0.0) || !std::isfinite(s)) fail(ErrorCode::invalid_argument, "shares must be non-negative");
    sum += s;
  }
  if (sum <= 0.0) fail(ErrorCode::invalid_argument, "shares sum to zero");
  std::vector<double> out(shares.begin(), shares.end());
  for (double& s : out) s /= sum;
  return out;
}

}  // namespace

std::vector<std::size_t> representative_quotas(std::size_t n, std::span<const double> shares) {
  const auto w = rescaled(shares);
  std::vector<std::size_t> quotas(w.size());
  std::vector<double> remainder(w.size());
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double exact = static_cast<double>(n) * w[i];
    quotas[i] = static_cast<std::size_t>(std::floor(exact));
    remainder[i] = exact - static_cast<double>(quotas[i]);
    assigned += quotas[i];
  }
  // Floating error can push a floor one past n in degenerate cases.
  while (assigned > n) {
    auto it = std::max_element(quotas.begin(), quotas.end());
    --*it;
    --assigned;
  }
  std::vector<std::size_t> order(w.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < n; k = (k + 1) % order.size()) {
    if (w[order[k]] > 0.0) {
      ++quotas[order[k]];
      ++assigned;
    }
  }
  return quotas;
}

std::vector<std::size_t> representative_sample_indices(std::span<const PersonRecord> records,
                                                       std::size_t n, std::span<const double> shares,
                                                       std::uint64_t seed) {
  const auto quotas = representative_quotas(n, shares);
  std::vector<std::vector<std::size_t>> by_race(quotas.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& race = records[i].race;
    if (!race) fail(ErrorCode::invalid_argument, fmt::format("record {} has no race label", i));
    if (*race >= quotas.size()) fail(ErrorCode::invalid_argument, "race index outside the share vector");
    by_race[*race].push_back(i);
  }
  Rng rng(seed);
  std::vector<std::size_t> picked;
  picked.reserve(n);
  for (std::size_t r = 0; r < quotas.size(); ++r) {
    auto& pool = by_race[r];
    if (pool.size() < quotas[r]) {
      fail(ErrorCode::insufficient_class,
           fmt::format("race index {} has {} records but its quota is {}", r, pool.size(), quotas[r]));
    }
    // partial Fisher-Yates: the first quota slots become the draw
    for (std::size_t k = 0; k < quotas[r]; ++k) {
      std::swap(pool[k], pool[k + rng.below(pool.size() - k)]);
      picked.push_back(pool[k]);
    }
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

std::vector<PersonRecord> representative_sample(std::span<const PersonRecord> records, std::size_t n,
                                                std::span<const double> shares, std::uint64_t seed) {
  std::vector<PersonRecord> out;
  for (auto i : representative_sample_indices(records, n, shares, seed)) out.push_back(records[i]);
  return out;
}

std::size_t max_representative_size(std::span<const std::size_t> available,
                                    std::span<const double> shares) {
  const auto w = rescaled(shares);
  if (available.size() != w.size()) fail(ErrorCode::length_mismatch, "availability and shares differ in length");
  double bound = std::numeric_limits<double>::infinity();
  std::size_t total = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    total += available[i];
    // a quota never exceeds ceil(n * w), so n * w < available + 1
    if (w[i] > 0.0) bound = std::min(bound, static_cast<double>(available[i] + 1) / w[i]);
  }
  std::size_t n = std::isfinite(bound) ? std::min<std::size_t>(total, static_cast<std::size_t>(bound)) : total;
  auto fits = [&](std::size_t m) {
    const auto q = representative_quotas(m, w);
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (q[i] > available[i]) return false;
    }
    return true;
  };
  while (n > 0 && !fits(n)) --n;
  return n;
}

}  // namespace nameproxy

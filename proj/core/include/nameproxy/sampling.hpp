#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "nameproxy/race.hpp"

namespace nameproxy {

// National population shares for asian, black, hispanic, white. They sum to
// 0.967 and are rescaled to one wherever they are used.
inline constexpr double kNationalShares[] = {0.059, 0.126, 0.189, 0.593};

// Largest-remainder apportionment of n across shares (rescaled to sum to
// one). Fractional-part ties go to the lower index. Quotas sum to n exactly.
std::vector<std::size_t> representative_quotas(std::size_t n, std::span<const double> shares);

// Stratified draw without replacement. Every record must carry a race.
// Returns indices into `records` in ascending order. Throws
// Error{insufficient_class} when a race has fewer records than its quota.
std::vector<std::size_t> representative_sample_indices(std::span<const PersonRecord> records,
                                                       std::size_t n, std::span<const double> shares,
                                                       std::uint64_t seed);

std::vector<PersonRecord> representative_sample(std::span<const PersonRecord> records, std::size_t n,
                                                std::span<const double> shares, std::uint64_t seed);

// Largest n whose quotas fit within the per-race availability.
std::size_t max_representative_size(std::span<const std::size_t> available,
                                    std::span<const double> shares);

}  // namespace nameproxy

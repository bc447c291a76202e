#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "nameproxy/race.hpp"
#include "oracles.hpp"

namespace nameproxy::testing {

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "nameproxy_tests" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Voter-file-like records where surname, first name and geography all lean
// toward one race. Every surname and first name is common enough to survive
// suppression, except a handful of rare ones that always decline.
inline std::vector<PersonRecord> synthetic_voters(std::uint64_t seed, std::size_t n) {
  static const std::vector<std::vector<std::string>> surnames{
      {"nguyen", "tran", "kim", "wong"},
      {"washington", "jefferson", "banks", "booker"},
      {"garcia", "rodriguez", "hernandez", "lopez"},
      {"smith", "miller", "olson", "becker"}};
  static const std::vector<std::vector<std::string>> firsts{
      {"minh", "jun", "mei", "hoa"},
      {"deshawn", "latoya", "jamal", "ebony"},
      {"jose", "maria", "juan", "lucia"},
      {"cody", "molly", "dustin", "heather"}};
  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> race({1, 2, 3, 6});
  std::uniform_int_distribution<std::size_t> pick(0, 3);
  std::uniform_int_distribution<int> zone(0, 9);
  std::bernoulli_distribution cross(0.2);
  std::bernoulli_distribution rare(0.01);
  std::vector<PersonRecord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = race(rng);
    const auto sr = cross(rng) ? pick(rng) : r;
    const auto fr = cross(rng) ? pick(rng) : r;
    std::string last = surnames[sr][pick(rng)];
    if (rare(rng)) last = token("zz", i);  // unique surname, never survives suppression
    const int geo = cross(rng) ? zone(rng) : static_cast<int>(r) * 2 + zone(rng) % 2;
    out.push_back({std::to_string(i), firsts[fr][pick(rng)], last, std::to_string(20000 + geo), r});
  }
  return out;
}

}  // namespace nameproxy::testing

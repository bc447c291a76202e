#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace nameproxy {

// neural: lower-case, keep [a-z' -]. table: neural, then strip trailing
// suffix tokens and delete blanks, hyphens and apostrophes.
enum class NormalizationProfile { neural, table };

struct NormalizeOptions {
  std::vector<std::string> suffixes{"jr", "sr", "ii", "iii", "iv"};
};

// Throws Error{empty_after_normalization} when nothing survives.
std::string normalize(std::string_view name, NormalizationProfile profile,
                      const NormalizeOptions& options = {});

// Both parts longer than one character.
bool is_valid_name(std::string_view first, std::string_view last);

using FilterWords = std::unordered_set<std::string>;

const FilterWords& default_filter_words();
// One lower-case token per line; '#' starts a comment.
FilterWords load_filter_words(const std::string& path);
FilterWords parse_filter_words(std::string_view text);

// False iff any whitespace-delimited token of the lower-cased input is a
// filter word (business and organisation names).
bool is_person_name(std::string_view full, const FilterWords& filter_words);

inline constexpr std::size_t kWindow = 30;
inline constexpr int kVocabularySize = 30;  // 0 pad, 1-26 a-z, 27 '-', 28 '\'', 29 ' '
inline constexpr int kPadCode = 0;

struct EncodedName {
  std::array<std::uint8_t, kWindow> codes{};

  bool operator==(const EncodedName&) const = default;
};

int char_code(char c);  // -1 outside the vocabulary
char code_char(int code);

// Encodes "first last", truncated to the window and right padded with zeros.
// Inputs must already be neural-normalized; any other character throws
// Error{unknown_character}.
EncodedName encode_name(std::string_view first, std::string_view last);
std::vector<int> encode_text(std::string_view text, std::size_t window = kWindow);
// Nonzero prefix back to text.
std::string decode_name(const EncodedName& encoded);

}  // namespace nameproxy

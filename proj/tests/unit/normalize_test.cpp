#include <gtest/gtest.h>

#include <random>

#include "nameproxy/error.hpp"
#include "nameproxy/normalize.hpp"

namespace nameproxy {
namespace {

using P = NormalizationProfile;

TEST(NormalizeTest, NeuralKeepsHyphenApostropheSpace) {
  EXPECT_EQ(normalize("O'Brien-Smith3.", P::neural), "o'brien-smith");
  EXPECT_EQ(normalize("  Mary   Ann ", P::neural), "mary ann");
  EXPECT_EQ(normalize("Jos\xC3\xA9", P::neural), "jos");
}

TEST(NormalizeTest, TableStripsSuffixAndBlanks) {
  EXPECT_EQ(normalize("SMITH JR", P::table), "smith");
  EXPECT_EQ(normalize("Al-Amin", P::table), "alamin");
  EXPECT_EQ(normalize("Smith, Jr.", P::table), "smith");
  EXPECT_EQ(normalize("de la Cruz III", P::table), "delacruz");
  EXPECT_EQ(normalize("O'Neil", P::table), "oneil");
  // a lone suffix-looking token is the name itself
  EXPECT_EQ(normalize("Ii", P::table), "ii");
}

TEST(NormalizeTest, SuffixListIsConfigurable) {
  NormalizeOptions opts;
  opts.suffixes.push_back("esq");
  EXPECT_EQ(normalize("Brown Esq", P::table, opts), "brown");
  EXPECT_EQ(normalize("Brown Esq", P::table), "brownesq");
}

TEST(NormalizeTest, EmptyAfterNormalization) {
  for (auto profile : {P::neural, P::table}) {
    try {
      normalize("1234 ..", profile);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::empty_after_normalization);
    }
  }
}

TEST(ValidNameTest, LengthRule) {
  EXPECT_FALSE(is_valid_name("j", "smith"));
  EXPECT_TRUE(is_valid_name("jo", "li"));
  EXPECT_FALSE(is_valid_name("", "smith"));
  EXPECT_FALSE(is_valid_name("john", "s"));
}

TEST(PersonNameTest, FilterWords) {
  const FilterWords words{"llc", "installation"};
  EXPECT_FALSE(is_person_name("acme installation llc", words));
  EXPECT_TRUE(is_person_name("maria cruz santos", default_filter_words()));
  EXPECT_FALSE(is_person_name("smith llc", FilterWords{"llc"}));
  EXPECT_FALSE(is_person_name("Smith LLC", FilterWords{"llc"}));
  EXPECT_FALSE(is_person_name("acme installation llc", default_filter_words()));
}

TEST(PersonNameTest, FilterFileFormat) {
  const auto words = parse_filter_words("# business tokens\nllc\n  Holdings  # trailing comment\n\ninc\n");
  EXPECT_EQ(words, (FilterWords{"llc", "holdings", "inc"}));
}

TEST(EncodeTest, SmithWorkedExample) {
  const auto codes = encode_text("smith", 5);
  EXPECT_EQ(codes, (std::vector<int>{19, 13, 9, 20, 8}));
  const auto full = encode_name("jo", "smith");
  const std::vector<int> prefix(full.codes.begin() + 3, full.codes.begin() + 8);
  EXPECT_EQ(prefix, (std::vector<int>{19, 13, 9, 20, 8}));
}

TEST(EncodeTest, SeparatorAndPadding) {
  const auto e = encode_name("ab", "cd");
  std::array<std::uint8_t, kWindow> expected{};
  expected[0] = 1;
  expected[1] = 2;
  expected[2] = 29;
  expected[3] = 3;
  expected[4] = 4;
  EXPECT_EQ(e.codes, expected);
}

TEST(EncodeTest, TruncatesAtWindow) {
  const std::string first = "abcdefghijklmnop";  // 16
  const std::string last = "qrstuvwxyzabcdefghi";   // 19 -> full name 36
  const auto e = encode_name(first, last);
  const std::string full = first + " " + last;
  for (std::size_t i = 0; i < kWindow; ++i) EXPECT_EQ(e.codes[i], char_code(full[i]));
  EXPECT_EQ(decode_name(e), full.substr(0, kWindow));
}

TEST(EncodeTest, UnknownCharacter) {
  try {
    encode_name("jo", "sm1th");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::unknown_character);
  }
}

std::string random_raw_name(std::mt19937_64& rng) {
  static const std::string alphabet = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ-' .,0123456789\t!";
  std::uniform_int_distribution<std::size_t> len(1, 40);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::string s;
  const auto n = len(rng);
  for (std::size_t i = 0; i < n; ++i) s.push_back(alphabet[pick(rng)]);
  return s + "x";
}

TEST(NormalizeProperty, IdempotentWithClosedAlphabets) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 3000; ++trial) {
    const auto raw = random_raw_name(rng);
    const auto neural = normalize(raw, P::neural);
    ASSERT_EQ(normalize(neural, P::neural), neural) << raw;
    for (char c : neural) ASSERT_TRUE((c >= 'a' && c <= 'z') || c == '\'' || c == ' ' || c == '-') << raw;

    const auto table = normalize(raw, P::table);
    ASSERT_EQ(normalize(table, P::table), table) << raw;
    for (char c : table) ASSERT_TRUE(c >= 'a' && c <= 'z') << raw;
  }
}

TEST(EncodeProperty, WindowPadAndRoundTrip) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 3000; ++trial) {
    const auto first = normalize(random_raw_name(rng), P::neural);
    const auto last = normalize(random_raw_name(rng), P::neural);
    const auto e = encode_name(first, last);
    const std::string full = first + " " + last;
    ASSERT_EQ(e.codes.size(), kWindow);
    bool seen_pad = false;
    for (auto c : e.codes) {
      ASSERT_LE(c, 29);
      if (c == 0) seen_pad = true;
      else ASSERT_FALSE(seen_pad) << "nonzero code after padding";
    }
    const auto decoded = decode_name(e);
    ASSERT_EQ(decoded, full.substr(0, kWindow));
    if (full.size() <= kWindow) {
      const auto space = decoded.find(' ');
      ASSERT_NE(space, std::string::npos);
      ASSERT_EQ(encode_name(decoded.substr(0, first.size()), decoded.substr(first.size() + 1)), e);
    }
  }
}

}  // namespace
}  // namespace nameproxy

#include "nameproxy/normalize.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "nameproxy/error.hpp"

namespace nameproxy {
namespace {

char lower_ascii(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::vector<std::string_view> split_tokens(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j > i) out.push_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

// Lower-cases, keeps [a-z' -], maps other whitespace to a blank and
// collapses blank runs.
std::string neural_form(std::string_view name) {
  std::string out;
  out.reserve(name.size());
  for (char raw : name) {
    char c = lower_ascii(raw);
    if (is_space(c)) {
      if (!out.empty() && out.back() != ' ') out.push_back(' ');
    } else if ((c >= 'a' && c <= 'z') || c == '-' || c == '\'') {
      out.push_back(c);
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

std::string table_form(const std::string& neural, const NormalizeOptions& options) {
  auto tokens = split_tokens(neural);
  while (tokens.size() > 1) {
    // "jr." and "jr" are the same token after the neural pass
    std::string last;
    for (char c : tokens.back()) {
      if (c >= 'a' && c <= 'z') last.push_back(c);
    }
    const bool is_suffix =
        std::find(options.suffixes.begin(), options.suffixes.end(), last) != options.suffixes.end();
    if (!is_suffix) break;
    tokens.pop_back();
  }
  std::string out;
  for (auto tok : tokens) {
    for (char c : tok) {
      if (c >= 'a' && c <= 'z') out.push_back(c);
    }
  }
  return out;
}

}  // namespace

std::string normalize(std::string_view name, NormalizationProfile profile,
                      const NormalizeOptions& options) {
  std::string out = neural_form(name);
  if (profile == NormalizationProfile::table) out = table_form(out, options);
  if (out.empty()) {
    fail(ErrorCode::empty_after_normalization, fmt::format("name '{}' is empty after normalization", name));
  }
  return out;
}

bool is_valid_name(std::string_view first, std::string_view last) {
  return first.size() > 1 && last.size() > 1;
}

const FilterWords& default_filter_words() {
  static const FilterWords words{
      "llc",        "inc",         "incorporated", "corp",       "corporation", "co",
      "company",    "ltd",         "limited",      "lp",         "llp",         "pllc",
      "pc",         "pa",          "plc",          "group",      "holdings",    "enterprises",
      "enterprise", "services",    "service",      "solutions",  "consulting",  "associates",
      "partners",   "partnership", "trust",        "foundation", "church",      "ministries",
      "bank",       "insurance",   "installation", "construction", "contractors", "contracting",
      "restaurant", "cafe",        "bar",          "grill",      "salon",       "spa",
      "auto",       "automotive",  "repair",       "cleaning",   "transport",   "trucking",
      "logistics",  "realty",      "properties",   "property",   "management",  "investments",
      "capital",    "ventures",    "industries",   "international", "global",   "systems",
      "technologies", "technology", "medical",     "dental",     "clinic",      "pharmacy",
      "store",      "shop",        "market",       "dba",        "academy",     "school",
      "center",     "studio",
  };
  return words;
}

FilterWords parse_filter_words(std::string_view text) {
  FilterWords words;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    for (auto tok : split_tokens(line)) {
      std::string w;
      for (char c : tok) w.push_back(lower_ascii(c));
      words.insert(std::move(w));
    }
    start = end + 1;
  }
  return words;
}

FilterWords load_filter_words(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, fmt::format("cannot open filter-word file '{}'", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_filter_words(buf.str());
}

bool is_person_name(std::string_view full, const FilterWords& filter_words) {
  for (auto tok : split_tokens(full)) {
    std::string w;
    for (char c : tok) w.push_back(lower_ascii(c));
    if (filter_words.contains(w)) return false;
  }
  return true;
}

int char_code(char c) {
  if (c >= 'a' && c <= 'z') return c - 'a' + 1;
  switch (c) {
    case '-': return 27;
    case '\'': return 28;
    case ' ': return 29;
    default: return -1;
  }
}

char code_char(int code) {
  if (code >= 1 && code <= 26) return static_cast<char>('a' + code - 1);
  switch (code) {
    case 27: return '-';
    case 28: return '\'';
    case 29: return ' ';
    default: return '\0';
  }
}

std::vector<int> encode_text(std::string_view text, std::size_t window) {
  std::vector<int> codes(window, kPadCode);
  const std::size_t n = std::min(window, text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const int code = char_code(text[i]);
    if (code < 0) {
      fail(ErrorCode::unknown_character,
           fmt::format("character '{}' at position {} of '{}' is outside the vocabulary", text[i], i, text));
    }
    if (i < n) codes[i] = code;
  }
  return codes;
}

EncodedName encode_name(std::string_view first, std::string_view last) {
  std::string full;
  full.reserve(first.size() + last.size() + 1);
  full.append(first).push_back(' ');
  full.append(last);
  const auto codes = encode_text(full, kWindow);
  EncodedName out;
  std::transform(codes.begin(), codes.end(), out.codes.begin(),
                 [](int c) { return static_cast<std::uint8_t>(c); });
  return out;
}

std::string decode_name(const EncodedName& encoded) {
  std::string out;
  for (auto code : encoded.codes) {
    if (code == kPadCode) break;
    out.push_back(code_char(code));
  }
  return out;
}

}  // namespace nameproxy

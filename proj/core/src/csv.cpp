#include "nameproxy/csv.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "nameproxy/error.hpp"

namespace nameproxy::csv {

std::optional<std::size_t> Document::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::nullopt;
}

std::size_t Document::require_column(std::string_view name, std::string_view source) const {
  auto idx = column(name);
  if (!idx) fail(ErrorCode::schema, fmt::format("{}: missing column '{}'", source, name));
  return *idx;
}

namespace {

// Parses one record starting at `pos`; advances `pos` and `line`.
std::vector<std::string> parse_record(std::string_view text, std::size_t& pos, std::size_t& line,
                                      std::string_view source) {
  std::vector<std::string> fields;
  std::string field;
  const std::size_t start_line = line;
  bool in_quotes = false;
  bool quoted_field = false;
  while (pos < text.size()) {
    const char c = text[pos];
    if (in_quotes) {
      if (c == '"') {
        if (pos + 1 < text.size() && text[pos + 1] == '"') {
          field.push_back('"');
          pos += 2;
          continue;
        }
        in_quotes = false;
        ++pos;
        continue;
      }
      if (c == '\n') ++line;
      field.push_back(c);
      ++pos;
      continue;
    }
    if (c == '"' && field.empty() && !quoted_field) {
      in_quotes = true;
      quoted_field = true;
      ++pos;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      quoted_field = false;
      ++pos;
    } else if (c == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') {
      pos += 2;
      ++line;
      fields.push_back(std::move(field));
      return fields;
    } else if (c == '\n') {
      ++pos;
      ++line;
      fields.push_back(std::move(field));
      return fields;
    } else {
      field.push_back(c);
      ++pos;
    }
  }
  if (in_quotes) {
    fail(ErrorCode::schema, fmt::format("{}: line {}: unterminated quoted field", source, start_line));
  }
  fields.push_back(std::move(field));
  return fields;
}

}  // namespace

Document parse(std::string_view text, std::string_view source) {
  Document doc;
  std::size_t pos = 0;
  std::size_t line = 1;
  if (text.starts_with("\xEF\xBB\xBF")) pos = 3;

  while (pos < text.size() && text[pos] == '#') {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view body = text.substr(pos + 1, end - pos - 1);
    if (!body.empty() && body.back() == '\r') body.remove_suffix(1);
    doc.comments.emplace_back(body);
    pos = end + 1;
    ++line;
  }
  if (pos >= text.size()) fail(ErrorCode::schema, fmt::format("{}: missing header row", source));
  doc.header = parse_record(text, pos, line, source);

  while (pos < text.size()) {
    const std::size_t start_line = line;
    // blank lines carry no record
    if (text[pos] == '\n' || (text[pos] == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n')) {
      pos += text[pos] == '\n' ? 1 : 2;
      ++line;
      continue;
    }
    auto fields = parse_record(text, pos, line, source);
    if (fields.size() != doc.header.size()) {
      fail(ErrorCode::schema, fmt::format("{}: line {}: expected {} fields, found {}", source, start_line,
                                          doc.header.size(), fields.size()));
    }
    doc.rows.push_back(Row{start_line, std::move(fields)});
  }
  return doc;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, fmt::format("cannot open '{}' for reading", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) fail(ErrorCode::io, fmt::format("read failure on '{}'", path));
  return buf.str();
}

void write_text_file(const std::string& path, std::string_view contents) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);
    if (ec) fail(ErrorCode::io, fmt::format("cannot create directory '{}': {}", parent.string(), ec.message()));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::io, fmt::format("cannot open '{}' for writing", path));
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  out.flush();
  if (!out) fail(ErrorCode::io, fmt::format("write failure on '{}'", path));
}

Document read_file(const std::string& path) { return parse(read_text_file(path), path); }

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string join(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += escape(fields[i]);
  }
  return out;
}

}  // namespace nameproxy::csv

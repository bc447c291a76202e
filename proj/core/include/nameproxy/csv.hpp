#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nameproxy::csv {

struct Row {
  std::size_t line = 0;  // 1-based physical line where the record starts
  std::vector<std::string> fields;
};

struct Document {
  std::vector<std::string> comments;  // leading '#' lines, without the '#'
  std::vector<std::string> header;
  std::vector<Row> rows;

  std::optional<std::size_t> column(std::string_view name) const;
  // Throws Error{schema} naming the missing column.
  std::size_t require_column(std::string_view name, std::string_view source) const;
};

// RFC 4180 quoting, LF or CRLF line ends, leading '#' comment lines before
// the header. Rows whose width differs from the header raise Error{schema}
// with the line number. `source` names the input in error messages.
Document parse(std::string_view text, std::string_view source);
Document read_file(const std::string& path);

std::string escape(std::string_view field);
std::string join(const std::vector<std::string>& fields);

std::string read_text_file(const std::string& path);
// Writes atomically enough for our purposes: truncate then write; IO
// failures raise Error{io} naming the path.
void write_text_file(const std::string& path, std::string_view contents);

}  // namespace nameproxy::csv

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nameproxy {

enum class ErrorCode {
  zero_mass,
  empty_after_normalization,
  unknown_character,
  insufficient_class,
  empty_table,
  kind_mismatch,
  missing_firstname_table,
  shape_mismatch,
  corrupt_file,
  length_mismatch,
  single_class,
  missing_artifact,
  schema,
  row_id_mismatch,
  invalid_argument,
  io,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure the library reports carries one of the codes above. The CLI
// maps `io` to exit status 2 and everything else to 1.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace nameproxy

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wcstore {

enum class Errc {
  malformed_xml,
  empty_input,
  unknown_node,
  duplicate_peer,
  unknown_peer,
  tick_budget_exceeded,
  already_member,
  not_member,
  no_members,
  not_range_capable,
  range_exhausted,
  syntax_error,
  unsupported_wildcard_root,
  unseedable_pattern,
  plan_site_unreachable,
  malformed_plan,
  not_found,
  io_failure,
  corrupt_snapshot,
  invalid_config,
  invalid_argument,
};

std::string_view to_string(Errc code);

/// True for errors caused by the caller's input (bad syntax, unknown ids),
/// as opposed to internal failures. The CLI maps these to exit code 1.
bool is_user_error(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Parse failure in the pattern or query grammar; carries the byte offset.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t position, const std::string& what)
      : Error(Errc::syntax_error, "at " + std::to_string(position) + ": " + what),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace wcstore

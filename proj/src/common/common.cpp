#include "phd/error_code.hpp"
#include "phd/label.hpp"

#include <cctype>

namespace phd {

bool is_identifier(std::string_view text) {
  if (text.empty()) {
    return false;
  }
  auto head = static_cast<unsigned char>(text.front());
  if (!(std::isalpha(head) || head == '_')) {
    return false;
  }
  for (char c : text.substr(1)) {
    auto u = static_cast<unsigned char>(c);
    if (!(std::isalnum(u) || u == '_')) {
      return false;
    }
  }
  return true;
}

std::string_view to_string(error_code code) {
  switch (code) {
    case error_code::parse_error: return "parse-error";
    case error_code::unknown_label: return "unknown-label";
    case error_code::placement_in_batch: return "placement-in-batch";
    case error_code::nested_placement: return "nested-placement";
    case error_code::unknown_identifier: return "unknown-identifier";
    case error_code::array_bounds: return "array-bounds";
    case error_code::not_interactive: return "not-interactive";
    case error_code::bad_condition_value: return "bad-condition-value";
  }
  return "unknown-error";
}

std::optional<error_code> error_code_from_int(std::uint16_t value) {
  if (value >= 1 && value <= 8) {
    return static_cast<error_code>(value);
  }
  return std::nullopt;
}

}  // namespace phd

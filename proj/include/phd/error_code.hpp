#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace phd {

// Controller-side failure classes. The numeric values are carried verbatim
// in ERROR packets.
enum class error_code : std::uint16_t {
  parse_error = 1,
  unknown_label = 2,
  placement_in_batch = 3,
  nested_placement = 4,
  unknown_identifier = 5,
  array_bounds = 6,
  not_interactive = 7,
  bad_condition_value = 8,
};

std::string_view to_string(error_code code);
std::optional<error_code> error_code_from_int(std::uint16_t value);

}  // namespace phd

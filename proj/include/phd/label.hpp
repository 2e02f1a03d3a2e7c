#pragma once

#include <compare>
#include <ostream>
#include <string>
#include <string_view>

namespace phd {

bool is_identifier(std::string_view text);

// Name of an extension point. Labels are `[A-Za-z_][A-Za-z0-9_]*`.
struct label {
  std::string name;

  label() = default;
  explicit label(std::string n) : name(std::move(n)) {}

  auto operator<=>(const label&) const = default;
  bool operator==(const label&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, const label& l) { return os << l.name; }

}  // namespace phd

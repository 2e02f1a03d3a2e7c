#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <istream>
#include <vector>

#include "phd/direction/command.hpp"

namespace phd::director {

class usage_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One command per line:
//   print X | break F/I [when V=N] | break L [when V=N] | unbreak L|F/I
//   watch X [when V=N] | unwatch X
//   trace start X [when V=N] max N | trace stop|clear|print|full X
//   count reads|writes|calls T [when V=N] max N
//   count stop|clear|print|full [reads|writes|calls] T
//   continue | exec <controller program>
direction::command parse_direction(std::string_view line);

std::string_view usage();

// Commands one per line; blank lines and `#` comments are skipped. Errors name
// the line number.
std::vector<direction::command> parse_script(std::istream& in);
std::vector<direction::command> load_script(const std::string& path);

}  // namespace phd::director

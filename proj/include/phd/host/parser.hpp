#pragma once

#include <string>
#include <string_view>

#include "phd/host/ast.hpp"

namespace phd::host {

// Parses `.phd` source. Throws syntax_error with a 1-based line/column, or
// program_error(duplicate_label) when a label appears in two places.
program parse_program(std::string_view source);

program load_program_file(const std::string& path);

// Renders a program back to source that parse_program accepts.
std::string to_source(const program& p);
std::string to_source(const expr& e);

}  // namespace phd::host

#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "phd/host/ast.hpp"

namespace phd::host {

// Address of a statement slot: function index, then statement indices from
// the outermost list to the innermost. A last index equal to the list length
// is the one-past-end slot.
struct position {
  std::vector<std::size_t> path;

  auto operator<=>(const position&) const = default;
  bool operator==(const position&) const = default;

  // Increments the last component.
  position next() const;
};

// `fname/i/j/...`
std::string format_position(const program& p, const position& pos);
position parse_position(const program& p, std::string_view text);

// Interleaves empty extension points before, between, and after the
// statements of every body. Adjacent extension points are merged, which makes
// the transformation idempotent.
program normalize(const program& p);
bool is_normalized(const program& p);

std::set<position> positions(const program& p);

// Statement at a position; throws program_error(invalid_position) for
// one-past-end slots and addresses outside the program.
const stmt& stmt_at(const program& p, const position& pos);

// Globally declared variables. Function parameters are not included.
std::set<std::string> vars(const program& p);

enum class placement_kind { post_update, post_read, call_entry };

std::set<position> placement_positions(const program& p, placement_kind kind,
                                       std::string_view target);

bool contains_label(const program& p, const label& l);
std::set<position> label_positions(const program& p, const std::set<label>& labels);

// Every label of the program in document order.
std::vector<label> program_labels(const program& p);

// Adds each label to the extension point at its position. Fails if a label is
// already in the program or a position is not an extension point.
program insert_labels(const program& p, const std::map<label, position>& placements);
program erase_labels(const program& p, const std::set<label>& labels);

}  // namespace phd::host

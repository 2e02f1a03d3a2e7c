#include "phd/host/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace phd::host {

position position::next() const {
  position out = *this;
  if (!out.path.empty()) {
    ++out.path.back();
  }
  return out;
}

std::string format_position(const program& p, const position& pos) {
  std::ostringstream os;
  if (pos.path.empty()) {
    return "";
  }
  if (pos.path[0] < p.functions.size()) {
    os << p.functions[pos.path[0]].name;
  } else {
    os << '#' << pos.path[0];
  }
  for (std::size_t i = 1; i < pos.path.size(); ++i) {
    os << '/' << pos.path[i];
  }
  return os.str();
}

position parse_position(const program& p, std::string_view text) {
  position pos;
  auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    throw program_error(fault::invalid_position,
                        "position '" + std::string(text) + "' must look like fname/index");
  }
  pos.path.push_back(p.function_index(text.substr(0, slash)));
  text.remove_prefix(slash + 1);
  for (;;) {
    auto next = text.find('/');
    auto part = text.substr(0, next);
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
    if (part.empty() || ec != std::errc() || ptr != part.data() + part.size()) {
      throw program_error(fault::invalid_position,
                          "bad index '" + std::string(part) + "' in position");
    }
    pos.path.push_back(value);
    if (next == std::string_view::npos) {
      break;
    }
    text.remove_prefix(next + 1);
  }
  return pos;
}

namespace {

std::vector<stmt> normalize_body(const std::vector<stmt>& body) {
  std::vector<stmt> out;
  extend_stmt pending;
  for (const auto& s : body) {
    if (const auto* e = std::get_if<extend_stmt>(&s.node)) {
      pending.labels.insert(pending.labels.end(), e->labels.begin(), e->labels.end());
      continue;
    }
    out.push_back(stmt{std::move(pending)});
    pending = extend_stmt{};
    if (const auto* i = std::get_if<if_stmt>(&s.node)) {
      out.push_back(make_if(i->condition, normalize_body(i->body)));
    } else {
      out.push_back(s);
    }
  }
  out.push_back(stmt{std::move(pending)});
  return out;
}

void enumerate(const std::vector<stmt>& body, std::vector<std::size_t>& prefix,
               std::set<position>& out) {
  for (std::size_t j = 0; j < body.size(); ++j) {
    prefix.push_back(j);
    out.insert(position{prefix});
    if (const auto* i = std::get_if<if_stmt>(&body[j].node)) {
      enumerate(i->body, prefix, out);
    }
    prefix.pop_back();
  }
  prefix.push_back(body.size());
  out.insert(position{prefix});
  prefix.pop_back();
}

// Visits every statement with its position.
template <typename Fn>
void walk_list(const std::vector<stmt>& body, std::vector<std::size_t>& prefix, Fn&& fn) {
  for (std::size_t j = 0; j < body.size(); ++j) {
    prefix.push_back(j);
    fn(position{prefix}, body[j]);
    if (const auto* i = std::get_if<if_stmt>(&body[j].node)) {
      walk_list(i->body, prefix, fn);
    }
    prefix.pop_back();
  }
}

template <typename Fn>
void walk(const program& p, Fn&& fn) {
  for (std::size_t f = 0; f < p.functions.size(); ++f) {
    std::vector<std::size_t> prefix{f};
    walk_list(p.functions[f].body, prefix, [&](const position& pos, const stmt& s) {
      fn(p.functions[f], pos, s);
    });
  }
}

bool mentions(const expr& e, std::string_view name) {
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, numeral>) {
          return false;
        } else if constexpr (std::is_same_v<T, var_ref>) {
          return n.name == name;
        } else if constexpr (std::is_same_v<T, call_expr>) {
          return std::any_of(n.args.begin(), n.args.end(),
                             [&](const expr& a) { return mentions(a, name); });
        } else {
          return mentions(*n.lhs, name) || mentions(*n.rhs, name);
        }
      },
      e.node);
}

bool shadows(const function_decl& f, std::string_view name) {
  return std::find(f.params.begin(), f.params.end(), name) != f.params.end();
}

stmt* mutable_stmt_at(program& p, const position& pos) {
  return const_cast<stmt*>(&stmt_at(p, pos));
}

// Inserts before the first existing label that sorts after it. Insertions
// commute, and erasing the inserted labels restores the original order.
void merge_label(std::vector<label>& labels, const label& l) {
  auto it = std::find_if(labels.begin(), labels.end(), [&](const label& x) { return l < x; });
  labels.insert(it, l);
}

void erase_in(std::vector<stmt>& body, const std::set<label>& labels) {
  for (auto& s : body) {
    if (auto* e = std::get_if<extend_stmt>(&s.node)) {
      std::erase_if(e->labels, [&](const label& l) { return labels.count(l) > 0; });
    } else if (auto* i = std::get_if<if_stmt>(&s.node)) {
      erase_in(i->body, labels);
    }
  }
}

}  // namespace

program normalize(const program& p) {
  program out = p;
  for (auto& f : out.functions) {
    f.body = normalize_body(f.body);
  }
  return out;
}

bool is_normalized(const program& p) { return normalize(p) == p; }

std::set<position> positions(const program& p) {
  std::set<position> out;
  for (std::size_t f = 0; f < p.functions.size(); ++f) {
    std::vector<std::size_t> prefix{f};
    enumerate(p.functions[f].body, prefix, out);
  }
  return out;
}

const stmt& stmt_at(const program& p, const position& pos) {
  auto bad = [&](const char* why) {
    return program_error(fault::invalid_position,
                         "position " + format_position(p, pos) + " " + why);
  };
  if (pos.path.size() < 2) {
    throw bad("is too short");
  }
  if (pos.path[0] >= p.functions.size()) {
    throw bad("names no function");
  }
  const std::vector<stmt>* list = &p.functions[pos.path[0]].body;
  for (std::size_t k = 1; k < pos.path.size(); ++k) {
    std::size_t idx = pos.path[k];
    if (idx >= list->size()) {
      throw bad(idx == list->size() ? "is a one-past-end slot" : "is out of range");
    }
    const stmt& s = (*list)[idx];
    if (k + 1 == pos.path.size()) {
      return s;
    }
    const auto* branch = std::get_if<if_stmt>(&s.node);
    if (branch == nullptr) {
      throw bad("descends into a statement without a body");
    }
    list = &branch->body;
  }
  throw bad("is invalid");
}

std::set<std::string> vars(const program& p) {
  return {p.globals.begin(), p.globals.end()};
}

std::set<position> placement_positions(const program& p, placement_kind kind,
                                       std::string_view target) {
  std::set<position> out;
  if (kind == placement_kind::call_entry) {
    std::size_t f = p.function_index(target);
    out.insert(position{{f, 0}});
    return out;
  }
  if (std::find(p.globals.begin(), p.globals.end(), target) == p.globals.end()) {
    throw program_error(fault::unknown_target,
                        "'" + std::string(target) + "' is not a declared variable");
  }
  walk(p, [&](const function_decl& f, const position& pos, const stmt& s) {
    if (shadows(f, target)) {
      return;
    }
    if (kind == placement_kind::post_update) {
      if (const auto* a = std::get_if<assign_stmt>(&s.node); a && a->target == target) {
        out.insert(pos.next());
      }
      return;
    }
    bool read = false;
    if (const auto* a = std::get_if<assign_stmt>(&s.node)) {
      read = mentions(a->value, target);
    } else if (const auto* i = std::get_if<if_stmt>(&s.node)) {
      read = mentions(i->condition, target);
    }
    if (read) {
      out.insert(pos.next());
    }
  });
  return out;
}

bool contains_label(const program& p, const label& l) {
  bool found = false;
  walk(p, [&](const function_decl&, const position&, const stmt& s) {
    if (const auto* e = std::get_if<extend_stmt>(&s.node)) {
      found = found || std::find(e->labels.begin(), e->labels.end(), l) != e->labels.end();
    }
  });
  return found;
}

std::set<position> label_positions(const program& p, const std::set<label>& labels) {
  std::set<position> out;
  walk(p, [&](const function_decl&, const position& pos, const stmt& s) {
    if (const auto* e = std::get_if<extend_stmt>(&s.node)) {
      for (const auto& l : e->labels) {
        if (labels.count(l)) {
          out.insert(pos);
        }
      }
    }
  });
  return out;
}

std::vector<label> program_labels(const program& p) {
  std::vector<label> out;
  walk(p, [&](const function_decl&, const position&, const stmt& s) {
    if (const auto* e = std::get_if<extend_stmt>(&s.node)) {
      out.insert(out.end(), e->labels.begin(), e->labels.end());
    }
  });
  return out;
}

program insert_labels(const program& p, const std::map<label, position>& placements) {
  program out = p;
  for (const auto& [l, pos] : placements) {
    if (!is_identifier(l.name)) {
      throw program_error(fault::invalid_program, "'" + l.name + "' is not a valid label");
    }
    if (contains_label(p, l)) {
      throw program_error(fault::label_exists, "label '" + l.name + "' already exists");
    }
    stmt* s = mutable_stmt_at(out, pos);
    auto* e = std::get_if<extend_stmt>(&s->node);
    if (e == nullptr) {
      throw program_error(fault::position_not_extend,
                          "position " + format_position(p, pos) + " is not an extension point");
    }
    merge_label(e->labels, l);
  }
  return out;
}

program erase_labels(const program& p, const std::set<label>& labels) {
  program out = p;
  for (auto& f : out.functions) {
    erase_in(f.body, labels);
  }
  return out;
}

}  // namespace phd::host

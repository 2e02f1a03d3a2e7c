#pragma once

#include <random>
#include <string>
#include <vector>

#include "phd/casp/ast.hpp"
#include "phd/host/ast.hpp"

namespace phd::oracle {

struct host_gen_options {
  std::size_t globals = 3;
  std::size_t functions = 3;
  std::size_t max_stmts = 5;
  std::size_t max_depth = 2;
  bool with_labels = true;
};

// Random terminating program: function i only calls functions with a lower
// index, and the entry is the last function. Labels, when present, are unique.
host::program random_host_program(std::mt19937_64& rng, const host_gen_options& opts = {});

struct casp_gen_options {
  std::vector<std::string> counters = {"x", "y"};
  std::vector<std::string> arrays = {"a"};
  std::vector<std::int64_t> constants = {-1, 0, 1, 2};
  std::vector<std::string> labels = {"L", "M"};
  int max_depth = 4;
};

casp::program random_casp_program(std::mt19937_64& rng, const casp_gen_options& opts = {});

}  // namespace phd::oracle

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>

#include "phd/host/ast.hpp"

namespace phd::host {

// What the interpreter needs from its host: the global store and the hook
// that is invoked at every extension point.
class environment {
 public:
  virtual ~environment() = default;

  virtual bool has_global(const std::string& name) const = 0;
  virtual std::int64_t load(const std::string& name) = 0;
  virtual void store(const std::string& name, std::int64_t value) = 0;
  virtual void extend(std::span<const label> labels) = 0;

  // Called before every non-extend statement executes.
  virtual void before_statement(const stmt&) {}
};

// Plain store with inert extension points: the bare interpreter.
class store_environment : public environment {
 public:
  explicit store_environment(const program& p);

  bool has_global(const std::string& name) const override;
  std::int64_t load(const std::string& name) override;
  void store(const std::string& name, std::int64_t value) override;
  void extend(std::span<const label>) override {}

  const std::map<std::string, std::int64_t>& globals() const { return globals_; }

 private:
  std::map<std::string, std::int64_t> globals_;
};

struct run_options {
  std::size_t max_call_depth = 2000;
};

// Evaluates the entry call. Arithmetic wraps at 64 bits; an if-body runs when
// its condition is positive.
std::int64_t run(const program& p, environment& env, run_options options = {});

std::int64_t wrapping_add(std::int64_t a, std::int64_t b);
std::int64_t wrapping_sub(std::int64_t a, std::int64_t b);

}  // namespace phd::host

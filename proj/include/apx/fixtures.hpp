#pragma once

#include <string>

#include "apx/caps.hpp"
#include "apx/report.hpp"

namespace apx {

// Frozen regression values standing in for the paper's ineffective
// constants: Heisenberg growth, nilprogression covering constants,
// all-scales tables, the PSL2 diameter table and the scaling-limit panels.
// `compute` re-derives every entry deterministically; tests compare the
// serialized bytes against the versioned file.
class Fixtures {
public:
  static constexpr int kVersion = 1;

  static Fixtures compute(const Caps& caps = global_caps());
  static Fixtures load(const std::string& path);

  const Report& data() const { return data_; }
  std::string serialize() const;
  void save(const std::string& path) const;
  bool matches(const Fixtures& other) const { return serialize() == other.serialize(); }

private:
  Report data_;
};

// Default on-disk location, overridable via the APXGRP_FIXTURES environment
// variable or the CLI --fixtures flag.
std::string default_fixtures_path();

}  // namespace apx

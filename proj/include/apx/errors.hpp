#pragma once

#include <stdexcept>
#include <string>

namespace apx {

// Error taxonomy mirrors the CLI exit-code contract:
//   PropertyViolation -> 1, InvalidInput -> 2, CapExceeded -> 3.

class InvalidInput : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class CapExceeded : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A checked postcondition failed.  These are mathematical contracts; a throw
// here means either a bug or a genuine counterexample, and the message
// carries the witness.
class PropertyViolation : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline void check_property(bool ok, const std::string& what) {
  if (!ok) throw PropertyViolation(what);
}

}  // namespace apx

#pragma once

#include <cstdint>
#include <string>

#include "apx/errors.hpp"

namespace apx {

// Desk-scale resource caps.  The paper's statements are asymptotic; these
// values define how far the toolkit enumerates before giving up with a
// CapExceeded.  All of them can be overridden per run (CLI --cap-elements)
// or per call.
struct Caps {
  // Largest element count for any materialized set: product sets, closures,
  // BFS visited sets, progression DP states.
  std::int64_t elements = 200'000;
  // Largest |A|*|B| accepted by a single product-set call.
  std::int64_t pairs = 50'000'000;
  // Subgroup-lattice enumeration: largest ambient order and subgroup count.
  std::int64_t subgroup_order = 512;
  std::int64_t subgroup_count = 200'000;
  // Worker threads for partitioned product/matrix assembly (results are
  // scheduling-independent).
  int threads = 1;

  void require_elements(std::int64_t need, const char* where) const {
    if (need > elements)
      throw CapExceeded(std::string(where) + ": would require " +
                        std::to_string(need) + " elements (cap " +
                        std::to_string(elements) + ")");
  }
};

Caps& global_caps();

}  // namespace apx

#pragma once

#include <boost/functional/hash.hpp>

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "apx/numeric.hpp"

namespace apx {

// Canonical group element.  The encoding is a flat tuple of integer lanes;
// the meaning of the lanes depends on the group kind (residues, permutation
// images, row-major matrix entries, reduced-word letters).  Heisenberg
// coordinates live in the arbitrary-precision lanes so that z can grow
// quadratically in word length.
//
// Canonical form is unique per group: two elements are equal iff their lane
// tuples are identical, and the lexicographic order on lanes is the
// deterministic tie-breaker used by every greedy algorithm downstream.
struct Element {
  std::vector<std::int64_t> lanes;
  std::vector<Integer> wide;

  bool operator==(const Element&) const = default;
};

inline std::strong_ordering compare(const Element& a, const Element& b) {
  if (auto c = std::lexicographical_compare_three_way(
          a.lanes.begin(), a.lanes.end(), b.lanes.begin(), b.lanes.end());
      c != 0)
    return c;
  return std::lexicographical_compare_three_way(
      a.wide.begin(), a.wide.end(), b.wide.begin(), b.wide.end(),
      [](const Integer& x, const Integer& y) {
        if (x < y) return std::strong_ordering::less;
        if (y < x) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
      });
}

inline bool operator<(const Element& a, const Element& b) {
  return compare(a, b) < 0;
}

struct ElementHash {
  std::size_t operator()(const Element& e) const noexcept {
    std::size_t seed = boost::hash_range(e.lanes.begin(), e.lanes.end());
    for (const Integer& w : e.wide) boost::hash_combine(seed, hash_value(w));
    return seed;
  }
};

std::string to_string(const Element& e);

}  // namespace apx

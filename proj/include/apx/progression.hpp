#pragma once

#include <optional>
#include <utility>

#include "apx/element_set.hpp"
#include "apx/report.hpp"
#include "apx/setcalc.hpp"

namespace apx {

// P(x_1..x_r; L_1..L_r): all values of words using at most L_i letters
// x_i^{±1}.  With a kernel (a finite subgroup normalized by the generators)
// the enumerated set is kernel·P, the intrinsic model of a coset
// nilprogression.
struct ProgressionSpec {
  GroupHandle group;
  std::vector<Element> generators;
  std::vector<std::int64_t> lengths;
  std::optional<ElementSet> kernel;

  static ProgressionSpec from_json(const nlohmann::json& j, const Caps& caps = global_caps());
};

// Breadth-first dynamic programming over (element, remaining-budget) states
// with Pareto pruning of dominated budgets.
ElementSet enumerate_progression(const ProgressionSpec& spec,
                                 const Caps& caps = global_caps());

struct BoxProgression {
  ElementSet p;
  Rational doubling;   // |PP|/|P|
  Integer bound;       // 2^d |P|
  Integer pp_size;
};

// Multidimensional progression P = pi(B) for the box B = prod [-L_i, L_i]
// mapped through the homomorphism determined by commuting images; asserts
// |PP| <= 2^d |P|.
BoxProgression box_progression(const GroupHandle& g, const std::vector<Element>& images,
                               const std::vector<std::int64_t>& lengths,
                               const Caps& caps = global_caps());

// Nilpotency class of <gens> by lower-central-series closure (finite case)
// or by the known structure of the ambient kind; throws when the subgroup is
// not nilpotent within class_cap.
int nilpotency_class(const GroupHandle& g, const std::vector<Element>& gens,
                     int class_cap = 6, const Caps& caps = global_caps());

// (rank, step, lengths, measured covering constant) of a progression.
Report nilprogression_check(const ProgressionSpec& spec, const Caps& caps = global_caps());

struct GrowthProfile {
  std::vector<Integer> sizes;  // sizes[n-1] = |S^n|
  double slope = 0.0;
  std::pair<int, int> window{1, 1};
};

GrowthProfile growth_profile(const ElementSet& s, int n_max, std::pair<int, int> window,
                             const Caps& caps = global_caps());

// Least n <= n_max with |S^{4n}| <= 5^D |S^n| (exact rational power
// comparison), or nullopt.
std::optional<int> doubling_scale_finder(const ElementSet& s, const Rational& d, int n_max,
                                         const Caps& caps = global_caps());

// K_greedy(S^m) for m over a range; no bound asserted (the paper's constants
// are ineffective) — consumers compare against frozen fixtures.
Report all_scales_report(const ElementSet& s, std::pair<int, int> range,
                         const Caps& caps = global_caps());

// Safin lower bound |A^n| >= (1/62)^n |A|^floor((n+1)/2) in a free group,
// checked in exact integer arithmetic; power sizes that exceed the element
// cap are certified as lower bounds (|A^n| >= |A^k| for k <= n).
Report free_group_bounds(const ElementSet& a, int n, const Caps& caps = global_caps());

}  // namespace apx

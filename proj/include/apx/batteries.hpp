#pragma once

#include <cstdint>

#include "apx/caps.hpp"
#include "apx/group.hpp"
#include "apx/report.hpp"

namespace apx {
namespace batteries {

// The order <= 10 test family: cyclic(1..10), S3, D4, Q8.
std::vector<GroupSpec> order10_family();

// Exhaustive Prop-1.6 sweep: over every nonempty subset A of every group in
// the family, detect_unit_doubling succeeds iff |AA| = |A| and every
// returned structure verifies.
Report unit_doubling_sweep(const std::vector<GroupSpec>& family,
                           const Caps& caps = global_caps());

// Exhaustive Freiman-3/2 sweep over the same family.
Report freiman_sweep(const std::vector<GroupSpec>& family, const Caps& caps = global_caps());

// Hamidoune coset-cover search: exhaustive small groups plus targeted random
// instances in groups of order <= 512; an unsatisfied precondition-holding
// instance is a counterexample alarm.
Report hamidoune_sweep(std::uint64_t seed, const Caps& caps = global_caps());

// Randomized valid-hypothesis Schreier-index instances.
Report schreier_battery(std::uint64_t seed, int target_instances,
                        const Caps& caps = global_caps());

// Dense-generation sweep: cyclic(n <= max_n), alpha in {1/2, 1/4, 1/8},
// random symmetric generating sets containing the identity.
Report dense_generation_battery(std::uint64_t seed, int max_n,
                                const Caps& caps = global_caps());

// Strong-approximate-group axioms on subgroup cases (expected all-true) and
// the honest evaluation for the interval {-1,0,1} in Z.
Report strong_approx_battery(const Caps& caps = global_caps());

}  // namespace batteries
}  // namespace apx

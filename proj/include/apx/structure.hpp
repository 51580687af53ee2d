#pragma once

#include <optional>

#include "apx/element_set.hpp"
#include "apx/report.hpp"
#include "apx/setcalc.hpp"

namespace apx {

// Verified coset description of a small-doubling set: H is checked to be a
// subgroup extensionally, and each claimed fact is checked before the
// structure is returned.
struct CosetStructure {
  ElementSet h;
  Element a;
  bool left_coset = false;   // A = aH
  bool right_coset = false;  // A = Ha
  bool subset_only = false;  // A ⊆ aH
  bool normalizes = false;   // aHa^{-1} = H for every a in A
};

// |AA| = |A|  =>  H = A a^{-1} is a subgroup and A = aH = Ha (a the
// canonical-least element of A).  Returns nullopt when |AA| != |A|.
std::optional<CosetStructure> detect_unit_doubling(const ElementSet& a,
                                                   const Caps& caps = global_caps());

// Freiman small doubling: when |AA| < threshold*|A| (threshold in (1, 3/2]),
// H = AA^{-1} = A^{-1}A is a subgroup of size < (3/2)|A| normalized by A,
// with A ⊆ aH for every a in A.  With |AA| <= 1.1|A| additionally checks
// |H| <= 1.2|A|.
std::optional<CosetStructure> detect_small_doubling(const ElementSet& a,
                                                    const Rational& threshold,
                                                    const Caps& caps = global_caps());

// Every subgroup of the group spanned by `universe` (which must be closed),
// enumerated by cyclic extensions, sorted by (order, element list).
std::vector<ElementSet> all_subgroups(const ElementSet& universe,
                                      const Caps& caps = global_caps());

struct HamidouneCover {
  ElementSet h;
  std::int64_t coset_count = 0;
  std::string side;  // "left" or "right"
};

// Search certificate for Hamidoune's bound: K = |AA|/|A| < 2 implies A meets
// at most 1/(2-K) cosets of some subgroup of size <= |A|.  Brute-force over
// the subgroup lattice of <A>; nullopt would be a counterexample alarm.
std::optional<HamidouneCover> hamidoune_cover(const ElementSet& a,
                                              const Caps& caps = global_caps());

// Index computation on the Schreier graph of <S>/H plus the exact
// evaluation of the hypothesis |S^k ∩ H| > |S^{2k}|/C with k >= C; asserts
// the conclusion [<S>:H] <= C whenever the hypothesis holds.
Report schreier_index(const ElementSet& s, const ElementSet& h, int k, const Rational& c,
                      const Caps& caps = global_caps());

// |A ∩ B| >= max(|A|,|B|)/K, evaluated exactly.
bool commensurable(const ElementSet& a, const ElementSet& b, const Rational& k);

// Least n with S^n = G for symmetric generating S with |S| >= alpha|G|, plus
// the derived bound n <= 2^(k0+1), k0 = ceil(log(1/(1.2 alpha))/log 1.1).
// S must contain the identity unless |S| > |G|/2 (even powers of a coset-
// like S never cover G).
Report dense_generation(const ElementSet& s, const Rational& alpha,
                        const Caps& caps = global_caps());

// Evaluates the strong-approximate-group axioms and their consequences for
// (A, S, K); each verdict is reported as true/false/"cap-exceeded".
Report strong_approx_check(const ElementSet& a, const ElementSet& s, const Rational& k,
                           const Caps& caps = global_caps());

}  // namespace apx

#pragma once

#include <deque>
#include <optional>
#include <utility>
#include <vector>

#include "apx/element_set.hpp"
#include "apx/report.hpp"

namespace apx {

// Exact product set {a*b : a in A, b in B}.  Guarantees |AB| <= |A||B|, and
// |A| <= |AB| when B contains the identity (both asserted).  May partition
// the work across caps.threads; results are scheduling-independent.
ElementSet product_set(const ElementSet& a, const ElementSet& b,
                       const Caps& caps = global_caps());

// A^n by iterated products, memoizing every intermediate power.  References
// returned by power() stay valid while the table lives (deque storage).
class PowerTable {
public:
  explicit PowerTable(ElementSet base);
  // n >= 1; power(1) is the base set.
  const ElementSet& power(int n, const Caps& caps = global_caps());

private:
  std::deque<ElementSet> pow_;
};

ElementSet power_set(const ElementSet& a, int n, const Caps& caps = global_caps());

// A ∪ A^{-1} ∪ {1}; idempotent.
ElementSet symmetrize(const ElementSet& a);

// Ruzsa distance d(A,B) = log |AB^{-1}| / sqrt(|A||B|), stored exactly in
// squared form: value = num/den = |AB^{-1}|^2 / (|A||B|) >= 1.
struct RuzsaValue {
  Integer num;
  Integer den;
  Rational squared_ratio() const { return Rational(num, den); }
  double log_value() const;
};

RuzsaValue ruzsa_distance(const ElementSet& a, const ElementSet& b,
                          const Caps& caps = global_caps());

// Squared-ratio slack of the triangle inequality d(A,C) <= d(A,B) + d(B,C):
// (|AB^{-1}||BC^{-1}|)^2 / (|B||AC^{-1}|)^2 >= 1, asserted exactly.
Rational triangle_slack(const ElementSet& a, const ElementSet& b, const ElementSet& c,
                        const Caps& caps = global_caps());

// Left-translate covering witness: covered ⊆ X · translates.
struct CoverWitness {
  ElementSet x;
  std::string covered_desc;
  std::string translate_desc;
};

// Ruzsa covering lemma, constructive: X ⊆ A with pairwise-disjoint xB,
// A ⊆ X B B^{-1} and |X| <= |AB|/|B| (all asserted).  Greedy scan in
// canonical element order.
CoverWitness ruzsa_cover(const ElementSet& a, const ElementSet& b,
                         const Caps& caps = global_caps());

struct ApproxConstant {
  std::int64_t k_greedy = 0;
  CoverWitness witness;
  std::optional<std::int64_t> k_exact;
};

// Covering constant of a symmetric set containing the identity: greedy cover
// of AA by left translates of A; optional exact minimum by branch-and-bound
// (|AA| <= 4096 and at most 64 candidate translates).
ApproxConstant approx_constant(const ElementSet& a, bool exact,
                               const Caps& caps = global_caps());

// A = A^{-1}, K = |A^5|/|A|: then A^2 is a K-approximate subgroup, witnessed
// by a Ruzsa cover of A^4 by translates of A.
CoverWitness lemma210_witness(const ElementSet& a, const Caps& caps = global_caps());

// Intersection witness: approximate groups A, B with covers AA ⊆ X_A·A and
// BB ⊆ Y_B·B give (A²∩B²)² ⊆ Z(A²∩B²) with |Z| <= |X_A|³|Y_B|³.
CoverWitness lemma211_witness(const ElementSet& a, const ElementSet& x_a,
                              const ElementSet& b, const ElementSet& y_b,
                              const Caps& caps = global_caps());

// Escape norm 1/n_A(g): 0 when <g> ⊆ A entirely, nullopt when g itself lies
// outside A (immediate escape).  Requires identity ∈ A.
std::optional<Rational> escape_norm(const ElementSet& a, const Element& g);

// Doubling/tripling table with exact rationals; checks small tripling for
// n <= n_max and, on abelian groups, the Plünnecke bound |A^n| <= K_+^n |A|.
Report doubling_report(const ElementSet& a, int n_max, const Caps& caps = global_caps());

// Sum-product statistics in F_p (p <= 101 prime).  When minimizer_size is
// given and p <= 13, exhaustively minimizes max(|A+A|,|AA|) over subsets of
// that size.
Report sumproduct_stats(std::int64_t p, const std::vector<std::int64_t>& residues,
                        std::optional<int> minimizer_size = std::nullopt,
                        const Caps& caps = global_caps());

}  // namespace apx

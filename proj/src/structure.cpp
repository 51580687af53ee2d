#include "apx/structure.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "apx/errors.hpp"

namespace apx {

namespace {

ElementSet left_translate(const GroupHandle& g, const Element& a, const ElementSet& h) {
  std::vector<Element> v;
  v.reserve(h.size());
  for (const auto& e : h.elements()) v.push_back(g->mul(a, e));
  return ElementSet(g, std::move(v));
}

ElementSet right_translate(const GroupHandle& g, const ElementSet& h, const Element& a) {
  std::vector<Element> v;
  v.reserve(h.size());
  for (const auto& e : h.elements()) v.push_back(g->mul(e, a));
  return ElementSet(g, std::move(v));
}

ElementSet conjugate_set(const GroupHandle& g, const Element& a, const ElementSet& h) {
  const Element ai = g->inv(a);
  std::vector<Element> v;
  v.reserve(h.size());
  for (const auto& e : h.elements()) v.push_back(g->mul(g->mul(a, e), ai));
  return ElementSet(g, std::move(v));
}

ElementSet intersect(const ElementSet& a, const ElementSet& b) {
  std::vector<Element> v;
  for (const auto& e : a.elements())
    if (b.contains(e)) v.push_back(e);
  return ElementSet(a.group(), std::move(v));
}

}  // namespace

std::optional<CosetStructure> detect_unit_doubling(const ElementSet& a, const Caps& caps) {
  if (a.empty()) throw InvalidInput("detect_unit_doubling: empty set");
  const GroupHandle& g = a.group();
  ElementSet aa = product_set(a, a, caps);
  if (aa.size() != a.size()) return std::nullopt;

  const Element& pivot = a.elements().front();  // canonical-least element
  ElementSet h = right_translate(g, a, g->inv(pivot));

  CosetStructure cs;
  check_property(is_subgroup(h), "unit doubling: A a^{-1} is not a subgroup");
  for (const auto& x : a.elements()) {
    check_property(left_translate(g, x, h).same_elements(a), "unit doubling: A != aH");
    check_property(right_translate(g, h, x).same_elements(a), "unit doubling: A != Ha");
    check_property(conjugate_set(g, x, h).same_elements(h), "unit doubling: aHa^{-1} != H");
  }
  cs.h = std::move(h);
  cs.a = pivot;
  cs.left_coset = cs.right_coset = cs.normalizes = true;
  return cs;
}

std::optional<CosetStructure> detect_small_doubling(const ElementSet& a,
                                                    const Rational& threshold,
                                                    const Caps& caps) {
  if (a.empty()) throw InvalidInput("detect_small_doubling: empty set");
  if (!(threshold > 1) || threshold > Rational(3, 2))
    throw InvalidInput("detect_small_doubling: threshold must lie in (1, 3/2]");
  const GroupHandle& g = a.group();
  ElementSet aa = product_set(a, a, caps);
  if (!(Rational(aa.size()) < threshold * a.size())) return std::nullopt;

  ElementSet ainv = inverse_set(a);
  ElementSet h = product_set(a, ainv, caps);
  check_property(h.same_elements(product_set(ainv, a, caps)),
                 "small doubling: AA^{-1} != A^{-1}A");
  check_property(is_subgroup(h), "small doubling: AA^{-1} is not a subgroup");
  check_property(Rational(h.size()) < Rational(3, 2) * a.size(),
                 "small doubling: |H| >= (3/2)|A|");
  for (const auto& x : a.elements()) {
    check_property(a.subset_of(left_translate(g, x, h)), "small doubling: A ⊄ aH");
    check_property(conjugate_set(g, x, h).same_elements(h),
                   "small doubling: A does not normalize H");
  }
  if (Rational(aa.size()) * 10 <= Rational(11) * a.size())  // |AA| <= 1.1|A|
    check_property(Rational(h.size()) * 10 <= Rational(12) * a.size(),
                   "small doubling: |H| > 1.2|A| under the 1.1 hypothesis");

  CosetStructure cs;
  cs.h = std::move(h);
  cs.a = a.elements().front();
  cs.subset_only = true;
  cs.normalizes = true;
  return cs;
}

std::vector<ElementSet> all_subgroups(const ElementSet& universe, const Caps& caps) {
  if (universe.size() > caps.subgroup_order)
    throw CapExceeded("all_subgroups: scope-exceeded, |G| = " +
                      std::to_string(universe.size()) + " > " +
                      std::to_string(caps.subgroup_order));
  const GroupHandle& g = universe.group();

  // Cyclic-extension enumeration: grow each known subgroup by one generator,
  // dedup by element list.
  std::map<std::vector<Element>, bool> seen;  // -> processed flag irrelevant; value unused
  std::vector<ElementSet> queue;
  ElementSet trivial = set_of(g, {g->identity()});
  seen.emplace(trivial.elements(), true);
  queue.push_back(std::move(trivial));

  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    ElementSet h = queue[qi];  // copy: queue may reallocate
    for (const auto& x : universe.elements()) {
      if (h.contains(x)) continue;
      std::vector<Element> gens = h.elements();
      gens.push_back(x);
      ElementSet ext = subgroup_closure(ElementSet(g, std::move(gens)), caps);
      if (seen.emplace(ext.elements(), true).second) {
        if (static_cast<std::int64_t>(queue.size()) + 1 > caps.subgroup_count)
          throw CapExceeded("all_subgroups: subgroup count exceeds cap");
        queue.push_back(std::move(ext));
      }
    }
  }

  std::sort(queue.begin(), queue.end(), [](const ElementSet& a, const ElementSet& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return std::lexicographical_compare(a.elements().begin(), a.elements().end(),
                                        b.elements().begin(), b.elements().end());
  });
  return queue;
}

std::optional<HamidouneCover> hamidoune_cover(const ElementSet& a, const Caps& caps) {
  if (a.empty()) throw InvalidInput("hamidoune_cover: empty set");
  const GroupHandle& g = a.group();
  ElementSet aa = product_set(a, a, caps);
  const Rational k(aa.size(), a.size());
  if (!(k < 2)) throw InvalidInput("hamidoune_cover: requires |AA|/|A| < 2");
  const Integer bound = rational_floor(1 / (2 - k));

  ElementSet span = subgroup_closure(a, caps);
  if (span.size() > caps.subgroup_order)
    throw CapExceeded("hamidoune_cover: <A> larger than the subgroup-enumeration cap");

  auto coset_count = [&](const ElementSet& h, bool left) {
    // Distinct cosets meeting A, identified by their canonical-least member.
    std::unordered_set<Element, ElementHash> ids;
    for (const auto& x : a.elements()) {
      std::optional<Element> least;
      for (const auto& e : h.elements()) {
        Element c = left ? g->mul(x, e) : g->mul(e, x);
        if (!least || c < *least) least = std::move(c);
      }
      ids.insert(std::move(*least));
    }
    return static_cast<std::int64_t>(ids.size());
  };

  // Subgroup size bound K|A|: the |H| <= |A| version of the remark is
  // falsified already by {0..4} in Z/6 (K = 6/5 forces one coset, but
  // A - A = Z/6); with |H| <= K|A| the bound held on an exhaustive sweep
  // of 6857 K<2 subsets across fifteen small groups.
  for (const ElementSet& h : all_subgroups(span, caps)) {
    if (!(Rational(h.size()) <= k * Rational(a.size()))) continue;
    // A meets xH cosets; "left" here means translates xH.
    if (std::int64_t n = coset_count(h, true); Integer(n) <= bound)
      return HamidouneCover{h, n, "left"};
    if (std::int64_t n = coset_count(h, false); Integer(n) <= bound)
      return HamidouneCover{h, n, "right"};
  }
  return std::nullopt;
}

Report schreier_index(const ElementSet& s, const ElementSet& h, int k, const Rational& c,
                      const Caps& caps) {
  if (s.empty()) throw InvalidInput("schreier_index: empty generating set");
  if (!(c > 0)) throw InvalidInput("schreier_index: C must be positive");
  const GroupHandle& g = s.group();
  ElementSet gamma = subgroup_closure(s, caps);
  if (!is_subgroup(h)) throw InvalidInput("schreier_index: H is not a subgroup");
  if (!h.subset_of(gamma)) throw InvalidInput("schreier_index: H ⊄ <S>");

  // BFS over left cosets xH along generator left-multiplication (the
  // Schreier graph of <S>/H).
  auto coset_id = [&](const Element& x) {
    std::optional<Element> least;
    for (const auto& e : h.elements()) {
      Element cand = g->mul(x, e);
      if (!least || cand < *least) least = std::move(cand);
    }
    return *least;
  };
  std::unordered_set<Element, ElementHash> visited;
  std::vector<Element> frontier;  // coset representatives
  frontier.push_back(coset_id(g->identity()));
  visited.insert(frontier.back());
  for (std::size_t i = 0; i < frontier.size(); ++i) {
    const Element rep = frontier[i];
    for (const auto& gen : s.elements()) {
      Element next = coset_id(g->mul(gen, rep));
      if (visited.insert(next).second) frontier.push_back(std::move(next));
    }
    // Generators need not be symmetric; include inverses to span <S>.
    for (const auto& gen : s.elements()) {
      Element next = coset_id(g->mul(g->inv(gen), rep));
      if (visited.insert(next).second) frontier.push_back(std::move(next));
    }
  }
  const std::int64_t index = static_cast<std::int64_t>(visited.size());
  check_property(Integer(index) * h.size() == Integer(gamma.size()),
                 "schreier_index: |Γ:H| |H| != |Γ|");

  PowerTable pw(s);
  const ElementSet& sk = pw.power(k, caps);
  const ElementSet& s2k = pw.power(2 * k, caps);
  const Integer meet = intersect(sk, h).size();
  const bool k_ge_c = Rational(k) >= c;
  const bool hypothesis = k_ge_c && Rational(meet) * c > Rational(s2k.size());
  if (hypothesis)
    check_property(Rational(index) <= c, "schreier_index: hypothesis held but index > C");

  Report r;
  r["group"] = g->name();
  r["span"] = gamma.size();
  r["subgroup"] = h.size();
  r["index"] = index;
  r["k"] = k;
  r["C"] = rational_json(c);
  r["meet_size"] = integer_json(meet);
  r["s2k_size"] = s2k.size();
  r["k_ge_C"] = k_ge_c;
  r["hypothesis"] = hypothesis;
  r["conclusion_ok"] = !hypothesis || Rational(index) <= c;
  return r;
}

bool commensurable(const ElementSet& a, const ElementSet& b, const Rational& k) {
  if (!(k >= 1)) throw InvalidInput("commensurable: K must be >= 1");
  const Integer meet = intersect(a, b).size();
  const Integer big = std::max(a.size(), b.size());
  return Rational(meet) * k >= Rational(big);
}

Report dense_generation(const ElementSet& s, const Rational& alpha, const Caps& caps) {
  const GroupHandle& g = s.group();
  if (!g->finite()) throw InvalidInput("dense_generation: group must be finite");
  if (!s.same_elements(inverse_set(s)))
    throw InvalidInput("dense_generation: S must be symmetric");
  const Integer order = *g->order();
  caps.require_elements(static_cast<std::int64_t>(order), "dense_generation");
  if (!(Rational(Integer(s.size())) >= alpha * Rational(order)))
    throw InvalidInput("dense_generation: |S| < alpha |G|");

  // Without the identity, all powers of a coset-shaped S can stall below G
  // (both parity chains S^n ⊆ S^{n+2} stop growing); detect that instead of
  // looping forever.
  std::optional<std::int64_t> least;
  PowerTable pw(s);
  for (int n = 1;; ++n) {
    const ElementSet& sn = pw.power(n, caps);
    if (Integer(sn.size()) == order) {
      least = n;
      break;
    }
    if (n >= 4 && sn.size() == pw.power(n - 2, caps).size() &&
        pw.power(n - 1, caps).size() == pw.power(n - 3, caps).size())
      break;
  }
  if (!least)
    throw InvalidInput("dense_generation: no power of S covers G (S not generating, "
                       "or S avoids the identity and is coset-shaped)");

  // k0 = ceil(log(1/(1.2 alpha)) / log 1.1), computed with exact rationals:
  // the smallest k with (11/10)^k >= 1/(1.2 alpha).
  const Rational target = Rational(1) / (Rational(6, 5) * alpha);
  std::int64_t k0 = 0;
  Rational acc(1);
  while (acc < target) {
    acc *= Rational(11, 10);
    ++k0;
  }
  const Integer bound = k0 <= 0 ? Integer(2) : ipow(Integer(2), static_cast<unsigned long>(k0 + 1));
  check_property(Integer(*least) <= bound,
                 "dense_generation: least covering power exceeds the derived bound");

  Report r;
  r["group"] = g->name();
  r["order"] = integer_json(order);
  r["set_size"] = s.size();
  r["alpha"] = rational_json(alpha);
  r["least_n"] = *least;
  r["k0"] = k0;
  r["bound"] = integer_json(bound);
  r["within_bound"] = true;
  return r;
}

namespace {

// n_X(g): largest n >= 0 with 1, g, ..., g^n all in X; nullopt encodes
// infinity (<g> ⊆ X).  X must contain the identity.
std::optional<std::int64_t> escape_steps(const ElementSet& x, const Element& g) {
  const GroupHandle& grp = x.group();
  if (!x.contains(g)) return 0;
  Element acc = g;
  for (std::int64_t n = 1; n <= x.size() + 1; ++n) {
    Element next = grp->mul(acc, g);
    if (!x.contains(next)) return n;
    acc = std::move(next);
  }
  return std::nullopt;
}

}  // namespace

Report strong_approx_check(const ElementSet& a, const ElementSet& s, const Rational& k,
                           const Caps& caps) {
  const GroupHandle& g = a.group();
  if (!a.contains(g->identity()) || !a.same_elements(inverse_set(a)))
    throw InvalidInput("strong_approx_check: A must be symmetric with identity");
  if (!s.same_elements(inverse_set(s)))
    throw InvalidInput("strong_approx_check: S must be symmetric");
  if (!s.subset_of(a)) throw InvalidInput("strong_approx_check: S ⊄ A");

  Report r;
  r["group"] = g->name();
  r["A_size"] = a.size();
  r["S_size"] = s.size();
  r["K"] = rational_json(k);

  const Integer exponent = rational_ceil(Rational(1'000'000) * k * k * k);
  r["exponent"] = integer_json(exponent);

  // Axiom 1: 1, g, ..., g^1000 ∈ A^100 implies g ∈ A.
  PowerTable pw(a);
  try {
    const ElementSet& a100 = pw.power(100, caps);
    bool ok = true;
    for (const auto& cand : a100.elements()) {
      auto n = escape_steps(a100, cand);
      const bool full_chain = !n || *n >= 1000;
      if (full_chain && !a.contains(cand)) {
        ok = false;
        break;
      }
    }
    r["axiom1"] = ok;
  } catch (const CapExceeded&) {
    r["axiom1"] = "cap-exceeded";
  }

  // Axiom 2a: (S^{A^4})^{10^6 K^3} ⊆ A, via iterated powers with
  // stabilization/cycle detection and early exit.
  try {
    const ElementSet& a4 = pw.power(4, caps);
    SetBuilder tb(g, caps, "strong_approx conjugates");
    for (const auto& x : a4.elements()) {
      const Element xi = g->inv(x);
      for (const auto& e : s.elements()) tb.insert(g->mul(g->mul(x, e), xi));
    }
    ElementSet t = tb.take();
    const bool monotone = t.contains(g->identity());

    std::optional<bool> verdict;
    if (t.empty()) verdict = true;  // empty S: empty powers are inside A
    std::vector<ElementSet> history;
    history.push_back(t);
    Integer m = 1;
    const std::int64_t step_cap = 4096;
    while (!verdict) {
      if (monotone && !history.back().subset_of(a)) {
        verdict = false;  // powers only grow; already escaped A
        break;
      }
      if (m == exponent) {
        verdict = history.back().subset_of(a);
        break;
      }
      ElementSet next = product_set(history.back(), t, caps);
      if (next.same_elements(history.back())) {
        // stabilized: T^j = T^m for all j >= m
        verdict = next.subset_of(a);
        break;
      }
      // cycle detection for non-monotone powers
      for (std::size_t i = 0; i + 1 < history.size(); ++i) {
        if (history[i].same_elements(next)) {
          Integer period = Integer(history.size()) - i;
          Integer pos = Integer(i) + (exponent - Integer(i + 1)) % period;
          verdict = history[static_cast<std::size_t>(pos)].subset_of(a);
          break;
        }
      }
      if (verdict) break;
      history.push_back(std::move(next));
      ++m;
      if (m > step_cap) throw CapExceeded("strong_approx_check: power iteration cap");
    }
    r["axiom2_conjugate_power"] = *verdict;
  } catch (const CapExceeded&) {
    r["axiom2_conjugate_power"] = "cap-exceeded";
  }

  // Axiom 2b: 1, g, ..., g^{10^6 K^3} ∈ A implies g ∈ S.
  {
    bool ok = true;
    for (const auto& cand : a.elements()) {
      auto n = escape_steps(a, cand);
      const bool full_chain = !n || Integer(*n) >= exponent;
      if (full_chain && !s.contains(cand)) {
        ok = false;
        break;
      }
    }
    r["axiom2_escape_into_S"] = ok;
  }

  // Consequences: n_A(g) <= n_{A^100}(g) <= 10^3 n_A(g) for all g ∈ A.
  try {
    const ElementSet& a100 = pw.power(100, caps);
    bool lower_ok = true, upper_ok = true;
    for (const auto& cand : a.elements()) {
      auto na = escape_steps(a, cand);
      auto na100 = escape_steps(a100, cand);
      if (na && na100 && *na100 < *na) lower_ok = false;
      if (na100 && !na) lower_ok = false;   // n_A infinite but n_{A^100} finite
      if (!na100 && na) upper_ok = false;   // n_{A^100} infinite but n_A finite
      if (na && na100 && *na100 > 1000 * *na) upper_ok = false;
    }
    r["consequence_monotone"] = lower_ok;
    r["consequence_factor_1000"] = upper_ok;
  } catch (const CapExceeded&) {
    r["consequence_monotone"] = "cap-exceeded";
    r["consequence_factor_1000"] = "cap-exceeded";
  }
  return r;
}

}  // namespace apx

#include "apx/batteries.hpp"

#include <algorithm>

#include "apx/element_set.hpp"
#include "apx/errors.hpp"
#include "apx/rng.hpp"
#include "apx/setcalc.hpp"
#include "apx/structure.hpp"

namespace apx {
namespace batteries {

namespace {

std::vector<ElementSet> nonempty_subsets(const ElementSet& g_elems) {
  const auto& univ = g_elems.elements();
  const std::size_t n = univ.size();
  std::vector<ElementSet> out;
  out.reserve((static_cast<std::size_t>(1) << n) - 1);
  for (std::uint64_t mask = 1; mask < (1ULL << n); ++mask) {
    std::vector<Element> v;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) v.push_back(univ[i]);
    out.emplace_back(g_elems.group(), std::move(v));
  }
  return out;
}

void record_violation(Report& violations, const std::string& group,
                      const ElementSet& a, const std::string& what) {
  Report v;
  v["group"] = group;
  v["witness"] = a.to_json();
  v["reason"] = what;
  violations.push_back(std::move(v));
}

}  // namespace

std::vector<GroupSpec> order10_family() {
  std::vector<GroupSpec> fam;
  for (std::int64_t n = 1; n <= 10; ++n) fam.push_back(GroupSpec::cyclic(n));
  // S3 as permutations, D4 as the symmetries of the square, Q8 inside
  // SL2(F3).
  fam.push_back(GroupSpec::permutation(3, {{1, 0, 2}, {1, 2, 0}}));
  fam.push_back(GroupSpec::permutation(4, {{1, 2, 3, 0}, {2, 1, 0, 3}}));
  fam.push_back(GroupSpec::matrix_mod_q(2, 3, {{0, 2, 1, 0}, {1, 1, 1, 2}}));
  return fam;
}

Report unit_doubling_sweep(const std::vector<GroupSpec>& family, const Caps& caps) {
  Report violations = Report::array();
  std::int64_t subsets = 0, structures = 0;
  for (const auto& spec : family) {
    GroupHandle g = make_group(spec, caps);
    ElementSet universe = whole_group(g);
    for (const ElementSet& a : nonempty_subsets(universe)) {
      ++subsets;
      const bool unit = product_set(a, a, caps).size() == a.size();
      try {
        auto cs = detect_unit_doubling(a, caps);
        if (cs.has_value() != unit) {
          record_violation(violations, g->name(), a,
                           unit ? "missed a unit-doubling set" : "false positive");
          continue;
        }
        if (cs) ++structures;
      } catch (const PropertyViolation& e) {
        record_violation(violations, g->name(), a, e.what());
      }
    }
  }
  Report r;
  r["battery"] = "unit-doubling";
  r["subsets"] = subsets;
  r["structures"] = structures;
  r["violations"] = std::move(violations);
  return r;
}

Report freiman_sweep(const std::vector<GroupSpec>& family, const Caps& caps) {
  Report violations = Report::array();
  std::int64_t subsets = 0, structures = 0;
  const Rational threshold(3, 2);
  for (const auto& spec : family) {
    GroupHandle g = make_group(spec, caps);
    ElementSet universe = whole_group(g);
    for (const ElementSet& a : nonempty_subsets(universe)) {
      ++subsets;
      const bool hyp =
          Rational(product_set(a, a, caps).size()) < threshold * a.size();
      try {
        auto cs = detect_small_doubling(a, threshold, caps);
        if (cs.has_value() != hyp) {
          record_violation(violations, g->name(), a,
                           hyp ? "missed a small-doubling set" : "false positive");
          continue;
        }
        if (cs) ++structures;
      } catch (const PropertyViolation& e) {
        record_violation(violations, g->name(), a, e.what());
      }
    }
  }
  Report r;
  r["battery"] = "freiman";
  r["subsets"] = subsets;
  r["structures"] = structures;
  r["violations"] = std::move(violations);
  return r;
}

Report hamidoune_sweep(std::uint64_t seed, const Caps& caps) {
  Report violations = Report::array();
  std::int64_t tested = 0;

  // Exhaustive part: every subset with K < 2 in small groups.
  std::vector<GroupSpec> small = {
      GroupSpec::cyclic(6),  GroupSpec::cyclic(8), GroupSpec::cyclic(12),
      GroupSpec::permutation(3, {{1, 0, 2}, {1, 2, 0}}),
      GroupSpec::permutation(4, {{1, 2, 3, 0}, {2, 1, 0, 3}}),
      GroupSpec::matrix_mod_q(2, 3, {{0, 2, 1, 0}, {1, 1, 1, 2}}),
  };
  for (const auto& spec : small) {
    GroupHandle g = make_group(spec, caps);
    ElementSet universe = whole_group(g);
    for (const ElementSet& a : nonempty_subsets(universe)) {
      if (!(Rational(product_set(a, a, caps).size()) < 2 * Rational(a.size()))) continue;
      ++tested;
      if (!hamidoune_cover(a, caps))
        record_violation(violations, g->name(), a, "no subgroup within the coset bound");
    }
  }

  // Randomized part: structured subsets (coset chunks) of groups of order
  // up to 512; raw random subsets essentially never satisfy K < 2.
  Rng rng(seed);
  std::vector<GroupSpec> big = {
      GroupSpec::cyclic(60),
      GroupSpec::cyclic(128),
      GroupSpec::cyclic(500),
      GroupSpec::direct_product({GroupSpec::cyclic(24), GroupSpec::cyclic(2)}),
      GroupSpec::permutation(4,
                             {{1, 2, 3, 0}, {1, 0, 2, 3}}),  // S4, order 24
      GroupSpec::direct_product({GroupSpec::cyclic(16), GroupSpec::cyclic(16)}),
  };
  for (const auto& spec : big) {
    GroupHandle g = make_group(spec, caps);
    std::int64_t found = 0;
    for (int attempt = 0; attempt < 400 && found < 40; ++attempt) {
      // Random cyclic subgroup, one coset, a random chunk of it.
      Element h = g->random_element(rng);
      ElementSet hgrp = subgroup_closure(set_of(g, {h}), caps);
      if (hgrp.size() > 64) continue;
      Element shift = g->random_element(rng);
      std::vector<Element> coset;
      for (const auto& e : hgrp.elements()) coset.push_back(g->mul(shift, e));
      std::sort(coset.begin(), coset.end());
      const std::int64_t keep =
          rng.range(std::max<std::int64_t>(1, hgrp.size() / 2), hgrp.size());
      auto idx = rng.sample_indices(hgrp.size(), keep);
      std::vector<Element> subset;
      for (auto i : idx) subset.push_back(coset[static_cast<std::size_t>(i)]);
      ElementSet a(g, std::move(subset));
      if (!(Rational(product_set(a, a, caps).size()) < 2 * Rational(a.size()))) continue;
      ++found;
      ++tested;
      if (!hamidoune_cover(a, caps))
        record_violation(violations, g->name(), a, "no subgroup within the coset bound");
    }
  }

  Report r;
  r["battery"] = "hamidoune";
  r["seed"] = seed;
  r["instances"] = tested;
  r["violations"] = std::move(violations);
  return r;
}

Report schreier_battery(std::uint64_t seed, int target_instances, const Caps& caps) {
  Rng rng(seed);
  Report violations = Report::array();
  std::int64_t valid = 0, total = 0;

  std::vector<GroupSpec> family = {
      GroupSpec::permutation(3, {{1, 0, 2}, {1, 2, 0}}),          // S3
      GroupSpec::permutation(4, {{1, 2, 3, 0}, {1, 0, 2, 3}}),    // S4
      GroupSpec::permutation(4, {{1, 2, 3, 0}, {2, 1, 0, 3}}),    // D4
      GroupSpec::permutation(5, {{1, 2, 3, 4, 0}, {1, 0, 2, 3, 4}}),  // S5
      GroupSpec::cyclic(36),
      GroupSpec::cyclic(60),
      GroupSpec::direct_product({GroupSpec::cyclic(6), GroupSpec::cyclic(10)}),
  };
  std::vector<GroupHandle> groups;
  std::vector<ElementSet> wholes;
  for (const auto& spec : family) {
    groups.push_back(make_group(spec, caps));
    wholes.push_back(whole_group(groups.back()));
  }

  while (valid < target_instances && total < target_instances * 40) {
    ++total;
    const std::size_t gi = static_cast<std::size_t>(rng.below(static_cast<std::int64_t>(groups.size())));
    const GroupHandle& g = groups[gi];
    // Random generating set: a couple of random elements; random subgroup H.
    std::vector<Element> gens;
    const int ng = static_cast<int>(rng.range(1, 3));
    for (int i = 0; i < ng; ++i) gens.push_back(g->random_element(rng));
    ElementSet s(g, gens);
    ElementSet span = subgroup_closure(s, caps);

    std::vector<Element> hgens;
    const int nh = static_cast<int>(rng.range(0, 2));
    for (int i = 0; i < nh; ++i) hgens.push_back(span.elements()[static_cast<std::size_t>(
        rng.below(span.size()))]);
    hgens.push_back(g->identity());
    ElementSet h = subgroup_closure(ElementSet(g, hgens), caps);
    if (!h.subset_of(span)) continue;

    const std::int64_t index = [&] {
      // cheap index: |span| / |H|
      return span.size() / h.size();
    }();
    // Aim the hypothesis near validity: C a little above the index, k >= C.
    const Rational c = Rational(index) + Rational(rng.range(0, 8), 4);
    if (!(c > 0)) continue;
    const int k = static_cast<int>(rng.range(
        static_cast<std::int64_t>(rational_ceil(c)),
        static_cast<std::int64_t>(rational_ceil(c)) + 4));
    try {
      Report rep = schreier_index(s, h, k, c, caps);
      if (rep["hypothesis"].get<bool>()) {
        ++valid;
        if (!rep["conclusion_ok"].get<bool>()) {
          Report v;
          v["group"] = g->name();
          v["reason"] = "index bound violated under valid hypothesis";
          v["report"] = rep;
          violations.push_back(std::move(v));
        }
      }
    } catch (const CapExceeded&) {
      continue;
    }
  }

  Report r;
  r["battery"] = "schreier";
  r["seed"] = seed;
  r["valid_hypothesis_instances"] = valid;
  r["total_attempts"] = total;
  r["violations"] = std::move(violations);
  return r;
}

Report dense_generation_battery(std::uint64_t seed, int max_n, const Caps& caps) {
  Rng rng(seed);
  Report violations = Report::array();
  std::int64_t instances = 0;
  const Rational alphas[] = {Rational(1, 2), Rational(1, 4), Rational(1, 8)};

  for (int n = 2; n <= max_n; ++n) {
    GroupHandle g = make_group(GroupSpec::cyclic(n), caps);
    for (const Rational& alpha : alphas) {
      const std::int64_t target =
          static_cast<std::int64_t>(rational_ceil(alpha * Rational(n)));
      // Random symmetric generating S containing the identity.
      for (int rep = 0; rep < 3; ++rep) {
        std::vector<Element> v;
        Element zero;
        zero.lanes = {0};
        v.push_back(zero);
        Element one;
        one.lanes = {1};
        v.push_back(one);
        v.push_back(g->inv(one));  // guarantee generation
        while (true) {
          ElementSet s(g, v);
          if (s.size() >= target) break;
          Element e;
          e.lanes = {rng.below(n)};
          v.push_back(e);
          v.push_back(g->inv(e));
        }
        ElementSet s(g, v);
        try {
          Report rep_out = dense_generation(s, alpha, caps);
          ++instances;
          if (!rep_out["within_bound"].get<bool>()) {
            Report viol;
            viol["group"] = g->name();
            viol["report"] = rep_out;
            violations.push_back(std::move(viol));
          }
        } catch (const PropertyViolation& e) {
          Report viol;
          viol["group"] = g->name();
          viol["reason"] = e.what();
          violations.push_back(std::move(viol));
        }
      }
    }
  }

  Report r;
  r["battery"] = "dense-generation";
  r["seed"] = seed;
  r["max_n"] = max_n;
  r["instances"] = instances;
  r["violations"] = std::move(violations);
  return r;
}

Report strong_approx_battery(const Caps& caps) {
  Report cases = Report::array();
  Report violations = Report::array();

  auto run_case = [&](const std::string& name, const ElementSet& a, const ElementSet& s,
                      const Rational& k, bool expect_all_true) {
    Report rep = strong_approx_check(a, s, k, caps);
    Report c;
    c["name"] = name;
    c["report"] = rep;
    if (expect_all_true) {
      for (const char* key : {"axiom1", "axiom2_conjugate_power", "axiom2_escape_into_S",
                              "consequence_monotone", "consequence_factor_1000"}) {
        if (!rep[key].is_boolean() || !rep[key].get<bool>()) {
          Report v;
          v["case"] = name;
          v["key"] = key;
          v["value"] = rep[key];
          violations.push_back(std::move(v));
        }
      }
    }
    cases.push_back(std::move(c));
  };

  {
    // Whole finite group: every axiom holds.
    GroupHandle s3 = make_group(GroupSpec::permutation(3, {{1, 0, 2}, {1, 2, 0}}), caps);
    ElementSet whole = whole_group(s3);
    run_case("whole-S3", whole, whole, Rational(1), true);
    // Proper subgroup A3.
    Element rot;
    rot.lanes = {1, 2, 0};
    ElementSet a3 = subgroup_closure(set_of(s3, {rot}), caps);
    run_case("subgroup-A3", a3, a3, Rational(1), true);
  }
  {
    // Honest evaluation for the interval {-1,0,1} in Z: the conjugate-power
    // axiom fails for S = {±1} while the chain axiom holds vacuously.
    GroupHandle z = make_group(GroupSpec::free_abelian(1), caps);
    Element one;
    one.lanes = {1};
    ElementSet a = symmetrize(set_of(z, {one}));
    run_case("interval-Z", a, a, Rational(1), false);
  }

  Report r;
  r["battery"] = "strong-approx";
  r["cases"] = std::move(cases);
  r["violations"] = std::move(violations);
  return r;
}

}  // namespace batteries
}  // namespace apx

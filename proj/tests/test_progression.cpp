#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <functional>

#include "apx/element_set.hpp"
#include "apx/errors.hpp"
#include "apx/progression.hpp"
#include "apx/setcalc.hpp"

using namespace apx;

namespace {

Element el(std::vector<std::int64_t> v) {
  Element e;
  e.lanes = std::move(v);
  return e;
}

Element heis(std::int64_t x, std::int64_t y, std::int64_t z) {
  Element e;
  e.wide = {Integer(x), Integer(y), Integer(z)};
  return e;
}

// Independent oracle: enumerate every word with at most L_i letters x_i^{±1}
// by explicit recursion over letter sequences.
ElementSet brute_progression(const GroupHandle& g, const std::vector<Element>& gens,
                             const std::vector<std::int64_t>& lengths) {
  std::vector<Element> acc;
  std::vector<std::int64_t> budget = lengths;
  std::function<void(const Element&)> rec = [&](const Element& cur) {
    acc.push_back(cur);
    for (std::size_t i = 0; i < gens.size(); ++i) {
      if (budget[i] == 0) continue;
      --budget[i];
      rec(g->mul(cur, gens[i]));
      rec(g->mul(cur, g->inv(gens[i])));
      ++budget[i];
    }
  };
  rec(g->identity());
  return ElementSet(g, std::move(acc));
}

ProgressionSpec make_spec(const GroupHandle& g, std::vector<Element> gens,
                          std::vector<std::int64_t> lengths) {
  ProgressionSpec ps;
  ps.group = g;
  ps.generators = std::move(gens);
  ps.lengths = std::move(lengths);
  return ps;
}

}  // namespace

TEST_CASE("progression enumeration basics") {
  GroupHandle z = make_group(GroupSpec::free_abelian(1));
  for (std::int64_t l : {0, 1, 3, 7}) {
    ElementSet p = enumerate_progression(make_spec(z, {el({1})}, {l}));
    CHECK(p.size() == 2 * l + 1);
  }

  GroupHandle z2 = make_group(GroupSpec::free_abelian(2));
  ElementSet p2 = enumerate_progression(make_spec(z2, {el({1, 0}), el({0, 1})}, {1, 1}));
  CHECK(p2.size() == 9);

  GroupHandle h = make_group(GroupSpec::heisenberg());
  ElementSet p3 = enumerate_progression(make_spec(h, {heis(1, 0, 0), heis(0, 1, 0)}, {1, 1}));
  CHECK(p3.size() == 13);
  CHECK(p3.contains(heis(1, 1, 1)));   // XY
  CHECK(p3.contains(heis(1, 1, 0)));   // YX
  CHECK(p3.contains(heis(-1, 1, -1)));
}

TEST_CASE("progression matches the word-enumeration oracle") {
  GroupHandle h = make_group(GroupSpec::heisenberg());
  std::vector<Element> gens = {heis(1, 0, 0), heis(0, 1, 0)};
  for (std::int64_t l = 0; l <= 3; ++l) {
    ElementSet fast = enumerate_progression(make_spec(h, gens, {l, l}));
    ElementSet slow = brute_progression(h, gens, {l, l});
    CHECK(fast.same_elements(slow));
  }
  // asymmetric budgets, rank 3
  GroupHandle s4 = make_group(GroupSpec::parse("sym:4"));
  std::vector<Element> pg = {el({1, 0, 2, 3}), el({0, 2, 1, 3}), el({0, 1, 3, 2})};
  ElementSet fast = enumerate_progression(make_spec(s4, pg, {2, 1, 1}));
  CHECK(fast.same_elements(brute_progression(s4, pg, {2, 1, 1})));
}

TEST_CASE("progressions are symmetric, contain the identity, and are monotone in L") {
  GroupHandle h = make_group(GroupSpec::heisenberg());
  std::vector<Element> gens = {heis(1, 0, 0), heis(0, 1, 0)};
  ElementSet prev(h, {});
  for (std::int64_t l = 0; l <= 4; ++l) {
    ElementSet p = enumerate_progression(make_spec(h, gens, {l, l}));
    CHECK(p.contains(h->identity()));
    CHECK(p.same_elements(inverse_set(p)));
    if (l > 0) CHECK(prev.subset_of(p));
    prev = p;
  }
}

TEST_CASE("P^n sits inside P(x; nL)") {
  GroupHandle h = make_group(GroupSpec::heisenberg());
  std::vector<Element> gens = {heis(1, 0, 0), heis(0, 1, 0)};
  ElementSet p = enumerate_progression(make_spec(h, gens, {2, 2}));
  for (int n = 2; n <= 3; ++n) {
    ElementSet pn = power_set(p, n);
    ElementSet big = enumerate_progression(make_spec(h, gens, {2 * n, 2 * n}));
    CHECK(pn.subset_of(big));
  }
}

TEST_CASE("progression equals box progression on abelian groups") {
  GroupHandle z2 = make_group(GroupSpec::free_abelian(2));
  std::vector<Element> gens = {el({1, 0}), el({0, 1})};
  for (std::vector<std::int64_t> lens : {std::vector<std::int64_t>{1, 2},
                                         std::vector<std::int64_t>{3, 4},
                                         std::vector<std::int64_t>{4, 2}}) {
    ElementSet p = enumerate_progression(make_spec(z2, gens, lens));
    BoxProgression b = box_progression(z2, gens, lens);
    CHECK(p.same_elements(b.p));
  }
}

TEST_CASE("coset nilprogression via kernel") {
  GroupHandle z12 = make_group(GroupSpec::cyclic(12));
  ElementSet kernel = subgroup_closure(set_of(z12, {el({6})}));  // {0, 6}
  ProgressionSpec ps = make_spec(z12, {el({1})}, {2});
  ps.kernel = kernel;
  ElementSet p = enumerate_progression(ps);
  CHECK(p.size() == 10);  // {-2..2} + {0,6}
  CHECK(p.contains(el({8})));
  CHECK(!p.contains(el({3})));

  // kernel must be a subgroup
  ProgressionSpec bad = make_spec(z12, {el({1})}, {2});
  bad.kernel = ElementSet(z12, {el({6})});
  CHECK_THROWS_AS(enumerate_progression(bad), PropertyViolation);
}

TEST_CASE("box progressions") {
  GroupHandle z2 = make_group(GroupSpec::free_abelian(2));
  BoxProgression b = box_progression(z2, {el({1, 0}), el({0, 1})}, {2, 3});
  CHECK(b.p.size() == 35);
  CHECK(b.pp_size == 117);
  CHECK(b.bound == 140);

  GroupHandle z5 = make_group(GroupSpec::cyclic(5));
  BoxProgression sat = box_progression(z5, {el({1})}, {10});
  CHECK(sat.p.size() == 5);
  CHECK(sat.doubling == 1);

  BoxProgression triv = box_progression(z2, {el({0, 0})}, {3});
  CHECK(triv.p.size() == 1);

  GroupHandle s3 = make_group(GroupSpec::parse("sym:3"));
  CHECK_THROWS_AS(box_progression(s3, {el({1, 0, 2}), el({1, 2, 0})}, {1, 1}), InvalidInput);
}

TEST_CASE("nilpotency class") {
  GroupHandle z2 = make_group(GroupSpec::free_abelian(2));
  CHECK(nilpotency_class(z2, {el({1, 0}), el({0, 1})}) == 1);

  GroupHandle h = make_group(GroupSpec::heisenberg());
  CHECK(nilpotency_class(h, {heis(1, 0, 0), heis(0, 1, 0)}) == 2);
  CHECK(nilpotency_class(h, {heis(0, 0, 1)}) == 1);
  CHECK(nilpotency_class(h, {h->identity()}) == 0);

  GroupHandle d4 = make_group(GroupSpec::parse("dihedral:4"));
  CHECK(nilpotency_class(d4, d4->declared_generators()) == 2);
  GroupHandle q8 = make_group(GroupSpec::parse("quaternion"));
  CHECK(nilpotency_class(q8, q8->declared_generators()) == 2);
  GroupHandle hm = make_group(GroupSpec::parse("heis-mod:3"));
  CHECK(nilpotency_class(hm, hm->declared_generators()) == 2);

  GroupHandle s3 = make_group(GroupSpec::parse("sym:3"));
  CHECK_THROWS_AS(nilpotency_class(s3, s3->declared_generators()), InvalidInput);
  GroupHandle f2 = make_group(GroupSpec::free_group(2));
  CHECK_THROWS_AS(nilpotency_class(f2, {el({1}), el({2})}), InvalidInput);
}

TEST_CASE("nilprogression report") {
  GroupHandle z = make_group(GroupSpec::free_abelian(1));
  Report r = nilprogression_check(make_spec(z, {el({1})}, {4}));
  CHECK(r["step"] == 1);
  CHECK(r["size"] == 9);
  CHECK(r["k_greedy"].get<std::int64_t>() <= 2);

  GroupHandle h = make_group(GroupSpec::heisenberg());
  Report rh = nilprogression_check(make_spec(h, {heis(1, 0, 0), heis(0, 1, 0)}, {3, 3}));
  CHECK(rh["step"] == 2);
  CHECK(!rh["small_side_flag"].get<bool>());
}

TEST_CASE("growth profiles with closed-form cross-checks") {
  GroupHandle z = make_group(GroupSpec::free_abelian(1));
  ElementSet s = symmetrize(set_of(z, {el({1})}));
  GrowthProfile gp = growth_profile(s, 8, {4, 8});
  for (int n = 1; n <= 8; ++n) CHECK(gp.sizes[static_cast<std::size_t>(n - 1)] == 2 * n + 1);
  CHECK(gp.slope == doctest::Approx(1.0).epsilon(0.12));

  GroupHandle z2 = make_group(GroupSpec::free_abelian(2));
  ElementSet s2 = symmetrize(ElementSet(z2, {el({1, 0}), el({0, 1})}));
  GrowthProfile gp2 = growth_profile(s2, 10, {5, 10});
  for (int n = 1; n <= 10; ++n)
    CHECK(gp2.sizes[static_cast<std::size_t>(n - 1)] == 2 * n * n + 2 * n + 1);
  CHECK(gp2.slope == doctest::Approx(2.0).epsilon(0.08));
}

TEST_CASE("doubling scale finder") {
  GroupHandle z = make_group(GroupSpec::free_abelian(1));
  ElementSet s = symmetrize(set_of(z, {el({1})}));
  CHECK(doubling_scale_finder(s, Rational(1), 4) == 1);

  GroupHandle f2 = make_group(GroupSpec::free_group(2));
  ElementSet fs = symmetrize(ElementSet(f2, {el({1}), el({2})}));
  CHECK(!doubling_scale_finder(fs, Rational(1), 4).has_value());

  GroupHandle z6 = make_group(GroupSpec::cyclic(6));
  CHECK(doubling_scale_finder(whole_group(z6), Rational(1), 3) == 1);
}

TEST_CASE("all-scales covering table") {
  GroupHandle z60 = make_group(GroupSpec::cyclic(60));
  ElementSet s = symmetrize(set_of(z60, {el({1})}));
  Report r = all_scales_report(s, {2, 12});
  // The pinned greedy (ties to the canonical-least translate, which centers
  // the first tile) uses 3 translates on intervals; the optimum is 2.
  for (const auto& row : r["table"]["rows"])
    CHECK(row[2].get<std::int64_t>() == 3);
  ApproxConstant exact6 = approx_constant(power_set(s, 6), true);
  CHECK(*exact6.k_exact == 2);

  GroupHandle z2 = make_group(GroupSpec::free_abelian(2));
  ElementSet s2 = symmetrize(ElementSet(z2, {el({1, 0}), el({0, 1})}));
  Report r2 = all_scales_report(s2, {2, 8});
  for (const auto& row : r2["table"]["rows"])
    CHECK(row[2].get<std::int64_t>() == 5);

  CHECK_THROWS_AS(all_scales_report(set_of(z60, {el({1})}), {2, 3}), InvalidInput);
}

TEST_CASE("free group bounds") {
  GroupHandle f2 = make_group(GroupSpec::free_group(2));
  ElementSet a(f2, {el({1}), el({2}), el({-2})});
  Report r = free_group_bounds(a, 3);
  CHECK(r["safin_ok"].get<bool>());
  CHECK(r["size_exact"].get<bool>());

  // Sharpness example {x} ∪ {y^i : |i| < 5}: A^3 contains all y^i x y^j.
  // The i = 0 power is the identity, so |A| = 10.
  std::vector<Element> v{el({1}), f2->identity()};
  for (std::int64_t i = 1; i < 5; ++i) {
    std::vector<std::int64_t> w(static_cast<std::size_t>(i), 2);
    v.push_back(el(w));
    for (auto& c : w) c = -2;
    v.push_back(el(w));
  }
  ElementSet sharp(f2, v);
  REQUIRE(sharp.size() == 10);
  Report rs = free_group_bounds(sharp, 3);
  CHECK(rs["safin_ok"].get<bool>());
  const auto& rows = rs["table"]["rows"];
  CHECK(rows[2][1].get<std::int64_t>() >= 81);

  ElementSet cyc(f2, {el({2}), el({2, 2})});
  CHECK_THROWS_AS(free_group_bounds(cyc, 3), InvalidInput);
}

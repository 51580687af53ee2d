// Acceptance suite: one binary, one pass/fail line per criterion.
// Usage: acceptance [fixtures.json]

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "apx/batteries.hpp"
#include "apx/cayley.hpp"
#include "apx/errors.hpp"
#include "apx/fixtures.hpp"
#include "apx/metric.hpp"
#include "apx/progression.hpp"
#include "apx/setcalc.hpp"
#include "apx/structure.hpp"

using namespace apx;

namespace {

std::string g_fixtures_path;

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

ElementSet random_subset(const ElementSet& universe, Rng& rng, std::int64_t size) {
  auto idx = rng.sample_indices(universe.size(), std::min(size, universe.size()));
  std::vector<Element> v;
  for (auto i : idx) v.push_back(universe.elements()[static_cast<std::size_t>(i)]);
  return ElementSet(universe.group(), std::move(v));
}

ElementSet heisenberg_window(const GroupHandle& h) {
  std::vector<Element> v;
  for (std::int64_t x = -2; x <= 2; ++x)
    for (std::int64_t y = -2; y <= 2; ++y)
      for (std::int64_t z = -3; z <= 3; ++z) v.push_back(heis(x, y, z));
  return ElementSet(h, std::move(v));
}

// criterion 1
std::string prop16_sweep() {
  Report r = batteries::unit_doubling_sweep(batteries::order10_family());
  if (!r["violations"].empty()) return r["violations"].dump();
  return "";
}

// criterion 2
std::string freiman_sweep_crit() {
  Report r = batteries::freiman_sweep(batteries::order10_family());
  if (!r["violations"].empty()) return r["violations"].dump();
  return "";
}

// criterion 3
std::string ruzsa_triangle_crit() {
  Rng rng(0xA11CE);
  GroupHandle z60 = make_group(GroupSpec::cyclic(60));
  GroupHandle s5 = make_group(GroupSpec::parse("sym:5"));
  GroupHandle h = make_group(GroupSpec::heisenberg());
  ElementSet u60 = whole_group(z60);
  ElementSet u5 = whole_group(s5);
  ElementSet uh = heisenberg_window(h);
  const ElementSet* universes[] = {&u60, &u5, &uh};
  std::int64_t checked = 0;
  for (int t = 0; t < 10'000; ++t) {
    const ElementSet& u = *universes[t % 3];
    ElementSet a = random_subset(u, rng, rng.range(1, 8));
    ElementSet b = random_subset(u, rng, rng.range(1, 8));
    ElementSet c = random_subset(u, rng, rng.range(1, 8));
    if (!(triangle_slack(a, b, c) >= 1))
      return "slack < 1 at instance " + std::to_string(t);
    ++checked;
  }
  return checked == 10'000 ? "" : "wrong instance count";
}

// criterion 4
std::string small_tripling_crit() {
  Rng rng(0xB0B);
  GroupHandle z60 = make_group(GroupSpec::cyclic(60));
  GroupHandle s4 = make_group(GroupSpec::parse("sym:4"));
  GroupHandle h = make_group(GroupSpec::heisenberg());
  ElementSet u60 = whole_group(z60);
  ElementSet u4 = whole_group(s4);
  ElementSet uh = heisenberg_window(h);
  const ElementSet* universes[] = {&u60, &u4, &uh};
  for (int t = 0; t < 1000; ++t) {
    ElementSet a = random_subset(*universes[t % 3], rng, rng.range(1, 4));
    PowerTable pw(a);
    const Integer s1 = a.size();
    const Rational k3(Integer(pw.power(3).size()), s1);
    for (int n = 4; n <= 6; ++n)
      if (!(Rational(Integer(pw.power(n).size())) <=
            rpow(k3, static_cast<unsigned long>(n - 2)) * s1))
        return "tripling bound failed at instance " + std::to_string(t);
  }
  return "";
}

// criterion 5
std::string covering_crit() {
  Rng rng(0xC0FFEE);
  GroupHandle z60 = make_group(GroupSpec::cyclic(60));
  GroupHandle d4 = make_group(GroupSpec::parse("dihedral:4"));
  ElementSet u60 = whole_group(z60);
  ElementSet u4 = whole_group(d4);
  std::int64_t instances = 0;
  try {
    for (int t = 0; t < 700; ++t) {
      const ElementSet& u = t % 2 ? u4 : u60;
      ElementSet a = random_subset(u, rng, rng.range(1, 10));
      ElementSet b = random_subset(u, rng, rng.range(1, 10));
      ruzsa_cover(a, b);  // containment and |X| <= |AB|/|B| asserted inline
      ++instances;
    }
    for (int t = 0; t < 400; ++t) {
      const ElementSet& u = t % 2 ? u4 : u60;
      ElementSet a = symmetrize(random_subset(u, rng, rng.range(1, 5)));
      lemma210_witness(a);  // |X| <= |A^5|/|A| and (A^2)^2 ⊆ XA^2 asserted
      ++instances;
    }
  } catch (const PropertyViolation& e) {
    return e.what();
  }
  return instances >= 1000 ? "" : "too few instances";
}

// criterion 6
std::string lemma211_crit() {
  Rng rng(0xD11);
  GroupHandle z60 = make_group(GroupSpec::cyclic(60));
  GroupHandle s4 = make_group(GroupSpec::parse("sym:4"));
  ElementSet u60 = whole_group(z60);
  ElementSet u4 = whole_group(s4);
  try {
    for (int t = 0; t < 100; ++t) {
      const ElementSet& u = t % 2 ? u4 : u60;
      ElementSet a = symmetrize(random_subset(u, rng, rng.range(1, 5)));
      ElementSet b = symmetrize(random_subset(u, rng, rng.range(1, 5)));
      ElementSet xa = approx_constant(a, false).witness.x;
      ElementSet yb = approx_constant(b, false).witness.x;
      lemma211_witness(a, xa, b, yb);  // containment and |Z| bound asserted
    }
  } catch (const PropertyViolation& e) {
    return e.what();
  }
  return "";
}

// criterion 7
std::string box_crit() {
  GroupHandle zd[3] = {make_group(GroupSpec::free_abelian(1)),
                       make_group(GroupSpec::free_abelian(2)),
                       make_group(GroupSpec::free_abelian(3))};
  GroupHandle z5 = make_group(GroupSpec::cyclic(5));
  GroupHandle z12 = make_group(GroupSpec::cyclic(12));
  std::int64_t instances = 0;
  try {
    for (int d = 1; d <= 3; ++d) {
      std::vector<std::int64_t> lens(static_cast<std::size_t>(d), 0);
      while (true) {
        {  // identity embedding into Z^d
          std::vector<Element> imgs;
          for (int i = 0; i < d; ++i) {
            std::vector<std::int64_t> v(static_cast<std::size_t>(d), 0);
            v[static_cast<std::size_t>(i)] = 1;
            imgs.push_back(el(v));
          }
          box_progression(zd[d - 1], imgs, lens);
          ++instances;
        }
        // cyclic targets: exhaustive residue images
        for (const GroupHandle& g : {z5, z12}) {
          const std::int64_t m = static_cast<std::int64_t>(*g->order());
          std::vector<std::int64_t> residues(static_cast<std::size_t>(d), 0);
          while (true) {
            std::vector<Element> imgs;
            for (auto r : residues) imgs.push_back(el({r}));
            box_progression(g, imgs, lens);  // |PP| <= 2^d |P| asserted inline
            ++instances;
            int i = 0;
            while (i < d && ++residues[static_cast<std::size_t>(i)] ==
                                (m == 5 ? 5 : 4))  // cyclic(12): residues 0..3
              residues[static_cast<std::size_t>(i++)] = 0;
            if (i == d) break;
          }
        }
        int i = 0;
        while (i < d && ++lens[static_cast<std::size_t>(i)] == 4)
          lens[static_cast<std::size_t>(i++)] = 0;
        if (i == d) break;
      }
    }
  } catch (const PropertyViolation& e) {
    return e.what();
  }
  return instances > 0 ? "" : "no instances";
}

// Independent oracle for criterion 8: unitriangular integer matrices with
// plain int64 entries and std::set storage.
struct HeisMat {
  std::int64_t x, y, z;
  bool operator<(const HeisMat& o) const {
    if (x != o.x) return x < o.x;
    if (y != o.y) return y < o.y;
    return z < o.z;
  }
  HeisMat mul(const HeisMat& o) const { return {x + o.x, y + o.y, z + o.z + x * o.y}; }
};

// criterion 8
std::string heisenberg_growth_crit() {
  GroupHandle h = make_group(GroupSpec::heisenberg());
  ElementSet s = symmetrize(ElementSet(h, {heis(1, 0, 0), heis(0, 1, 0)}));
  GrowthProfile gp = growth_profile(s, 16, {8, 16});
  if (gp.slope < 3.6 || gp.slope > 4.4)
    return "slope " + std::to_string(gp.slope) + " outside [3.6, 4.4]";

  std::set<HeisMat> gens = {{0, 0, 0}, {1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}};
  std::set<HeisMat> ball = gens;
  for (int n = 1; n <= 10; ++n) {
    if (n > 1) {
      std::set<HeisMat> next;
      for (const auto& a : ball)
        for (const auto& b : gens) next.insert(a.mul(b));
      ball = std::move(next);
    }
    if (Integer(static_cast<std::int64_t>(ball.size())) !=
        gp.sizes[static_cast<std::size_t>(n - 1)])
      return "matrix-BFS oracle mismatch at n = " + std::to_string(n);
  }
  return "";
}

// criterion 9
std::string safin_crit() {
  GroupHandle f2 = make_group(GroupSpec::free_group(2));
  Rng rng(0x5AF1);
  int done = 0;
  for (int t = 0; done < 100 && t < 1000; ++t) {
    const std::int64_t size = rng.range(2, 50);
    std::vector<Element> v;
    while (static_cast<std::int64_t>(v.size()) < size) v.push_back(f2->random_element(rng));
    ElementSet a(f2, std::move(v));
    if (a.size() < 2) continue;
    for (int n : {3, 4}) {
      try {
        Report r = free_group_bounds(a, n);
        if (!r["safin_ok"].get<bool>()) return "safin bound failed";
      } catch (const InvalidInput&) {
        goto next_set;  // cyclic degenerate draw; resample
      } catch (const PropertyViolation& e) {
        return e.what();
      }
    }
    ++done;
  next_set:;
  }
  if (done < 100) return "could not assemble 100 instances";

  // Extremal example {x} ∪ {y^i : |i| < 10}.
  std::vector<Element> v{el({1}), f2->identity()};
  for (std::int64_t i = 1; i < 10; ++i) {
    std::vector<std::int64_t> w(static_cast<std::size_t>(i), 2);
    v.push_back(el(w));
    for (auto& c : w) c = -2;
    v.push_back(el(w));
  }
  ElementSet sharp(f2, v);
  if (sharp.size() != 20) return "extremal example has wrong size";
  const Integer a3 = power_set(sharp, 3).size();
  const double ratio = static_cast<double>(a3) / 400.0;
  if (ratio < 0.2 || ratio > 5.0)
    return "extremal ratio " + std::to_string(ratio) + " outside [0.2, 5]";
  return "";
}

// criterion 10
std::string sandwich_crit() {
  GroupHandle z2 = make_group(GroupSpec::free_abelian(2));
  std::vector<Element> gens = {el({1, 0}), el({0, 1})};
  ElementSet ball = power_set(symmetrize(ElementSet(z2, gens)), 5);
  try {
    for (const auto& e : ball.elements())
      linf_word_metric(z2, gens, e);  // sandwich asserted inline
  } catch (const PropertyViolation& e) {
    return e.what();
  }
  return "";
}

// criterion 11
std::string spectral_crit() {
  try {
    for (std::int64_t n = 3; n <= 256; ++n) {
      GroupHandle g = make_group(GroupSpec::cyclic(n));
      Element one = el({1});
      CayleyGraph x(ElementSet(g, {one, g->inv(one)}));
      const double lam = spectral_gap(x);  // bound asserted inline
      const double expect = 1.0 - std::cos(2.0 * M_PI / static_cast<double>(n));
      if (std::abs(lam - expect) > 1e-8)
        return "cyclic(" + std::to_string(n) + ") off closed form by " +
               std::to_string(std::abs(lam - expect));
    }
    for (std::int64_t p : {3, 5, 7, 11}) {
      GroupHandle g = make_group(GroupSpec::psl2(p));
      spectral_gap(CayleyGraph(ElementSet(g, g->declared_generators())));
    }
    for (const char* name : {"sym:4", "sym:5"}) {
      GroupHandle g = make_group(GroupSpec::parse(name));
      std::vector<Element> gens = g->declared_generators();
      ElementSet s = symmetrize(ElementSet(g, gens));
      spectral_gap(CayleyGraph(s));
    }
  } catch (const PropertyViolation& e) {
    return e.what();
  }
  return "";
}

// criterion 12
std::string dense_generation_crit() {
  Report r = batteries::dense_generation_battery(0xDE45E, 60);
  if (!r["violations"].empty()) return r["violations"].dump();
  return "";
}

// criterion 13
std::string scaling_limit_crit() {
  Report rc = torus_limit_report("cycles", {16, 64, 256});
  for (const auto& row : rc["rows"]) {
    if (!row["cycle_bound_ok"].get<bool>())
      return "cycle gh upper exceeds 2/n at n = " + row["n"].dump();
  }
  Report rg = torus_limit_report("grids", {8, 16, 32, 64});
  double prev = 1e18, last = 1e18;
  for (const auto& row : rg["rows"]) {
    const double up = row["gh_upper"].get<double>();
    if (!(up < prev)) return "grid gh upper not strictly decreasing";
    prev = up;
    last = up;
  }
  if (!(last <= 0.1)) return "grid gh upper at 64 is " + std::to_string(last);
  return "";
}

// criterion 14
std::string norm_extract_crit() {
  GroupHandle z2 = make_group(GroupSpec::free_abelian(2));
  std::vector<std::vector<std::int64_t>> dirs = {{1, 0}, {0, 1}, {1, 1}, {2, 1}, {3, 2}, {1, -1}};
  ElementSet axis = symmetrize(ElementSet(z2, {el({1, 0}), el({0, 1})}));
  Report ra = norm_extract(axis, dirs, {4, 8, 16});
  if (ra["fitted_norm"] != "l1") return "axis moves did not fit l1";
  if (!ra["convexity_ok"].get<bool>()) return "axis convexity failed";
  for (const auto& d : ra["directions"]) {
    std::int64_t l1 = 0;
    for (auto c : d["direction"].get<std::vector<std::int64_t>>()) l1 += std::abs(c);
    for (const auto& row : d["table"]["rows"])
      if (row[2]["num"].get<std::int64_t>() != l1 || row[2]["den"].get<std::int64_t>() != 1)
        return "axis estimate differs from the l1 norm";
  }
  std::vector<Element> king;
  for (std::int64_t dx = -1; dx <= 1; ++dx)
    for (std::int64_t dy = -1; dy <= 1; ++dy)
      if (dx || dy) king.push_back(el({dx, dy}));
  Report rk = norm_extract(symmetrize(ElementSet(z2, king)), dirs, {4, 8, 16});
  if (rk["fitted_norm"] != "linf") return "king moves did not fit linf";
  if (!rk["convexity_ok"].get<bool>()) return "king convexity failed";
  for (const auto& d : rk["directions"]) {
    std::int64_t li = 0;
    for (auto c : d["direction"].get<std::vector<std::int64_t>>())
      li = std::max(li, std::abs(c));
    for (const auto& row : d["table"]["rows"])
      if (row[2]["num"].get<std::int64_t>() != li || row[2]["den"].get<std::int64_t>() != 1)
        return "king estimate differs from the linf norm";
  }
  return "";
}

// criterion 15
std::string fixtures_crit() {
  Fixtures on_disk = Fixtures::load(g_fixtures_path);
  Fixtures fresh = Fixtures::compute();
  if (!fresh.matches(on_disk)) return "recomputed fixtures differ from the frozen file";
  Fixtures again = Fixtures::compute();
  if (!fresh.matches(again)) return "fixture recomputation is not deterministic";
  return "";
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_fixtures_path = argv[1];
  else g_fixtures_path = default_fixtures_path();

  struct Criterion {
    int id;
    const char* title;
    std::function<std::string()> run;
  };
  const Criterion criteria[] = {
      {1, "exhaustive unit-doubling sweep (order <= 10 family)", prop16_sweep},
      {2, "exhaustive Freiman 3/2 sweep", freiman_sweep_crit},
      {3, "Ruzsa triangle inequality on 10^4 random triples", ruzsa_triangle_crit},
      {4, "small tripling on 10^3 random sets, n in {4,5,6}", small_tripling_crit},
      {5, "Ruzsa covering witnesses on >= 10^3 instances", covering_crit},
      {6, "intersection witnesses on 100 pairs", lemma211_crit},
      {7, "box progression bound |PP| <= 2^d |P|, exhaustive d <= 3, L <= 3", box_crit},
      {8, "Heisenberg ball growth ~ n^4 with matrix-BFS oracle", heisenberg_growth_crit},
      {9, "Safin free-group lower bound, 100 random sets", safin_crit},
      {10, "word-metric sandwich on the radius-5 ball of Z^2", sandwich_crit},
      {11, "spectral gap >= 1/(8 diam^2) across the graph family", spectral_crit},
      {12, "dense generation bound, cyclic(n <= 60)", dense_generation_crit},
      {13, "scaling limits: cycles to the circle, grids to the l1 torus", scaling_limit_crit},
      {14, "norm extraction: l1 and linf recovered exactly", norm_extract_crit},
      {15, "frozen fixtures byte-exact and deterministic", fixtures_crit},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    try {
      detail = c.run();
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double dt =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (detail.empty()) {
      std::cout << "[PASS] criterion " << c.id << ": " << c.title << "\n";
    } else {
      std::cout << "[FAIL] criterion " << c.id << ": " << c.title << " -- " << detail
                << "\n";
      ++failures;
    }
    std::cerr << "  (criterion " << c.id << " took " << dt << "s)\n";
    std::cout.flush();
  }
  return failures;
}

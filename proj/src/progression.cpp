#include "apx/progression.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>

#include "apx/errors.hpp"

namespace apx {

namespace {

constexpr int kMaxRank = 4;
using Budget = std::array<std::int16_t, kMaxRank>;

bool dominates(const Budget& a, const Budget& b, int r) {
  for (int i = 0; i < r; ++i)
    if (a[i] < b[i]) return false;
  return true;
}

}  // namespace

ProgressionSpec ProgressionSpec::from_json(const nlohmann::json& j, const Caps& caps) {
  if (!j.is_object()) throw InvalidInput("progression spec must be a JSON object");
  if (!j.contains("group") || !j.contains("generators") || !j.contains("lengths"))
    throw InvalidInput("progression spec needs \"group\", \"generators\", \"lengths\"");
  ProgressionSpec s;
  s.group = make_group(GroupSpec::from_json(j.at("group")), caps);
  for (const auto& lit : j.at("generators"))
    s.generators.push_back(element_from_json(s.group, lit));
  s.lengths = j.at("lengths").get<std::vector<std::int64_t>>();
  if (j.contains("kernel")) s.kernel = ElementSet::from_json(s.group, j.at("kernel"));
  return s;
}

ElementSet enumerate_progression(const ProgressionSpec& spec, const Caps& caps) {
  const GroupHandle& g = spec.group;
  const int r = static_cast<int>(spec.generators.size());
  if (r < 1 || r > kMaxRank)
    throw InvalidInput("progression: rank must be in [1, " + std::to_string(kMaxRank) + "]");
  if (spec.lengths.size() != spec.generators.size())
    throw InvalidInput("progression: one length per generator");
  for (auto l : spec.lengths)
    if (l < 0) throw InvalidInput("progression: lengths must be nonnegative");
  for (const auto& x : spec.generators)
    if (!g->contains(x)) throw InvalidInput("progression: generator not in the group");

  if (spec.kernel) {
    check_property(is_subgroup(*spec.kernel), "progression kernel is not a subgroup");
    for (const auto& x : spec.generators) {
      const Element xi = g->inv(x);
      for (const auto& e : spec.kernel->elements())
        check_property(spec.kernel->contains(g->mul(g->mul(x, e), xi)),
                       "progression kernel not normalized by the generators");
    }
  }

  Budget start{};
  for (int i = 0; i < r; ++i) start[i] = static_cast<std::int16_t>(spec.lengths[i]);

  // Pareto frontier of remaining budgets per element: a state is expanded
  // only if no recorded budget dominates it, so the state count stays within
  // a small multiple of the reachable-element count.
  std::unordered_map<Element, std::vector<Budget>, ElementHash> frontier;
  std::deque<std::pair<Element, Budget>> queue;
  std::int64_t stored_states = 0;
  const std::int64_t state_cap = caps.elements * 8;

  auto push = [&](Element e, const Budget& b) {
    auto& list = frontier[e];
    for (const auto& have : list)
      if (dominates(have, b, r)) return;
    std::erase_if(list, [&](const Budget& have) { return dominates(b, have, r); });
    list.push_back(b);
    if (++stored_states > state_cap)
      throw CapExceeded("enumerate_progression: state space exceeds cap");
    caps.require_elements(static_cast<std::int64_t>(frontier.size()),
                          "enumerate_progression");
    queue.emplace_back(std::move(e), b);
  };

  push(g->identity(), start);
  std::vector<Element> letters;
  for (const auto& x : spec.generators) {
    letters.push_back(x);
    letters.push_back(g->inv(x));
  }
  while (!queue.empty()) {
    auto [e, b] = std::move(queue.front());
    queue.pop_front();
    for (int i = 0; i < r; ++i) {
      if (b[i] == 0) continue;
      Budget nb = b;
      --nb[i];
      push(g->mul(e, letters[2 * i]), nb);
      push(g->mul(e, letters[2 * i + 1]), nb);
    }
  }

  std::vector<Element> elems;
  elems.reserve(frontier.size());
  for (auto& [e, _] : frontier) elems.push_back(e);
  ElementSet p(g, std::move(elems));
  if (spec.kernel) return product_set(*spec.kernel, p, caps);
  return p;
}

BoxProgression box_progression(const GroupHandle& g, const std::vector<Element>& images,
                               const std::vector<std::int64_t>& lengths,
                               const Caps& caps) {
  const int d = static_cast<int>(images.size());
  if (d < 1 || lengths.size() != images.size())
    throw InvalidInput("box_progression: one length per image");
  for (const auto& x : images)
    if (!g->contains(x)) throw InvalidInput("box_progression: image not in the group");
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      if (!(g->mul(images[i], images[j]) == g->mul(images[j], images[i])))
        throw InvalidInput("box_progression: images do not commute (no homomorphism from Z^d)");

  Integer volume = 1;
  for (auto l : lengths) volume *= 2 * l + 1;
  if (volume > caps.pairs) throw CapExceeded("box_progression: box volume exceeds cap");

  SetBuilder out(g, caps, "box_progression");
  // Walk the box with running partial products: entering axis i at value
  // -L_i, stepping by one multiplication each.
  auto rec = [&](auto&& self, int axis, const Element& acc) -> void {
    if (axis == d) {
      out.insert(acc);
      return;
    }
    Element cur = g->mul(acc, g->pow(images[axis], -lengths[axis]));
    for (std::int64_t k = -lengths[axis]; k <= lengths[axis]; ++k) {
      self(self, axis + 1, cur);
      if (k < lengths[axis]) cur = g->mul(cur, images[axis]);
    }
  };
  rec(rec, 0, g->identity());

  BoxProgression bp;
  bp.p = out.take();
  ElementSet pp = product_set(bp.p, bp.p, caps);
  bp.pp_size = pp.size();
  bp.doubling = Rational(Integer(pp.size()), Integer(bp.p.size()));
  bp.bound = ipow(Integer(2), static_cast<unsigned long>(d)) * bp.p.size();
  check_property(Integer(pp.size()) <= bp.bound, "box_progression: |PP| > 2^d |P|");
  return bp;
}

int nilpotency_class(const GroupHandle& g, const std::vector<Element>& gens, int class_cap,
                     const Caps& caps) {
  bool all_trivial = true;
  for (const auto& x : gens) all_trivial = all_trivial && x == g->identity();
  if (gens.empty() || all_trivial) return 0;

  auto commutator = [&](const Element& a, const Element& b) {
    return g->mul(g->mul(g->inv(a), g->inv(b)), g->mul(a, b));
  };

  bool gens_commute = true;
  for (std::size_t i = 0; i < gens.size() && gens_commute; ++i)
    for (std::size_t j = i + 1; j < gens.size() && gens_commute; ++j)
      gens_commute = commutator(gens[i], gens[j]) == g->identity();
  if (gens_commute) return 1;

  if (g->kind() == GroupKind::HeisenbergZ) {
    // The ambient group has class 2, so a noncommuting generating set has
    // class exactly 2; verify centrality of the commutators anyway.
    for (std::size_t i = 0; i < gens.size(); ++i)
      for (std::size_t j = i + 1; j < gens.size(); ++j) {
        Element c = commutator(gens[i], gens[j]);
        for (const auto& x : gens)
          check_property(commutator(c, x) == g->identity(),
                         "heisenberg commutator is not central");
      }
    return 2;
  }
  if (!g->finite())
    throw InvalidInput("nilpotency_class: infinite kind without known class");

  // Lower central series by closure: G_{k+1} = <[G_k, G]>.
  ElementSet gamma = subgroup_closure(ElementSet(g, gens), caps);
  ElementSet layer = gamma;
  for (int k = 1; k <= class_cap; ++k) {
    std::vector<Element> comms;
    for (const auto& a : layer.elements())
      for (const auto& b : gamma.elements()) comms.push_back(commutator(a, b));
    ElementSet next = subgroup_closure(ElementSet(g, std::move(comms)), caps);
    if (next.size() == 1) return k;
    if (next.same_elements(layer))
      throw InvalidInput("nilpotency_class: lower central series stabilized, not nilpotent");
    layer = std::move(next);
  }
  throw InvalidInput("nilpotency_class: class exceeds cap " + std::to_string(class_cap));
}

Report nilprogression_check(const ProgressionSpec& spec, const Caps& caps) {
  Report r;
  r["group"] = spec.group->name();
  r["rank"] = static_cast<std::int64_t>(spec.generators.size());
  r["lengths"] = spec.lengths;
  const int cls = nilpotency_class(spec.group, spec.generators, 6, caps);
  r["step"] = cls;

  ElementSet p = enumerate_progression(spec, caps);
  r["size"] = p.size();
  // Words admit inverse letters, so P = P^{-1} and 1 ∈ P by construction.
  check_property(p.contains(spec.group->identity()), "progression lost the identity");
  check_property(p.same_elements(inverse_set(p)), "progression is not symmetric");

  ApproxConstant ac = approx_constant(p, false, caps);
  r["k_greedy"] = ac.k_greedy;
  bool small_sides = false;
  for (auto l : spec.lengths) small_sides = small_sides || l < 2;
  // Small side lengths are outside the regime where a uniform covering
  // constant is promised; flag them instead of judging.
  r["small_side_flag"] = small_sides;
  return r;
}

GrowthProfile growth_profile(const ElementSet& s, int n_max, std::pair<int, int> window,
                             const Caps& caps) {
  if (n_max < 1) throw InvalidInput("growth_profile: n_max must be >= 1");
  if (window.first < 1 || window.second > n_max || window.first > window.second)
    throw InvalidInput("growth_profile: bad fit window");
  GrowthProfile gp;
  gp.window = window;
  PowerTable pw(s);
  for (int n = 1; n <= n_max; ++n) gp.sizes.emplace_back(pw.power(n, caps).size());

  // Least-squares slope of log|S^n| against log n over the window.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (int n = window.first; n <= window.second; ++n) {
    const double x = std::log(static_cast<double>(n));
    const double y = std::log(static_cast<double>(gp.sizes[static_cast<std::size_t>(n - 1)]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  gp.slope = rounded((m * sxy - sx * sy) / (m * sxx - sx * sx));
  return gp;
}

std::optional<int> doubling_scale_finder(const ElementSet& s, const Rational& d, int n_max,
                                         const Caps& caps) {
  if (!(d >= 0)) throw InvalidInput("doubling_scale_finder: D must be nonnegative");
  const Integer p = numerator(d), q = denominator(d);
  if (q > 64) throw InvalidInput("doubling_scale_finder: denominator of D too large");
  PowerTable pw(s);
  auto le_bound = [&](const Integer& s4n, const Integer& sn) {
    // |S^{4n}| <= 5^D |S^n|  <=>  |S^{4n}|^q <= 5^p |S^n|^q.
    return ipow(s4n, static_cast<unsigned long>(q)) <=
           ipow(Integer(5), static_cast<unsigned long>(p)) *
               ipow(sn, static_cast<unsigned long>(q));
  };
  for (int n = 1; n <= n_max; ++n) {
    const Integer sn = pw.power(n, caps).size();
    Integer s4n;
    try {
      s4n = pw.power(4 * n, caps).size();
    } catch (const CapExceeded&) {
      // |S^{4n}| > cap: if even the cap already exceeds the bound, the
      // comparison is settled; otherwise the instance is undecidable.
      if (!le_bound(caps.elements, sn)) continue;
      throw;
    }
    if (le_bound(s4n, sn)) return n;
  }
  return std::nullopt;
}

Report all_scales_report(const ElementSet& s, std::pair<int, int> range, const Caps& caps) {
  if (range.first < 1 || range.first > range.second)
    throw InvalidInput("all_scales_report: bad range");
  const GroupHandle& g = s.group();
  if (!s.contains(g->identity()) || !s.same_elements(inverse_set(s)))
    throw InvalidInput("all_scales_report: use a symmetrized S (1 ∈ S = S^{-1})");
  PowerTable pw(s);
  Report rows = Report::array();
  for (int m = range.first; m <= range.second; ++m) {
    const ElementSet& sm = pw.power(m, caps);
    ApproxConstant ac = approx_constant(sm, false, caps);
    Report row = Report::array();
    row.push_back(m);
    row.push_back(sm.size());
    row.push_back(ac.k_greedy);
    rows.push_back(std::move(row));
  }
  Report r;
  r["group"] = g->name();
  r["set_size"] = s.size();
  Report table;
  table["columns"] = {"n", "size", "k_greedy"};
  table["rows"] = std::move(rows);
  r["table"] = std::move(table);
  return r;
}

Report free_group_bounds(const ElementSet& a, int n, const Caps& caps) {
  const GroupHandle& g = a.group();
  if (g->kind() != GroupKind::FreeGroup)
    throw InvalidInput("free_group_bounds: ambient group must be free");
  if (a.empty()) throw InvalidInput("free_group_bounds: empty set");
  if (n < 1) throw InvalidInput("free_group_bounds: n must be >= 1");

  // Degenerate case: <A> cyclic iff all pairs commute (abelian subgroups of
  // free groups are cyclic).
  bool cyclic = true;
  for (std::size_t i = 0; i < a.elements().size() && cyclic; ++i)
    for (std::size_t j = i + 1; j < a.elements().size() && cyclic; ++j) {
      const Element& x = a.elements()[i];
      const Element& y = a.elements()[j];
      cyclic = g->mul(x, y) == g->mul(y, x);
    }
  if (cyclic)
    throw InvalidInput("free_group_bounds: A generates a cyclic subgroup (degenerate)");

  // |A^k| is nondecreasing in k (right translation is injective), so a power
  // that overflows the cap certifies a lower bound for every later power.
  Report rows = Report::array();
  Integer last_known = a.size();
  bool exact = true;
  PowerTable pw(a);
  for (int k = 1; k <= n; ++k) {
    if (exact) {
      try {
        last_known = pw.power(k, caps).size();
      } catch (const CapExceeded&) {
        exact = false;
        last_known = caps.elements;  // certified: |A^k| > cap
      }
    }
    Report row = Report::array();
    row.push_back(k);
    row.push_back(integer_json(last_known));
    row.push_back(exact);
    rows.push_back(std::move(row));
  }

  const unsigned long half = static_cast<unsigned long>((n + 1) / 2);
  const Integer rhs = ipow(Integer(a.size()), half);
  const Integer lhs = ipow(Integer(62), static_cast<unsigned long>(n)) * last_known;
  if (lhs < rhs) {
    if (!exact)
      throw CapExceeded("free_group_bounds: capped lower bound too weak to decide");
    throw PropertyViolation("free_group_bounds: Safin bound violated");
  }

  Report r;
  r["group"] = g->name();
  r["size"] = a.size();
  r["n"] = n;
  Report table;
  table["columns"] = {"k", "power_size", "exact"};
  table["rows"] = std::move(rows);
  r["table"] = std::move(table);
  r["safin_ok"] = true;
  r["size_exact"] = exact;
  if (exact) {
    const double ratio = static_cast<double>(last_known) /
                         std::pow(static_cast<double>(a.size()), static_cast<double>(half));
    r["ratio_to_half_power"] = rounded(ratio);
  }
  return r;
}

}  // namespace apx

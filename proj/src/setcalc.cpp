#include "apx/setcalc.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <thread>
#include <unordered_map>

#include "apx/errors.hpp"

namespace apx {

namespace {

void require_same_group(const ElementSet& a, const ElementSet& b, const char* where) {
  if (!a.group() || !b.group() || a.group()->spec().to_json() != b.group()->spec().to_json())
    throw InvalidInput(std::string(where) + ": sets live in different ambient groups");
}

RuzsaValue ruzsa_value_from(const ElementSet& a, const ElementSet& b, const Caps& caps) {
  ElementSet ab1 = product_set(a, inverse_set(b), caps);
  RuzsaValue v;
  v.num = Integer(ab1.size()) * ab1.size();
  v.den = Integer(a.size()) * b.size();
  return v;
}

}  // namespace

ElementSet product_set(const ElementSet& a, const ElementSet& b, const Caps& caps) {
  require_same_group(a, b, "product_set");
  const GroupHandle& g = a.group();
  const std::int64_t pair_count = a.size() * b.size();
  if (pair_count > caps.pairs)
    throw CapExceeded("product_set: |A|*|B| = " + std::to_string(pair_count) +
                      " exceeds the pair cap " + std::to_string(caps.pairs));

  // The smaller factor runs on the outside; the inner factor stays hot.
  const bool a_outer = a.size() <= b.size();
  const auto& outer = a_outer ? a.elements() : b.elements();
  const auto& inner = a_outer ? b.elements() : a.elements();

  auto emit = [&](const Element& o, const Element& i) {
    return a_outer ? g->mul(o, i) : g->mul(i, o);
  };

  ElementSet result;
  const int threads = std::max(1, caps.threads);
  if (threads == 1 || outer.size() < 64) {
    SetBuilder out(g, caps, "product_set");
    out.reserve(std::min<std::int64_t>(pair_count, caps.elements));
    for (const auto& o : outer)
      for (const auto& i : inner) out.insert(emit(o, i));
    result = out.take();
  } else {
    // Partition the outer factor; merge per-chunk results in chunk order.
    // The merged set is a plain union, so the outcome does not depend on
    // scheduling.
    const std::size_t nchunks = static_cast<std::size_t>(threads);
    std::vector<std::future<std::vector<Element>>> parts;
    for (std::size_t c = 0; c < nchunks; ++c) {
      parts.push_back(std::async(std::launch::async, [&, c]() {
        std::vector<Element> local;
        std::unordered_set<Element, ElementHash> seen;
        for (std::size_t idx = c; idx < outer.size(); idx += nchunks)
          for (const auto& i : inner) {
            Element e = emit(outer[idx], i);
            if (seen.insert(e).second) local.push_back(std::move(e));
          }
        return local;
      }));
    }
    SetBuilder out(g, caps, "product_set");
    out.reserve(std::min<std::int64_t>(pair_count, caps.elements));
    for (auto& f : parts)
      for (auto& e : f.get()) out.insert(std::move(e));
    result = out.take();
  }

  check_property(result.size() <= pair_count, "product_set: |AB| > |A||B|");
  if (b.contains(g->identity()))
    check_property(result.size() >= a.size(),
                   "product_set: |AB| < |A| although 1 ∈ B");
  return result;
}

PowerTable::PowerTable(ElementSet base) { pow_.push_back(std::move(base)); }

const ElementSet& PowerTable::power(int n, const Caps& caps) {
  if (n < 1) throw InvalidInput("power_set: exponent must be >= 1");
  while (static_cast<int>(pow_.size()) < n)
    pow_.push_back(product_set(pow_.back(), pow_.front(), caps));
  return pow_[static_cast<std::size_t>(n - 1)];
}

ElementSet power_set(const ElementSet& a, int n, const Caps& caps) {
  PowerTable t(a);
  return t.power(n, caps);
}

ElementSet symmetrize(const ElementSet& a) {
  const GroupHandle& g = a.group();
  std::vector<Element> v = a.elements();
  for (const auto& e : a.elements()) v.push_back(g->inv(e));
  v.push_back(g->identity());
  return ElementSet(g, std::move(v));
}

double RuzsaValue::log_value() const {
  return 0.5 * (std::log(static_cast<double>(num)) - std::log(static_cast<double>(den)));
}

RuzsaValue ruzsa_distance(const ElementSet& a, const ElementSet& b, const Caps& caps) {
  require_same_group(a, b, "ruzsa_distance");
  if (a.empty() || b.empty()) throw InvalidInput("ruzsa_distance: empty set");
  RuzsaValue d_ab = ruzsa_value_from(a, b, caps);
  RuzsaValue d_ba = ruzsa_value_from(b, a, caps);
  check_property(d_ab.num == d_ba.num && d_ab.den == d_ba.den,
                 "ruzsa_distance: asymmetry |AB^-1| != |BA^-1|");
  check_property(d_ab.num >= d_ab.den, "ruzsa_distance: value below 1");
  return d_ab;
}

Rational triangle_slack(const ElementSet& a, const ElementSet& b, const ElementSet& c,
                        const Caps& caps) {
  require_same_group(a, b, "triangle_slack");
  require_same_group(b, c, "triangle_slack");
  if (a.empty() || b.empty() || c.empty()) throw InvalidInput("triangle_slack: empty set");
  const Integer ab = product_set(a, inverse_set(b), caps).size();
  const Integer bc = product_set(b, inverse_set(c), caps).size();
  const Integer ac = product_set(a, inverse_set(c), caps).size();
  // |B||AC^-1| <= |AB^-1||BC^-1| is the integer form from the injection
  // AC^-1 x B -> AB^-1 x BC^-1.
  check_property(Integer(b.size()) * ac <= ab * bc,
                 "triangle_slack: Ruzsa triangle inequality violated");
  Rational slack(ab * bc, Integer(b.size()) * ac);
  return slack * slack;
}

CoverWitness ruzsa_cover(const ElementSet& a, const ElementSet& b, const Caps& caps) {
  require_same_group(a, b, "ruzsa_cover");
  if (b.empty()) throw InvalidInput("ruzsa_cover: B must be nonempty");
  const GroupHandle& g = a.group();

  // Maximal family of pairwise-disjoint translates xB, x scanned in
  // canonical order.
  SetBuilder covered(g, caps, "ruzsa_cover");
  std::vector<Element> chosen;
  for (const auto& x : a.elements()) {
    bool disjoint = true;
    for (const auto& e : b.elements()) {
      if (covered.contains(g->mul(x, e))) {
        disjoint = false;
        break;
      }
    }
    if (!disjoint) continue;
    chosen.push_back(x);
    for (const auto& e : b.elements()) covered.insert(g->mul(x, e));
  }
  ElementSet x_set(g, std::move(chosen));

  // |X| |B| <= |AB| since the translates are disjoint subsets of AB.
  const Integer ab = product_set(a, b, caps).size();
  check_property(Integer(x_set.size()) * b.size() <= ab,
                 "ruzsa_cover: |X| > |AB|/|B|");

  // A ⊆ X B B^{-1}, checked extensionally.
  ElementSet xbb = product_set(product_set(x_set, b, caps), inverse_set(b), caps);
  check_property(a.subset_of(xbb), "ruzsa_cover: A ⊄ X B B^{-1}");

  CoverWitness w;
  w.x = std::move(x_set);
  w.covered_desc = "A";
  w.translate_desc = "BB^-1";
  return w;
}

namespace {

// Greedy cover of `universe` by left translates of `tiles`: repeatedly take
// the canonical-least uncovered point u and the translate u*t^{-1} through
// the tile t covering the most uncovered points (ties: canonical-least t).
std::vector<Element> greedy_translate_cover(const ElementSet& universe,
                                            const ElementSet& tiles,
                                            const GroupHandle& g) {
  std::unordered_set<Element, ElementHash> uncovered(universe.elements().begin(),
                                                     universe.elements().end());
  std::vector<Element> translates;
  for (const auto& u : universe.elements()) {
    if (uncovered.find(u) == uncovered.end()) continue;
    std::int64_t best_gain = -1;
    Element best_translate;
    for (const auto& t : tiles.elements()) {
      Element cand = g->mul(u, g->inv(t));
      std::int64_t gain = 0;
      for (const auto& s : tiles.elements())
        if (uncovered.find(g->mul(cand, s)) != uncovered.end()) ++gain;
      if (gain > best_gain) {
        best_gain = gain;
        best_translate = std::move(cand);
      }
    }
    translates.push_back(best_translate);
    for (const auto& s : tiles.elements()) uncovered.erase(g->mul(best_translate, s));
  }
  return translates;
}

// Exact minimum translate cover by branch and bound over candidate
// translates; admissible lower bound ceil(uncovered/|tile|).  Out-of-range
// tail bits are pre-set to 1 so "uncovered" is just the zero-bit count.
struct ExactCover {
  std::vector<std::vector<std::uint64_t>> masks;  // candidate -> covered bitset
  std::size_t words = 0;
  std::int64_t tile_size = 1;
  std::int64_t best = 0;

  void search(const std::vector<std::uint64_t>& covered, std::int64_t chosen) {
    std::int64_t zeros = 0;
    for (auto w : covered) zeros += 64 - __builtin_popcountll(w);
    if (zeros == 0) {
      best = std::min(best, chosen);
      return;
    }
    std::int64_t lower = (zeros + tile_size - 1) / tile_size;
    if (chosen + lower >= best) return;
    // Branch on the first uncovered point: some candidate covering it must
    // be part of any solution.
    std::size_t w = 0;
    while (covered[w] == ~0ULL) ++w;
    std::size_t bit = static_cast<std::size_t>(__builtin_ctzll(~covered[w]));
    for (const auto& mask : masks) {
      if (!(mask[w] >> bit & 1)) continue;
      std::vector<std::uint64_t> next = covered;
      for (std::size_t i = 0; i < words; ++i) next[i] |= mask[i];
      search(next, chosen + 1);
    }
  }
};

}  // namespace

ApproxConstant approx_constant(const ElementSet& a, bool exact, const Caps& caps) {
  const GroupHandle& g = a.group();
  if (!a.contains(g->identity()))
    throw InvalidInput("approx_constant: A must contain the identity");
  if (!a.same_elements(inverse_set(a)))
    throw InvalidInput("approx_constant: A must be symmetric");

  ElementSet aa = product_set(a, a, caps);
  std::vector<Element> greedy = greedy_translate_cover(aa, a, g);

  ApproxConstant out;
  out.k_greedy = static_cast<std::int64_t>(greedy.size());
  out.witness.x = ElementSet(g, greedy);
  out.witness.covered_desc = "AA";
  out.witness.translate_desc = "A";

  // Witness containment AA ⊆ XA, extensionally.
  ElementSet xa = product_set(out.witness.x, a, caps);
  check_property(aa.subset_of(xa), "approx_constant: AA ⊄ XA");

  if (exact) {
    if (aa.size() > 4096)
      throw CapExceeded("approx_constant exact: |AA| > 4096");
    // Candidate translates u a^{-1}, deduplicated.
    SetBuilder cand(g, caps, "approx_constant candidates");
    for (const auto& u : aa.elements())
      for (const auto& t : a.elements()) cand.insert(g->mul(u, g->inv(t)));
    ElementSet candidates = cand.take();
    if (candidates.size() > 64)
      throw CapExceeded("approx_constant exact: candidate translate count > 64");

    std::unordered_map<Element, std::size_t, ElementHash> point_index;
    for (std::size_t i = 0; i < aa.elements().size(); ++i)
      point_index.emplace(aa.elements()[i], i);

    ExactCover ec;
    ec.tile_size = a.size();
    ec.words = (static_cast<std::size_t>(aa.size()) + 63) / 64;
    for (const auto& c : candidates.elements()) {
      std::vector<std::uint64_t> mask(ec.words, 0);
      bool nonempty = false;
      for (const auto& t : a.elements()) {
        auto it = point_index.find(g->mul(c, t));
        if (it != point_index.end()) {
          mask[it->second / 64] |= 1ULL << (it->second % 64);
          nonempty = true;
        }
      }
      if (nonempty) ec.masks.push_back(std::move(mask));
    }
    ec.best = out.k_greedy;
    std::vector<std::uint64_t> covered(ec.words, 0);
    if (aa.size() % 64 != 0) covered[ec.words - 1] = ~0ULL << (aa.size() % 64);
    ec.search(covered, 0);
    out.k_exact = ec.best;
    check_property(*out.k_exact <= out.k_greedy, "approx_constant: K_exact > K_greedy");
  }
  return out;
}

CoverWitness lemma210_witness(const ElementSet& a, const Caps& caps) {
  const GroupHandle& g = a.group();
  if (!a.contains(g->identity()) || !a.same_elements(inverse_set(a)))
    throw InvalidInput("lemma210_witness: A must be symmetric and contain 1");
  PowerTable pw(a);
  const ElementSet& a4 = pw.power(4, caps);
  const ElementSet& a5 = pw.power(5, caps);

  CoverWitness w = ruzsa_cover(a4, a, caps);
  check_property(Integer(w.x.size()) * a.size() <= Integer(a5.size()),
                 "lemma210_witness: |X| > |A^5|/|A|");
  // (A^2)^2 = A^4 ⊆ X A A^{-1} = X A^2 because A is symmetric.
  ElementSet xa2 = product_set(w.x, pw.power(2, caps), caps);
  check_property(a4.subset_of(xa2), "lemma210_witness: (A^2)^2 ⊄ X A^2");
  w.covered_desc = "(A^2)^2";
  w.translate_desc = "A^2";
  return w;
}

CoverWitness lemma211_witness(const ElementSet& a, const ElementSet& x_a,
                              const ElementSet& b, const ElementSet& y_b,
                              const Caps& caps) {
  require_same_group(a, b, "lemma211_witness");
  const GroupHandle& g = a.group();
  for (const ElementSet* s : {&a, &b}) {
    if (!s->contains(g->identity()) || !s->same_elements(inverse_set(*s)))
      throw InvalidInput("lemma211_witness: sets must be symmetric with identity");
  }
  // Verify the supplied covers.
  ElementSet aa = product_set(a, a, caps);
  ElementSet bb = product_set(b, b, caps);
  if (!aa.subset_of(product_set(x_a, a, caps)))
    throw InvalidInput("lemma211_witness: AA ⊄ X_A·A");
  if (!bb.subset_of(product_set(y_b, b, caps)))
    throw InvalidInput("lemma211_witness: BB ⊄ Y_B·B");

  ElementSet x3 = power_set(x_a, 3, caps);
  ElementSet y3 = power_set(y_b, 3, caps);

  // z_{x,y} = canonical-least element of xA ∩ yB over x ∈ X³, y ∈ Y³.
  std::vector<Element> zs;
  for (const auto& x : x3.elements()) {
    // materialize xA once per x
    std::unordered_set<Element, ElementHash> xa_set;
    xa_set.reserve(static_cast<std::size_t>(a.size()) * 2);
    for (const auto& e : a.elements()) xa_set.insert(g->mul(x, e));
    for (const auto& y : y3.elements()) {
      std::optional<Element> least;
      for (const auto& e : b.elements()) {
        Element cand = g->mul(y, e);
        if (xa_set.find(cand) == xa_set.end()) continue;
        if (!least || cand < *least) least = std::move(cand);
      }
      if (least) zs.push_back(std::move(*least));
    }
  }
  ElementSet z(g, std::move(zs));

  Integer bound = ipow(Integer(x_a.size()), 3) * ipow(Integer(y_b.size()), 3);
  check_property(Integer(z.size()) <= bound, "lemma211_witness: |Z| > |X|^3 |Y|^3");

  // (A² ∩ B²)² ⊆ Z (A² ∩ B²), extensionally.
  std::vector<Element> inter;
  for (const auto& e : aa.elements())
    if (bb.contains(e)) inter.push_back(e);
  ElementSet core(g, std::move(inter));
  if (!core.empty()) {
    ElementSet core2 = product_set(core, core, caps);
    ElementSet zcore = product_set(z, core, caps);
    check_property(core2.subset_of(zcore), "lemma211_witness: (A²∩B²)² ⊄ Z(A²∩B²)");
  }

  CoverWitness w;
  w.x = std::move(z);
  w.covered_desc = "(A^2 ∩ B^2)^2";
  w.translate_desc = "A^2 ∩ B^2";
  return w;
}

std::optional<Rational> escape_norm(const ElementSet& a, const Element& g) {
  const GroupHandle& grp = a.group();
  if (!grp->contains(g)) throw InvalidInput("escape_norm: g is not in the group");
  if (!a.contains(grp->identity()))
    throw InvalidInput("escape_norm: A must contain the identity");
  if (!a.contains(g)) return std::nullopt;  // n_A(g) = 0: immediate escape
  // Powers either leave A or cycle within |A|+1 steps.
  Element acc = g;
  for (std::int64_t n = 1; n <= a.size() + 1; ++n) {
    Element next = grp->mul(acc, g);
    if (!a.contains(next)) return Rational(1, n);
    acc = std::move(next);
  }
  return Rational(0);
}

Report doubling_report(const ElementSet& a, int n_max, const Caps& caps) {
  if (a.empty()) throw InvalidInput("doubling_report: empty set");
  if (n_max < 3) n_max = 3;
  PowerTable pw(a);
  Report r;
  r["set_size"] = a.size();
  r["group"] = a.group()->name();
  const Integer size1 = a.size();
  const Integer size2 = pw.power(2, caps).size();
  const Integer size3 = pw.power(3, caps).size();
  r["doubling"] = rational_json(Rational(size2, size1));
  r["tripling"] = rational_json(Rational(size3, size1));

  Report rows = Report::array();
  bool small_tripling_ok = true;
  const Rational k3(size3, size1);
  for (int n = 1; n <= n_max; ++n) {
    const Integer sn = pw.power(n, caps).size();
    Report row = Report::array();
    row.push_back(n);
    row.push_back(integer_json(sn));
    if (n >= 3) {
      // |A^n| <= (|A^3|/|A|)^{n-2} |A|, compared exactly.
      bool ok = Rational(sn, 1) <= rpow(k3, static_cast<unsigned long>(n - 2)) * size1;
      small_tripling_ok = small_tripling_ok && ok;
      row.push_back(ok);
    } else {
      row.push_back(nullptr);
    }
    rows.push_back(std::move(row));
  }
  Report table;
  table["columns"] = {"n", "size", "small_tripling_ok"};
  table["rows"] = std::move(rows);
  r["table"] = std::move(table);
  check_property(small_tripling_ok, "doubling_report: small tripling violated");
  r["small_tripling_checked"] = true;

  if (a.group()->abelian()) {
    // Plünnecke–Ruzsa check with K_+ = |A+A|/|A|.
    const Rational kplus(size2, size1);
    bool ok = true;
    for (int n = 2; n <= n_max; ++n)
      ok = ok && Rational(Integer(pw.power(n, caps).size()), 1) <=
                     rpow(kplus, static_cast<unsigned long>(n)) * size1;
    r["plunnecke_ok"] = ok;
    check_property(ok, "doubling_report: Plünnecke bound violated on an abelian group");
  }
  return r;
}

Report sumproduct_stats(std::int64_t p, const std::vector<std::int64_t>& residues,
                        std::optional<int> minimizer_size, const Caps& caps) {
  bool prime = p >= 2;
  for (std::int64_t d = 2; d * d <= p; ++d)
    if (p % d == 0) prime = false;
  if (!prime || p > 101) throw InvalidInput("sumproduct: p must be a prime <= 101");
  if (residues.empty()) throw InvalidInput("sumproduct: empty set");
  std::vector<bool> in(p, false);
  for (auto r : residues) {
    if (r < 0 || r >= p) throw InvalidInput("sumproduct: residue out of range [0, p)");
    in[static_cast<std::size_t>(r)] = true;
  }
  std::vector<std::int64_t> a;
  for (std::int64_t v = 0; v < p; ++v)
    if (in[static_cast<std::size_t>(v)]) a.push_back(v);

  auto grow = [&](bool multiply) {
    std::vector<bool> hit(p, false);
    std::int64_t count = 0;
    for (auto x : a)
      for (auto y : a) {
        std::int64_t v = multiply ? (x * y) % p : (x + y) % p;
        if (!hit[static_cast<std::size_t>(v)]) {
          hit[static_cast<std::size_t>(v)] = true;
          ++count;
        }
      }
    return count;
  };

  const std::int64_t sum_size = grow(false);
  const std::int64_t prod_size = grow(true);
  Report r;
  r["p"] = p;
  r["size"] = static_cast<std::int64_t>(a.size());
  r["sumset"] = sum_size;
  r["productset"] = prod_size;
  const double growth = std::max(sum_size, prod_size);
  r["growth_exponent"] =
      a.size() > 1 ? Report(rounded(std::log(growth) / std::log(static_cast<double>(a.size()))))
                   : Report(nullptr);

  if (minimizer_size) {
    if (p > 13) throw CapExceeded("sumproduct minimizer: p must be <= 13");
    const int k = *minimizer_size;
    if (k < 1 || k > p) throw InvalidInput("sumproduct minimizer: bad subset size");
    // Exhaustive scan over all k-subsets of F_p.
    std::vector<std::int64_t> best_set;
    std::int64_t best_val = -1;
    std::vector<std::int64_t> idx(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
    auto eval = [&](const std::vector<std::int64_t>& sub) {
      std::vector<bool> hs(p, false), hp(p, false);
      std::int64_t cs = 0, cp = 0;
      for (auto x : sub)
        for (auto y : sub) {
          std::int64_t s = (x + y) % p, m = (x * y) % p;
          if (!hs[static_cast<std::size_t>(s)]) hs[static_cast<std::size_t>(s)] = true, ++cs;
          if (!hp[static_cast<std::size_t>(m)]) hp[static_cast<std::size_t>(m)] = true, ++cp;
        }
      return std::max(cs, cp);
    };
    while (true) {
      std::int64_t v = eval(idx);
      if (best_val < 0 || v < best_val) {
        best_val = v;
        best_set = idx;
      }
      int i = k - 1;
      while (i >= 0 && idx[static_cast<std::size_t>(i)] == p - k + i) --i;
      if (i < 0) break;
      ++idx[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < k; ++j)
        idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
    Report m;
    m["size"] = k;
    m["min_max_growth"] = best_val;
    m["witness"] = best_set;
    r["minimizer"] = std::move(m);
  }
  (void)caps;
  return r;
}

}  // namespace apx

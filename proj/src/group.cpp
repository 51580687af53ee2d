#include "apx/group.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <limits>
#include <unordered_set>

#include "apx/errors.hpp"

namespace apx {

using json = nlohmann::json;

namespace {

bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::int64_t mod_inverse(std::int64_t a, std::int64_t m, const char* what) {
  std::int64_t t = 0, new_t = 1, r = m, new_r = mod_pos(a, m);
  while (new_r != 0) {
    std::int64_t q = r / new_r;
    std::swap(t -= q * new_t, new_t);
    std::swap(r -= q * new_r, new_r);
  }
  if (r != 1) throw InvalidInput(std::string(what) + ": not a unit mod " + std::to_string(m));
  return mod_pos(t, m);
}

Element make_small(std::vector<std::int64_t> lanes) {
  Element e;
  e.lanes = std::move(lanes);
  return e;
}

// Exact integer determinant by cofactor expansion; dimensions are capped at
// 6 so this stays cheap.
Integer int_det(const std::vector<Integer>& m, std::int64_t d) {
  if (d == 1) return m[0];
  Integer acc = 0;
  std::vector<Integer> minor((d - 1) * (d - 1));
  for (std::int64_t j = 0; j < d; ++j) {
    if (m[j] == 0) continue;
    for (std::int64_t r = 1; r < d; ++r) {
      std::int64_t cc = 0;
      for (std::int64_t c = 0; c < d; ++c) {
        if (c == j) continue;
        minor[(r - 1) * (d - 1) + cc++] = m[r * d + c];
      }
    }
    Integer term = m[j] * int_det(minor, d - 1);
    acc += (j % 2 == 0) ? term : -term;
  }
  return acc;
}

// All group implementations below keep elements in canonical form; mul/inv
// assume canonical members.

class CyclicGroup final : public Group {
public:
  explicit CyclicGroup(GroupSpec s) : Group(std::move(s)), n_(spec_.n) {}
  Element identity() const override { return make_small({0}); }
  Element mul(const Element& a, const Element& b) const override {
    return make_small({(a.lanes[0] + b.lanes[0]) % n_});
  }
  Element inv(const Element& a) const override {
    return make_small({a.lanes[0] == 0 ? 0 : n_ - a.lanes[0]});
  }
  Element canonicalize(const Element& raw) const override {
    if (raw.lanes.size() != 1 || !raw.wide.empty())
      throw InvalidInput("cyclic element needs exactly one lane");
    return make_small({mod_pos(raw.lanes[0], n_)});
  }
  bool is_canonical(const Element& e) const override {
    return e.wide.empty() && e.lanes.size() == 1 && e.lanes[0] >= 0 && e.lanes[0] < n_;
  }
  bool finite() const override { return true; }
  std::optional<Integer> order() const override { return Integer(n_); }
  bool abelian() const override { return true; }
  Element random_element(Rng& rng) const override { return make_small({rng.below(n_)}); }

private:
  std::int64_t n_;
};

class FreeAbelianGroup final : public Group {
public:
  explicit FreeAbelianGroup(GroupSpec s) : Group(std::move(s)), d_(spec_.degree) {}
  Element identity() const override {
    return make_small(std::vector<std::int64_t>(d_, 0));
  }
  Element mul(const Element& a, const Element& b) const override {
    Element r = a;
    for (std::int64_t i = 0; i < d_; ++i) r.lanes[i] += b.lanes[i];
    return r;
  }
  Element inv(const Element& a) const override {
    Element r = a;
    for (auto& v : r.lanes) v = -v;
    return r;
  }
  Element canonicalize(const Element& raw) const override {
    if (static_cast<std::int64_t>(raw.lanes.size()) != d_ || !raw.wide.empty())
      throw InvalidInput("free-abelian element needs " + std::to_string(d_) + " lanes");
    return raw;
  }
  bool is_canonical(const Element& e) const override {
    return e.wide.empty() && static_cast<std::int64_t>(e.lanes.size()) == d_;
  }
  bool finite() const override { return false; }
  std::optional<Integer> order() const override { return std::nullopt; }
  bool abelian() const override { return true; }
  bool torsion_free() const override { return true; }
  Element random_element(Rng& rng) const override {
    std::vector<std::int64_t> v(d_);
    for (auto& x : v) x = rng.range(-6, 6);
    return make_small(std::move(v));
  }

private:
  std::int64_t d_;
};

class HeisenbergGroup final : public Group {
public:
  explicit HeisenbergGroup(GroupSpec s) : Group(std::move(s)) {}
  Element identity() const override {
    Element e;
    e.wide = {Integer(0), Integer(0), Integer(0)};
    return e;
  }
  // Unitriangular 3x3 product: z picks up the x1*y2 cross term.
  Element mul(const Element& a, const Element& b) const override {
    Element r;
    r.wide = {a.wide[0] + b.wide[0], a.wide[1] + b.wide[1],
              a.wide[2] + b.wide[2] + a.wide[0] * b.wide[1]};
    return r;
  }
  Element inv(const Element& a) const override {
    Element r;
    r.wide = {-a.wide[0], -a.wide[1], -a.wide[2] + a.wide[0] * a.wide[1]};
    return r;
  }
  Element canonicalize(const Element& raw) const override {
    if (raw.wide.size() == 3 && raw.lanes.empty()) return raw;
    if (raw.lanes.size() == 3 && raw.wide.empty()) {
      Element e;
      e.wide = {Integer(raw.lanes[0]), Integer(raw.lanes[1]), Integer(raw.lanes[2])};
      return e;
    }
    throw InvalidInput("heisenberg element needs a triple (x,y,z)");
  }
  bool is_canonical(const Element& e) const override {
    return e.lanes.empty() && e.wide.size() == 3;
  }
  bool finite() const override { return false; }
  std::optional<Integer> order() const override { return std::nullopt; }
  bool abelian() const override { return false; }
  bool torsion_free() const override { return true; }
  Element random_element(Rng& rng) const override {
    Element e;
    e.wide = {Integer(rng.range(-4, 4)), Integer(rng.range(-4, 4)),
              Integer(rng.range(-16, 16))};
    return e;
  }
};

class FreeGroupImpl final : public Group {
public:
  explicit FreeGroupImpl(GroupSpec s) : Group(std::move(s)), rank_(spec_.degree) {}
  Element identity() const override { return Element{}; }
  Element mul(const Element& a, const Element& b) const override {
    Element r = a;
    for (auto l : b.lanes) {
      if (!r.lanes.empty() && r.lanes.back() == -l)
        r.lanes.pop_back();
      else
        r.lanes.push_back(l);
    }
    return r;
  }
  Element inv(const Element& a) const override {
    Element r;
    r.lanes.reserve(a.lanes.size());
    for (auto it = a.lanes.rbegin(); it != a.lanes.rend(); ++it) r.lanes.push_back(-*it);
    return r;
  }
  Element canonicalize(const Element& raw) const override {
    if (!raw.wide.empty()) throw InvalidInput("free-group word uses integer letters only");
    Element r;
    for (auto l : raw.lanes) {
      if (l == 0 || l > rank_ || l < -rank_)
        throw InvalidInput("free-group letter out of range: " + std::to_string(l));
      if (!r.lanes.empty() && r.lanes.back() == -l)
        r.lanes.pop_back();
      else
        r.lanes.push_back(l);
    }
    return r;
  }
  bool is_canonical(const Element& e) const override {
    if (!e.wide.empty()) return false;
    for (std::size_t i = 0; i < e.lanes.size(); ++i) {
      auto l = e.lanes[i];
      if (l == 0 || l > rank_ || l < -rank_) return false;
      if (i + 1 < e.lanes.size() && e.lanes[i + 1] == -l) return false;
    }
    return true;
  }
  bool finite() const override { return false; }
  std::optional<Integer> order() const override { return std::nullopt; }
  bool abelian() const override { return rank_ <= 1; }
  bool torsion_free() const override { return true; }
  Element random_element(Rng& rng) const override {
    std::int64_t len = rng.range(0, 8);
    Element e;
    for (std::int64_t i = 0; i < len; ++i) {
      std::int64_t l = rng.range(1, rank_);
      if (rng.coin()) l = -l;
      if (!e.lanes.empty() && e.lanes.back() == -l)
        e.lanes.pop_back();
      else
        e.lanes.push_back(l);
    }
    return e;
  }

private:
  std::int64_t rank_;
};

class FpRingGroup final : public Group {
public:
  explicit FpRingGroup(GroupSpec s) : Group(std::move(s)), p_(spec_.n) {}
  Element identity() const override { return make_small({0}); }
  Element mul(const Element&, const Element&) const override {
    throw InvalidInput("fp-ring is a ring, not a group; only sum-product accepts it");
  }
  Element inv(const Element&) const override {
    throw InvalidInput("fp-ring is a ring, not a group; only sum-product accepts it");
  }
  Element canonicalize(const Element& raw) const override {
    if (raw.lanes.size() != 1 || !raw.wide.empty())
      throw InvalidInput("fp-ring element needs exactly one lane");
    return make_small({mod_pos(raw.lanes[0], p_)});
  }
  bool is_canonical(const Element& e) const override {
    return e.wide.empty() && e.lanes.size() == 1 && e.lanes[0] >= 0 && e.lanes[0] < p_;
  }
  bool finite() const override { return true; }
  std::optional<Integer> order() const override { return Integer(p_); }
  bool abelian() const override { return true; }
  Element random_element(Rng& rng) const override { return make_small({rng.below(p_)}); }

private:
  std::int64_t p_;
};

class Psl2Group final : public Group {
public:
  explicit Psl2Group(GroupSpec s) : Group(std::move(s)), p_(spec_.n) {}

  Element identity() const override { return make_small({1, 0, 0, 1}); }

  Element mul(const Element& a, const Element& b) const override {
    const auto& x = a.lanes;
    const auto& y = b.lanes;
    return normalized({(x[0] * y[0] + x[1] * y[2]) % p_, (x[0] * y[1] + x[1] * y[3]) % p_,
                       (x[2] * y[0] + x[3] * y[2]) % p_, (x[2] * y[1] + x[3] * y[3]) % p_});
  }

  Element inv(const Element& a) const override {
    const auto& x = a.lanes;
    return normalized({x[3], mod_pos(-x[1], p_), mod_pos(-x[2], p_), x[0]});
  }

  Element canonicalize(const Element& raw) const override {
    if (raw.lanes.size() != 4 || !raw.wide.empty())
      throw InvalidInput("psl2 element needs 4 lanes (row-major 2x2)");
    std::vector<std::int64_t> m(4);
    for (int i = 0; i < 4; ++i) m[i] = mod_pos(raw.lanes[i], p_);
    std::int64_t det = mod_pos(m[0] * m[3] - m[1] * m[2], p_);
    if (det != 1) throw InvalidInput("psl2 matrix must have determinant 1 mod p");
    return normalized(std::move(m));
  }

  bool is_canonical(const Element& e) const override {
    if (!e.wide.empty() || e.lanes.size() != 4) return false;
    for (auto v : e.lanes)
      if (v < 0 || v >= p_) return false;
    if (mod_pos(e.lanes[0] * e.lanes[3] - e.lanes[1] * e.lanes[2], p_) != 1) return false;
    // Sign representative: first nonzero entry in {1,...,(p-1)/2}.
    for (auto v : e.lanes) {
      if (v == 0) continue;
      return v <= (p_ - 1) / 2;
    }
    return false;
  }

  bool finite() const override { return true; }
  std::optional<Integer> order() const override {
    return Integer(p_) * (Integer(p_) * p_ - 1) / 2;
  }
  bool abelian() const override { return false; }

  std::vector<Element> declared_generators() const override {
    return {make_small({1, 1, 0, 1}), make_small({1, p_ - 1, 0, 1}),
            make_small({1, 0, 1, 1}), make_small({1, 0, p_ - 1, 1})};
  }

  Element random_element(Rng& rng) const override {
    auto gens = declared_generators();
    Element g = identity();
    std::int64_t len = rng.range(1, 24);
    for (std::int64_t i = 0; i < len; ++i) g = mul(g, rng.pick(gens));
    return g;
  }

private:
  Element normalized(std::vector<std::int64_t> m) const {
    for (auto& v : m) v = mod_pos(v, p_);
    for (auto v : m) {
      if (v == 0) continue;
      if (v > (p_ - 1) / 2)
        for (auto& w : m) w = w == 0 ? 0 : p_ - w;
      break;
    }
    return make_small(std::move(m));
  }

  std::int64_t p_;
};

// Shared by the permutation and matrix kinds: the group is the closure of
// the declared generators, computed once at construction.
class EnumeratedGroup : public Group {
public:
  using Group::Group;

  bool contains(const Element& e) const override {
    return member_index_.find(e) != member_index_.end();
  }
  bool finite() const override { return true; }
  std::optional<Integer> order() const override {
    return Integer(static_cast<std::int64_t>(members_.size()));
  }
  bool abelian() const override { return abelian_; }
  std::vector<Element> declared_generators() const override { return gens_; }
  Element random_element(Rng& rng) const override {
    return members_[static_cast<std::size_t>(
        rng.below(static_cast<std::int64_t>(members_.size())))];
  }
  const std::vector<Element>& members() const { return members_; }

protected:
  void build_closure(const Caps& caps) {
    std::unordered_set<Element, ElementHash> seen;
    std::vector<Element> frontier;
    auto push = [&](Element e) {
      if (seen.insert(e).second) {
        caps.require_elements(static_cast<std::int64_t>(seen.size()), "group closure");
        frontier.push_back(std::move(e));
      }
    };
    push(identity());
    std::vector<Element> step = gens_;
    for (const auto& g : gens_) step.push_back(inv(g));
    for (std::size_t i = 0; i < frontier.size(); ++i)
      for (const auto& s : step) push(mul(frontier[i], s));
    members_ = std::move(frontier);
    std::sort(members_.begin(), members_.end());
    member_index_ = std::move(seen);
    abelian_ = true;
    for (std::size_t i = 0; i < gens_.size() && abelian_; ++i)
      for (std::size_t j = i + 1; j < gens_.size() && abelian_; ++j)
        abelian_ = mul(gens_[i], gens_[j]) == mul(gens_[j], gens_[i]);
  }

  std::vector<Element> gens_;
  std::vector<Element> members_;
  std::unordered_set<Element, ElementHash> member_index_;
  bool abelian_ = true;
};

class PermutationGroup final : public EnumeratedGroup {
public:
  PermutationGroup(GroupSpec s, const Caps& caps)
      : EnumeratedGroup(std::move(s)), m_(spec_.degree) {
    for (const auto& img : spec_.generators) {
      Element e = make_small(img);
      if (!is_canonical(e)) throw InvalidInput("invalid generator: not a permutation of degree " + std::to_string(m_));
      gens_.push_back(std::move(e));
    }
    build_closure(caps);
  }
  Element identity() const override {
    std::vector<std::int64_t> v(m_);
    for (std::int64_t i = 0; i < m_; ++i) v[i] = i;
    return make_small(std::move(v));
  }
  // (a*b)(x) = a(b(x)).
  Element mul(const Element& a, const Element& b) const override {
    std::vector<std::int64_t> v(m_);
    for (std::int64_t i = 0; i < m_; ++i) v[i] = a.lanes[b.lanes[i]];
    return make_small(std::move(v));
  }
  Element inv(const Element& a) const override {
    std::vector<std::int64_t> v(m_);
    for (std::int64_t i = 0; i < m_; ++i) v[a.lanes[i]] = i;
    return make_small(std::move(v));
  }
  Element canonicalize(const Element& raw) const override {
    if (!is_canonical(raw)) throw InvalidInput("not a permutation image array");
    return raw;
  }
  bool is_canonical(const Element& e) const override {
    if (!e.wide.empty() || static_cast<std::int64_t>(e.lanes.size()) != m_) return false;
    std::vector<bool> hit(m_, false);
    for (auto v : e.lanes) {
      if (v < 0 || v >= m_ || hit[v]) return false;
      hit[v] = true;
    }
    return true;
  }

private:
  std::int64_t m_;
};

class MatrixGroup final : public EnumeratedGroup {
public:
  MatrixGroup(GroupSpec s, const Caps& caps)
      : EnumeratedGroup(std::move(s)), d_(spec_.degree), q_(spec_.modulus) {
    for (const auto& rows : spec_.generators) {
      Element e = make_small(rows);
      e = canonicalize(e);  // throws "invalid generator" style errors below
      gens_.push_back(std::move(e));
    }
    build_closure(caps);
  }
  Element identity() const override {
    std::vector<std::int64_t> v(d_ * d_, 0);
    for (std::int64_t i = 0; i < d_; ++i) v[i * d_ + i] = 1;
    return make_small(std::move(v));
  }
  Element mul(const Element& a, const Element& b) const override {
    std::vector<std::int64_t> v(d_ * d_, 0);
    for (std::int64_t i = 0; i < d_; ++i)
      for (std::int64_t k = 0; k < d_; ++k) {
        std::int64_t aik = a.lanes[i * d_ + k];
        if (aik == 0) continue;
        for (std::int64_t j = 0; j < d_; ++j)
          v[i * d_ + j] = (v[i * d_ + j] + aik * b.lanes[k * d_ + j]) % q_;
      }
    return make_small(std::move(v));
  }
  Element inv(const Element& a) const override {
    // adj(A) * det(A)^{-1}, computed exactly then reduced mod q.
    std::vector<Integer> m(d_ * d_);
    for (std::int64_t i = 0; i < d_ * d_; ++i) m[i] = a.lanes[i];
    Integer det = int_det(m, d_);
    std::int64_t det_mod = mod_pos(static_cast<std::int64_t>(det % q_), q_);
    std::int64_t det_inv = mod_inverse(det_mod, q_, "matrix determinant");
    std::vector<std::int64_t> v(d_ * d_);
    std::vector<Integer> minor((d_ - 1) * (d_ - 1));
    for (std::int64_t i = 0; i < d_; ++i)
      for (std::int64_t j = 0; j < d_; ++j) {
        std::int64_t rr = 0;
        for (std::int64_t r = 0; r < d_; ++r) {
          if (r == i) continue;
          std::int64_t cc = 0;
          for (std::int64_t c = 0; c < d_; ++c) {
            if (c == j) continue;
            minor[rr * (d_ - 1) + cc++] = m[r * d_ + c];
          }
          ++rr;
        }
        Integer cof = d_ == 1 ? Integer(1) : int_det(minor, d_ - 1);
        if ((i + j) % 2 == 1) cof = -cof;
        // adjugate transposes the cofactor matrix
        std::int64_t cm = mod_pos(static_cast<std::int64_t>(cof % q_), q_);
        v[j * d_ + i] = (cm * det_inv) % q_;
      }
    return make_small(std::move(v));
  }
  Element canonicalize(const Element& raw) const override {
    if (!raw.wide.empty() || static_cast<std::int64_t>(raw.lanes.size()) != d_ * d_)
      throw InvalidInput("matrix element needs " + std::to_string(d_ * d_) + " row-major lanes");
    std::vector<std::int64_t> v(d_ * d_);
    std::vector<Integer> m(d_ * d_);
    for (std::int64_t i = 0; i < d_ * d_; ++i) {
      v[i] = mod_pos(raw.lanes[i], q_);
      m[i] = v[i];
    }
    Integer det = int_det(m, d_);
    std::int64_t det_mod = mod_pos(static_cast<std::int64_t>(det % q_), q_);
    mod_inverse(det_mod, q_, "invalid generator or element: matrix determinant");
    return make_small(std::move(v));
  }
  bool is_canonical(const Element& e) const override {
    if (!e.wide.empty() || static_cast<std::int64_t>(e.lanes.size()) != d_ * d_) return false;
    for (auto v : e.lanes)
      if (v < 0 || v >= q_) return false;
    return true;
  }

private:
  std::int64_t d_, q_;
};

class ProductGroup final : public Group {
public:
  ProductGroup(GroupSpec s, const Caps& caps) : Group(std::move(s)) {
    for (const auto& f : spec_.factors) {
      GroupHandle h = make_group(f, caps);
      if (h->kind() == GroupKind::FreeGroup)
        throw InvalidInput("direct-product: free-group factors have variable-length encodings");
      if (h->kind() == GroupKind::FpRing)
        throw InvalidInput("direct-product: fp-ring is not a group");
      Element id = h->identity();
      small_counts_.push_back(static_cast<std::int64_t>(id.lanes.size()));
      wide_counts_.push_back(static_cast<std::int64_t>(id.wide.size()));
      children_.push_back(std::move(h));
    }
  }

  Element identity() const override {
    Element e;
    for (const auto& c : children_) append(e, c->identity());
    return e;
  }
  Element mul(const Element& a, const Element& b) const override {
    return zip(a, b, [](const Group& g, const Element& x, const Element& y) {
      return g.mul(x, y);
    });
  }
  Element inv(const Element& a) const override {
    return map(a, [](const Group& g, const Element& x) { return g.inv(x); });
  }
  Element canonicalize(const Element& raw) const override {
    return map(raw, [](const Group& g, const Element& x) { return g.canonicalize(x); });
  }
  bool is_canonical(const Element& e) const override {
    std::int64_t ts = 0, tw = 0;
    for (std::size_t i = 0; i < children_.size(); ++i) {
      ts += small_counts_[i];
      tw += wide_counts_[i];
    }
    if (static_cast<std::int64_t>(e.lanes.size()) != ts ||
        static_cast<std::int64_t>(e.wide.size()) != tw)
      return false;
    std::int64_t so = 0, wo = 0;
    for (std::size_t i = 0; i < children_.size(); ++i) {
      if (!children_[i]->is_canonical(slice(e, i, so, wo))) return false;
      so += small_counts_[i];
      wo += wide_counts_[i];
    }
    return true;
  }
  bool contains(const Element& e) const override {
    if (!is_canonical(e)) return false;
    std::int64_t so = 0, wo = 0;
    for (std::size_t i = 0; i < children_.size(); ++i) {
      if (!children_[i]->contains(slice(e, i, so, wo))) return false;
      so += small_counts_[i];
      wo += wide_counts_[i];
    }
    return true;
  }
  bool finite() const override {
    for (const auto& c : children_)
      if (!c->finite()) return false;
    return true;
  }
  std::optional<Integer> order() const override {
    Integer o = 1;
    for (const auto& c : children_) {
      auto co = c->order();
      if (!co) return std::nullopt;
      o *= *co;
    }
    return o;
  }
  bool abelian() const override {
    for (const auto& c : children_)
      if (!c->abelian()) return false;
    return true;
  }
  bool torsion_free() const override {
    for (const auto& c : children_)
      if (!c->torsion_free()) return false;
    return !children_.empty();
  }
  Element random_element(Rng& rng) const override {
    Element e;
    for (const auto& c : children_) append(e, c->random_element(rng));
    return e;
  }

private:
  Element slice(const Element& e, std::size_t i, std::int64_t so, std::int64_t wo) const {
    Element x;
    x.lanes.assign(e.lanes.begin() + so, e.lanes.begin() + so + small_counts_[i]);
    x.wide.assign(e.wide.begin() + wo, e.wide.begin() + wo + wide_counts_[i]);
    return x;
  }
  static void append(Element& e, const Element& part) {
    e.lanes.insert(e.lanes.end(), part.lanes.begin(), part.lanes.end());
    e.wide.insert(e.wide.end(), part.wide.begin(), part.wide.end());
  }
  template <class F>
  Element map(const Element& a, F&& f) const {
    check_shape(a);
    Element r;
    std::int64_t so = 0, wo = 0;
    for (std::size_t i = 0; i < children_.size(); ++i) {
      append(r, f(*children_[i], slice(a, i, so, wo)));
      so += small_counts_[i];
      wo += wide_counts_[i];
    }
    return r;
  }
  template <class F>
  Element zip(const Element& a, const Element& b, F&& f) const {
    Element r;
    std::int64_t so = 0, wo = 0;
    for (std::size_t i = 0; i < children_.size(); ++i) {
      append(r, f(*children_[i], slice(a, i, so, wo), slice(b, i, so, wo)));
      so += small_counts_[i];
      wo += wide_counts_[i];
    }
    return r;
  }
  void check_shape(const Element& a) const {
    std::int64_t ts = 0, tw = 0;
    for (std::size_t i = 0; i < children_.size(); ++i) {
      ts += small_counts_[i];
      tw += wide_counts_[i];
    }
    if (static_cast<std::int64_t>(a.lanes.size()) != ts ||
        static_cast<std::int64_t>(a.wide.size()) != tw)
      throw InvalidInput("direct-product element has wrong lane shape");
  }

  std::vector<GroupHandle> children_;
  std::vector<std::int64_t> small_counts_, wide_counts_;
};

void validate_spec(const GroupSpec& s) {
  switch (s.kind) {
    case GroupKind::Cyclic:
      if (s.n < 1) throw InvalidInput("cyclic: n must be >= 1");
      break;
    case GroupKind::DirectProduct:
      if (s.factors.empty()) throw InvalidInput("direct-product: needs at least one factor");
      break;
    case GroupKind::Permutation:
      if (s.degree < 1 || s.degree > 12)
        throw InvalidInput("permutation: degree must be in [1, 12] (desk-scale cap)");
      if (s.generators.empty()) throw InvalidInput("permutation: needs generators");
      break;
    case GroupKind::MatrixModQ:
      if (s.modulus < 2) throw InvalidInput("matrix-mod-q: modulus must be >= 2");
      if (s.degree < 1 || s.degree > 6)
        throw InvalidInput("matrix-mod-q: dimension must be in [1, 6] (desk-scale cap)");
      if (s.generators.empty()) throw InvalidInput("matrix-mod-q: needs generators");
      break;
    case GroupKind::Psl2:
      if (s.n < 3 || s.n > 101 || !is_prime(s.n))
        throw InvalidInput("psl2: p must be an odd prime <= 101");
      break;
    case GroupKind::HeisenbergZ:
      break;
    case GroupKind::FreeAbelian:
      if (s.degree < 1 || s.degree > 8)
        throw InvalidInput("free-abelian: rank must be in [1, 8]");
      break;
    case GroupKind::FreeGroup:
      if (s.degree < 1 || s.degree > 4)
        throw InvalidInput("free-group: rank must be in [1, 4] (desk-scale cap)");
      break;
    case GroupKind::FpRing:
      if (!is_prime(s.n) || s.n > 101) throw InvalidInput("fp-ring: p must be a prime <= 101");
      break;
  }
}

}  // namespace

const char* kind_name(GroupKind k) {
  switch (k) {
    case GroupKind::Cyclic: return "cyclic";
    case GroupKind::DirectProduct: return "direct-product";
    case GroupKind::Permutation: return "permutation";
    case GroupKind::MatrixModQ: return "matrix-mod-q";
    case GroupKind::Psl2: return "psl2";
    case GroupKind::HeisenbergZ: return "heisenberg-Z";
    case GroupKind::FreeAbelian: return "free-abelian";
    case GroupKind::FreeGroup: return "free-group";
    case GroupKind::FpRing: return "fp-ring";
  }
  return "?";
}

GroupSpec GroupSpec::cyclic(std::int64_t n) {
  GroupSpec s;
  s.kind = GroupKind::Cyclic;
  s.n = n;
  return s;
}
GroupSpec GroupSpec::direct_product(std::vector<GroupSpec> factors) {
  GroupSpec s;
  s.kind = GroupKind::DirectProduct;
  s.factors = std::move(factors);
  return s;
}
GroupSpec GroupSpec::permutation(std::int64_t degree,
                                 std::vector<std::vector<std::int64_t>> gens) {
  GroupSpec s;
  s.kind = GroupKind::Permutation;
  s.degree = degree;
  s.generators = std::move(gens);
  return s;
}
GroupSpec GroupSpec::matrix_mod_q(std::int64_t dim, std::int64_t q,
                                  std::vector<std::vector<std::int64_t>> gens) {
  GroupSpec s;
  s.kind = GroupKind::MatrixModQ;
  s.degree = dim;
  s.modulus = q;
  s.generators = std::move(gens);
  return s;
}
GroupSpec GroupSpec::psl2(std::int64_t p) {
  GroupSpec s;
  s.kind = GroupKind::Psl2;
  s.n = p;
  return s;
}
GroupSpec GroupSpec::heisenberg() {
  GroupSpec s;
  s.kind = GroupKind::HeisenbergZ;
  return s;
}
GroupSpec GroupSpec::free_abelian(std::int64_t d) {
  GroupSpec s;
  s.kind = GroupKind::FreeAbelian;
  s.degree = d;
  return s;
}
GroupSpec GroupSpec::free_group(std::int64_t rank) {
  GroupSpec s;
  s.kind = GroupKind::FreeGroup;
  s.degree = rank;
  return s;
}
GroupSpec GroupSpec::fp_ring(std::int64_t p) {
  GroupSpec s;
  s.kind = GroupKind::FpRing;
  s.n = p;
  return s;
}

std::string GroupSpec::name() const {
  switch (kind) {
    case GroupKind::Cyclic: return "cyclic(" + std::to_string(n) + ")";
    case GroupKind::DirectProduct: {
      std::string s = "product(";
      for (std::size_t i = 0; i < factors.size(); ++i) {
        if (i) s += "x";
        s += factors[i].name();
      }
      return s + ")";
    }
    case GroupKind::Permutation:
      return "permutation(" + std::to_string(degree) + ")";
    case GroupKind::MatrixModQ:
      return "matrix(" + std::to_string(degree) + " mod " + std::to_string(modulus) + ")";
    case GroupKind::Psl2: return "psl2(" + std::to_string(n) + ")";
    case GroupKind::HeisenbergZ: return "heisenberg-Z";
    case GroupKind::FreeAbelian: return "free-abelian(" + std::to_string(degree) + ")";
    case GroupKind::FreeGroup: return "free-group(" + std::to_string(degree) + ")";
    case GroupKind::FpRing: return "fp-ring(" + std::to_string(n) + ")";
  }
  return "?";
}

GroupSpec GroupSpec::from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw InvalidInput("group spec: expected an object with a \"kind\" field");
  const std::string kind = j.at("kind").get<std::string>();
  auto geti = [&](const char* key) -> std::int64_t {
    if (!j.contains(key))
      throw InvalidInput(std::string("group spec: missing field \"") + key + "\"");
    return j.at(key).get<std::int64_t>();
  };
  auto getgens = [&]() {
    if (!j.contains("generators")) throw InvalidInput("group spec: missing \"generators\"");
    return j.at("generators").get<std::vector<std::vector<std::int64_t>>>();
  };
  // Reject unknown fields so config typos fail loudly.
  static const std::unordered_set<std::string> known = {
      "kind", "n", "p", "d", "rank", "degree", "modulus", "generators", "factors"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key()))
      throw InvalidInput("group spec: unknown field \"" + it.key() + "\"");

  if (kind == "cyclic") return cyclic(geti("n"));
  if (kind == "direct-product") {
    if (!j.contains("factors")) throw InvalidInput("group spec: missing \"factors\"");
    std::vector<GroupSpec> fs;
    for (const auto& f : j.at("factors")) fs.push_back(from_json(f));
    return direct_product(std::move(fs));
  }
  if (kind == "permutation") return permutation(geti("degree"), getgens());
  if (kind == "matrix-mod-q") return matrix_mod_q(geti("degree"), geti("modulus"), getgens());
  if (kind == "psl2") return psl2(geti("p"));
  if (kind == "heisenberg-Z" || kind == "heisenberg") return heisenberg();
  if (kind == "free-abelian") return free_abelian(geti("d"));
  if (kind == "free-group") return free_group(geti("rank"));
  if (kind == "fp-ring") return fp_ring(geti("p"));
  throw InvalidInput("group spec: unknown kind \"" + kind + "\"");
}

json GroupSpec::to_json() const {
  json j;
  j["kind"] = kind_name(kind);
  switch (kind) {
    case GroupKind::Cyclic: j["n"] = n; break;
    case GroupKind::DirectProduct: {
      json fs = json::array();
      for (const auto& f : factors) fs.push_back(f.to_json());
      j["factors"] = std::move(fs);
      break;
    }
    case GroupKind::Permutation:
      j["degree"] = degree;
      j["generators"] = generators;
      break;
    case GroupKind::MatrixModQ:
      j["degree"] = degree;
      j["modulus"] = modulus;
      j["generators"] = generators;
      break;
    case GroupKind::Psl2: j["p"] = n; break;
    case GroupKind::HeisenbergZ: break;
    case GroupKind::FreeAbelian: j["d"] = degree; break;
    case GroupKind::FreeGroup: j["rank"] = degree; break;
    case GroupKind::FpRing: j["p"] = n; break;
  }
  return j;
}

GroupSpec GroupSpec::parse(const std::string& text) {
  if (text.empty()) throw InvalidInput("group spec: empty string");
  if (text[0] == '{') return from_json(json::parse(text));

  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  std::int64_t arg = 0;
  if (colon != std::string::npos) {
    try {
      arg = std::stoll(text.substr(colon + 1));
    } catch (const std::exception&) {
      throw InvalidInput("group spec: bad numeric parameter in \"" + text + "\"");
    }
  }
  auto need_arg = [&]() {
    if (colon == std::string::npos)
      throw InvalidInput("group spec: \"" + head + "\" needs a :N parameter");
    return arg;
  };

  if (head == "cyclic") return cyclic(need_arg());
  if (head == "psl2") return psl2(need_arg());
  if (head == "heisenberg" || head == "heisenberg-Z") return heisenberg();
  if (head == "free-abelian") return free_abelian(need_arg());
  if (head == "free-group") return free_group(need_arg());
  if (head == "fp-ring") return fp_ring(need_arg());
  if (head == "grid") return direct_product({cyclic(need_arg()), cyclic(arg)});
  if (head == "quaternion")
    return matrix_mod_q(2, 3, {{0, 2, 1, 0}, {1, 1, 1, 2}});
  if (head == "heis-mod")
    return matrix_mod_q(3, need_arg(),
                        {{1, 1, 0, 0, 1, 0, 0, 0, 1}, {1, 0, 0, 0, 1, 1, 0, 0, 1}});
  if (head == "sym") {
    const std::int64_t n = need_arg();
    if (n == 1) return permutation(1, {{0}});
    std::vector<std::int64_t> cycle(n), swap01(n);
    for (std::int64_t i = 0; i < n; ++i) {
      cycle[i] = (i + 1) % n;
      swap01[i] = i;
    }
    std::swap(swap01[0], swap01[1]);
    return permutation(n, {cycle, swap01});
  }
  if (head == "dihedral") {
    const std::int64_t n = need_arg();
    if (n < 3) throw InvalidInput("group spec: dihedral:N needs N >= 3");
    std::vector<std::int64_t> rot(n), refl(n);
    for (std::int64_t i = 0; i < n; ++i) {
      rot[i] = (i + 1) % n;
      refl[i] = (n - i) % n;
    }
    return permutation(n, {rot, refl});
  }
  throw InvalidInput("group spec: unknown shorthand \"" + text + "\"");
}

GroupHandle make_group(const GroupSpec& spec, const Caps& caps) {
  validate_spec(spec);
  switch (spec.kind) {
    case GroupKind::Cyclic: return std::make_shared<CyclicGroup>(spec);
    case GroupKind::DirectProduct: return std::make_shared<ProductGroup>(spec, caps);
    case GroupKind::Permutation: return std::make_shared<PermutationGroup>(spec, caps);
    case GroupKind::MatrixModQ: return std::make_shared<MatrixGroup>(spec, caps);
    case GroupKind::Psl2: return std::make_shared<Psl2Group>(spec);
    case GroupKind::HeisenbergZ: return std::make_shared<HeisenbergGroup>(spec);
    case GroupKind::FreeAbelian: return std::make_shared<FreeAbelianGroup>(spec);
    case GroupKind::FreeGroup: return std::make_shared<FreeGroupImpl>(spec);
    case GroupKind::FpRing: return std::make_shared<FpRingGroup>(spec);
  }
  throw InvalidInput("unreachable group kind");
}

Element Group::pow(const Element& g, std::int64_t e) const {
  if (e < 0) return pow(inv(g), -e);
  Element acc = identity();
  Element base = g;
  while (e) {
    if (e & 1) acc = mul(acc, base);
    if (e >>= 1) base = mul(base, base);
  }
  return acc;
}

Element arith_mul(const GroupHandle& g, const Element& a, const Element& b) {
  if (!g->contains(a) || !g->contains(b))
    throw InvalidInput("arith mul: element does not belong to " + g->name());
  return g->mul(a, b);
}

Element arith_inv(const GroupHandle& g, const Element& a) {
  if (!g->contains(a))
    throw InvalidInput("arith inv: element does not belong to " + g->name());
  return g->inv(a);
}

Element arith_canonicalize(const GroupHandle& g, const Element& raw) {
  return g->canonicalize(raw);
}

std::optional<Integer> element_order(const GroupHandle& g, const Element& e,
                                     const Caps& caps) {
  if (!g->contains(e)) throw InvalidInput("element_order: not a member of " + g->name());
  const Element id = g->identity();
  if (e == id) return Integer(1);
  if (g->torsion_free()) return std::nullopt;
  Integer limit = caps.elements;
  if (auto o = g->order(); o && *o < limit) limit = *o;
  Element acc = e;
  Integer n = 1;
  while (n <= limit) {
    if (acc == id) return n;
    acc = g->mul(acc, e);
    ++n;
  }
  return std::nullopt;
}

Element element_from_json(const GroupHandle& g, const json& literal) {
  if (!literal.is_array()) throw InvalidInput("element literal must be a JSON array");
  Element raw;
  const Element id = g->identity();
  const std::size_t wide_count = id.wide.size();
  std::vector<Integer> values;
  for (const auto& v : literal) {
    if (v.is_number_integer())
      values.emplace_back(v.get<std::int64_t>());
    else if (v.is_string())
      values.emplace_back(Integer(v.get<std::string>()));
    else
      throw InvalidInput("element literal entries must be integers");
  }
  if (wide_count > 0) {
    // Fixed-width small lanes first, then the arbitrary-precision lanes.
    const std::size_t small_count = id.lanes.size();
    if (values.size() != small_count + wide_count)
      throw InvalidInput("element literal has wrong length for " + g->name());
    for (std::size_t i = 0; i < small_count; ++i)
      raw.lanes.push_back(static_cast<std::int64_t>(values[i]));
    for (std::size_t i = small_count; i < values.size(); ++i) raw.wide.push_back(values[i]);
  } else {
    for (const auto& v : values) {
      if (v > std::numeric_limits<std::int64_t>::max() ||
          v < std::numeric_limits<std::int64_t>::min())
        throw InvalidInput("element lane exceeds 64-bit range");
      raw.lanes.push_back(static_cast<std::int64_t>(v));
    }
  }
  return g->canonicalize(raw);
}

json element_to_json(const Element& e) {
  json a = json::array();
  for (auto v : e.lanes) a.push_back(v);
  for (const auto& w : e.wide) {
    if (w <= std::numeric_limits<std::int64_t>::max() &&
        w >= std::numeric_limits<std::int64_t>::min())
      a.push_back(static_cast<std::int64_t>(w));
    else
      a.push_back(w.str());
  }
  return a;
}

}  // namespace apx

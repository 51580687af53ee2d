#include "apx/element_set.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

#include "apx/errors.hpp"

namespace apx {

Caps& global_caps() {
  static Caps caps;
  return caps;
}

ElementSet::ElementSet(GroupHandle group, std::vector<Element> elems)
    : group_(std::move(group)) {
  for (const auto& e : elems) {
    if (!group_->contains(e))
      throw InvalidInput("element set: " + to_string(e) + " is not a canonical member of " +
                         group_->name());
  }
  std::sort(elems.begin(), elems.end());
  elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
  index_.reserve(elems.size() * 2);
  index_.insert(elems.begin(), elems.end());
  sorted_ = std::move(elems);
}

ElementSet::ElementSet(GroupHandle group, std::vector<Element> sorted_unique, unchecked_t)
    : group_(std::move(group)), sorted_(std::move(sorted_unique)) {
  index_.reserve(sorted_.size() * 2);
  index_.insert(sorted_.begin(), sorted_.end());
}

ElementSet ElementSet::from_json(const GroupHandle& g, const nlohmann::json& literals) {
  if (!literals.is_array()) throw InvalidInput("set literal must be a JSON array of elements");
  std::vector<Element> elems;
  elems.reserve(literals.size());
  for (const auto& lit : literals) elems.push_back(element_from_json(g, lit));
  return ElementSet(g, std::move(elems));
}

bool ElementSet::subset_of(const ElementSet& other) const {
  if (size() > other.size()) return false;
  for (const auto& e : sorted_)
    if (!other.contains(e)) return false;
  return true;
}

nlohmann::json ElementSet::to_json() const {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& e : sorted_) a.push_back(element_to_json(e));
  return a;
}

SetBuilder::SetBuilder(GroupHandle group, const Caps& caps, const char* where)
    : group_(std::move(group)), caps_(&caps), where_(where) {}

bool SetBuilder::insert(Element e) {
  auto [it, fresh] = seen_.insert(std::move(e));
  if (fresh) caps_->require_elements(static_cast<std::int64_t>(seen_.size()), where_);
  return fresh;
}

void SetBuilder::reserve(std::int64_t n) {
  seen_.reserve(static_cast<std::size_t>(std::min(n, caps_->elements)) * 2);
}

ElementSet SetBuilder::take() {
  std::vector<Element> v(seen_.begin(), seen_.end());
  std::sort(v.begin(), v.end());
  ElementSet out(std::move(group_), std::move(v), ElementSet::unchecked_t{});
  seen_.clear();
  return out;
}

ElementSet set_of(const GroupHandle& g, std::initializer_list<Element> elems) {
  return ElementSet(g, std::vector<Element>(elems));
}

ElementSet whole_group(const GroupHandle& g) {
  if (!g->finite()) throw InvalidInput("whole_group: " + g->name() + " is infinite");
  auto ord = g->order();
  const Caps& caps = global_caps();
  caps.require_elements(static_cast<std::int64_t>(*ord), "whole_group");
  // Enumerated kinds expose their member list through closure of declared
  // generators; cyclic/product kinds enumerate directly.
  switch (g->kind()) {
    case GroupKind::Cyclic:
    case GroupKind::FpRing: {
      std::vector<Element> v;
      std::int64_t n = static_cast<std::int64_t>(*ord);
      v.reserve(n);
      for (std::int64_t i = 0; i < n; ++i) {
        Element e;
        e.lanes = {i};
        v.push_back(std::move(e));
      }
      return ElementSet(g, std::move(v));
    }
    case GroupKind::DirectProduct: {
      std::vector<Element> acc = {Element{}};
      for (const auto& fspec : g->spec().factors) {
        GroupHandle child = make_group(fspec, caps);
        ElementSet part = whole_group(child);
        std::vector<Element> next;
        next.reserve(acc.size() * part.elements().size());
        caps.require_elements(
            static_cast<std::int64_t>(acc.size() * part.elements().size()), "whole_group");
        for (const auto& a : acc)
          for (const auto& p : part.elements()) {
            Element e = a;
            e.lanes.insert(e.lanes.end(), p.lanes.begin(), p.lanes.end());
            e.wide.insert(e.wide.end(), p.wide.begin(), p.wide.end());
            next.push_back(std::move(e));
          }
        acc = std::move(next);
      }
      return ElementSet(g, std::move(acc));
    }
    default: {
      auto gens = g->declared_generators();
      ElementSet seed(g, gens.empty() ? std::vector<Element>{g->identity()} : gens);
      ElementSet c = subgroup_closure(seed, caps);
      if (Integer(c.size()) != *ord)
        throw InvalidInput("whole_group: declared generators do not span " + g->name());
      return c;
    }
  }
}

ElementSet subgroup_closure(const ElementSet& s, const Caps& caps) {
  const GroupHandle& g = s.group();
  SetBuilder out(g, caps, "subgroup closure");
  std::vector<Element> order_vec;
  auto push = [&](Element e) {
    if (out.insert(e)) order_vec.push_back(std::move(e));
  };
  push(g->identity());
  std::vector<Element> step;
  step.reserve(s.size() * 2);
  for (const auto& x : s.elements()) {
    step.push_back(x);
    step.push_back(g->inv(x));
  }
  for (const auto& x : step) push(x);
  for (std::size_t i = 0; i < order_vec.size(); ++i) {
    const Element cur = order_vec[i];  // copy: order_vec may reallocate
    for (const auto& x : step) push(g->mul(cur, x));
  }
  ElementSet result = out.take();
  // Closure certificate: identity present, inverse-closed, stable under
  // right multiplication by the generators.
  check_property(result.contains(g->identity()), "closure lost the identity");
  for (const auto& e : result.elements())
    check_property(result.contains(g->inv(e)), "closure not inverse-closed");
  for (const auto& e : result.elements())
    for (const auto& x : step)
      check_property(result.contains(g->mul(e, x)), "closure not multiplicatively closed");
  return result;
}

bool is_subgroup(const ElementSet& h) {
  if (h.empty()) return false;
  const GroupHandle& g = h.group();
  if (!h.contains(g->identity())) return false;
  for (const auto& a : h.elements())
    if (!h.contains(g->inv(a))) return false;
  for (const auto& a : h.elements())
    for (const auto& b : h.elements())
      if (!h.contains(g->mul(a, b))) return false;
  return true;
}

ElementSet inverse_set(const ElementSet& a) {
  const GroupHandle& g = a.group();
  std::vector<Element> v;
  v.reserve(a.size());
  for (const auto& e : a.elements()) v.push_back(g->inv(e));
  std::sort(v.begin(), v.end());
  return ElementSet(g, std::move(v));
}

}  // namespace apx

#pragma once

#include <initializer_list>
#include <unordered_set>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "apx/caps.hpp"
#include "apx/element.hpp"
#include "apx/group.hpp"

namespace apx {

// A finite set of canonical elements of one ambient group.  Immutable after
// construction; elements() is sorted in canonical order and membership is a
// hash lookup.
class ElementSet {
public:
  ElementSet() = default;
  // Validates membership of every element (throws InvalidInput otherwise),
  // dedups and sorts.
  ElementSet(GroupHandle group, std::vector<Element> elems);

  static ElementSet from_json(const GroupHandle& g, const nlohmann::json& literals);

  const GroupHandle& group() const { return group_; }
  std::int64_t size() const { return static_cast<std::int64_t>(sorted_.size()); }
  bool empty() const { return sorted_.empty(); }
  bool contains(const Element& e) const { return index_.find(e) != index_.end(); }
  const std::vector<Element>& elements() const { return sorted_; }

  bool same_elements(const ElementSet& other) const { return sorted_ == other.sorted_; }
  bool subset_of(const ElementSet& other) const;

  nlohmann::json to_json() const;

private:
  struct unchecked_t {};
  ElementSet(GroupHandle group, std::vector<Element> sorted_unique, unchecked_t);

  GroupHandle group_;
  std::vector<Element> sorted_;
  std::unordered_set<Element, ElementHash> index_;

  friend class SetBuilder;
};

// Accumulates canonical elements known to be valid group members (products
// of validated members), enforcing the element cap on the fly.
class SetBuilder {
public:
  SetBuilder(GroupHandle group, const Caps& caps, const char* where);

  // Returns true when the element was new.
  bool insert(Element e);
  bool contains(const Element& e) const { return seen_.find(e) != seen_.end(); }
  std::int64_t size() const { return static_cast<std::int64_t>(seen_.size()); }
  void reserve(std::int64_t n);

  ElementSet take();

private:
  GroupHandle group_;
  const Caps* caps_;
  const char* where_;
  std::unordered_set<Element, ElementHash> seen_;
};

// Helpers used across modules.
ElementSet set_of(const GroupHandle& g, std::initializer_list<Element> elems);
ElementSet whole_group(const GroupHandle& g);  // finite enumerated kinds only

// Smallest subset closed under mul/inv containing S and the identity.
ElementSet subgroup_closure(const ElementSet& s, const Caps& caps = global_caps());

// Extensional subgroup test: identity present, closed under inverse and
// products.
bool is_subgroup(const ElementSet& h);

ElementSet inverse_set(const ElementSet& a);

}  // namespace apx

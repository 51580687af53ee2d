#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "apx/caps.hpp"
#include "apx/element.hpp"
#include "apx/rng.hpp"

namespace apx {

enum class GroupKind {
  Cyclic,
  DirectProduct,
  Permutation,
  MatrixModQ,
  Psl2,
  HeisenbergZ,
  FreeAbelian,
  FreeGroup,
  FpRing,
};

const char* kind_name(GroupKind k);

// Declarative description of an ambient group.  Integer parameters are
// positive; desk-scale caps (permutation degree <= 12, psl2 prime <= 101,
// free rank <= 4, matrix dim <= 6) are validated by make_group.
struct GroupSpec {
  GroupKind kind = GroupKind::Cyclic;
  std::int64_t n = 1;        // cyclic modulus / psl2 or fp-ring prime
  std::int64_t degree = 0;   // permutation degree, matrix dim, abelian/free rank
  std::int64_t modulus = 0;  // matrix-mod-q modulus
  std::vector<std::vector<std::int64_t>> generators;  // permutation/matrix kinds
  std::vector<GroupSpec> factors;                     // direct product

  static GroupSpec cyclic(std::int64_t n);
  static GroupSpec direct_product(std::vector<GroupSpec> factors);
  static GroupSpec permutation(std::int64_t degree,
                               std::vector<std::vector<std::int64_t>> gens);
  static GroupSpec matrix_mod_q(std::int64_t dim, std::int64_t q,
                                std::vector<std::vector<std::int64_t>> gens);
  static GroupSpec psl2(std::int64_t p);
  static GroupSpec heisenberg();
  static GroupSpec free_abelian(std::int64_t d);
  static GroupSpec free_group(std::int64_t rank);
  static GroupSpec fp_ring(std::int64_t p);

  static GroupSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  // Compact form used on the command line, e.g. "cyclic:12", "psl2:7",
  // "heisenberg", "free-abelian:2".
  static GroupSpec parse(const std::string& text);
  std::string name() const;
};

class Group;
using GroupHandle = std::shared_ptr<const Group>;

// Immutable group with exact arithmetic on canonical elements.  All
// operations are pure; handles are safe to share between threads.
class Group {
public:
  virtual ~Group() = default;

  const GroupSpec& spec() const { return spec_; }
  GroupKind kind() const { return spec_.kind; }
  std::string name() const { return spec_.name(); }

  virtual Element identity() const = 0;
  // Group law on canonical members.  No membership validation here: the
  // checked entry points are the arith() wrappers below.
  virtual Element mul(const Element& a, const Element& b) const = 0;
  virtual Element inv(const Element& a) const = 0;
  // Accepts raw lanes (unreduced words, unnormalized residues) and returns
  // the canonical form; throws InvalidInput when no member matches.
  virtual Element canonicalize(const Element& raw) const = 0;
  // Structural canonical-form test (lane shape, ranges, reducedness).
  virtual bool is_canonical(const Element& e) const = 0;
  // Membership in this group (for generator-defined kinds this is the
  // generated subgroup, not the full symmetric/linear ambient).
  virtual bool contains(const Element& e) const { return is_canonical(e); }

  virtual bool finite() const = 0;
  virtual std::optional<Integer> order() const = 0;
  virtual bool abelian() const = 0;
  // Torsion-free kinds can report infinite element order without iterating.
  virtual bool torsion_free() const { return false; }

  // Declared generators (permutation/matrix kinds keep the user's list;
  // psl2 exposes the elementary unitriangular pair and inverses).
  virtual std::vector<Element> declared_generators() const { return {}; }

  virtual Element random_element(Rng& rng) const = 0;

  Element pow(const Element& g, std::int64_t e) const;

protected:
  explicit Group(GroupSpec spec) : spec_(std::move(spec)) {}
  GroupSpec spec_;
};

GroupHandle make_group(const GroupSpec& spec, const Caps& caps = global_caps());

// Checked arithmetic: validates membership of the arguments (canonical form
// included) before delegating, per the arith() operation contract.
Element arith_mul(const GroupHandle& g, const Element& a, const Element& b);
Element arith_inv(const GroupHandle& g, const Element& a);
Element arith_canonicalize(const GroupHandle& g, const Element& raw);

// Least n >= 1 with g^n = identity; nullopt means the order exceeded the cap
// (or the kind is torsion-free and g != e).
std::optional<Integer> element_order(const GroupHandle& g, const Element& e,
                                     const Caps& caps = global_caps());

Element element_from_json(const GroupHandle& g, const nlohmann::json& literal);
nlohmann::json element_to_json(const Element& e);

}  // namespace apx

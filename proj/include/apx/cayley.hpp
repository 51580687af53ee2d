#pragma once

#include <unordered_map>

#include "apx/element_set.hpp"
#include "apx/report.hpp"

namespace apx {

// Cayley graph of a finite group under a symmetric generating set: vertices
// in canonical order, g ~ gs adjacency, BFS distance table from the
// identity computed at construction.
class CayleyGraph {
public:
  explicit CayleyGraph(ElementSet s, const Caps& caps = global_caps());

  const GroupHandle& group() const { return s_.group(); }
  const ElementSet& generators() const { return s_; }
  std::int64_t order() const { return static_cast<std::int64_t>(vertices_.size()); }
  std::int64_t diameter() const { return diameter_; }
  bool identity_in_s() const { return identity_in_s_; }

  // Sorted canonical vertex list and BFS data aligned with it.
  const std::vector<Element>& vertices() const { return vertices_; }
  std::int64_t vertex_index(const Element& g) const;
  std::int64_t dist_from_identity(const Element& g) const;
  std::int64_t dist_by_index(std::int64_t i) const { return dist_[static_cast<std::size_t>(i)]; }
  // d_S(g, h) = d_S(e, g^{-1} h) by left invariance.
  std::int64_t distance(const Element& g, const Element& h) const;
  // sphere_sizes()[n] = #{g : d(e, g) = n}.
  const std::vector<std::int64_t>& sphere_sizes() const { return spheres_; }

private:
  ElementSet s_;
  std::vector<Element> vertices_;
  std::unordered_map<Element, std::int32_t, ElementHash> index_;
  std::vector<std::int32_t> dist_;
  std::vector<std::int64_t> spheres_;
  std::int64_t diameter_ = 0;
  bool identity_in_s_ = false;
};

// Layer table, exact diameter, ball sizes.
Report ball_diameter(const CayleyGraph& x);

// Word distance between two elements of a (possibly infinite) group with
// respect to a symmetric set S, by bidirectional BFS; throws CapExceeded
// when the frontier outgrows the cap before meeting.
std::int64_t word_distance(const ElementSet& s, const Element& from, const Element& to,
                           const Caps& caps = global_caps());

// Least N with g ∈ P(x_1..x_r; N..N); asserts d^∞ <= d_S <= r d^∞ against
// the word metric for the symmetrized generator set.
std::int64_t linf_word_metric(const GroupHandle& g, const std::vector<Element>& ordered_gens,
                              const Element& target, const Caps& caps = global_caps());

// Second-smallest eigenvalue of the normalized Laplacian I - M/|S|; dense
// solver below 4096 vertices, deflated power iteration above.  Asserts
// lambda_1 >= 1/(8 diam^2) - 1e-9.
double spectral_gap(const CayleyGraph& x, const Caps& caps = global_caps());

// Diameter table for PSL2(p) under the elementary generator pairs.
Report babai_report(const std::vector<std::int64_t>& primes,
                    const Caps& caps = global_caps());

}  // namespace apx

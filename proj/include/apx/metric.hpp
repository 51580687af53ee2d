#pragma once

#include <functional>

#include "apx/cayley.hpp"
#include "apx/report.hpp"
#include "apx/rng.hpp"

namespace apx {

// Finite metric space with either exact distances raw(i,j)/scale (graph
// derived) or floating distances (torus samples).  The metric axioms are
// verified at construction: exactly on all triples for n <= 128, on 1e5
// seeded samples above.
class FiniteMetricSpace {
public:
  FiniteMetricSpace() = default;  // empty placeholder; fill via the factories
  static FiniteMetricSpace from_scaled_ints(std::vector<std::int32_t> raw,
                                            std::int64_t scale, std::int64_t n,
                                            const Caps& caps = global_caps());
  static FiniteMetricSpace from_doubles(std::vector<double> d, std::int64_t n,
                                        const Caps& caps = global_caps());

  std::int64_t size() const { return n_; }
  bool exact() const { return scale_ > 0; }
  std::int64_t scale() const { return scale_; }
  std::int32_t raw(std::int64_t i, std::int64_t j) const {
    return raw_[static_cast<std::size_t>(i * n_ + j)];
  }
  double d(std::int64_t i, std::int64_t j) const;
  // d(i,j) <= eps, exact when the space is exact.
  bool within(std::int64_t i, std::int64_t j, const Rational& eps) const;
  double diameter() const;
  Rational exact_diameter() const;

private:
  void verify_metric(const Caps& caps) const;

  std::int64_t n_ = 0;
  std::int64_t scale_ = 0;  // 0 = floating backend
  std::vector<std::int32_t> raw_;
  std::vector<double> dd_;
};

struct RescaledSpace {
  FiniteMetricSpace space;
  Report condition;  // the (C, d) values of |X|/deg(X) <= C diam(X)^d
};

// Graph metric divided by the diameter (diameter exactly 1).
RescaledSpace rescaled_space(const CayleyGraph& x, const Caps& caps = global_caps());

// Greedy eps-net size in point order: an upper bound for the minimal
// covering number.
std::int64_t covering_number(const FiniteMetricSpace& x, const Rational& eps);

// Covering numbers at the dyadic radii 1/2, 1/4, ..., with N(r)/N(2r)
// doubling ratios.
Report covering_table(const FiniteMetricSpace& x, int depth = 4);

// Flat torus R^q/Z^q with a norm-induced invariant metric, rescaled so the
// quotient diameter is 1.
struct TorusModel {
  enum class Norm { L1, L2, LInf, Polyhedral };
  int q = 1;
  Norm norm = Norm::L1;
  std::vector<std::vector<double>> functionals;  // polyhedral only
  double scale = 1.0;

  static TorusModel make(int q, Norm norm, std::vector<std::vector<double>> functionals = {});
  static TorusModel from_fit(int q, const std::string& fitted);  // "l1"|"l2"|"linf"

  double raw_norm(const std::vector<double>& v) const;
  // Quotient distance min over lattice shifts.
  double quotient(const std::vector<double>& x, const std::vector<double>& y) const;
  double quotient_unscaled(const std::vector<double>& x, const std::vector<double>& y) const;
  // Covering radius of the grid with R_i points per axis.
  double covering_radius(const std::vector<std::int64_t>& resolution) const;
  std::string norm_name() const;
  Report to_json() const;
};

struct Correspondence {
  std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
};

struct GhBounds {
  double upper = 0;
  double lower = 0;
  double distortion = 0;
  double discretization = 0;
};

// Correspondence-based GH bounds between finite spaces: upper =
// distortion/2, lower = max(diameter gap, histogram discrepancy)/2.  The
// histogram term is a heuristic surrogate, not a certified bound.
GhBounds gh_bounds(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
                   const Correspondence& corr);

// GH upper/lower bounds between a rescaled lattice-quotient Cayley graph and
// a torus model.  Vertices map to the lattice grid coords(v)/axis_mod; the
// grid-to-torus covering radius is added to the upper bound.
GhBounds gh_to_torus(const CayleyGraph& x, const TorusModel& t,
                     const std::vector<std::int64_t>& axis_mod,
                     const std::function<std::vector<std::int64_t>(const Element&)>& coords,
                     const Caps& caps = global_caps());

// Limit-norm extraction on Z^d: estimates ||v|| = d_S(0, kv)/k at each
// scale, reports convergence deltas, checks the norm axioms within
// 1e-6 + 2r/k, and fits a p-norm to the final estimates.
Report norm_extract(const ElementSet& s, const std::vector<std::vector<std::int64_t>>& directions,
                    const std::vector<int>& scales, const Caps& caps = global_caps());

// Scaling-limit panel for the cycle / square-grid / Heisenberg-quotient
// families: condition (4.1) values, covering ratios, GH bounds against the
// fitted torus (dimension evidence only for the Heisenberg family).
Report torus_limit_report(const std::string& family, const std::vector<std::int64_t>& sizes,
                          const Caps& caps = global_caps());

}  // namespace apx

#include "apx/cayley.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <deque>

#include "apx/errors.hpp"
#include "apx/progression.hpp"
#include "apx/setcalc.hpp"

namespace apx {

CayleyGraph::CayleyGraph(ElementSet s, const Caps& caps) : s_(std::move(s)) {
  const GroupHandle& g = s_.group();
  if (s_.empty()) throw InvalidInput("cayley: empty generating set");
  if (!g->finite()) throw InvalidInput("cayley: group must be finite");
  if (!s_.same_elements(inverse_set(s_)))
    throw InvalidInput("cayley: S must be symmetric");
  identity_in_s_ = s_.contains(g->identity());

  const Integer order = *g->order();
  caps.require_elements(static_cast<std::int64_t>(order), "cayley BFS");

  // BFS from the identity along g -> g s.
  std::unordered_map<Element, std::int32_t, ElementHash> dist_map;
  std::vector<Element> frontier{g->identity()};
  dist_map.emplace(frontier.front(), 0);
  spheres_.push_back(1);
  std::size_t layer_begin = 0;
  std::int32_t depth = 0;
  while (layer_begin < frontier.size()) {
    const std::size_t layer_end = frontier.size();
    ++depth;
    std::int64_t added = 0;
    for (std::size_t i = layer_begin; i < layer_end; ++i) {
      const Element cur = frontier[i];
      for (const auto& gen : s_.elements()) {
        Element next = g->mul(cur, gen);
        if (dist_map.emplace(next, depth).second) {
          frontier.push_back(std::move(next));
          ++added;
        }
      }
    }
    if (added == 0) break;
    spheres_.push_back(added);
    layer_begin = layer_end;
  }
  if (Integer(static_cast<std::int64_t>(dist_map.size())) != order)
    throw InvalidInput("cayley: S does not generate the group (BFS reached " +
                       std::to_string(dist_map.size()) + " of " + order.str() + ")");

  diameter_ = static_cast<std::int64_t>(spheres_.size()) - 1;
  vertices_ = std::move(frontier);
  std::sort(vertices_.begin(), vertices_.end());
  index_.reserve(vertices_.size() * 2);
  dist_.resize(vertices_.size());
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    index_.emplace(vertices_[i], static_cast<std::int32_t>(i));
    dist_[i] = dist_map.at(vertices_[i]);
  }
}

std::int64_t CayleyGraph::vertex_index(const Element& g) const {
  auto it = index_.find(g);
  if (it == index_.end()) throw InvalidInput("cayley: element is not a vertex");
  return it->second;
}

std::int64_t CayleyGraph::dist_from_identity(const Element& g) const {
  return dist_[static_cast<std::size_t>(vertex_index(g))];
}

std::int64_t CayleyGraph::distance(const Element& g, const Element& h) const {
  return dist_from_identity(group()->mul(group()->inv(g), h));
}

Report ball_diameter(const CayleyGraph& x) {
  Report r;
  r["group"] = x.group()->name();
  r["order"] = x.order();
  r["degree"] = x.generators().size();
  r["identity_in_S"] = x.identity_in_s();
  r["diameter"] = x.diameter();
  Report rows = Report::array();
  std::int64_t ball = 0;
  for (std::size_t n = 0; n < x.sphere_sizes().size(); ++n) {
    ball += x.sphere_sizes()[n];
    rows.push_back({static_cast<std::int64_t>(n), x.sphere_sizes()[n], ball});
  }
  Report table;
  table["columns"] = {"radius", "sphere", "ball"};
  table["rows"] = std::move(rows);
  r["table"] = std::move(table);
  return r;
}

std::int64_t word_distance(const ElementSet& s, const Element& from, const Element& to,
                           const Caps& caps) {
  const GroupHandle& g = s.group();
  if (s.empty()) throw InvalidInput("word_distance: empty generating set");
  if (!s.same_elements(inverse_set(s)))
    throw InvalidInput("word_distance: S must be symmetric");
  if (from == to) return 0;

  // Bidirectional BFS: forward along x -> x s from `from`, backward along
  // y -> y s^{-1} = y s from `to` (S symmetric).
  std::unordered_map<Element, std::int32_t, ElementHash> fwd{{from, 0}}, bwd{{to, 0}};
  std::deque<Element> fq{from}, bq{to};
  std::int32_t fdepth = 0, bdepth = 0;

  auto expand = [&](std::unordered_map<Element, std::int32_t, ElementHash>& mine,
                    std::unordered_map<Element, std::int32_t, ElementHash>& other,
                    std::deque<Element>& q, std::int32_t& depth) -> std::optional<std::int64_t> {
    const std::size_t count = q.size();
    ++depth;
    for (std::size_t i = 0; i < count; ++i) {
      Element cur = std::move(q.front());
      q.pop_front();
      for (const auto& gen : s.elements()) {
        Element next = g->mul(cur, gen);
        if (mine.contains(next)) continue;
        if (auto it = other.find(next); it != other.end())
          return static_cast<std::int64_t>(depth) + it->second;
        mine.emplace(next, depth);
        caps.require_elements(
            static_cast<std::int64_t>(mine.size() + other.size()), "word_distance BFS");
        q.push_back(std::move(next));
      }
    }
    return std::nullopt;
  };

  while (!fq.empty() || !bq.empty()) {
    auto& small_q = (fq.size() <= bq.size() && !fq.empty()) || bq.empty() ? fq : bq;
    std::optional<std::int64_t> hit;
    if (&small_q == &fq)
      hit = expand(fwd, bwd, fq, fdepth);
    else
      hit = expand(bwd, fwd, bq, bdepth);
    if (hit) return *hit;
  }
  throw InvalidInput("word_distance: target not reachable from source");
}

std::int64_t linf_word_metric(const GroupHandle& g, const std::vector<Element>& ordered_gens,
                              const Element& target, const Caps& caps) {
  const int r = static_cast<int>(ordered_gens.size());
  if (r < 1 || r > 3) throw InvalidInput("linf_word_metric: rank must be in [1, 3]");
  if (!g->contains(target)) throw InvalidInput("linf_word_metric: target not in group");

  std::int64_t linf = -1;
  for (std::int64_t n = 0;; ++n) {
    ProgressionSpec ps;
    ps.group = g;
    ps.generators = ordered_gens;
    ps.lengths.assign(ordered_gens.size(), n);
    ElementSet ball = enumerate_progression(ps, caps);  // throws CapExceeded eventually
    if (ball.contains(target)) {
      linf = n;
      break;
    }
    if (n > 0) {
      ProgressionSpec prev = ps;
      prev.lengths.assign(ordered_gens.size(), n - 1);
      if (enumerate_progression(prev, caps).size() == ball.size())
        throw InvalidInput("linf_word_metric: target unreachable (ball stabilized)");
    }
  }

  // Sandwich against the l^1 word metric.
  std::vector<Element> sym = ordered_gens;
  for (const auto& x : ordered_gens) sym.push_back(g->inv(x));
  const std::int64_t ds = word_distance(ElementSet(g, std::move(sym)), g->identity(),
                                        target, caps);
  check_property(linf <= ds && ds <= static_cast<std::int64_t>(r) * linf,
                 "linf_word_metric: sandwich d^inf <= d_S <= r d^inf violated");
  return linf;
}

namespace {

// Largest eigenvalue of B = (I + M/|S|)/2 restricted to the complement of
// the constant vector; eigenvalues of B live in [0, 1] so power iteration
// converges to the second-largest of M/|S| after deflation.
double power_iteration_mu2(const CayleyGraph& x, const Caps&) {
  const auto& verts = x.vertices();
  const std::int64_t n = x.order();
  const GroupHandle& g = x.group();
  const double deg = static_cast<double>(x.generators().size());

  std::vector<std::int32_t> nbr;
  nbr.reserve(static_cast<std::size_t>(n) * x.generators().elements().size());
  for (const auto& v : verts)
    for (const auto& s : x.generators().elements())
      nbr.push_back(static_cast<std::int32_t>(x.vertex_index(g->mul(v, s))));
  const std::size_t degree = x.generators().elements().size();

  std::vector<double> v(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
  // Deterministic start vector orthogonalized against the constant.
  for (std::int64_t i = 0; i < n; ++i)
    v[static_cast<std::size_t>(i)] = std::cos(static_cast<double>(i) * 1.0) + 0.5;
  auto deflate = [&](std::vector<double>& u) {
    double mean = 0;
    for (double a : u) mean += a;
    mean /= static_cast<double>(n);
    for (double& a : u) a -= mean;
  };
  auto normalize = [&](std::vector<double>& u) {
    double norm = 0;
    for (double a : u) norm += a * a;
    norm = std::sqrt(norm);
    if (norm == 0) throw PropertyViolation("spectral: start vector degenerate");
    for (double& a : u) a /= norm;
  };
  deflate(v);
  normalize(v);

  double lambda = 0, prev = 2;
  const int max_iter = 100'000;
  for (int it = 0; it < max_iter; ++it) {
    for (std::int64_t i = 0; i < n; ++i) {
      double acc = 0;
      const std::size_t base = static_cast<std::size_t>(i) * degree;
      for (std::size_t k = 0; k < degree; ++k) acc += v[static_cast<std::size_t>(nbr[base + k])];
      w[static_cast<std::size_t>(i)] = 0.5 * (v[static_cast<std::size_t>(i)] + acc / deg);
    }
    deflate(w);
    double norm = 0, dot = 0;
    for (std::int64_t i = 0; i < n; ++i) {
      norm += w[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(i)];
      dot += w[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
    }
    norm = std::sqrt(norm);
    lambda = dot;  // Rayleigh quotient since v is unit
    for (std::int64_t i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(i)] / norm;
    if (std::abs(lambda - prev) < 1e-13) break;
    prev = lambda;
    if (it + 1 == max_iter)
      throw PropertyViolation("spectral: power iteration did not converge");
  }
  return 2.0 * lambda - 1.0;  // eigenvalue of M/|S|
}

}  // namespace

double spectral_gap(const CayleyGraph& x, const Caps& caps) {
  const std::int64_t n = x.order();
  if (n > 100'000) throw CapExceeded("spectral_gap: graph too large");
  const GroupHandle& g = x.group();

  double lambda1;
  if (n <= 4096) {
    Eigen::MatrixXd lap = Eigen::MatrixXd::Identity(n, n);
    const double deg = static_cast<double>(x.generators().size());
    for (std::int64_t i = 0; i < n; ++i) {
      const Element& v = x.vertices()[static_cast<std::size_t>(i)];
      for (const auto& s : x.generators().elements()) {
        const std::int64_t j = x.vertex_index(g->mul(v, s));
        lap(i, j) -= 1.0 / deg;
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lap, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
      throw PropertyViolation("spectral: dense eigensolver failed");
    lambda1 = es.eigenvalues()(1);
  } else {
    lambda1 = 1.0 - power_iteration_mu2(x, caps);
  }

  const double diam = static_cast<double>(x.diameter());
  check_property(lambda1 >= 1.0 / (8.0 * diam * diam) - 1e-9,
                 "spectral: lambda_1 < 1/(8 diam^2) - 1e-9");
  return lambda1;
}

Report babai_report(const std::vector<std::int64_t>& primes, const Caps& caps) {
  std::vector<std::int64_t> sorted = primes;
  std::sort(sorted.begin(), sorted.end());
  Report rows = Report::array();
  Integer prev_order = 0;
  for (auto p : sorted) {
    GroupHandle g = make_group(GroupSpec::psl2(p), caps);
    ElementSet s(g, g->declared_generators());
    CayleyGraph x(s, caps);
    const double order = static_cast<double>(x.order());
    const double diam = static_cast<double>(x.diameter());
    Report row = Report::array();
    row.push_back(p);
    row.push_back(x.order());
    row.push_back(x.diameter());
    row.push_back(rounded(std::log(order)));
    row.push_back(rounded(diam / std::log(order)));
    row.push_back(rounded(std::log(diam) / std::log(std::log(order))));
    rows.push_back(std::move(row));
    check_property(Integer(x.order()) > prev_order, "babai: |PSL2(p)| not increasing in p");
    prev_order = x.order();
  }
  Report r;
  r["generators"] = "elementary unitriangular pair and inverses";
  Report table;
  table["columns"] = {"p", "order", "diameter", "log_order", "diam_over_log", "log_diam_over_loglog"};
  table["rows"] = std::move(rows);
  r["table"] = std::move(table);
  return r;
}

}  // namespace apx

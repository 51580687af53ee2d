#include "apx/metric.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "apx/errors.hpp"
#include "apx/progression.hpp"
#include "apx/setcalc.hpp"

namespace apx {

namespace {

constexpr double kFloatSlack = 1e-12;

}  // namespace

FiniteMetricSpace FiniteMetricSpace::from_scaled_ints(std::vector<std::int32_t> raw,
                                                      std::int64_t scale, std::int64_t n,
                                                      const Caps& caps) {
  if (scale <= 0) throw InvalidInput("metric space: scale must be positive");
  if (static_cast<std::int64_t>(raw.size()) != n * n)
    throw InvalidInput("metric space: matrix shape mismatch");
  FiniteMetricSpace m;
  m.n_ = n;
  m.scale_ = scale;
  m.raw_ = std::move(raw);
  m.verify_metric(caps);
  return m;
}

FiniteMetricSpace FiniteMetricSpace::from_doubles(std::vector<double> d, std::int64_t n,
                                                  const Caps& caps) {
  if (static_cast<std::int64_t>(d.size()) != n * n)
    throw InvalidInput("metric space: matrix shape mismatch");
  FiniteMetricSpace m;
  m.n_ = n;
  m.scale_ = 0;
  m.dd_ = std::move(d);
  m.verify_metric(caps);
  return m;
}

double FiniteMetricSpace::d(std::int64_t i, std::int64_t j) const {
  if (exact())
    return static_cast<double>(raw_[static_cast<std::size_t>(i * n_ + j)]) /
           static_cast<double>(scale_);
  return dd_[static_cast<std::size_t>(i * n_ + j)];
}

bool FiniteMetricSpace::within(std::int64_t i, std::int64_t j, const Rational& eps) const {
  if (exact())
    return Rational(raw_[static_cast<std::size_t>(i * n_ + j)], scale_) <= eps;
  return d(i, j) <= static_cast<double>(eps) + kFloatSlack;
}

double FiniteMetricSpace::diameter() const {
  double m = 0;
  for (std::int64_t i = 0; i < n_; ++i)
    for (std::int64_t j = i + 1; j < n_; ++j) m = std::max(m, d(i, j));
  return m;
}

Rational FiniteMetricSpace::exact_diameter() const {
  if (!exact()) throw InvalidInput("metric space: floating backend has no exact diameter");
  std::int32_t m = 0;
  for (auto v : raw_) m = std::max(m, v);
  return Rational(m, scale_);
}

void FiniteMetricSpace::verify_metric(const Caps& caps) const {
  auto at = [&](std::int64_t i, std::int64_t j) {
    return exact() ? static_cast<double>(raw_[static_cast<std::size_t>(i * n_ + j)])
                   : dd_[static_cast<std::size_t>(i * n_ + j)];
  };
  for (std::int64_t i = 0; i < n_; ++i) {
    check_property(at(i, i) == 0, "metric: d(x,x) != 0");
    for (std::int64_t j = i + 1; j < n_; ++j) {
      check_property(at(i, j) == at(j, i), "metric: asymmetric distances");
      check_property(at(i, j) > 0, "metric: distinct points at distance 0");
    }
  }
  auto triangle = [&](std::int64_t i, std::int64_t j, std::int64_t k) {
    const double slack = exact() ? 0.0 : kFloatSlack;
    check_property(at(i, k) <= at(i, j) + at(j, k) + slack, "metric: triangle violated");
  };
  if (n_ <= 128) {
    for (std::int64_t i = 0; i < n_; ++i)
      for (std::int64_t j = 0; j < n_; ++j)
        for (std::int64_t k = 0; k < n_; ++k) triangle(i, j, k);
  } else {
    Rng rng(0x7269616e676c65);  // fixed seed: sampling is part of the contract
    for (int t = 0; t < 100'000; ++t)
      triangle(rng.below(n_), rng.below(n_), rng.below(n_));
  }
  (void)caps;
}

RescaledSpace rescaled_space(const CayleyGraph& x, const Caps& caps) {
  const std::int64_t n = x.order();
  caps.require_elements(n, "rescaled_space");
  if (n * n / 4 > caps.pairs)
    throw CapExceeded("rescaled_space: distance matrix exceeds pair cap");
  const GroupHandle& g = x.group();

  std::vector<std::int32_t> raw(static_cast<std::size_t>(n * n));
  const auto& verts = x.vertices();
  // d(g, h) = d(e, g^{-1} h): one BFS table serves the whole matrix.
  auto fill_rows = [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t i = lo; i < hi; ++i) {
      const Element gi = g->inv(verts[static_cast<std::size_t>(i)]);
      for (std::int64_t j = 0; j < n; ++j)
        raw[static_cast<std::size_t>(i * n + j)] = static_cast<std::int32_t>(
            x.dist_by_index(x.vertex_index(g->mul(gi, verts[static_cast<std::size_t>(j)]))));
    }
  };
  const int threads = std::max(1, caps.threads);
  if (threads == 1 || n < 256) {
    fill_rows(0, n);
  } else {
    std::vector<std::future<void>> fs;
    const std::int64_t chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const std::int64_t lo = t * chunk, hi = std::min<std::int64_t>(n, lo + chunk);
      if (lo < hi) fs.push_back(std::async(std::launch::async, fill_rows, lo, hi));
    }
    for (auto& f : fs) f.get();
  }

  RescaledSpace rs;
  rs.space = FiniteMetricSpace::from_scaled_ints(std::move(raw), x.diameter(), n, caps);
  check_property(rs.space.exact_diameter() == 1, "rescaled_space: diameter != 1");

  Report cond;
  cond["vertices"] = n;
  cond["degree"] = x.generators().size();
  cond["diameter"] = x.diameter();
  // Measured C for |X|/deg(X) <= C diam(X)^d at d = 1, 2, 3.
  const Rational lhs(Integer(n), Integer(x.generators().size()));
  for (int d = 1; d <= 3; ++d) {
    Rational c = lhs / rpow(Rational(x.diameter()), static_cast<unsigned long>(d));
    cond["C_at_d" + std::to_string(d)] = rational_json(c);
  }
  rs.condition = std::move(cond);
  return rs;
}

std::int64_t covering_number(const FiniteMetricSpace& x, const Rational& eps) {
  if (!(eps > 0)) throw InvalidInput("covering_number: eps must be positive");
  std::vector<std::int64_t> centers;
  for (std::int64_t p = 0; p < x.size(); ++p) {
    bool hit = false;
    for (auto c : centers) {
      if (x.within(c, p, eps)) {
        hit = true;
        break;
      }
    }
    if (!hit) centers.push_back(p);
  }
  return static_cast<std::int64_t>(centers.size());
}

Report covering_table(const FiniteMetricSpace& x, int depth) {
  Report rows = Report::array();
  std::int64_t prev = 1;
  Rational r(1);
  for (int k = 1; k <= depth; ++k) {
    r /= 2;
    const std::int64_t n = covering_number(x, r);
    Report row = Report::array();
    row.push_back(rational_json(r));
    row.push_back(n);
    row.push_back(prev > 0 ? Report(rounded(static_cast<double>(n) / static_cast<double>(prev)))
                           : Report(nullptr));
    rows.push_back(std::move(row));
    prev = n;
  }
  Report t;
  t["columns"] = {"eps", "net_size", "ratio_to_prev"};
  t["rows"] = std::move(rows);
  return t;
}

TorusModel TorusModel::make(int q, Norm norm, std::vector<std::vector<double>> functionals) {
  TorusModel t;
  t.q = q;
  t.norm = norm;
  t.functionals = std::move(functionals);
  if (q < 1 || q > 3) throw InvalidInput("torus: dimension must be in [1, 3]");
  if (norm == Norm::Polyhedral) {
    if (t.functionals.empty()) throw InvalidInput("torus: polyhedral norm needs functionals");
    for (const auto& f : t.functionals)
      if (static_cast<int>(f.size()) != q)
        throw InvalidInput("torus: functional arity mismatch");
  }

  // Normalize to quotient diameter 1.
  double diam = 0;
  switch (norm) {
    case Norm::L1: diam = q / 2.0; break;
    case Norm::L2: diam = std::sqrt(q) / 2.0; break;
    case Norm::LInf: diam = 0.5; break;
    case Norm::Polyhedral: {
      // Grid search over the fundamental cell.
      const int res = 64;
      diam = 0;
      std::vector<double> pt(static_cast<std::size_t>(q)), zero(static_cast<std::size_t>(q), 0.0);
      std::vector<int> idx(static_cast<std::size_t>(q), 0);
      while (true) {
        for (int i = 0; i < q; ++i) pt[static_cast<std::size_t>(i)] = idx[static_cast<std::size_t>(i)] / double(res);
        diam = std::max(diam, t.quotient_unscaled(pt, zero));
        int i = 0;
        while (i < q && ++idx[static_cast<std::size_t>(i)] == res) idx[static_cast<std::size_t>(i++)] = 0;
        if (i == q) break;
      }
      break;
    }
  }
  if (diam <= 0) throw InvalidInput("torus: norm is degenerate (diameter 0)");
  t.scale = 1.0 / diam;

  // Norm axioms on the axis vectors plus random samples.
  for (int i = 0; i < q; ++i) {
    std::vector<double> axis(static_cast<std::size_t>(q), 0.0);
    axis[static_cast<std::size_t>(i)] = 1.0;
    check_property(t.raw_norm(axis) > 0, "torus: norm vanishes on an axis");
  }
  Rng rng(0x746f727573);
  for (int trial = 0; trial < 64; ++trial) {
    std::vector<double> v(static_cast<std::size_t>(q)), w(static_cast<std::size_t>(q));
    for (auto& c : v) c = static_cast<double>(rng.range(-8, 8)) / 8.0;
    for (auto& c : w) c = static_cast<double>(rng.range(-8, 8)) / 8.0;
    const double nv = t.raw_norm(v), nw = t.raw_norm(w);
    bool zero = std::all_of(v.begin(), v.end(), [](double c) { return c == 0; });
    check_property(zero ? nv == 0 : nv > 0, "torus: norm not positive-definite");
    std::vector<double> v2(v), vw(v);
    for (int i = 0; i < q; ++i) {
      v2[static_cast<std::size_t>(i)] *= 2.0;
      vw[static_cast<std::size_t>(i)] += w[static_cast<std::size_t>(i)];
    }
    check_property(std::abs(t.raw_norm(v2) - 2 * nv) <= 1e-9 * (1 + nv),
                   "torus: norm not homogeneous");
    check_property(t.raw_norm(vw) <= nv + nw + 1e-9, "torus: norm not convex");
  }
  return t;
}

TorusModel TorusModel::from_fit(int q, const std::string& fitted) {
  if (fitted == "l1") return make(q, Norm::L1);
  if (fitted == "l2") return make(q, Norm::L2);
  if (fitted == "linf") return make(q, Norm::LInf);
  throw InvalidInput("torus: unknown fitted norm " + fitted);
}

double TorusModel::raw_norm(const std::vector<double>& v) const {
  switch (norm) {
    case Norm::L1: {
      double s = 0;
      for (double c : v) s += std::abs(c);
      return s;
    }
    case Norm::L2: {
      double s = 0;
      for (double c : v) s += c * c;
      return std::sqrt(s);
    }
    case Norm::LInf: {
      double s = 0;
      for (double c : v) s = std::max(s, std::abs(c));
      return s;
    }
    case Norm::Polyhedral: {
      double s = 0;
      for (const auto& f : functionals) {
        double dot = 0;
        for (int i = 0; i < q; ++i) dot += f[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
        s = std::max(s, std::abs(dot));
      }
      return s;
    }
  }
  return 0;
}

double TorusModel::quotient_unscaled(const std::vector<double>& x,
                                     const std::vector<double>& y) const {
  std::vector<double> diff(static_cast<std::size_t>(q));
  for (int i = 0; i < q; ++i)
    diff[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(i)];
  if (norm != Norm::Polyhedral) {
    // Coordinate-monotone norms: wrap each coordinate into [-1/2, 1/2].
    for (auto& c : diff) {
      c = std::fmod(c, 1.0);
      if (c > 0.5) c -= 1.0;
      if (c < -0.5) c += 1.0;
    }
    return raw_norm(diff);
  }
  // General norms: search integer shifts in {-2..2}^q.
  for (auto& c : diff) c = std::fmod(c, 1.0);
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> shift(static_cast<std::size_t>(q), -2);
  std::vector<double> cand(static_cast<std::size_t>(q));
  while (true) {
    for (int i = 0; i < q; ++i)
      cand[static_cast<std::size_t>(i)] = diff[static_cast<std::size_t>(i)] + shift[static_cast<std::size_t>(i)];
    best = std::min(best, raw_norm(cand));
    int i = 0;
    while (i < q && ++shift[static_cast<std::size_t>(i)] == 3) shift[static_cast<std::size_t>(i++)] = -2;
    if (i == q) break;
  }
  return best;
}

double TorusModel::quotient(const std::vector<double>& x, const std::vector<double>& y) const {
  return scale * quotient_unscaled(x, y);
}

double TorusModel::covering_radius(const std::vector<std::int64_t>& resolution) const {
  if (static_cast<int>(resolution.size()) != q)
    throw InvalidInput("torus: resolution arity mismatch");
  std::vector<double> half(static_cast<std::size_t>(q));
  for (int i = 0; i < q; ++i)
    half[static_cast<std::size_t>(i)] = 0.5 / static_cast<double>(resolution[static_cast<std::size_t>(i)]);
  if (norm != Norm::Polyhedral) return scale * raw_norm(half);
  // Conservative bound |<a, u>| <= <|a|, half> for |u_i| <= half_i.
  double s = 0;
  for (const auto& f : functionals) {
    double dot = 0;
    for (int i = 0; i < q; ++i)
      dot += std::abs(f[static_cast<std::size_t>(i)]) * half[static_cast<std::size_t>(i)];
    s = std::max(s, dot);
  }
  return scale * s;
}

std::string TorusModel::norm_name() const {
  switch (norm) {
    case Norm::L1: return "l1";
    case Norm::L2: return "l2";
    case Norm::LInf: return "linf";
    case Norm::Polyhedral: return "polyhedral";
  }
  return "?";
}

Report TorusModel::to_json() const {
  Report j;
  j["q"] = q;
  j["norm"] = norm_name();
  if (norm == Norm::Polyhedral) j["functionals"] = functionals;
  j["scale"] = rounded(scale);
  return j;
}

namespace {

void histogram_lower(const std::vector<double>& dx, const std::vector<double>& dy,
                     double max_diam, double* out) {
  constexpr int kBins = 64;
  std::vector<double> hx(kBins, 0), hy(kBins, 0);
  const double width = max_diam * (1 + 1e-12) / kBins;
  for (double v : dx) hx[std::min<std::size_t>(kBins - 1, static_cast<std::size_t>(v / width))] += 1;
  for (double v : dy) hy[std::min<std::size_t>(kBins - 1, static_cast<std::size_t>(v / width))] += 1;
  double l1 = 0;
  for (int b = 0; b < kBins; ++b)
    l1 += std::abs(hx[static_cast<std::size_t>(b)] / static_cast<double>(dx.size()) -
                   hy[static_cast<std::size_t>(b)] / static_cast<double>(dy.size()));
  *out = l1 / 2.0;
}

}  // namespace

GhBounds gh_bounds(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
                   const Correspondence& corr) {
  if (corr.pairs.empty()) throw InvalidInput("gh_bounds: empty correspondence");
  std::vector<bool> seen_x(static_cast<std::size_t>(x.size()), false);
  std::vector<bool> seen_y(static_cast<std::size_t>(y.size()), false);
  for (auto [i, j] : corr.pairs) {
    if (i < 0 || i >= x.size() || j < 0 || j >= y.size())
      throw InvalidInput("gh_bounds: correspondence index out of range");
    seen_x[static_cast<std::size_t>(i)] = true;
    seen_y[static_cast<std::size_t>(j)] = true;
  }
  if (!std::all_of(seen_x.begin(), seen_x.end(), [](bool b) { return b; }) ||
      !std::all_of(seen_y.begin(), seen_y.end(), [](bool b) { return b; }))
    throw InvalidInput("gh_bounds: correspondence is not total on both sides");

  const std::int64_t m = static_cast<std::int64_t>(corr.pairs.size());
  if (m * m > 400'000'000)
    throw CapExceeded("gh_bounds: correspondence too large for pairwise distortion");
  double distortion = 0;
  for (std::int64_t a = 0; a < m; ++a)
    for (std::int64_t b = a + 1; b < m; ++b) {
      const auto [i1, j1] = corr.pairs[static_cast<std::size_t>(a)];
      const auto [i2, j2] = corr.pairs[static_cast<std::size_t>(b)];
      distortion = std::max(distortion, std::abs(x.d(i1, i2) - y.d(j1, j2)));
    }

  GhBounds out;
  out.distortion = distortion;
  out.upper = distortion / 2.0;

  const double dx = x.diameter(), dy = y.diameter();
  std::vector<double> all_x, all_y;
  all_x.reserve(static_cast<std::size_t>(x.size() * (x.size() - 1) / 2));
  all_y.reserve(static_cast<std::size_t>(y.size() * (y.size() - 1) / 2));
  for (std::int64_t i = 0; i < x.size(); ++i)
    for (std::int64_t j = i + 1; j < x.size(); ++j) all_x.push_back(x.d(i, j));
  for (std::int64_t i = 0; i < y.size(); ++i)
    for (std::int64_t j = i + 1; j < y.size(); ++j) all_y.push_back(y.d(i, j));
  double hist = 0;
  if (!all_x.empty() && !all_y.empty())
    histogram_lower(all_x, all_y, std::max(dx, dy), &hist);
  out.lower = std::max(std::abs(dx - dy) / 2.0, hist);

  check_property(out.lower <= out.upper + kFloatSlack, "gh_bounds: lower > upper");
  out.upper = rounded(out.upper);
  out.lower = rounded(out.lower);
  out.distortion = rounded(out.distortion);
  return out;
}

GhBounds gh_to_torus(const CayleyGraph& x, const TorusModel& t,
                     const std::vector<std::int64_t>& axis_mod,
                     const std::function<std::vector<std::int64_t>(const Element&)>& coords,
                     const Caps& caps) {
  if (static_cast<int>(axis_mod.size()) != t.q)
    throw InvalidInput("gh_to_torus: axis count mismatch");
  const std::int64_t n = x.order();
  if (n * n > 400'000'000) throw CapExceeded("gh_to_torus: graph too large");

  // Image lattice points, one per vertex (exact grid points of the
  // axis_mod-resolution grid, so the correspondence has no rounding error).
  std::vector<std::vector<double>> pts(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    const auto c = coords(x.vertices()[static_cast<std::size_t>(i)]);
    if (static_cast<int>(c.size()) != t.q)
      throw InvalidInput("gh_to_torus: coordinate arity mismatch");
    std::vector<double> p(static_cast<std::size_t>(t.q));
    for (int k = 0; k < t.q; ++k)
      p[static_cast<std::size_t>(k)] = static_cast<double>(mod_pos(c[static_cast<std::size_t>(k)], axis_mod[static_cast<std::size_t>(k)])) /
                                       static_cast<double>(axis_mod[static_cast<std::size_t>(k)]);
    pts[static_cast<std::size_t>(i)] = std::move(p);
  }

  const double diam = static_cast<double>(x.diameter());
  const GroupHandle& g = x.group();

  // Distortion over all vertex pairs; graph distances via the translation
  // trick, torus distances via the quotient norm.
  const int threads = std::max(1, caps.threads);
  std::vector<double> partial(static_cast<std::size_t>(threads), 0.0);
  auto run = [&](int tid) {
    double local = 0;
    for (std::int64_t i = tid; i < n; i += threads) {
      const Element gi = g->inv(x.vertices()[static_cast<std::size_t>(i)]);
      for (std::int64_t j = i + 1; j < n; ++j) {
        const double dgraph =
            static_cast<double>(x.dist_by_index(
                x.vertex_index(g->mul(gi, x.vertices()[static_cast<std::size_t>(j)])))) /
            diam;
        const double dtorus = t.quotient(pts[static_cast<std::size_t>(i)], pts[static_cast<std::size_t>(j)]);
        local = std::max(local, std::abs(dgraph - dtorus));
      }
    }
    partial[static_cast<std::size_t>(tid)] = local;
  };
  if (threads == 1) {
    run(0);
  } else {
    std::vector<std::future<void>> fs;
    for (int tid = 0; tid < threads; ++tid) fs.push_back(std::async(std::launch::async, run, tid));
    for (auto& f : fs) f.get();
  }
  double distortion = 0;
  for (double v : partial) distortion = std::max(distortion, v);

  GhBounds out;
  out.distortion = distortion;
  out.discretization = t.covering_radius(axis_mod);
  out.upper = distortion / 2.0 + out.discretization;

  // Heuristic lower bound from diameters and distance histograms over the
  // image grid.
  std::vector<double> all_x, all_y;
  all_x.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  all_y.reserve(all_x.capacity());
  double dx_max = 0, dy_max = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    const Element gi = g->inv(x.vertices()[static_cast<std::size_t>(i)]);
    for (std::int64_t j = i + 1; j < n; ++j) {
      const double dgraph =
          static_cast<double>(x.dist_by_index(
              x.vertex_index(g->mul(gi, x.vertices()[static_cast<std::size_t>(j)])))) /
          diam;
      const double dtorus = t.quotient(pts[static_cast<std::size_t>(i)], pts[static_cast<std::size_t>(j)]);
      all_x.push_back(dgraph);
      all_y.push_back(dtorus);
      dx_max = std::max(dx_max, dgraph);
      dy_max = std::max(dy_max, dtorus);
    }
  }
  double hist = 0;
  if (!all_x.empty()) histogram_lower(all_x, all_y, std::max(dx_max, dy_max), &hist);
  out.lower = std::max(std::abs(dx_max - dy_max) / 2.0, hist);
  check_property(out.lower <= out.upper + kFloatSlack, "gh_to_torus: lower > upper");

  out.upper = rounded(out.upper);
  out.lower = rounded(out.lower);
  out.distortion = rounded(out.distortion);
  out.discretization = rounded(out.discretization);
  return out;
}

Report norm_extract(const ElementSet& s, const std::vector<std::vector<std::int64_t>>& directions,
                    const std::vector<int>& scales, const Caps& caps) {
  const GroupHandle& g = s.group();
  if (g->kind() != GroupKind::FreeAbelian)
    throw InvalidInput("norm_extract: ambient group must be free-abelian");
  if (!s.same_elements(inverse_set(s)))
    throw InvalidInput("norm_extract: S must be symmetric");
  if (scales.empty() || directions.empty())
    throw InvalidInput("norm_extract: need directions and scales");
  for (std::size_t i = 1; i < scales.size(); ++i)
    if (scales[i] <= scales[i - 1]) throw InvalidInput("norm_extract: scales must increase");

  const int d = static_cast<int>(g->spec().degree);
  // Generator radius for the discretization error bound 2r/k.
  std::int64_t gen_radius = 1;
  for (const auto& e : s.elements())
    for (auto c : e.lanes) gen_radius = std::max(gen_radius, std::abs(c));

  auto dist_to = [&](const std::vector<std::int64_t>& vec, std::int64_t k) {
    Element target;
    target.lanes.resize(static_cast<std::size_t>(d), 0);
    for (int i = 0; i < d && i < static_cast<int>(vec.size()); ++i)
      target.lanes[static_cast<std::size_t>(i)] = vec[static_cast<std::size_t>(i)] * k;
    return word_distance(s, g->identity(), target, caps);
  };

  Report dirs = Report::array();
  std::vector<Rational> final_est;
  std::vector<double> final_d;
  bool homogeneous_ok = true;
  const double tol_base = 1e-6;
  for (const auto& v : directions) {
    if (static_cast<int>(v.size()) != d)
      throw InvalidInput("norm_extract: direction arity mismatch");
    Report per_scale = Report::array();
    std::optional<Rational> prev;
    Rational last(0);
    for (std::size_t si = 0; si < scales.size(); ++si) {
      const std::int64_t k = scales[si];
      const std::int64_t dist = dist_to(v, k);
      Rational est(dist, k);
      Report row = Report::array();
      row.push_back(k);
      row.push_back(dist);
      row.push_back(rational_json(est));
      row.push_back(prev ? Report(rounded(std::abs(static_cast<double>(est - *prev))))
                         : Report(nullptr));
      if (prev) {
        const double tol = tol_base + 2.0 * static_cast<double>(gen_radius) /
                                          static_cast<double>(scales[si - 1]);
        if (std::abs(static_cast<double>(est - *prev)) > tol) homogeneous_ok = false;
      }
      per_scale.push_back(std::move(row));
      prev = est;
      last = est;
    }
    Report dj;
    dj["direction"] = v;
    Report t;
    t["columns"] = {"scale", "distance", "estimate", "delta"};
    t["rows"] = std::move(per_scale);
    dj["table"] = std::move(t);
    dj["estimate"] = rational_json(last);
    dirs.push_back(std::move(dj));
    final_est.push_back(last);
    final_d.push_back(static_cast<double>(last));
  }

  // Convexity of the final estimates: ||v+w|| <= ||v|| + ||w|| + tol at the
  // largest scale.
  const std::int64_t kmax = scales.back();
  const double tol = tol_base + 2.0 * static_cast<double>(gen_radius) / static_cast<double>(kmax);
  bool convex_ok = true;
  for (std::size_t i = 0; i < directions.size() && convex_ok; ++i)
    for (std::size_t j = i; j < directions.size() && convex_ok; ++j) {
      std::vector<std::int64_t> sum(directions[i]);
      for (std::size_t c = 0; c < sum.size(); ++c) sum[c] += directions[j][c];
      if (std::all_of(sum.begin(), sum.end(), [](std::int64_t z) { return z == 0; })) continue;
      const Rational est_sum(dist_to(sum, kmax), kmax);
      convex_ok = static_cast<double>(est_sum) <=
                  static_cast<double>(final_est[i] + final_est[j]) + tol;
    }

  // Best p-norm fit to the final estimates.
  auto pnorm = [&](const std::vector<std::int64_t>& v, int p) {
    double acc = 0;
    for (auto c : v) {
      const double a = std::abs(static_cast<double>(c));
      if (p == 1) acc += a;
      else if (p == 2) acc += a * a;
      else acc = std::max(acc, a);
    }
    return p == 2 ? std::sqrt(acc) : acc;
  };
  const char* names[] = {"l1", "l2", "linf"};
  const int ps[] = {1, 2, 0};
  double best_err = std::numeric_limits<double>::infinity();
  std::string fitted = "l1";
  for (int c = 0; c < 3; ++c) {
    double err = 0;
    for (std::size_t i = 0; i < directions.size(); ++i) {
      const double e = final_d[i] - pnorm(directions[i], ps[c] == 0 ? 99 : ps[c]);
      err += e * e;
    }
    if (err < best_err - 1e-15) {
      best_err = err;
      fitted = names[c];
    }
  }

  Report r;
  r["group"] = g->name();
  r["generator_radius"] = gen_radius;
  r["directions"] = std::move(dirs);
  r["homogeneity_ok"] = homogeneous_ok;
  r["convexity_ok"] = convex_ok;
  r["fitted_norm"] = fitted;
  r["fit_error"] = rounded(best_err);
  return r;
}

namespace {

GroupSpec heis_mod_spec(std::int64_t n) {
  // Full unitriangular 3x3 group over Z/n, the honest finite Heisenberg
  // quotient (x, y, z all mod n).
  return GroupSpec::matrix_mod_q(3, n,
                                 {{1, 1, 0, 0, 1, 0, 0, 0, 1}, {1, 0, 0, 0, 1, 1, 0, 0, 1}});
}

}  // namespace

Report torus_limit_report(const std::string& family, const std::vector<std::int64_t>& sizes,
                          const Caps& caps) {
  Report rows = Report::array();
  std::string fitted_norm;

  if (family == "cycles" || family == "grids") {
    // Fit the limit norm from the corresponding infinite lattice.
    const int d = family == "cycles" ? 1 : 2;
    GroupHandle z = make_group(GroupSpec::free_abelian(d), caps);
    std::vector<Element> moves;
    for (int i = 0; i < d; ++i) {
      Element e;
      e.lanes.assign(static_cast<std::size_t>(d), 0);
      e.lanes[static_cast<std::size_t>(i)] = 1;
      moves.push_back(e);
    }
    ElementSet s = symmetrize(ElementSet(z, moves));
    std::vector<std::vector<std::int64_t>> dirs;
    if (d == 1) {
      dirs = {{1}, {2}};
    } else {
      dirs = {{1, 0}, {0, 1}, {1, 1}, {2, 1}, {1, -1}};
    }
    Report nx = norm_extract(s, dirs, {4, 8, 16}, caps);
    fitted_norm = nx["fitted_norm"].get<std::string>();
  }

  for (auto n : sizes) {
    if (n < 2) throw InvalidInput("torus_limit_report: sizes must be >= 2");
    Report row;
    row["n"] = n;
    if (family == "cycles") {
      GroupHandle g = make_group(GroupSpec::cyclic(n), caps);
      Element one;
      one.lanes = {1};
      CayleyGraph x(set_of(g, {one, g->inv(one)}), caps);
      RescaledSpace rs = rescaled_space(x, caps);
      row["condition"] = rs.condition;
      row["covering"] = covering_table(rs.space);
      TorusModel t = TorusModel::from_fit(1, fitted_norm);
      GhBounds gh = gh_to_torus(
          x, t, {n}, [](const Element& e) { return std::vector<std::int64_t>{e.lanes[0]}; },
          caps);
      row["gh_upper"] = gh.upper;
      row["gh_lower"] = gh.lower;
      row["cycle_bound_ok"] = gh.upper <= 2.0 / static_cast<double>(n);
    } else if (family == "grids") {
      GroupHandle g = make_group(
          GroupSpec::direct_product({GroupSpec::cyclic(n), GroupSpec::cyclic(n)}), caps);
      Element e1, e2;
      e1.lanes = {1, 0};
      e2.lanes = {0, 1};
      CayleyGraph x(set_of(g, {e1, g->inv(e1), e2, g->inv(e2)}), caps);
      RescaledSpace rs = rescaled_space(x, caps);
      row["condition"] = rs.condition;
      row["covering"] = covering_table(rs.space);
      TorusModel t = TorusModel::from_fit(2, fitted_norm);
      GhBounds gh = gh_to_torus(
          x, t, {n, n},
          [](const Element& e) { return std::vector<std::int64_t>{e.lanes[0], e.lanes[1]}; },
          caps);
      row["gh_upper"] = gh.upper;
      row["gh_lower"] = gh.lower;
    } else if (family == "heisenberg") {
      GroupHandle g = make_group(heis_mod_spec(n), caps);
      ElementSet s(g, g->declared_generators());
      CayleyGraph x(symmetrize(s), caps);
      RescaledSpace rs = rescaled_space(x, caps);
      row["condition"] = rs.condition;
      row["covering"] = covering_table(rs.space, 5);
      // Covering-dimension evidence: slope of log N(eps) vs log(1/eps).
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      int m = 0;
      Rational eps(1);
      for (int k = 1; k <= 4; ++k) {
        eps /= 2;
        const double lx = std::log(std::pow(2.0, k));
        const double ly = std::log(static_cast<double>(covering_number(rs.space, eps)));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++m;
      }
      row["covering_dimension_estimate"] = rounded((m * sxy - sx * sy) / (m * sxx - sx * sx));
    } else {
      throw InvalidInput("torus_limit_report: family must be cycles|grids|heisenberg");
    }
    rows.push_back(std::move(row));
  }

  Report r;
  r["family"] = family;
  if (!fitted_norm.empty()) r["fitted_norm"] = fitted_norm;
  r["rows"] = std::move(rows);
  return r;
}

}  // namespace apx

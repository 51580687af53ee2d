#include "apx/fixtures.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "apx/cayley.hpp"
#include "apx/errors.hpp"
#include "apx/metric.hpp"
#include "apx/progression.hpp"
#include "apx/setcalc.hpp"

namespace apx {

namespace {

ElementSet heisenberg_ball_generators(const GroupHandle& g) {
  Element x, y;
  x.wide = {Integer(1), Integer(0), Integer(0)};
  y.wide = {Integer(0), Integer(1), Integer(0)};
  return symmetrize(ElementSet(g, {x, y}));
}

}  // namespace

Fixtures Fixtures::compute(const Caps& caps) {
  Fixtures f;
  Report& d = f.data_;
  d["version"] = kVersion;

  // Heisenberg ball growth |S^n| ~ n^4: exact table and fitted slope.
  {
    GroupHandle heis = make_group(GroupSpec::heisenberg(), caps);
    ElementSet s = heisenberg_ball_generators(heis);
    GrowthProfile gp = growth_profile(s, 16, {8, 16}, caps);
    Report sizes = Report::array();
    for (const auto& v : gp.sizes) sizes.push_back(integer_json(v));
    Report entry;
    entry["sizes"] = std::move(sizes);
    entry["window"] = {gp.window.first, gp.window.second};
    entry["slope"] = gp.slope;
    d["heisenberg_growth"] = std::move(entry);
  }

  // Covering constants of Heisenberg nilprogressions P(X,Y;L,L).
  {
    GroupHandle heis = make_group(GroupSpec::heisenberg(), caps);
    Element x, y;
    x.wide = {Integer(1), Integer(0), Integer(0)};
    y.wide = {Integer(0), Integer(1), Integer(0)};
    Report rows = Report::array();
    for (std::int64_t l : {2, 3, 4}) {
      ProgressionSpec ps;
      ps.group = heis;
      ps.generators = {x, y};
      ps.lengths = {l, l};
      Report check = nilprogression_check(ps, caps);
      rows.push_back({l, check["size"], check["step"], check["k_greedy"]});
    }
    Report t;
    t["columns"] = {"L", "size", "step", "k_greedy"};
    t["rows"] = std::move(rows);
    d["nilprog_heisenberg"] = std::move(t);
  }

  // Covering constants of S^m at every scale: free-abelian(2) lattice and
  // the Heisenberg ball generators.
  {
    GroupHandle z2 = make_group(GroupSpec::free_abelian(2), caps);
    Element e1, e2;
    e1.lanes = {1, 0};
    e2.lanes = {0, 1};
    ElementSet s = symmetrize(ElementSet(z2, {e1, e2}));
    d["all_scales_z2"] = all_scales_report(s, {2, 12}, caps)["table"];

    GroupHandle heis = make_group(GroupSpec::heisenberg(), caps);
    d["all_scales_heisenberg"] =
        all_scales_report(heisenberg_ball_generators(heis), {2, 6}, caps)["table"];
  }

  // PSL2 diameters under the elementary generators.
  d["babai_psl2"] = babai_report({3, 5, 7, 11, 13}, caps)["table"];

  // Scaling-limit panels.
  d["limit_cycles"] = torus_limit_report("cycles", {16, 64, 256}, caps);
  d["limit_grids"] = torus_limit_report("grids", {8, 16, 32, 64}, caps);
  d["limit_heisenberg"] = torus_limit_report("heisenberg", {3, 4, 5, 6}, caps);

  return f;
}

Fixtures Fixtures::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("fixtures: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  Fixtures f;
  f.data_ = Report::parse(buf.str());
  if (!f.data_.contains("version") || f.data_["version"].get<int>() != kVersion)
    throw InvalidInput("fixtures: version mismatch in " + path);
  return f;
}

std::string Fixtures::serialize() const { return render_json(data_); }

void Fixtures::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidInput("fixtures: cannot write " + path);
  out << serialize();
}

std::string default_fixtures_path() {
  if (const char* env = std::getenv("APXGRP_FIXTURES")) return env;
  return "fixtures/regression.json";
}

}  // namespace apx

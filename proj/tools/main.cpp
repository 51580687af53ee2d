#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "apx/batteries.hpp"
#include "apx/cayley.hpp"
#include "apx/errors.hpp"
#include "apx/fixtures.hpp"
#include "apx/metric.hpp"
#include "apx/progression.hpp"
#include "apx/setcalc.hpp"
#include "apx/structure.hpp"

namespace {

using namespace apx;
using nlohmann::json;

struct GlobalOpts {
  std::uint64_t seed = 0;
  std::string format = "json";
  std::int64_t cap_elements = 0;
  int threads = 0;
  std::string fixtures;
};

std::string slurp_arg(const std::string& text) {
  if (!text.empty() && text[0] == '@') {
    std::ifstream in(text.substr(1));
    if (!in) throw InvalidInput("cannot open " + text.substr(1));
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  }
  return text;
}

json parse_json_arg(const std::string& text) {
  try {
    return json::parse(slurp_arg(text));
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("bad JSON argument: ") + e.what());
  }
}

GroupHandle group_from_arg(const std::string& text) {
  return make_group(GroupSpec::parse(slurp_arg(text)));
}

ElementSet set_from_arg(const GroupHandle& g, const std::string& text) {
  return ElementSet::from_json(g, parse_json_arg(text));
}

Rational rational_from_arg(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return Rational(Integer(text));
    return Rational(Integer(text.substr(0, slash)), Integer(text.substr(slash + 1)));
  } catch (const std::exception&) {
    throw InvalidInput("bad rational: " + text + " (use p or p/q)");
  }
}

void emit(const Report& r, const GlobalOpts& opts) {
  std::cout << (opts.format == "csv" ? render_csv(r) : render_json(r));
}

Report cover_witness_json(const CoverWitness& w) {
  Report j;
  j["covered"] = w.covered_desc;
  j["translates_of"] = w.translate_desc;
  j["X_size"] = w.x.size();
  j["X"] = w.x.to_json();
  return j;
}

int run_set_command(const GlobalOpts& opts, const std::string& op, const std::string& group_arg,
                    const std::string& a_arg, const std::string& b_arg,
                    const std::string& c_arg, int n, bool exact,
                    const std::string& g_arg, std::int64_t p, int minimizer_size) {
  if (op == "sumproduct") {
    std::vector<std::int64_t> residues =
        parse_json_arg(a_arg).get<std::vector<std::int64_t>>();
    std::optional<int> msize;
    if (minimizer_size > 0) msize = minimizer_size;
    emit(sumproduct_stats(p, residues, msize), opts);
    return 0;
  }

  GroupHandle g = group_from_arg(group_arg);
  ElementSet a = set_from_arg(g, a_arg);
  Report r;
  if (op == "product") {
    ElementSet b = set_from_arg(g, b_arg);
    ElementSet ab = product_set(a, b);
    r["size"] = ab.size();
    r["elements"] = ab.to_json();
  } else if (op == "power") {
    ElementSet an = power_set(a, n);
    r["n"] = n;
    r["size"] = an.size();
    r["elements"] = an.to_json();
  } else if (op == "symmetrize") {
    ElementSet sym = symmetrize(a);
    r["size"] = sym.size();
    r["elements"] = sym.to_json();
  } else if (op == "doubling") {
    r = doubling_report(a, n > 0 ? n : 5);
  } else if (op == "ruzsa") {
    RuzsaValue v = ruzsa_distance(a, set_from_arg(g, b_arg));
    r["squared_ratio"] = rational_json(v.squared_ratio());
    r["distance"] = rounded(v.log_value());
  } else if (op == "triangle") {
    Rational slack = triangle_slack(a, set_from_arg(g, b_arg), set_from_arg(g, c_arg));
    r["slack_squared"] = rational_json(slack);
    r["holds"] = slack >= 1;
  } else if (op == "cover") {
    CoverWitness w = ruzsa_cover(a, set_from_arg(g, b_arg));
    r = cover_witness_json(w);
  } else if (op == "approx-constant") {
    ApproxConstant ac = approx_constant(a, exact);
    r["k_greedy"] = ac.k_greedy;
    if (ac.k_exact) r["k_exact"] = *ac.k_exact;
    r["witness"] = cover_witness_json(ac.witness);
  } else if (op == "lemma210") {
    CoverWitness w = lemma210_witness(a);
    r = cover_witness_json(w);
  } else if (op == "lemma211") {
    ElementSet b = set_from_arg(g, b_arg);
    ElementSet xa = approx_constant(a, false).witness.x;
    ElementSet yb = approx_constant(b, false).witness.x;
    CoverWitness w = lemma211_witness(a, xa, b, yb);
    r = cover_witness_json(w);
    r["X_A_size"] = xa.size();
    r["Y_B_size"] = yb.size();
  } else if (op == "escape") {
    Element target = element_from_json(g, parse_json_arg(g_arg));
    auto norm = escape_norm(a, target);
    if (norm)
      r["norm"] = rational_json(*norm);
    else
      r["norm"] = "infinite";
  } else {
    throw InvalidInput("unknown set op: " + op);
  }
  emit(r, opts);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"desk-scale toolkit for product sets, approximate groups and "
               "Cayley-graph geometry"};
  app.require_subcommand(1);

  GlobalOpts opts;
  app.add_option("--seed", opts.seed, "seed for randomized sweeps");
  app.add_option("--format", opts.format, "output format: json|csv")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--cap-elements", opts.cap_elements, "element cap for sets/BFS/closures");
  app.add_option("--threads", opts.threads, "worker threads (results unchanged)");
  app.add_option("--fixtures", opts.fixtures, "path to the frozen regression fixtures");

  // group
  auto* cmd_group = app.add_subcommand("group", "group info, closure, element order");
  std::string g_spec, g_closure, g_order_of;
  cmd_group->add_option("--spec", g_spec, "group spec (shorthand or JSON or @file)")
      ->required();
  cmd_group->add_option("--closure", g_closure, "set literal: subgroup closure");
  cmd_group->add_option("--element-order", g_order_of, "element literal: its order");

  // set
  auto* cmd_set = app.add_subcommand("set", "product-set calculus operations");
  std::string s_op, s_group, s_a, s_b, s_c, s_g;
  int s_n = 0, s_minimizer = 0;
  std::int64_t s_p = 0;
  bool s_exact = false;
  cmd_set->add_option("--op", s_op,
                      "product|power|symmetrize|doubling|ruzsa|triangle|cover|"
                      "approx-constant|lemma210|lemma211|escape|sumproduct")
      ->required();
  cmd_set->add_option("--group", s_group, "ambient group spec");
  cmd_set->add_option("--a", s_a, "set literal A")->required();
  cmd_set->add_option("--b", s_b, "set literal B");
  cmd_set->add_option("--c", s_c, "set literal C");
  cmd_set->add_option("--n", s_n, "power / table horizon");
  cmd_set->add_flag("--exact", s_exact, "branch-and-bound exact cover constant");
  cmd_set->add_option("--g", s_g, "element literal for escape norm");
  cmd_set->add_option("--p", s_p, "prime for sumproduct");
  cmd_set->add_option("--minimizer-size", s_minimizer, "exhaustive sumproduct minimizer size");

  // verify
  auto* cmd_verify = app.add_subcommand("verify", "lemma verification batteries");
  std::string v_battery;
  int v_max_order = 60, v_instances = 1000;
  cmd_verify
      ->add_option("--battery", v_battery,
                   "unit-doubling|freiman|hamidoune|schreier|dense-generation|strong-approx")
      ->required();
  cmd_verify->add_option("--max-order", v_max_order, "dense-generation: largest cyclic order");
  cmd_verify->add_option("--instances", v_instances, "schreier: valid instances to collect");

  // growth
  auto* cmd_growth = app.add_subcommand("growth", "growth profile of a generating set");
  std::string gr_group, gr_set;
  int gr_nmax = 8;
  std::string gr_window;
  cmd_growth->add_option("--group", gr_group)->required();
  cmd_growth->add_option("--set", gr_set, "generating set literal")->required();
  cmd_growth->add_option("--n-max", gr_nmax);
  cmd_growth->add_option("--window", gr_window, "fit window a,b (default upper half)");

  // nilprog
  auto* cmd_nilprog = app.add_subcommand("nilprog", "nilprogression analysis");
  std::string np_spec;
  int np_growth = 3;
  cmd_nilprog->add_option("--spec", np_spec, "progression spec JSON or @file")->required();
  cmd_nilprog->add_option("--growth-n", np_growth, "powers of P to tabulate");

  // diameter
  auto* cmd_diam = app.add_subcommand("diameter", "Cayley ball layers and diameter");
  std::string d_group, d_set;
  cmd_diam->add_option("--group", d_group)->required();
  cmd_diam->add_option("--set", d_set, "symmetric generating set literal")->required();

  // spectral
  auto* cmd_spec = app.add_subcommand("spectral", "normalized Laplacian gap");
  std::string sp_group, sp_set;
  cmd_spec->add_option("--group", sp_group)->required();
  cmd_spec->add_option("--set", sp_set)->required();

  // babai
  auto* cmd_babai = app.add_subcommand("babai", "PSL2 diameter table");
  std::vector<std::int64_t> b_primes{3, 5, 7, 11};
  cmd_babai->add_option("--primes", b_primes, "odd primes <= 101");

  // limit
  auto* cmd_limit = app.add_subcommand("limit", "scaling limits and norm extraction");
  std::string l_family, l_moves;
  std::vector<std::int64_t> l_sizes;
  std::vector<int> l_scales{4, 8, 16};
  cmd_limit->add_option("--family", l_family, "cycles|grids|heisenberg");
  cmd_limit->add_option("--sizes", l_sizes, "instance sizes");
  cmd_limit->add_option("--norm-moves", l_moves, "axis|king: extract the limit norm on Z^2");
  cmd_limit->add_option("--scales", l_scales, "norm extraction scales");

  // fixtures
  auto* cmd_fix = app.add_subcommand("fixtures", "frozen regression fixtures");
  bool f_refresh = false;
  cmd_fix->add_flag("--refresh", f_refresh, "recompute and rewrite the fixtures file");

  // Global flags may appear after the subcommand.
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);

    if (opts.cap_elements > 0) global_caps().elements = opts.cap_elements;
    if (opts.threads > 0) global_caps().threads = opts.threads;
    const std::string fixtures_path =
        opts.fixtures.empty() ? default_fixtures_path() : opts.fixtures;

    if (cmd_group->parsed()) {
      GroupHandle g = group_from_arg(g_spec);
      Report r;
      r["name"] = g->name();
      r["spec"] = g->spec().to_json();
      r["finite"] = g->finite();
      if (auto o = g->order()) r["order"] = integer_json(*o);
      r["abelian"] = g->abelian();
      if (!g_closure.empty()) {
        ElementSet c = subgroup_closure(set_from_arg(g, g_closure));
        Report cj;
        cj["size"] = c.size();
        cj["elements"] = c.to_json();
        r["closure"] = std::move(cj);
      }
      if (!g_order_of.empty()) {
        auto o = element_order(g, element_from_json(g, parse_json_arg(g_order_of)));
        r["element_order"] = o ? integer_json(*o) : Report("infinite");
      }
      emit(r, opts);
      return 0;
    }

    if (cmd_set->parsed())
      return run_set_command(opts, s_op, s_group, s_a, s_b, s_c, s_n, s_exact, s_g, s_p,
                             s_minimizer);

    if (cmd_verify->parsed()) {
      Report r;
      if (v_battery == "unit-doubling")
        r = batteries::unit_doubling_sweep(batteries::order10_family());
      else if (v_battery == "freiman")
        r = batteries::freiman_sweep(batteries::order10_family());
      else if (v_battery == "hamidoune")
        r = batteries::hamidoune_sweep(opts.seed);
      else if (v_battery == "schreier")
        r = batteries::schreier_battery(opts.seed, v_instances);
      else if (v_battery == "dense-generation")
        r = batteries::dense_generation_battery(opts.seed, v_max_order);
      else if (v_battery == "strong-approx")
        r = batteries::strong_approx_battery();
      else
        throw InvalidInput("unknown battery: " + v_battery);
      emit(r, opts);
      return r["violations"].empty() ? 0 : 1;
    }

    if (cmd_growth->parsed()) {
      GroupHandle g = group_from_arg(gr_group);
      ElementSet s = set_from_arg(g, gr_set);
      std::pair<int, int> window{std::max(1, gr_nmax / 2), gr_nmax};
      if (!gr_window.empty()) {
        const auto comma = gr_window.find(',');
        if (comma == std::string::npos) throw InvalidInput("--window needs a,b");
        window = {std::stoi(gr_window.substr(0, comma)),
                  std::stoi(gr_window.substr(comma + 1))};
      }
      GrowthProfile gp = growth_profile(s, gr_nmax, window);
      Report r;
      r["group"] = g->name();
      Report rows = Report::array();
      for (std::size_t i = 0; i < gp.sizes.size(); ++i)
        rows.push_back({static_cast<std::int64_t>(i + 1), integer_json(gp.sizes[i])});
      Report t;
      t["columns"] = {"n", "size"};
      t["rows"] = std::move(rows);
      r["table"] = std::move(t);
      r["window"] = {gp.window.first, gp.window.second};
      r["slope"] = gp.slope;
      emit(r, opts);
      return 0;
    }

    if (cmd_nilprog->parsed()) {
      ProgressionSpec ps = ProgressionSpec::from_json(parse_json_arg(np_spec));
      Report r = nilprogression_check(ps);
      ElementSet p = enumerate_progression(ps);
      GrowthProfile gp = growth_profile(p, std::max(1, np_growth),
                                        {1, std::max(1, np_growth)});
      Report rows = Report::array();
      for (std::size_t i = 0; i < gp.sizes.size(); ++i)
        rows.push_back({static_cast<std::int64_t>(i + 1), integer_json(gp.sizes[i])});
      Report t;
      t["columns"] = {"n", "size"};
      t["rows"] = std::move(rows);
      r["table"] = std::move(t);
      emit(r, opts);
      return 0;
    }

    if (cmd_diam->parsed()) {
      GroupHandle g = group_from_arg(d_group);
      CayleyGraph x(set_from_arg(g, d_set));
      emit(ball_diameter(x), opts);
      return 0;
    }

    if (cmd_spec->parsed()) {
      GroupHandle g = group_from_arg(sp_group);
      CayleyGraph x(set_from_arg(g, sp_set));
      const double lambda1 = spectral_gap(x);
      Report r;
      r["group"] = g->name();
      r["order"] = x.order();
      r["diameter"] = x.diameter();
      r["identity_in_S"] = x.identity_in_s();
      r["lambda1"] = rounded(lambda1);
      const double bound = 1.0 / (8.0 * x.diameter() * x.diameter());
      r["diameter_bound"] = rounded(bound);
      r["bound_ok"] = lambda1 >= bound - 1e-9;
      emit(r, opts);
      return 0;
    }

    if (cmd_babai->parsed()) {
      emit(babai_report(b_primes), opts);
      return 0;
    }

    if (cmd_limit->parsed()) {
      if (!l_moves.empty()) {
        GroupHandle z2 = make_group(GroupSpec::free_abelian(2));
        std::vector<Element> moves;
        if (l_moves == "axis") {
          Element e1, e2;
          e1.lanes = {1, 0};
          e2.lanes = {0, 1};
          moves = {e1, e2};
        } else if (l_moves == "king") {
          for (int dx = -1; dx <= 1; ++dx)
            for (int dy = -1; dy <= 1; ++dy) {
              if (dx == 0 && dy == 0) continue;
              Element e;
              e.lanes = {dx, dy};
              moves.push_back(e);
            }
        } else {
          throw InvalidInput("--norm-moves must be axis or king");
        }
        ElementSet s = symmetrize(ElementSet(z2, moves));
        std::vector<std::vector<std::int64_t>> dirs = {
            {1, 0}, {0, 1}, {1, 1}, {2, 1}, {3, 2}, {1, -1}};
        emit(norm_extract(s, dirs, l_scales), opts);
        return 0;
      }
      if (l_family.empty()) throw InvalidInput("limit: need --family or --norm-moves");
      if (l_sizes.empty()) {
        Report r;
        r["family"] = l_family;
        r["rows"] = Report::array();
        emit(r, opts);
        return 0;
      }
      emit(torus_limit_report(l_family, l_sizes), opts);
      return 0;
    }

    if (cmd_fix->parsed()) {
      if (f_refresh) {
        Fixtures f = Fixtures::compute();
        f.save(fixtures_path);
        Report r;
        r["refreshed"] = fixtures_path;
        r["bytes"] = static_cast<std::int64_t>(f.serialize().size());
        emit(r, opts);
        return 0;
      }
      Fixtures on_disk = Fixtures::load(fixtures_path);
      Fixtures fresh = Fixtures::compute();
      const bool ok = fresh.matches(on_disk);
      Report r;
      r["path"] = fixtures_path;
      r["match"] = ok;
      emit(r, opts);
      return ok ? 0 : 1;
    }

    throw InvalidInput("no subcommand");
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return 0;  // --help
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const PropertyViolation& e) {
    Report r;
    r["error"] = "property-violation";
    r["what"] = e.what();
    std::cout << render_json(r);
    return 1;
  } catch (const CapExceeded& e) {
    std::cerr << "cap exceeded: " << e.what() << "\n";
    return 3;
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

// loopsoup: command-line front end for the loop-soup simulator.
#include <omp.h>

#include <CLI11.hpp>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "loopsoup/experiments.hpp"
#include "loopsoup/greens.hpp"
#include "loopsoup/io.hpp"
#include "loopsoup/loopmeasure.hpp"
#include "loopsoup/percolation.hpp"
#include "loopsoup/soup.hpp"

using namespace loopsoup;
using nlohmann::json;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kNumerical = 2, kVerification = 3 };

struct Global {
  int dim = 3;
  double alpha = 0.1;
  int lmax = 10000;
  uint64_t seed = 1;
  uint64_t samples = 100000;
  int threads = 0;
  std::string out;
  std::string format;  // empty: csv for scans, json otherwise
};

Point parse_point(const std::string& s, int d) {
  Point p{};
  std::stringstream ss(s);
  std::string tok;
  int i = 0;
  while (std::getline(ss, tok, ',')) {
    if (i >= d) throw InvalidArgument("point '" + s + "' has more than " + std::to_string(d) + " coordinates");
    p[i++] = std::stoi(tok);
  }
  return p;
}

std::vector<Point> parse_points(const std::string& s, int d) {
  std::vector<Point> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ';')) {
    if (!tok.empty()) out.push_back(parse_point(tok, d));
  }
  return out;
}

json global_json(const Global& g) {
  return {{"dim", g.dim},     {"alpha", g.alpha},     {"lmax", g.lmax},
          {"seed", g.seed},   {"samples", g.samples}, {"threads", omp_get_max_threads()}};
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw InvalidArgument("cannot open output file " + path);
    }
  }
  std::ostream& os() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

void emit_json(const Global& g, const std::string& command, const json& params, const json& result) {
  json doc = {{"command", command}, {"version", version()}, {"global", global_json(g)}, {"params", params},
              {"result", result}};
  Output out(g.out);
  out.os() << doc.dump(2) << "\n";
}

void require_json(const Global& g, const std::string& command) {
  if (g.format == "csv") throw InvalidArgument(command + " only writes json");
}

LengthTable make_table(const Global& g) {
  LengthTable t = build_length_table(g.dim, g.lmax);
  for (const auto& w : t.warnings) std::cerr << "warning: " << w << "\n";
  return t;
}

void emit_scan(const Global& g, const std::string& command, const json& params, ScanResult r) {
  r.params.emplace_back("version", version());
  r.params.emplace_back("threads", std::to_string(omp_get_max_threads()));
  if (g.format != "json") {
    Output out(g.out);
    write_scan_csv(out.os(), r);
  } else {
    emit_json(g, command, params, to_json(r));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Loop-soup percolation on Z^d: simulation and verification"};
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  app.add_option("--dim", g.dim, "lattice dimension")->check(CLI::Range(1, kMaxDim));
  app.add_option("--alpha", g.alpha, "activity")->check(CLI::NonNegativeNumber);
  app.add_option("--lmax", g.lmax, "maximal loop length (even)");
  app.add_option("--seed", g.seed, "master seed");
  app.add_option("--samples", g.samples, "Monte Carlo samples");
  app.add_option("--threads", g.threads, "OpenMP threads (0: runtime default)");
  app.add_option("--out", g.out, "output path (default stdout)");
  app.add_option("--format", g.format, "output format (scans default to csv, other commands to json)")
      ->check(CLI::IsMember({"csv", "json"}));

  // green
  auto* green_cmd = app.add_subcommand("green", "lattice Green's function and C_d");
  std::vector<std::string> green_points;
  green_cmd->add_option("--point", green_points, "points 'x1,x2,...' (repeatable)");

  // capacity
  auto* cap_cmd = app.add_subcommand("capacity", "capacity and equilibrium measure of a finite set");
  std::string cap_set;
  int cap_ball = -1;
  cap_cmd->add_option("--set", cap_set, "points 'x1,x2;y1,y2;...'");
  cap_cmd->add_option("--ball", cap_ball, "use the ball B_r(0)");

  // table
  auto* table_cmd = app.add_subcommand("table", "return-probability table and per-vertex loop mass");
  double table_tol = 1e-4;
  table_cmd->add_option("--tolerance", table_tol, "warn if the tail bound exceeds this");

  // soup
  auto* soup_cmd = app.add_subcommand("soup", "sample a soup and dump it as JSON lines");
  int soup_window = 4;
  uint64_t soup_replica = 0;
  soup_cmd->add_option("--window", soup_window, "window radius");
  soup_cmd->add_option("--replica", soup_replica, "replica index");

  // one-arm
  auto* arm_cmd = app.add_subcommand("one-arm", "P(0 <-> dB_n) scan");
  std::vector<int> arm_n{4, 6, 8};
  uint64_t cap_samples = 100000;
  arm_cmd->add_option("--n", arm_n, "radii")->delimiter(',');
  arm_cmd->add_option("--capacity-samples", cap_samples, "clusters for the E[Cap] reference (0: skip)");

  // two-point
  auto* tp_cmd = app.add_subcommand("two-point", "P(0 <-> x) scan along e_1");
  std::vector<int> tp_x{2, 3, 4};
  tp_cmd->add_option("--x", tp_x, "distances")->delimiter(',');
  tp_cmd->add_option("--capacity-samples", cap_samples, "clusters for the E[Cap] reference (0: skip)");

  // cluster-capacity
  auto* cc_cmd = app.add_subcommand("cluster-capacity", "E[Cap(C_0 u {0})], optionally extrapolated to alpha -> 0");
  int cc_window = 16;
  std::vector<double> cc_alphas;
  int cc_degree = 2;
  uint64_t cc_one_loop = 0;
  cc_cmd->add_option("--window", cc_window, "boundary-touch radius");
  cc_cmd->add_option("--alphas", cc_alphas, "activities for the alpha -> 0 fit")->delimiter(',');
  cc_cmd->add_option("--degree", cc_degree, "polynomial degree of the fit");
  cc_cmd->add_option("--one-loop-samples", cc_one_loop, "single loops for the first-order coefficient");

  // lemma
  auto* lemma_cmd = app.add_subcommand("lemma", "loop-measure connection masses");
  std::string lemma_kind = "single_loop";
  std::vector<int> lemma_grid{10, 20, 40};
  int64_t kill_radius = 0;
  int far_x = 2, short_m = 2;
  lemma_cmd->add_option("--kind", lemma_kind, "single_loop | two_sets | far_connect | short_loops");
  lemma_cmd->add_option("--grid", lemma_grid, "n, |x| or m values")->delimiter(',');
  lemma_cmd->add_option("--kill-radius", kill_radius, "walk kill radius (0: 4x the largest scale)");
  lemma_cmd->add_option("--x", far_x, "far_connect: x = X e_1");
  lemma_cmd->add_option("--m", short_m, "short_loops: diameter cutoff");

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "Mecke and FKG suites");
  int verify_window = 2;
  uint64_t fkg_samples = 20000;
  verify_cmd->add_option("--window", verify_window, "Mecke window radius");
  verify_cmd->add_option("--fkg-samples", fkg_samples, "soups for the FKG suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }
  if (g.threads > 0) omp_set_num_threads(g.threads);

  try {
    if (*green_cmd) {
      const GreenTable green(g.dim);
      std::vector<Point> pts;
      for (const auto& s : green_points) pts.push_back(parse_point(s, g.dim));
      if (pts.empty()) pts = {Point{}, unit_vector(0)};
      if (g.format == "csv") {
        Output out(g.out);
        out.os() << "# version: " << version() << "\n# C_d=" << green_constant(g.dim) << "\npoint,G\n";
        for (const auto& p : pts) out.os() << '"' << to_string(p, g.dim) << "\"," << std::setprecision(15) << green(p) << "\n";
      } else {
        json vals = json::array();
        for (const auto& p : pts) vals.push_back({{"x", point_json(p, g.dim)}, {"G", green(p)}});
        emit_json(g, "green", {{"points", green_points}},
                  {{"C_d", green_constant(g.dim)}, {"G0", green.at_origin()}, {"values", vals}});
      }
    } else if (*cap_cmd) {
      require_json(g, "capacity");
      const GreenTable green(g.dim);
      std::vector<Point> set = cap_ball >= 0 ? ball_points(Box{Point{}, cap_ball}, g.dim) : parse_points(cap_set, g.dim);
      if (set.empty()) throw InvalidArgument("capacity: give --set or --ball");
      const CapacityResult c = capacity(green, set);
      json eq = json::array();
      for (std::size_t i = 0; i < c.set.size(); ++i) eq.push_back({{"x", point_json(c.set[i], g.dim)}, {"e", c.equilibrium[i]}});
      emit_json(g, "capacity", {{"set", cap_set}, {"ball", cap_ball}},
                {{"cap", c.cap}, {"residual", c.residual}, {"equilibrium", eq}});
    } else if (*table_cmd) {
      require_json(g, "table");
      const LengthTable t = build_length_table(g.dim, g.lmax, table_tol);
      json j = table_to_json(t);
      j["warnings"] = t.warnings;
      if (g.dim >= 3) {
        const GreenTable green(g.dim);
        j["log_G0"] = std::log(green.at_origin());
      }
      emit_json(g, "table", {{"tolerance", table_tol}}, j);
    } else if (*soup_cmd) {
      const LengthTable t = make_table(g);
      SoupParams sp;
      sp.alpha = g.alpha;
      sp.dim = g.dim;
      sp.window = Box{Point{}, soup_window};
      sp.table = &t;
      sp.seed = g.seed;
      sp.replica = soup_replica;
      const Soup soup = sample_soup(sp);
      const OriginCluster oc = origin_cluster(soup);
      json params = global_json(g);
      params["window"] = soup_window;
      params["replica"] = soup_replica;
      params["tail_bound"] = t.tail_bound;
      params["origin_cluster_size"] = oc.vertices.size();
      Output out(g.out);
      write_soup_jsonl(out.os(), soup, params);
    } else if (*arm_cmd || *tp_cmd) {
      const LengthTable t = make_table(g);
      const GreenTable green(g.dim);
      CampaignParams cp{g.dim, g.alpha, &t, &green, g.samples, g.seed};
      if (*arm_cmd) {
        emit_scan(g, "one-arm", {{"n", arm_n}, {"capacity_samples", cap_samples}}, one_arm_scan(cp, arm_n, cap_samples));
      } else {
        emit_scan(g, "two-point", {{"x", tp_x}, {"capacity_samples", cap_samples}}, two_point_scan(cp, tp_x, cap_samples));
      }
    } else if (*cc_cmd) {
      require_json(g, "cluster-capacity");
      const LengthTable t = make_table(g);
      const GreenTable green(g.dim);
      CampaignParams cp{g.dim, g.alpha, &t, &green, g.samples, g.seed};
      json result;
      if (cc_alphas.empty()) {
        result["estimate"] = to_json(expected_cluster_capacity(cp, cc_window));
      } else {
        result["alpha_limit"] = to_json(capacity_alpha_limit(cp, cc_alphas, cc_window, cc_degree));
      }
      result["cap0"] = 1.0 / green.at_origin();
      if (cc_one_loop > 0) result["one_loop_slope"] = to_json(one_loop_capacity_slope(t, green, cc_one_loop, g.seed));
      emit_json(g, "cluster-capacity", {{"window", cc_window}, {"alphas", cc_alphas}, {"degree", cc_degree}}, result);
    } else if (*lemma_cmd) {
      const LemmaKind kind = parse_lemma_kind(lemma_kind);
      const GreenTable green(g.dim);
      std::optional<LengthTable> t;
      LemmaParams lp;
      lp.dim = g.dim;
      lp.grid = lemma_grid;
      lp.samples = g.samples;
      lp.seed = g.seed;
      lp.kill_radius = kill_radius;
      lp.far_point = far_x;
      lp.short_m = short_m;
      lp.alpha = g.alpha;
      lp.green = &green;
      if (kind == LemmaKind::kShortLoops) {
        t = make_table(g);
        lp.table = &*t;
      }
      emit_scan(g, "lemma", {{"kind", lemma_kind}, {"grid", lemma_grid}, {"kill_radius", kill_radius}},
                lemma_scan(kind, lp));
    } else if (*verify_cmd) {
      require_json(g, "verify");
      const LengthTable t = make_table(g);
      MeckeParams mp;
      mp.alpha = g.alpha;
      mp.table = &t;
      mp.window_radius = verify_window;
      mp.samples = g.samples;
      mp.seed = g.seed;
      FkgParams fp;
      fp.alpha = g.alpha;
      fp.table = &t;
      fp.samples = fkg_samples;
      fp.seed = g.seed;
      const VerifyReport mecke = verify_mecke(mp);
      const VerifyReport fkg = verify_fkg(fp);
      emit_json(g, "verify", {{"window", verify_window}, {"fkg_samples", fkg_samples}},
                {{"tail_bound", t.tail_bound}, {"mecke", to_json(mecke)}, {"fkg", to_json(fkg)}});
      for (const auto* r : {&mecke, &fkg}) {
        for (const auto& c : r->checks) {
          std::cerr << (c.pass ? "PASS " : "FAIL ") << r->suite << '.' << c.name << "\n";
        }
      }
      if (!mecke.passed() || !fkg.passed()) return kVerification;
    }
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n" << app.help();
    return kUsage;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  }
  return kOk;
}

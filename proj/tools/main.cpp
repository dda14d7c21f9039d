// morseb: command line front end for the boundary geometry library.
// Every subcommand writes a CSV table plus a JSON summary into --out and
// returns 0 on success, 2 on a module error (recorded in error.json), and 3
// when the extend subcommand assembles a failure certificate.
#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "morseb/boundarymap.hpp"
#include "morseb/centers.hpp"
#include "morseb/contracting.hpp"
#include "morseb/crossratio.hpp"
#include "morseb/errors.hpp"
#include "morseb/extension.hpp"
#include "morseb/space.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace morseb;

namespace {

struct RunConfig {
  std::string space_path;
  unsigned seed = 1;
  std::string out = ".";
  int workers = 1;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_csv(const fs::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path);
  if (!out) throw config_error("cannot write " + path.string());
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw config_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

// Index-addressed fan-out; results land in caller-owned slots so the output
// order never depends on the worker count.
void parallel_for(int workers, std::size_t count, const std::function<void(std::size_t)>& fn) {
  const int w = std::max(1, workers);
  if (w == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_lock;
  auto body = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> hold(error_lock);
        if (!first_error) first_error = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < std::min<std::size_t>(w, count); ++t) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::unique_ptr<Space> load_space(const std::string& path) {
  if (path.empty()) return std::make_unique<SpikedPlane>();
  return space_from_config(path);
}

// Built-in map names, then config files: identity, swap, axis_swap,
// translation(tx,ty), or a path to a map config.
BoundaryMap make_map(const Space& X, const std::string& spec) {
  if (spec == "identity") return identity_map();
  if (spec == "swap") return swap_map();
  if (spec == "axis_swap") return induced_map(X, lattice_axis_swap());
  int tx = 0, ty = 0;
  if (std::sscanf(spec.c_str(), "translation(%d,%d)", &tx, &ty) == 2)
    return induced_map(X, lattice_translation(tx, ty));
  if (fs::exists(spec)) return map_from_config(X, spec);
  throw config_error("unknown map '" + spec + "' (expected identity, swap, axis_swap, "
                     "translation(tx,ty), or a config path)");
}

std::array<std::string, 3> point_cols(const SpacePoint& p) {
  if (const auto* q = std::get_if<PlanePoint>(&p)) return {num(q->x), num(q->y), num(0.0)};
  if (const auto* s = std::get_if<SpikePoint>(&p))
    return {num(double(s->m)), num(double(s->n)), num(s->t)};
  return {"", "", ""};
}

int foot_m(const BoundaryPoint& b) { return std::get<SpikeDirection>(b).m; }
int foot_n(const BoundaryPoint& b) { return std::get<SpikeDirection>(b).n; }

// ---------------------------------------------------------------------------

int cmd_contracting(const Space& X, const RunConfig& rc, int n_max, double resolution,
                    int brute_max, double window) {
  struct Row {
    double straight = 0, swapped = 0;
    double brute_straight = -1, brute_swapped = -1;
  };
  std::vector<Row> rows(n_max);
  parallel_for(rc.workers, rows.size(), [&](std::size_t i) {
    const int n = int(i) + 1;
    const Geodesic straight = X.bi_infinite_geodesic(make_direction(n, 0), make_direction(n, 1));
    const Geodesic swapped = X.bi_infinite_geodesic(make_direction(-n, 0), make_direction(n, 1));
    rows[i].straight = contracting_constant_analytic(X, straight);
    rows[i].swapped = contracting_constant_analytic(X, swapped);
    if (n <= brute_max) {
      rows[i].brute_straight = contracting_constant_bruteforce(X, straight, window, resolution);
      rows[i].brute_swapped = contracting_constant_bruteforce(X, swapped, window, resolution);
    }
  });

  std::vector<std::vector<std::string>> csv;
  double max_gap = 0;
  for (int i = 0; i < n_max; ++i) {
    const Row& r = rows[i];
    std::vector<std::string> line = {std::to_string(i + 1), num(r.straight), num(r.swapped)};
    if (r.brute_straight >= 0) {
      line.push_back(num(r.brute_straight));
      line.push_back(num(r.brute_swapped));
      max_gap = std::max({max_gap, std::abs(r.straight - r.brute_straight),
                          std::abs(r.swapped - r.brute_swapped)});
    } else {
      line.emplace_back();
      line.emplace_back();
    }
    csv.push_back(std::move(line));
  }
  write_csv(fs::path(rc.out) / "contracting.csv",
            {"n", "analytic_straight", "analytic_swapped", "brute_straight", "brute_swapped"},
            csv);
  write_json(fs::path(rc.out) / "contracting_summary.json",
             json{{"subcommand", "contracting"},
                  {"rows", n_max},
                  {"brute_rows", std::min(n_max, brute_max)},
                  {"resolution", resolution},
                  {"max_brute_gap", max_gap}});
  return 0;
}

int cmd_centers(const Space& X, const RunConfig& rc, int count, int window, double cap,
                double resolution, double horizon) {
  struct Row {
    std::array<std::array<int, 2>, 3> feet;
    double slim = 0, K_min = 0, ek_diameter = 0, gate_gap = 0;
  };
  std::vector<Row> rows(count);
  parallel_for(rc.workers, rows.size(), [&](std::size_t i) {
    std::mt19937_64 rng(0xA24BAED4963EE407ull * (i + 1) + rc.seed);
    std::uniform_int_distribution<int> U(-window, window);
    std::array<std::array<int, 2>, 3> feet{};
    for (int attempt = 0;; ++attempt) {
      if (attempt >= 10000)
        throw insufficient_samples_error("no admissible triangle after 10000 draws");
      for (auto& f : feet) f = {U(rng), U(rng)};
      bool ok = true;
      for (int a = 0; a < 3 && ok; ++a)
        for (int b = a + 1; b < 3 && ok; ++b)
          ok = feet[a] != feet[b] &&
               std::hypot(feet[b][0] - feet[a][0], feet[b][1] - feet[a][1]) <= cap;
      const long long cross =
          (long long)(feet[1][0] - feet[0][0]) * (feet[2][1] - feet[0][1]) -
          (long long)(feet[1][1] - feet[0][1]) * (feet[2][0] - feet[0][0]);
      if (ok && cross != 0) break;
    }
    const IdealTriangle T =
        ideal_triangle(X, make_direction(feet[0][0], feet[0][1]),
                       make_direction(feet[1][0], feet[1][1]),
                       make_direction(feet[2][0], feet[2][1]));
    Row& r = rows[i];
    r.feet = feet;
    r.slim = slim_constant(X, T, horizon, resolution);
    const CenterResult c = project(X, T, resolution);
    r.K_min = c.K_min;
    r.ek_diameter = c.E_K_diameter;
    for (const auto& gate : c.gates)
      r.gate_gap = std::max(r.gate_gap, X.distance(gate.first, gate.second));
  });

  std::vector<std::vector<std::string>> csv;
  double max_slim = 0, max_ek = 0, max_gate = 0;
  for (int i = 0; i < count; ++i) {
    const Row& r = rows[i];
    csv.push_back({std::to_string(i), std::to_string(r.feet[0][0]), std::to_string(r.feet[0][1]),
                   std::to_string(r.feet[1][0]), std::to_string(r.feet[1][1]),
                   std::to_string(r.feet[2][0]), std::to_string(r.feet[2][1]), num(r.slim),
                   num(r.K_min), num(r.ek_diameter), num(r.gate_gap)});
    max_slim = std::max(max_slim, r.slim);
    max_ek = std::max(max_ek, r.ek_diameter);
    max_gate = std::max(max_gate, r.gate_gap);
  }
  write_csv(fs::path(rc.out) / "centers.csv",
            {"index", "a_m", "a_n", "b_m", "b_n", "c_m", "c_n", "slim", "K_min", "ek_diameter",
             "max_gate_gap"},
            csv);
  write_json(fs::path(rc.out) / "centers_summary.json",
             json{{"subcommand", "centers"},
                  {"count", count},
                  {"resolution", resolution},
                  {"horizon", horizon},
                  {"max_slim", max_slim},
                  {"max_ek_diameter", max_ek},
                  {"max_gate_gap", max_gate}});
  return 0;
}

int cmd_crossratio(const Space& X, const RunConfig& rc, int count, int window, double cap,
                   double resolution) {
  const TupleSampler tuples = lattice_tuple_sampler(X, rc.seed, window, cap);
  struct Row {
    std::array<BoundaryPoint, 4> tuple;
    double centers = 0, paulin = 0, flip_min = 0;
    std::string pairing;
  };
  std::vector<Row> rows(count);
  parallel_for(rc.workers, rows.size(), [&](std::size_t i) {
    Row& r = rows[i];
    r.tuple = tuples(i);
    r.centers = cross_ratio_centers(X, r.tuple[0], r.tuple[1], r.tuple[2], r.tuple[3],
                                    resolution).value;
    r.paulin = cross_ratio_paulin(X, r.tuple[0], r.tuple[1], r.tuple[2], r.tuple[3]).value;
    const FlipChoice flip = min_flip(X, r.tuple[0], r.tuple[1], r.tuple[2], r.tuple[3]);
    r.flip_min = flip.value.value;
    r.pairing = flip.pairing;
  });

  std::vector<std::vector<std::string>> csv;
  double max_gap = 0, max_flip_min = 0;
  for (int i = 0; i < count; ++i) {
    const Row& r = rows[i];
    std::vector<std::string> line = {std::to_string(i)};
    for (const auto& b : r.tuple) {
      line.push_back(std::to_string(foot_m(b)));
      line.push_back(std::to_string(foot_n(b)));
    }
    line.push_back(num(r.centers));
    line.push_back(num(r.paulin));
    line.push_back(num(std::abs(r.centers - r.paulin)));
    line.push_back(r.pairing);
    line.push_back(num(r.flip_min));
    csv.push_back(std::move(line));
    max_gap = std::max(max_gap, std::abs(r.centers - r.paulin));
    max_flip_min = std::max(max_flip_min, r.flip_min);
  }
  write_csv(fs::path(rc.out) / "crossratio.csv",
            {"index", "a_m", "a_n", "b_m", "b_n", "c_m", "c_n", "d_m", "d_n", "cr_centers",
             "cr_paulin", "abs_gap", "flip_min_pairing", "flip_min"},
            csv);
  write_json(fs::path(rc.out) / "crossratio_summary.json",
             json{{"subcommand", "crossratio"},
                  {"count", count},
                  {"resolution", resolution},
                  {"gauge_cap", cap},
                  {"max_abs_gap", max_gap},
                  {"max_flip_min", max_flip_min}});
  return 0;
}

int cmd_stability(const Space& X, const RunConfig& rc, const std::string& map_spec, int samples,
                  double bound, const std::string& family, int window) {
  const BoundaryMap f = make_map(X, map_spec);
  const PairSampler pairs =
      family == "adjacent" ? adjacent_pair_family() : lattice_pair_sampler(rc.seed, window);
  const StabilityProfile prof = stability_profile(X, f, pairs, samples, bound);

  std::vector<std::vector<std::string>> csv;
  for (const StabilityRow& r : prof.rows)
    csv.push_back({std::to_string(foot_m(r.pair.first)), std::to_string(foot_n(r.pair.first)),
                   std::to_string(foot_m(r.pair.second)), std::to_string(foot_n(r.pair.second)),
                   num(r.D_in), num(r.D_out)});
  write_csv(fs::path(rc.out) / "stability.csv", {"a_m", "a_n", "b_m", "b_n", "D_in", "D_out"},
            csv);

  json witness = json::array();
  for (const StabilityRow& r : prof.witness)
    witness.push_back(json{{"a_m", foot_m(r.pair.first)},
                           {"a_n", foot_n(r.pair.first)},
                           {"b_m", foot_m(r.pair.second)},
                           {"b_n", foot_n(r.pair.second)},
                           {"D_in", r.D_in},
                           {"D_out", r.D_out}});
  write_json(fs::path(rc.out) / "stability_summary.json",
             json{{"subcommand", "stability"},
                  {"map", f.name},
                  {"samples", samples},
                  {"verdict_bound", prof.verdict_bound},
                  {"verdict", prof.verdict == StabilityVerdict::growth_detected
                                  ? "growth_detected"
                                  : "stable_within_sample"},
                  {"growth_rate", prof.growth_rate},
                  {"witness", witness}});
  return 0;
}

int cmd_qm(const Space& X, const RunConfig& rc, const std::string& map_spec, int samples,
           int window, double cap, const std::string& family) {
  const BoundaryMap f = make_map(X, map_spec);
  const TupleSampler tuples = family == "squares"
                                  ? adjacent_square_family()
                                  : lattice_tuple_sampler(X, rc.seed, window, cap);
  const QmProfile prof = qm_profile(X, f, cap, tuples, samples);

  std::vector<std::vector<std::string>> csv;
  for (const QmRow& r : prof.rows) csv.push_back({num(r.cr_in), num(r.cr_out)});
  write_csv(fs::path(rc.out) / "qm.csv", {"cr_in", "cr_out"}, csv);
  write_json(fs::path(rc.out) / "qm_summary.json", json{{"subcommand", "qm"},
                                                        {"map", f.name},
                                                        {"samples", samples},
                                                        {"gauge", prof.gauge},
                                                        {"slope", prof.slope},
                                                        {"intercept", prof.intercept}});
  return 0;
}

int cmd_extend(const Space& X, const RunConfig& rc, const std::string& map_spec,
               const ExtensionConfig& cfg, ExtensionPlan plan, int witness_max) {
  const BoundaryMap f = make_map(X, map_spec);
  plan.seed = rc.seed;
  const ExtensionResult res = run_extension(X, f, cfg, plan);

  // deterministic witness sweep: image spread along the half-integer line
  std::vector<double> witness_pi(witness_max);
  parallel_for(rc.workers, witness_pi.size(), [&](std::size_t i) {
    witness_pi[i] = extend(X, f, make_plane(double(i + 1), 0.5), cfg).pi_diameter;
  });

  std::vector<std::vector<std::string>> csv;
  for (const ExtensionRow& r : res.rows) {
    const auto x = point_cols(r.x);
    const auto hx = point_cols(r.hx);
    csv.push_back({x[0], x[1], x[2], hx[0], hx[1], hx[2], num(r.pi_diameter)});
  }
  write_csv(fs::path(rc.out) / "extend.csv",
            {"x", "y", "height", "hx", "hy", "hheight", "pi_diameter"}, csv);

  std::vector<std::vector<std::string>> wcsv;
  double witness_max_pi = 0;
  for (int i = 0; i < witness_max; ++i) {
    wcsv.push_back({std::to_string(i + 1), num(witness_pi[i]),
                    witness_pi[i] > cfg.image_diameter_bound ? "1" : "0"});
    witness_max_pi = std::max(witness_max_pi, witness_pi[i]);
  }
  write_csv(fs::path(rc.out) / "extend_witness.csv", {"n", "pi_diameter", "exceeds_bound"}, wcsv);

  const bool certificate = !res.warnings.empty() || witness_max_pi > cfg.image_diameter_bound;
  write_json(fs::path(rc.out) / "extend_summary.json",
             json{{"subcommand", "extend"},
                  {"map", f.name},
                  {"lambda", res.lambda},
                  {"eps", res.eps},
                  {"quasi_inverse_defect", res.quasi_inverse_defect},
                  {"boundary_agreement", res.boundary_agreement},
                  {"pi_diameter_max", res.pi_diameter_max},
                  {"image_gauge_max", res.image_gauge_max},
                  {"pi_bound", cfg.image_diameter_bound},
                  {"warnings", res.warnings},
                  {"witness_pi_max", witness_max_pi},
                  {"verdict", certificate ? "failure_certificate" : "extension_ok"}});
  if (certificate)
    std::fprintf(stderr, "failure certificate: image spread reached %s against bound %s\n",
                 num(std::max(witness_max_pi, res.pi_diameter_max)).c_str(),
                 num(cfg.image_diameter_bound).c_str());
  return certificate ? 3 : 0;
}

int cmd_example33(const Space& X, const RunConfig& rc, int n_max) {
  struct Row {
    double D_in = 0, D_out = 0, cr_in = 0, cr_out = 0;
  };
  std::vector<Row> rows(n_max);
  parallel_for(rc.workers, rows.size(), [&](std::size_t i) {
    const int n = int(i) + 1;
    const int m = n + 1;
    Row& r = rows[i];
    r.D_in = contracting_constant_analytic(
        X, X.bi_infinite_geodesic(make_direction(n, 0), make_direction(n, 1)));
    r.D_out = contracting_constant_analytic(
        X, X.bi_infinite_geodesic(make_direction(-n, 0), make_direction(n, 1)));
    r.cr_in = cross_ratio_paulin(X, make_direction(n, 0), make_direction(m, 0),
                                 make_direction(n, 1), make_direction(m, 1)).value;
    r.cr_out = cross_ratio_paulin(X, make_direction(-n, 0), make_direction(-m, 0),
                                  make_direction(n, 1), make_direction(m, 1)).value;
  });

  std::vector<std::vector<std::string>> csv;
  for (int i = 0; i < n_max; ++i)
    csv.push_back({std::to_string(i + 1), num(rows[i].D_in), num(rows[i].D_out),
                   num(rows[i].cr_in), num(rows[i].cr_out)});
  write_csv(fs::path(rc.out) / "example33.csv", {"n", "D_in", "D_out", "cr_in", "cr_out"}, csv);
  write_json(fs::path(rc.out) / "example33_summary.json",
             json{{"subcommand", "example33"},
                  {"rows", n_max},
                  {"D_in_value", rows.empty() ? 0.0 : rows[0].D_in},
                  {"cr_in_value", rows.empty() ? 0.0 : rows[0].cr_in}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"boundary geometry experiments on model spaces"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig rc;
  app.add_option("--space", rc.space_path, "space config file (default: spiked plane)");
  app.add_option("--seed", rc.seed, "sampler seed");
  app.add_option("--out", rc.out, "output directory");
  app.add_option("--workers", rc.workers, "worker pool size for sample evaluation");

  int con_n_max = 10, con_brute_max = 3;
  double con_resolution = 0.25, con_window = 12.0;
  CLI::App* con = app.add_subcommand("contracting", "analytic and brute contracting constants");
  con->add_option("--n-max", con_n_max, "ray pair family size");
  con->add_option("--resolution", con_resolution, "brute force grid step");
  con->add_option("--brute-max", con_brute_max, "largest n to brute force");
  con->add_option("--window", con_window, "brute force ball window");

  int cen_count = 20, cen_window = 6;
  double cen_cap = 3.0, cen_resolution = 0.25, cen_horizon = 12.0;
  CLI::App* cen = app.add_subcommand("centers", "slim constants and center sets of triangles");
  cen->add_option("--count", cen_count, "number of sampled triangles");
  cen->add_option("--window", cen_window, "feet window");
  cen->add_option("--cap", cen_cap, "pairwise gauge cap");
  cen->add_option("--resolution", cen_resolution, "net grid step");
  cen->add_option("--horizon", cen_horizon, "slim constant horizon");

  int cr_count = 50, cr_window = 10;
  double cr_cap = 3.0, cr_resolution = 0.25;
  CLI::App* cr = app.add_subcommand("crossratio", "both cross ratio definitions per tuple");
  cr->add_option("--count", cr_count, "number of sampled tuples");
  cr->add_option("--window", cr_window, "feet window");
  cr->add_option("--cap", cr_cap, "pairwise gauge cap");
  cr->add_option("--resolution", cr_resolution, "net grid step");

  std::string st_map = "identity", st_family = "adjacent";
  int st_samples = 30, st_window = 8;
  double st_bound = 10.0;
  CLI::App* st = app.add_subcommand("stability", "contracting constants through a boundary map");
  st->add_option("--map", st_map, "identity, swap, axis_swap, translation(tx,ty), or config");
  st->add_option("--samples", st_samples, "number of sampled pairs");
  st->add_option("--bound", st_bound, "verdict bound on input constants");
  st->add_option("--family", st_family, "adjacent or random")
      ->check(CLI::IsMember({"adjacent", "random"}));
  st->add_option("--window", st_window, "feet window for the random family");

  std::string qm_map = "identity", qm_family = "random";
  int qm_samples = 40, qm_window = 10;
  double qm_cap = 3.0;
  CLI::App* qmc = app.add_subcommand("qm", "cross ratios through a boundary map");
  qmc->add_option("--map", qm_map, "identity, swap, axis_swap, translation(tx,ty), or config");
  qmc->add_option("--samples", qm_samples, "number of sampled tuples");
  qmc->add_option("--window", qm_window, "feet window");
  qmc->add_option("--cap", qm_cap, "gauge stratum cap");
  qmc->add_option("--family", qm_family, "random or squares")
      ->check(CLI::IsMember({"random", "squares"}));

  std::string ex_map = "identity";
  ExtensionConfig ex_cfg;
  ExtensionPlan ex_plan;
  ex_plan.window = 12.0;
  ex_plan.point_count = 10;
  ex_plan.pair_count = 45;
  ex_plan.ray_count = 2;
  ex_plan.horizon = 8.0;
  ex_plan.ray_step = 4.0;
  int ex_witness = 10;
  CLI::App* ex = app.add_subcommand("extend", "interior extension of a boundary map");
  ex->add_option("--map", ex_map, "identity, swap, axis_swap, translation(tx,ty), or config");
  ex->add_option("--R", ex_cfg.R, "candidate ball radius");
  ex->add_option("--search", ex_cfg.triple_search_radius, "candidate feet search radius");
  ex->add_option("--d-cap", ex_cfg.D_cap, "gauge stratum for candidate triples");
  ex->add_option("--resolution", ex_cfg.resolution, "net grid step");
  ex->add_option("--pi-bound", ex_cfg.image_diameter_bound, "image spread sanity bound");
  ex->add_option("--window", ex_plan.window, "sample window");
  ex->add_option("--points", ex_plan.point_count, "sampled interior points");
  ex->add_option("--pairs", ex_plan.pair_count, "pairs used in the qi fit");
  ex->add_option("--rays", ex_plan.ray_count, "rays checked for boundary agreement");
  ex->add_option("--horizon", ex_plan.horizon, "agreement horizon");
  ex->add_option("--ray-step", ex_plan.ray_step, "agreement step along each ray");
  ex->add_option("--witness-max", ex_witness, "length of the deterministic witness sweep");

  int e33_n_max = 20;
  CLI::App* e33 = app.add_subcommand("example33", "the worked ray family table");
  e33->add_option("--n-max", e33_n_max, "number of table rows");

  CLI11_PARSE(app, argc, argv);

  std::string active = "";
  try {
    fs::create_directories(rc.out);
    const std::unique_ptr<Space> X = load_space(rc.space_path);
    if (con->parsed()) {
      active = "contracting";
      return cmd_contracting(*X, rc, con_n_max, con_resolution, con_brute_max, con_window);
    }
    if (cen->parsed()) {
      active = "centers";
      return cmd_centers(*X, rc, cen_count, cen_window, cen_cap, cen_resolution, cen_horizon);
    }
    if (cr->parsed()) {
      active = "crossratio";
      return cmd_crossratio(*X, rc, cr_count, cr_window, cr_cap, cr_resolution);
    }
    if (st->parsed()) {
      active = "stability";
      return cmd_stability(*X, rc, st_map, st_samples, st_bound, st_family, st_window);
    }
    if (qmc->parsed()) {
      active = "qm";
      return cmd_qm(*X, rc, qm_map, qm_samples, qm_window, qm_cap, qm_family);
    }
    if (ex->parsed()) {
      active = "extend";
      return cmd_extend(*X, rc, ex_map, ex_cfg, ex_plan, ex_witness);
    }
    if (e33->parsed()) {
      active = "example33";
      return cmd_example33(*X, rc, e33_n_max);
    }
    return 1;
  } catch (const error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    try {
      write_json(fs::path(rc.out) / "error.json",
                 json{{"error", e.what()}, {"subcommand", active}});
    } catch (...) {
    }
    return 2;
  }
}

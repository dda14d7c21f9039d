#include "morseb/extension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "morseb/centers.hpp"
#include "morseb/crossratio.hpp"
#include "morseb/errors.hpp"

namespace morseb {

namespace {

struct Base {
  double px = 0;
  double py = 0;
  double height = 0;
};

Base base_of(const SpacePoint& x) {
  if (const auto* p = std::get_if<PlanePoint>(&x)) return {p->x, p->y, 0};
  if (const auto* s = std::get_if<SpikePoint>(&x)) return {double(s->m), double(s->n), s->t};
  throw incompatible_space_error("extension points live on the spiked plane");
}

void check_config(const ExtensionConfig& cfg) {
  if (cfg.R <= 0) throw invalid_parameter_error("R must be positive");
  if (cfg.D_cap <= 0) throw invalid_parameter_error("D_cap must be positive");
  if (cfg.resolution <= 0) throw invalid_parameter_error("resolution must be positive");
  if (cfg.triple_search_radius < cfg.R + cfg.D_cap)
    throw invalid_parameter_error("triple_search_radius must be at least R + D_cap");
}

double foot_gap(const BoundaryPoint& a, const BoundaryPoint& b) {
  const auto* da = std::get_if<SpikeDirection>(&a);
  const auto* db = std::get_if<SpikeDirection>(&b);
  if (!da || !db) throw incompatible_space_error("image boundary points are not spike directions");
  return std::hypot(double(db->m - da->m), double(db->n - da->n));
}

std::mt19937_64 engine_for(unsigned seed, std::size_t i) {
  return std::mt19937_64(0x94D049BB133111EBull * (std::uint64_t(i) + 1) + seed);
}

}  // namespace

std::vector<CandidateTriple> candidate_triples(const Space& X, const SpacePoint& x,
                                               const ExtensionConfig& cfg) {
  if (X.kind() != Space::Kind::spiked_plane)
    throw unsupported_space_error("candidate triples need the spiked plane");
  check_config(cfg);
  const Base at = base_of(x);
  const double s = cfg.triple_search_radius;

  std::vector<std::pair<int, int>> feet;
  for (int m = int(std::ceil(at.px - s)); m <= int(std::floor(at.px + s)); ++m)
    for (int n = int(std::ceil(at.py - s)); n <= int(std::floor(at.py + s)); ++n)
      if (std::hypot(m - at.px, n - at.py) <= s) feet.emplace_back(m, n);

  auto gap = [](std::pair<int, int> a, std::pair<int, int> b) {
    return std::hypot(double(b.first - a.first), double(b.second - a.second));
  };

  std::vector<CandidateTriple> out;
  double nearest = std::numeric_limits<double>::infinity();
  const double reach = cfg.R + at.height;
  for (std::size_t i = 0; i < feet.size(); ++i)
    for (std::size_t j = i + 1; j < feet.size(); ++j) {
      if (gap(feet[i], feet[j]) > cfg.D_cap) continue;
      for (std::size_t k = j + 1; k < feet.size(); ++k) {
        if (gap(feet[i], feet[k]) > cfg.D_cap || gap(feet[j], feet[k]) > cfg.D_cap) continue;
        // Collinear feet give a flat triangle whose sides all run through the
        // middle foot, parking its center exactly on the lattice.  Only honest
        // triangles are admitted.
        const long long cross =
            (long long)(feet[j].first - feet[i].first) * (feet[k].second - feet[i].second) -
            (long long)(feet[j].second - feet[i].second) * (feet[k].first - feet[i].first);
        if (cross == 0) continue;
        CandidateTriple cand;
        cand.feet = {make_direction(feet[i].first, feet[i].second),
                     make_direction(feet[j].first, feet[j].second),
                     make_direction(feet[k].first, feet[k].second)};
        const IdealTriangle T = ideal_triangle(X, cand.feet[0], cand.feet[1], cand.feet[2]);
        cand.center = project(X, T, cfg.resolution).center;
        const double d = X.distance(cand.center, x);
        nearest = std::min(nearest, d);
        if (d <= reach) out.push_back(std::move(cand));
      }
    }
  if (out.empty()) {
    std::ostringstream os;
    os << "no triangle center within " << reach << " of the point";
    throw empty_candidate_error(os.str(), nearest);
  }
  return out;
}

ExtendedPoint extend(const Space& X, const BoundaryMap& f, const SpacePoint& x,
                     const ExtensionConfig& cfg) {
  const std::vector<CandidateTriple> cands = candidate_triples(X, x, cfg);

  ExtendedPoint out;
  std::vector<SpacePoint> image_centers;
  image_centers.reserve(cands.size());
  for (const auto& cand : cands) {
    const BoundaryPoint ia = f.forward(cand.feet[0]);
    const BoundaryPoint ib = f.forward(cand.feet[1]);
    const BoundaryPoint ic = f.forward(cand.feet[2]);
    out.image_gauge = std::max({out.image_gauge, foot_gap(ia, ib), foot_gap(ia, ic),
                                foot_gap(ib, ic)});
    const IdealTriangle T = ideal_triangle(X, ia, ib, ic);
    image_centers.push_back(project(X, T, cfg.resolution).center);
  }
  out.value = image_centers.front();
  for (std::size_t i = 0; i < image_centers.size(); ++i)
    for (std::size_t j = i + 1; j < image_centers.size(); ++j)
      out.pi_diameter = std::max(out.pi_diameter, X.distance(image_centers[i], image_centers[j]));
  out.image_warning = out.pi_diameter > cfg.image_diameter_bound;
  return out;
}

FlipChain flip_chain(const Space& X, const std::array<BoundaryPoint, 3>& T1,
                     const std::array<BoundaryPoint, 3>& T2, double resolution, double c1) {
  if (resolution <= 0) throw invalid_parameter_error("resolution must be positive");
  if (c1 <= 0) throw invalid_parameter_error("c1 must be positive");
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b) {
      if (same_boundary_point(T1[a], T1[b]) || same_boundary_point(T2[a], T2[b]))
        throw degenerate_pair_error("flip chains need triples of distinct vertices");
    }

  FlipChain out;
  out.c1_bound = c1;
  std::array<BoundaryPoint, 3> cur = T1;
  out.triples.push_back(cur);
  SpacePoint prev_center =
      project(X, ideal_triangle(X, cur[0], cur[1], cur[2]), resolution).center;

  auto kept = [&T2](const BoundaryPoint& v) {
    for (const auto& w : T2)
      if (same_boundary_point(v, w)) return true;
    return false;
  };

  for (const auto& t : T2) {
    bool present = false;
    for (const auto& v : cur) present = present || same_boundary_point(v, t);
    if (present) continue;

    // min_flip's three pairings name the current vertex the incoming one
    // replaces: orders (a,b,c,t), (a,c,b,t), (c,a,b,t) drop b, c, a.
    const FlipChoice best = min_flip(X, cur[0], cur[1], cur[2], t);
    int drop = best.pairing == "abcd" ? 1 : best.pairing == "acbd" ? 2 : 0;
    double value = best.value.value;
    if (kept(cur[drop])) {
      value = std::numeric_limits<double>::infinity();
      const std::array<std::pair<double, int>, 3> options = {{
          {cross_ratio_paulin(X, cur[0], cur[1], cur[2], t).value, 1},
          {cross_ratio_paulin(X, cur[0], cur[2], cur[1], t).value, 2},
          {cross_ratio_paulin(X, cur[2], cur[0], cur[1], t).value, 0},
      }};
      for (const auto& [v, d] : options)
        if (!kept(cur[d]) && v < value) {
          value = v;
          drop = d;
        }
    }

    cur[drop] = t;
    out.triples.push_back(cur);
    out.flip_values.push_back(value);
    const SpacePoint center =
        project(X, ideal_triangle(X, cur[0], cur[1], cur[2]), resolution).center;
    out.displacements.push_back(X.distance(prev_center, center));
    prev_center = center;
    out.warning = out.warning || value > c1;
  }
  return out;
}

QiFit fit_qi_constants(const Space& X,
                       const std::vector<std::pair<SpacePoint, SpacePoint>>& graph,
                       std::size_t pair_count) {
  if (graph.size() < 2 || pair_count == 0)
    throw insufficient_samples_error("fitting needs at least two sampled points and one pair");

  // Any finite deviation fits into the additive term, so the least admissible
  // multiplier is 1; the offset then has to cover both sides of the gap.
  QiFit out;
  out.lambda = 1.0;
  for (std::size_t i = 0; i < graph.size() && out.pairs_used < pair_count; ++i)
    for (std::size_t j = i + 1; j < graph.size() && out.pairs_used < pair_count; ++j) {
      const double d = X.distance(graph[i].first, graph[j].first);
      const double dh = X.distance(graph[i].second, graph[j].second);
      out.eps = std::max({out.eps, d / out.lambda - dh, dh - out.lambda * d});
      ++out.pairs_used;
    }
  return out;
}

double quasi_inverse_defect(const Space& X, const PointMap& h, const PointMap& h_inv,
                            const std::vector<SpacePoint>& sample) {
  if (sample.empty())
    throw insufficient_samples_error("the quasi-inverse defect needs sample points");
  double defect = 0;
  for (const auto& x : sample) defect = std::max(defect, X.distance(x, h_inv(h(x))));
  return defect;
}

double boundary_agreement(const Space& X, const PointMap& h, const BoundaryMap& f,
                          const std::vector<BoundaryPoint>& rays, double horizon, double step) {
  if (rays.empty()) throw insufficient_samples_error("boundary agreement needs ray directions");
  if (horizon <= 0 || step <= 0)
    throw invalid_parameter_error("horizon and step must be positive");
  const SpacePoint base = make_plane(0, 0);
  double worst = 0;
  for (const auto& p : rays) {
    const Geodesic alpha = X.ray_from(base, p);
    const Geodesic beta = X.ray_from(base, f.forward(p));
    for (double t = 0; t <= horizon + 1e-9; t += step) {
      const SpacePoint y = h(X.point_at(alpha, t));
      worst = std::max(worst, X.project_onto(beta, y).dist);
    }
  }
  return worst;
}

std::vector<SpacePoint> plane_sample(unsigned seed, double window, std::size_t count) {
  if (window <= 0) throw invalid_parameter_error("window must be positive");
  std::vector<SpacePoint> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto eng = engine_for(seed, i);
    std::uniform_real_distribution<double> u(-window, window);
    const double x = u(eng);
    const double y = u(eng);
    out.push_back(make_plane(x, y));
  }
  return out;
}

ExtensionResult run_extension(const Space& X, const BoundaryMap& f, const ExtensionConfig& cfg,
                              const ExtensionPlan& plan) {
  if (plan.point_count < 2)
    throw insufficient_samples_error("an extension run needs at least two sample points");
  if (plan.pair_count == 0 || plan.ray_count == 0)
    throw insufficient_samples_error("an extension run needs pairs and rays");
  if (plan.window <= 0 || plan.horizon <= 0 || plan.ray_step <= 0)
    throw invalid_parameter_error("window, horizon, and ray step must be positive");

  const std::vector<SpacePoint> sample = plane_sample(plan.seed, plan.window, plan.point_count);

  ExtensionResult out;
  out.rows.reserve(sample.size());
  for (const auto& x : sample) {
    const ExtendedPoint ep = extend(X, f, x, cfg);
    out.rows.push_back({x, ep.value, ep.pi_diameter, ep.image_gauge});
    out.pi_diameter_max = std::max(out.pi_diameter_max, ep.pi_diameter);
    out.image_gauge_max = std::max(out.image_gauge_max, ep.image_gauge);
    if (ep.image_warning) {
      const auto& p = std::get<PlanePoint>(x);
      std::ostringstream os;
      os << "image spread " << ep.pi_diameter << " at (" << p.x << ", " << p.y
         << ") exceeds " << cfg.image_diameter_bound;
      out.warnings.push_back(os.str());
    }
  }

  std::vector<std::pair<SpacePoint, SpacePoint>> graph;
  graph.reserve(out.rows.size());
  for (const auto& row : out.rows) graph.emplace_back(row.x, row.hx);
  const QiFit fit = fit_qi_constants(X, graph, plan.pair_count);
  out.lambda = fit.lambda;
  out.eps = fit.eps;

  const PointMap h = [&X, &f, &cfg, graph](const SpacePoint& x) {
    for (const auto& [key, val] : graph)
      if (same_point(key, x)) return val;
    return extend(X, f, x, cfg).value;
  };
  const BoundaryMap f_rev{f.inverse, f.forward, f.name + "_rev"};
  const PointMap h_inv = [&X, f_rev, &cfg](const SpacePoint& x) {
    return extend(X, f_rev, x, cfg).value;
  };
  out.quasi_inverse_defect = quasi_inverse_defect(X, h, h_inv, sample);

  std::vector<BoundaryPoint> rays = {make_direction(1, 0), make_direction(0, 1)};
  for (std::size_t i = 0; rays.size() < plan.ray_count && i < plan.ray_count + 64; ++i) {
    auto eng = engine_for(plan.seed ^ 0x5851F42Du, i);
    std::uniform_int_distribution<int> c(-3, 3);
    const int m = c(eng);
    const int n = c(eng);
    if (m == 0 && n == 0) continue;
    bool dup = false;
    for (const auto& r : rays) dup = dup || same_boundary_point(r, make_direction(m, n));
    if (!dup) rays.push_back(make_direction(m, n));
  }
  if (rays.size() > plan.ray_count) rays.resize(plan.ray_count);
  out.boundary_agreement = boundary_agreement(X, h, f, rays, plan.horizon, plan.ray_step);
  return out;
}

}  // namespace morseb

#include "morseb/centers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace morseb {

namespace {

// Largest power of two not exceeding the requested resolution.  Grid
// coordinates built from integer anchors and multiples of this step are exact
// doubles, so integer translations move nets without rounding.
double dyadic_step(double resolution) {
  if (!(resolution > 0)) throw invalid_parameter_error("resolution must be positive");
  return std::exp2(std::floor(std::log2(resolution)));
}

struct FootBox {
  std::array<Vec2, 3> feet;  // feet[i] belongs to vertices[i]
  int m_lo = 0, m_hi = 0, n_lo = 0, n_hi = 0;
};

FootBox feet_of(const IdealTriangle& T) {
  FootBox fb;
  for (int i = 0; i < 3; ++i) {
    const auto* d = std::get_if<SpikeDirection>(&T.vertices[i]);
    if (!d) throw incompatible_space_error("triangle vertices are not spike directions");
    fb.feet[i] = Vec2{double(d->m), double(d->n)};
    fb.m_lo = i ? std::min(fb.m_lo, d->m) : d->m;
    fb.m_hi = i ? std::max(fb.m_hi, d->m) : d->m;
    fb.n_lo = i ? std::min(fb.n_lo, d->n) : d->n;
    fb.n_hi = i ? std::max(fb.n_hi, d->n) : d->n;
  }
  return fb;
}

double max_feet_gap(const FootBox& fb) {
  double l = 0;
  for (int i = 0; i < 3; ++i) l = std::max(l, dist(fb.feet[i], fb.feet[(i + 1) % 3]));
  return l;
}

double max_side_distance(const Space& X, const IdealTriangle& T, const SpacePoint& x) {
  double mu = 0;
  for (const auto& side : T.sides) mu = std::max(mu, X.project_onto(side, x).dist);
  return mu;
}

std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(),
            [](const Vec2& a, const Vec2& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Vec2& a, const Vec2& b) { return a.x == b.x && a.y == b.y; }),
            pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Vec2> h;
  h.reserve(2 * pts.size());
  for (int pass = 0; pass < 2; ++pass) {
    const std::size_t base = h.size();
    for (const auto& p : pts) {
      while (h.size() >= base + 2 && cross(h.back() - h[h.size() - 2], p - h.back()) <= 0)
        h.pop_back();
      h.push_back(p);
    }
    h.pop_back();
    std::reverse(pts.begin(), pts.end());
  }
  return h;
}

struct SpikedNet {
  std::vector<SpacePoint> points;
  std::vector<Vec2> plane;
  std::vector<std::pair<Vec2, double>> tips;  // foot and top ladder height
};

// Plane points within K of every side lie within K of the planar core of
// every side, hence inside the feet box padded by K; ladder heights are
// bounded by K because no two sides climb the same spike of a nondegenerate
// triangle.
SpikedNet collect_spiked_net(const Space& X, const IdealTriangle& T, double K, double g) {
  const FootBox fb = feet_of(T);
  const int pad = int(std::floor(K)) + 1;
  const double x_lo = fb.m_lo - pad, x_hi = fb.m_hi + pad;
  const double y_lo = fb.n_lo - pad, y_hi = fb.n_hi + pad;
  SpikedNet net;
  for (double y = y_lo; y <= y_hi + 1e-9; y += g) {
    for (double x = x_lo; x <= x_hi + 1e-9; x += g) {
      const SpacePoint p = PlanePoint{x, y};
      if (max_side_distance(X, T, p) <= K + 1e-12) {
        net.points.push_back(p);
        net.plane.push_back(Vec2{x, y});
      }
    }
  }
  for (int m = fb.m_lo - pad; m <= fb.m_hi + pad; ++m) {
    for (int n = fb.n_lo - pad; n <= fb.n_hi + pad; ++n) {
      if (max_side_distance(X, T, PlanePoint{double(m), double(n)}) > K + 1e-12) continue;
      double top = 0;
      for (double t = g; t <= K + 1e-9; t += g) {
        const SpacePoint s = SpikePoint{m, n, t};
        if (max_side_distance(X, T, s) > K + 1e-12) break;  // grows with height
        net.points.push_back(s);
        top = t;
      }
      if (top > 0) net.tips.emplace_back(Vec2{double(m), double(n)}, top);
    }
  }
  return net;
}

double spiked_net_diameter(const SpikedNet& net) {
  if (net.points.size() < 2) return 0;
  double best = 0;
  const auto hull = convex_hull(net.plane);
  for (std::size_t i = 0; i < hull.size(); ++i)
    for (std::size_t j = i + 1; j < hull.size(); ++j)
      best = std::max(best, dist(hull[i], hull[j]));
  // Spike points only help at a foot's top sample, and farthest plane
  // partners sit on the hull.
  for (std::size_t i = 0; i < net.tips.size(); ++i) {
    const auto& [fi, ti] = net.tips[i];
    for (std::size_t j = i + 1; j < net.tips.size(); ++j)
      best = std::max(best, ti + net.tips[j].second + dist(fi, net.tips[j].first));
    for (const auto& h : hull) best = std::max(best, ti + dist(fi, h));
  }
  return best;
}

// The unique point lying on all three sides of a tree triangle: gate the
// third side's anchor through two projections.
SpacePoint tree_median(const Space& X, const IdealTriangle& T) {
  const SpacePoint a2 = X.point_at(T.sides[2], 0.0);
  const SpacePoint q = X.point_at(T.sides[0], X.project_onto(T.sides[0], a2).param);
  return X.point_at(T.sides[1], X.project_onto(T.sides[1], q).param);
}

std::vector<SpacePoint> collect_tree_net(const Space& X, const IdealTriangle& T, double K,
                                         double g) {
  const SpacePoint med = tree_median(X, T);
  std::vector<SpacePoint> out;
  for (const auto& p : X.ball_sample(med, 3 * K + 2, g))
    if (max_side_distance(X, T, p) <= K + 1e-12) out.push_back(p);
  return out;
}

double pts_diameter(const Space& X, const std::vector<SpacePoint>& pts) {
  double best = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      best = std::max(best, X.distance(pts[i], pts[j]));
  return best;
}

double walk_min(const Space& X, const IdealTriangle& T, const Geodesic& side, double lo, double hi,
                double g) {
  double m = std::numeric_limits<double>::infinity();
  for (double p = lo; p <= hi + 1e-9; p += g)
    m = std::min(m, max_side_distance(X, T, X.point_at(side, p)));
  return m;
}

SpacePoint first_entry(const Space& X, const IdealTriangle& T, const Geodesic& side, double lo,
                       double hi, double g, bool descending, double thresh) {
  if (descending) {
    for (double p = hi; p >= lo - 1e-9; p -= g) {
      const SpacePoint x = X.point_at(side, p);
      if (max_side_distance(X, T, x) <= thresh) return x;
    }
  } else {
    for (double p = lo; p <= hi + 1e-9; p += g) {
      const SpacePoint x = X.point_at(side, p);
      if (max_side_distance(X, T, x) <= thresh) return x;
    }
  }
  throw error("gate walk failed to reach the center set");
}

// Gates for vertices[i]: walk sides[i] inward from its -inf end and
// sides[(i + 2) % 3] inward from its +inf end, both until the largest side
// distance first drops to the gate level.  The level is the queried K,
// raised to the best level a walk can reach when K is unattainable.
void fill_gates(const Space& X, const IdealTriangle& T, double K, double g,
                const std::array<std::pair<double, double>, 3>& ranges,
                std::array<std::pair<SpacePoint, SpacePoint>, 3>& gates) {
  for (int i = 0; i < 3; ++i) {
    const Geodesic& in_side = T.sides[i];
    const Geodesic& out_side = T.sides[(i + 2) % 3];
    const auto [in_lo, in_hi] = ranges[i];
    const auto [out_lo, out_hi] = ranges[(i + 2) % 3];
    const double reach = std::max(walk_min(X, T, in_side, in_lo, in_hi, g),
                                  walk_min(X, T, out_side, out_lo, out_hi, g));
    const double thresh = std::max(K, reach) + 1e-12;
    gates[i] = {first_entry(X, T, in_side, in_lo, in_hi, g, false, thresh),
                first_entry(X, T, out_side, out_lo, out_hi, g, true, thresh)};
  }
}

std::pair<int, int> lex_least_foot(const IdealTriangle& T) {
  std::pair<int, int> best{std::numeric_limits<int>::max(), std::numeric_limits<int>::max()};
  for (const auto& v : T.vertices) {
    const auto* d = std::get_if<SpikeDirection>(&v);
    if (!d) throw incompatible_space_error("triangle vertices are not spike directions");
    best = std::min(best, std::pair<int, int>{d->m, d->n});
  }
  return best;
}

CenterResult project_spiked(const Space& X, const IdealTriangle& T, double g) {
  // Normalize so the lexicographically least foot is the origin; every
  // quantity below is computed on the normalized copy and translated back,
  // which makes the result exactly equivariant under integer translations.
  const auto [bm, bn] = lex_least_foot(T);
  const GroupElement fwd{lattice_translation(-bm, -bn)};
  const GroupElement back{lattice_translation(bm, bn)};
  const IdealTriangle T0 = ideal_triangle(X, X.act(fwd, T.vertices[0]), X.act(fwd, T.vertices[1]),
                                          X.act(fwd, T.vertices[2]));
  const FootBox fb = feet_of(T0);

  // Min-max scan.  The minimizer is planar and lies in the feet hull: spike
  // points only increase the largest side distance, and projecting onto the
  // hull shrinks the distance to every side.
  double K_min = std::numeric_limits<double>::infinity();
  SpacePoint best{};
  for (double y = fb.n_lo - 1; y <= fb.n_hi + 1 + 1e-9; y += g) {
    for (double x = fb.m_lo - 1; x <= fb.m_hi + 1 + 1e-9; x += g) {
      const SpacePoint p = PlanePoint{x, y};
      const double mu = max_side_distance(X, T0, p);
      if (mu < K_min || (mu == K_min && lex_less(p, best))) {
        K_min = mu;
        best = p;
      }
    }
  }

  // Queried level: the measured slim constant plus one net step, raised to
  // the achieved center level when that is larger.
  const double lmax = max_feet_gap(fb);
  const double slim = slim_constant(X, T0, lmax + 2, g);
  const double K_set = std::max(slim, K_min) + g;

  CenterResult R;
  R.K_min = K_min;
  R.E_K_diameter = spiked_net_diameter(collect_spiked_net(X, T0, K_set, g));

  const double far = lmax + K_set + 4;
  std::array<std::pair<double, double>, 3> ranges;
  ranges.fill({-far, far});
  std::array<std::pair<SpacePoint, SpacePoint>, 3> gates;
  fill_gates(X, T0, K_set, g, ranges, gates);

  R.center = X.act(back, best);
  for (int i = 0; i < 3; ++i)
    R.gates[i] = {X.act(back, gates[i].first), X.act(back, gates[i].second)};
  return R;
}

CenterResult project_tree(const Space& X, const IdealTriangle& T, double g) {
  const SpacePoint med = tree_median(X, T);
  double K_min = std::numeric_limits<double>::infinity();
  SpacePoint best{};
  for (const auto& p : X.ball_sample(med, 2.0, g)) {
    const double mu = max_side_distance(X, T, p);
    if (mu < K_min || (mu == K_min && lex_less(p, best))) {
      K_min = mu;
      best = p;
    }
  }

  double gap = 0;
  std::array<SpacePoint, 3> anchors{X.point_at(T.sides[0], 0.0), X.point_at(T.sides[1], 0.0),
                                    X.point_at(T.sides[2], 0.0)};
  for (int i = 0; i < 3; ++i)
    gap = std::max(gap, X.distance(anchors[i], anchors[(i + 1) % 3]));
  const double slim = slim_constant(X, T, gap + 2, g);
  const double K_set = std::max(slim, K_min) + g;

  CenterResult R;
  R.center = best;
  R.K_min = K_min;
  R.E_K_diameter = pts_diameter(X, collect_tree_net(X, T, K_set, g));

  const double far = gap + K_set + 6;
  std::array<std::pair<double, double>, 3> ranges;
  for (int i = 0; i < 3; ++i) {
    const double pm = X.project_onto(T.sides[i], med).param;
    ranges[i] = {pm - far, pm + far};
  }
  fill_gates(X, T, K_set, g, ranges, R.gates);
  return R;
}

}  // namespace

IdealTriangle ideal_triangle(const Space& X, const BoundaryPoint& a, const BoundaryPoint& b,
                             const BoundaryPoint& c) {
  if (same_boundary_point(a, b) || same_boundary_point(b, c) || same_boundary_point(c, a))
    throw degenerate_pair_error("ideal triangle vertices must be pairwise distinct");
  return IdealTriangle{{a, b, c},
                       {X.bi_infinite_geodesic(a, b), X.bi_infinite_geodesic(b, c),
                        X.bi_infinite_geodesic(c, a)}};
}

double side_distance(const Space& X, const SpacePoint& x, const Geodesic& side) {
  return X.project_onto(side, x).dist;
}

double slim_constant(const Space& X, const IdealTriangle& T, double horizon, double resolution) {
  if (!(horizon > 0)) throw invalid_parameter_error("horizon must be positive");
  if (!(resolution > 0)) throw invalid_parameter_error("resolution must be positive");
  if (X.kind() == Space::Kind::spiked_plane) {
    if (horizon < max_feet_gap(feet_of(T)))
      throw insufficient_horizon_error("horizon does not contain all three feet");
  } else if (X.kind() == Space::Kind::tree) {
    for (int i = 0; i < 3; ++i) {
      const double d = X.distance(X.point_at(T.sides[i], 0.0),
                                  X.point_at(T.sides[(i + 1) % 3], 0.0));
      if (horizon < d) throw insufficient_horizon_error("horizon does not contain the side anchors");
    }
  } else {
    throw unsupported_space_error("ideal triangles need a boundary at infinity");
  }

  double slim = 0;
  const int steps = int(std::floor(2 * horizon / resolution));
  for (int i = 0; i < 3; ++i) {
    const Geodesic& s1 = T.sides[(i + 1) % 3];
    const Geodesic& s2 = T.sides[(i + 2) % 3];
    for (int k = 0; k <= steps; ++k) {
      const SpacePoint x = X.point_at(T.sides[i], -horizon + k * resolution);
      slim = std::max(slim, std::min(X.project_onto(s1, x).dist, X.project_onto(s2, x).dist));
    }
  }
  return slim;
}

std::vector<SpacePoint> e_k_set(const Space& X, const IdealTriangle& T, double K,
                                double resolution) {
  const double g = dyadic_step(resolution);
  if (K < 0) throw invalid_parameter_error("K must be >= 0");
  switch (X.kind()) {
    case Space::Kind::spiked_plane:
      return collect_spiked_net(X, T, K, g).points;
    case Space::Kind::tree:
      return collect_tree_net(X, T, K, g);
    default:
      throw unsupported_space_error("ideal triangles need a boundary at infinity");
  }
}

double e_k_diameter_bound(const Space& X, const IdealTriangle& T, double K, double resolution) {
  const double g = dyadic_step(resolution);
  if (K < 0) throw invalid_parameter_error("K must be >= 0");
  if (X.kind() == Space::Kind::spiked_plane) {
    const SpikedNet net = collect_spiked_net(X, T, K, g);
    if (net.points.empty())
      throw empty_set_error("no net point lies within K of all three sides");
    return spiked_net_diameter(net);
  }
  if (X.kind() == Space::Kind::tree) {
    const auto pts = collect_tree_net(X, T, K, g);
    if (pts.empty()) throw empty_set_error("no net point lies within K of all three sides");
    return pts_diameter(X, pts);
  }
  throw unsupported_space_error("ideal triangles need a boundary at infinity");
}

CenterResult project(const Space& X, const IdealTriangle& T, double resolution) {
  const double g = dyadic_step(resolution);
  if (X.kind() == Space::Kind::spiked_plane) return project_spiked(X, T, g);
  if (X.kind() == Space::Kind::tree) return project_tree(X, T, g);
  throw unsupported_space_error("ideal triangles need a boundary at infinity");
}

}  // namespace morseb

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <queue>
#include <random>
#include <vector>

#include "doctest.h"
#include "morseb/space.hpp"
#include "morseb/util.hpp"

using namespace morseb;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

// ---------------------------------------------------------------------------
// Independent oracle: Dijkstra on a fine discretization of the spiked plane.
// Plane nodes form an 8-neighbor grid of spacing h; each lattice point also
// carries a chain of spike nodes at heights h, 2h, ...  Every graph path is a
// genuine path of the space, so the oracle over-estimates the metric by at
// most the grid stretch factor (sqrt(2)*cos(pi/8) < 1.083 for 8 neighbors)
// plus O(h) snapping at the endpoints, and never under-estimates it by more
// than the snapping error.
// ---------------------------------------------------------------------------

class DiscretizedPlane {
 public:
  DiscretizedPlane(int lo, int hi, int q, double max_height)
      : lo_(lo), hi_(hi), q_(q), h_(1.0 / q), kmax_(int(std::ceil(max_height * q))) {
    side_ = (hi_ - lo_) * q_ + 1;
    plane_count_ = side_ * side_;
    int next = plane_count_;
    for (int m = lo_; m <= hi_; ++m)
      for (int n = lo_; n <= hi_; ++n) {
        spike_base_[{m, n}] = next;
        next += kmax_;
      }
    total_ = next;
  }

  int plane_node(int i, int j) const { return i * side_ + j; }

  int snap(const SpacePoint& p, double* slack) const {
    if (auto* pl = std::get_if<PlanePoint>(&p)) {
      const int i = int(std::lround((pl->x - lo_) * q_));
      const int j = int(std::lround((pl->y - lo_) * q_));
      const double gx = lo_ + double(i) * h_, gy = lo_ + double(j) * h_;
      *slack = std::hypot(pl->x - gx, pl->y - gy);
      return plane_node(i, j);
    }
    const auto& s = std::get<SpikePoint>(p);
    const int k = std::max(1, std::min(kmax_, int(std::lround(s.t * q_))));
    *slack = std::abs(s.t - double(k) * h_);
    return spike_base_.at({s.m, s.n}) + (k - 1);
  }

  double dijkstra(int src, int dst) const {
    std::vector<double> d(total_, kInf);
    d[src] = 0;
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> q;
    q.push({0, src});
    const double diag = h_ * std::sqrt(2.0);
    while (!q.empty()) {
      auto [dd, u] = q.top();
      q.pop();
      if (dd > d[u]) continue;
      if (u == dst) return dd;
      auto relax = [&](int v, double w) {
        if (v < 0 || dd + w >= d[v]) return;
        d[v] = dd + w;
        q.push({d[v], v});
      };
      if (u < plane_count_) {
        const int i = u / side_, j = u % side_;
        for (int di = -1; di <= 1; ++di)
          for (int dj = -1; dj <= 1; ++dj) {
            if (di == 0 && dj == 0) continue;
            const int ni = i + di, nj = j + dj;
            if (ni < 0 || ni >= side_ || nj < 0 || nj >= side_) continue;
            relax(plane_node(ni, nj), (di && dj) ? diag : h_);
          }
        // Climb onto a spike when standing on its foot.
        if (i % q_ == 0 && j % q_ == 0)
          relax(spike_base_.at({lo_ + i / q_, lo_ + j / q_}), h_);
      } else {
        // Spike node: up, down, or back to the foot.
        int k = -1, m = 0, n = 0;
        for (const auto& [mn, base] : spike_base_) {
          if (u >= base && u < base + kmax_) {
            k = u - base;
            m = mn.first;
            n = mn.second;
            break;
          }
        }
        REQUIRE(k >= 0);
        if (k + 1 < kmax_) relax(u + 1, h_);
        if (k > 0)
          relax(u - 1, h_);
        else
          relax(plane_node((m - lo_) * q_, (n - lo_) * q_), h_);
      }
    }
    return d[dst];
  }

  double distance(const SpacePoint& a, const SpacePoint& b, double* slack) const {
    double sa = 0, sb = 0;
    const int na = snap(a, &sa);
    const int nb = snap(b, &sb);
    *slack = sa + sb;
    if (na == nb) return 0;
    return dijkstra(na, nb);
  }

 private:
  int lo_, hi_, q_;
  double h_;
  int kmax_, side_, plane_count_, total_;
  std::map<std::pair<int, int>, int> spike_base_;
};

SpacePoint random_spiked_point(std::mt19937_64& rng, double span, double max_h) {
  std::uniform_real_distribution<double> coord(-span, span);
  std::uniform_real_distribution<double> height(0.1, max_h);
  std::uniform_int_distribution<int> pick(0, 2);
  if (pick(rng) == 0) {
    std::uniform_int_distribution<int> lat(int(-span), int(span));
    return make_spike(lat(rng), lat(rng), height(rng));
  }
  return make_plane(coord(rng), coord(rng));
}

SpacePoint random_tree_point(const TreeSpace& T, std::mt19937_64& rng, int max_len) {
  std::uniform_int_distribution<int> len(0, max_len);
  std::uniform_int_distribution<int> let(0, T.degree() - 1);
  std::uniform_real_distribution<double> off(0.0, 1.0);
  Word w;
  const int target = len(rng);
  while (int(w.size()) < target) push_reduced(w, Letter(let(rng)));
  const double t = off(rng);
  if (t < 0.3) return T.vertex(w);
  Letter l = Letter(let(rng));
  while (!w.empty() && l == inverse_letter(w.back())) l = Letter(let(rng));
  return TreePoint{w, l, t, T.tag()};
}

GraphSpace test_graph() {
  // 6 vertices: a triangle 1-2-3 with a pendant path 3-4-5 and a heavy
  // shortcut 1-5, plus an isolated-looking spur 5-6.
  std::vector<GraphSpace::Edge> edges = {{0, 1, 1.0}, {1, 2, 2.0}, {0, 2, 2.5}, {2, 3, 1.5},
                                         {3, 4, 1.0}, {0, 4, 7.0}, {4, 5, 0.5}};
  return GraphSpace(6, edges);
}

SpacePoint random_graph_point(const GraphSpace& G, std::mt19937_64& rng,
                              const std::vector<GraphSpace::Edge>& edges) {
  std::uniform_int_distribution<int> pick(0, int(edges.size()) - 1);
  std::uniform_real_distribution<double> off(0.0, 1.0);
  const double t = off(rng);
  if (t < 0.25) {
    std::uniform_int_distribution<int> v(0, G.vertex_count() - 1);
    return G.vertex(v(rng));
  }
  const auto& e = edges[pick(rng)];
  return G.edge_point(e.u, e.v, off(rng) * e.w);
}

void check_metric_axioms(const Space& X, const std::vector<SpacePoint>& pts, std::uint64_t seed) {
  auto rng = rng_for(seed, 17);
  std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
  for (int it = 0; it < 10000; ++it) {
    const auto& a = pts[pick(rng)];
    const auto& b = pts[pick(rng)];
    const auto& c = pts[pick(rng)];
    const double ab = X.distance(a, b);
    const double ba = X.distance(b, a);
    const double ac = X.distance(a, c);
    const double cb = X.distance(c, b);
    REQUIRE(ab >= 0);
    REQUIRE(ab == ba);  // symmetry must be exact
    REQUIRE(ab <= ac + cb + 1e-9);
    if (same_point(a, b)) REQUIRE(ab == 0);
  }
  for (const auto& a : pts) REQUIRE(X.distance(a, a) == 0);
}

void check_geodesic_contract(const Space& X, const SpacePoint& a, const SpacePoint& b,
                             std::uint64_t seed) {
  const Geodesic g = X.geodesic(a, b);
  const double d = X.distance(a, b);
  REQUIRE(near(g.length(), d, 1e-9));
  REQUIRE(X.distance(X.point_at(g, g.s_min), a) <= 1e-9);
  REQUIRE(X.distance(X.point_at(g, g.s_max), b) <= 1e-9);
  auto rng = rng_for(seed, 23);
  std::uniform_real_distribution<double> par(g.s_min, g.s_max);
  for (int it = 0; it < 40; ++it) {
    const double s = par(rng), t = par(rng);
    const double dd = X.distance(X.point_at(g, s), X.point_at(g, t));
    REQUIRE(near(dd, std::abs(s - t), 1e-6));
  }
}

void check_projection_is_min(const Space& X, const Geodesic& g, const SpacePoint& x,
                             double lo, double hi, double step) {
  const auto pr = X.project_onto(g, x);
  REQUIRE(pr.param >= g.s_min - 1e-9);
  REQUIRE(pr.param <= g.s_max + 1e-9);
  REQUIRE(near(X.distance(x, X.point_at(g, pr.param)), pr.dist, 1e-9));
  for (double s = lo; s <= hi; s += step)
    REQUIRE(pr.dist <= X.distance(x, X.point_at(g, s)) + 1e-9);
}

}  // namespace

// ---------------------------------------------------------------------------
// Spiked plane
// ---------------------------------------------------------------------------

TEST_CASE("spiked plane: frozen distances") {
  SpikedPlane X;
  CHECK(X.distance(make_plane(0, 0), make_plane(3, 4)) == 5.0);
  CHECK(X.distance(make_spike(0, 0, 2), make_spike(1, 0, 3)) == 6.0);
  CHECK(X.distance(make_spike(5, 5, 7), make_spike(5, 5, 3)) == 4.0);
  CHECK(X.distance(make_plane(0.5, 0), make_spike(0, 0, 1)) == 1.5);
  CHECK(X.distance(make_spike(2, 1, 0.5), make_plane(2, 1)) == 0.5);
  // Height-0 spikes collapse onto the plane.
  CHECK(same_point(make_spike(3, -2, 0), make_plane(3, -2)));
  CHECK(X.distance(make_spike(3, -2, 0), make_plane(3, -2)) == 0);
}

TEST_CASE("spiked plane: metric matches a discretized oracle") {
  SpikedPlane X;
  const int q = 5;  // grid step 0.2
  const double h = 1.0 / q;
  DiscretizedPlane oracle(-3, 4, q, 3.0);
  auto rng = rng_for(20260817, 1);
  const double stretch = std::sqrt(2.0) * std::cos(std::acos(-1.0) / 8);
  for (int it = 0; it < 12; ++it) {
    const SpacePoint a = random_spiked_point(rng, 2.5, 2.5);
    const SpacePoint b = random_spiked_point(rng, 2.5, 2.5);
    double slack = 0;
    const double est = oracle.distance(a, b, &slack);
    const double d = X.distance(a, b);
    // Graph paths are genuine paths: they cannot beat the metric.
    CHECK(d <= est + slack + 1e-9);
    // And a geodesic is trackable on the grid up to stretch and snapping.
    CHECK(est <= stretch * (d + slack) + 6 * h);
  }
}

TEST_CASE("spiked plane: metric axioms on random triples") {
  SpikedPlane X;
  auto rng = rng_for(20260817, 2);
  std::vector<SpacePoint> pts;
  for (int i = 0; i < 60; ++i) pts.push_back(random_spiked_point(rng, 5.0, 4.0));
  pts.push_back(make_plane(0, 0));
  pts.push_back(make_spike(0, 0, 1));
  pts.push_back(make_spike(0, 0, 0));
  check_metric_axioms(X, pts, 20260817);
}

TEST_CASE("spiked plane: geodesics are unit-speed with correct endpoints") {
  SpikedPlane X;
  auto rng = rng_for(20260817, 3);
  for (int it = 0; it < 25; ++it) {
    const SpacePoint a = random_spiked_point(rng, 4.0, 3.0);
    const SpacePoint b = random_spiked_point(rng, 4.0, 3.0);
    check_geodesic_contract(X, a, b, 20260817 + it);
  }
  // Degenerate pair: the geodesic from a point to itself.
  const SpacePoint p = make_plane(0.3, -1.2);
  const Geodesic g = X.geodesic(p, p);
  CHECK(g.length() == 0);
  CHECK(same_point(X.point_at(g, 0), p));
  const SpacePoint s = make_spike(1, 1, 2);
  const Geodesic gs = X.geodesic(s, s);
  CHECK(gs.length() == 0);
  CHECK(same_point(X.point_at(gs, gs.s_min), s));
}

TEST_CASE("spiked plane: bi-infinite geodesics run spike-plane-spike") {
  SpikedPlane X;
  const BoundaryPoint a = make_direction(0, 0);
  const BoundaryPoint b = make_direction(3, 4);
  const Geodesic g = X.bi_infinite_geodesic(a, b);
  CHECK(g.kind == GeoKind::bi_infinite);
  // Feet at parameters 0 and 5, spikes beyond.
  CHECK(same_point(X.point_at(g, 0), make_plane(0, 0)));
  CHECK(same_point(X.point_at(g, 5), make_plane(3, 4)));
  CHECK(same_point(X.point_at(g, -2), make_spike(0, 0, 2)));
  CHECK(same_point(X.point_at(g, 7.5), make_spike(3, 4, 2.5)));
  CHECK(X.distance(X.point_at(g, -10), X.point_at(g, 12)) == 22.0);
  // The planar part has exactly the feet distance.
  CHECK(X.distance(X.point_at(g, 0), X.point_at(g, 5)) == 5.0);
  CHECK_THROWS_AS((void)X.bi_infinite_geodesic(a, make_direction(0, 0)), degenerate_pair_error);
}

TEST_CASE("spiked plane: rays start at the basepoint and climb the target spike") {
  SpikedPlane X;
  const BoundaryPoint dir = make_direction(2, 0);
  auto rng = rng_for(20260817, 4);
  for (const SpacePoint& x : {make_plane(0, 0), make_plane(-1.5, 2.25), make_spike(0, 1, 1.5),
                             make_spike(2, 0, 0.75)}) {
    const Geodesic r = X.ray_from(x, dir);
    CHECK(r.kind == GeoKind::ray);
    CHECK(r.s_min == 0);
    CHECK(same_point(X.point_at(r, 0), x));
    std::uniform_real_distribution<double> par(0.0, 20.0);
    for (int it = 0; it < 30; ++it) {
      const double s = par(rng), t = par(rng);
      CHECK(near(X.distance(X.point_at(r, s), X.point_at(r, t)), std::abs(s - t), 1e-6));
    }
    // Eventually the ray is on the spike, heading up.
    const SpacePoint far = X.point_at(r, 50.0);
    const auto* sp = std::get_if<SpikePoint>(&far);
    REQUIRE(sp != nullptr);
    CHECK(sp->m == 2);
    CHECK(sp->n == 0);
  }
}

TEST_CASE("spiked plane: projection attains the distance to the geodesic") {
  SpikedPlane X;
  auto rng = rng_for(20260817, 5);
  const Geodesic line = X.bi_infinite_geodesic(make_direction(0, 0), make_direction(2, 1));
  for (int it = 0; it < 20; ++it) {
    const SpacePoint x = random_spiked_point(rng, 3.0, 3.0);
    check_projection_is_min(X, line, x, -8.0, 12.0, 0.01);
  }
  for (int it = 0; it < 20; ++it) {
    const SpacePoint a = random_spiked_point(rng, 3.0, 2.0);
    const SpacePoint b = random_spiked_point(rng, 3.0, 2.0);
    const Geodesic g = X.geodesic(a, b);
    const SpacePoint x = random_spiked_point(rng, 3.0, 2.0);
    check_projection_is_min(X, g, x, g.s_min, g.s_max, std::max(1e-3, g.length() / 2000));
  }
  // A point on the line projects to itself.
  const auto pr = X.project_onto(line, make_spike(2, 1, 3));
  CHECK(pr.dist == 0);
  CHECK(same_point(X.point_at(line, pr.param), make_spike(2, 1, 3)));
}

TEST_CASE("spiked plane: lattice isometries act exactly") {
  SpikedPlane X;
  const GroupElement t = lattice_translation(3, -2);
  CHECK(same_point(X.act(t, make_plane(1, 1)), make_plane(4, -1)));
  CHECK(same_point(X.act(t, make_spike(0, 5, 2.5)), make_spike(3, 3, 2.5)));
  const GroupElement sw = lattice_axis_swap();
  CHECK(same_point(X.act(sw, make_plane(1, 2)), make_plane(2, 1)));

  auto rng = rng_for(20260817, 6);
  for (int it = 0; it < 200; ++it) {
    const SpacePoint a = random_spiked_point(rng, 4.0, 3.0);
    const SpacePoint b = random_spiked_point(rng, 4.0, 3.0);
    const double before = X.distance(a, b);
    const double after = X.distance(X.act(t, a), X.act(t, b));
    // Integer translations preserve integer data exactly; float coordinates
    // pick up at most rounding noise.
    CHECK(near(after, before, 1e-9));
  }
  // Integral inputs: exact equality.
  CHECK(X.distance(X.act(t, make_spike(1, 0, 2)), X.act(t, make_spike(4, 4, 1))) ==
        X.distance(make_spike(1, 0, 2), make_spike(4, 4, 1)));

  // act commutes with point_at on geodesics.
  const Geodesic g = X.geodesic(make_spike(0, 0, 1), make_plane(2.5, 1.5));
  const Geodesic gt = X.act(t, g);
  for (double s = g.s_min; s <= g.s_max; s += 0.3)
    CHECK(X.distance(X.act(t, X.point_at(g, s)), X.point_at(gt, s)) <= 1e-12);

  // Invalid linear parts are rejected.
  LatticeIsometry bad;
  bad.lin = {1, 1, 0, 1};
  CHECK_THROWS_AS((void)X.act(GroupElement{bad}, make_plane(0, 0)), invalid_parameter_error);
  CHECK(is_valid_lattice_isometry(lattice_axis_swap()));
  CHECK(!is_valid_lattice_isometry(bad));

  // inverse undoes the action.
  const GroupElement comp = LatticeIsometry{{0, -1, 1, 0}, 2, 5};
  const GroupElement inv = inverse(comp);
  const SpacePoint p = make_spike(3, -1, 0.5);
  CHECK(same_point(X.act(inv, X.act(comp, p)), p));
}

TEST_CASE("spiked plane: ball samples form a net of the requested resolution") {
  SpikedPlane X;
  auto rng = rng_for(20260817, 7);
  for (const SpacePoint& c : {make_plane(0.2, -0.4), make_spike(1, 0, 1.25)}) {
    const double radius = 2.0, res = 0.3;
    const auto net = X.ball_sample(c, radius, res);
    REQUIRE(!net.empty());
    for (const auto& p : net) CHECK(X.distance(p, c) <= radius + 1e-9);
    // Random ball points must be near some sample.
    for (int it = 0; it < 300; ++it) {
      SpacePoint probe = random_spiked_point(rng, 3.0, 3.0);
      if (X.distance(probe, c) > radius) continue;
      double best = kInf;
      for (const auto& p : net) best = std::min(best, X.distance(probe, p));
      CHECK(best <= res + 1e-9);
    }
    // Including points deep on spikes.
    for (const auto& p : net) {
      if (auto* sp = std::get_if<SpikePoint>(&p)) {
        const SpacePoint probe = make_spike(sp->m, sp->n, sp->t + res * 0.49);
        if (X.distance(probe, c) > radius) continue;
        double best = kInf;
        for (const auto& q : net) best = std::min(best, X.distance(probe, q));
        CHECK(best <= res + 1e-9);
      }
    }
  }
  CHECK(X.ball_sample(make_plane(0, 0), 0, 0.1).size() == 1);
  CHECK_THROWS_AS((void)X.ball_sample(make_plane(0, 0), 1.0, 0.0), invalid_parameter_error);
}

TEST_CASE("spiked plane: asymptotic gap between rays to one spike") {
  SpikedPlane X;
  const Geodesic r1 = X.ray_from(make_plane(0, 0), make_direction(0, 5));
  const Geodesic r2 = X.ray_from(make_plane(1, 0), make_direction(0, 5));
  // Identical rays: gap 0.
  CHECK(X.asymptotic_hausdorff(r1, r1, 10.0) == 0);
  // Both rays run to the same spike; past the feet they coincide, so the gap
  // never exceeds the initial planar separation.
  for (const double horizon : {5.0, 10.0, 25.0})
    CHECK(X.asymptotic_hausdorff(r1, r2, horizon) <= 1.0 + 1e-9);
  // Distinct spikes never converge.
  const Geodesic r3 = X.ray_from(make_plane(0, 0), make_direction(1, 5));
  CHECK_THROWS_AS((void)X.asymptotic_hausdorff(r1, r3, 10.0), not_asymptotic_error);
  CHECK_THROWS_AS((void)X.asymptotic_hausdorff(r1, r2, 0.0), invalid_parameter_error);
}

TEST_CASE("spiked plane: rejects foreign points and malformed input") {
  SpikedPlane X;
  TreeSpace T;
  CHECK_THROWS_AS((void)X.distance(make_plane(0, 0), T.vertex({})), incompatible_space_error);
  CHECK_THROWS_AS((void)make_spike(0, 0, -1.0), invalid_parameter_error);
  CHECK_THROWS_AS((void)X.act(GroupElement{TreeTranslation{{0}, T.tag()}}, make_plane(0, 0)),
                  incompatible_space_error);
}

// ---------------------------------------------------------------------------
// Tree
// ---------------------------------------------------------------------------

TEST_CASE("tree: vertex distance is the word metric") {
  TreeSpace T(4, 8);
  const Word u = word_from_string("abA");
  const Word v = word_from_string("abb");
  // Common prefix "ab": d = 3 + 3 - 2*2 = 2.
  CHECK(T.distance(T.vertex(u), T.vertex(v)) == 2.0);
  CHECK(T.distance(T.vertex({}), T.vertex(u)) == 3.0);
  auto rng = rng_for(20260817, 8);
  for (int it = 0; it < 500; ++it) {
    const SpacePoint a = random_tree_point(T, rng, 6);
    const SpacePoint b = random_tree_point(T, rng, 6);
    const auto& ta = std::get<TreePoint>(a);
    const auto& tb = std::get<TreePoint>(b);
    if (ta.offset == 0 && tb.offset == 0)
      CHECK(T.distance(a, b) == word_distance(ta.base, tb.base));
  }
}

TEST_CASE("tree: metric axioms and geodesic contract") {
  TreeSpace T(4, 8);
  auto rng = rng_for(20260817, 9);
  std::vector<SpacePoint> pts;
  for (int i = 0; i < 60; ++i) pts.push_back(random_tree_point(T, rng, 5));
  check_metric_axioms(T, pts, 20260818);
  for (int it = 0; it < 30; ++it) {
    const SpacePoint a = random_tree_point(T, rng, 5);
    const SpacePoint b = random_tree_point(T, rng, 5);
    check_geodesic_contract(T, a, b, 20260819 + it);
  }
}

TEST_CASE("tree: every triangle is 0-slim") {
  TreeSpace T(4, 8);
  auto rng = rng_for(20260817, 10);
  for (int it = 0; it < 20; ++it) {
    const SpacePoint a = random_tree_point(T, rng, 5);
    const SpacePoint b = random_tree_point(T, rng, 5);
    const SpacePoint c = random_tree_point(T, rng, 5);
    const Geodesic ab = T.geodesic(a, b);
    const Geodesic ac = T.geodesic(a, c);
    const Geodesic cb = T.geodesic(c, b);
    for (double s = ab.s_min; s <= ab.s_max; s += std::max(0.05, ab.length() / 40)) {
      const SpacePoint p = T.point_at(ab, s);
      const double gap =
          std::min(T.project_onto(ac, p).dist, T.project_onto(cb, p).dist);
      CHECK(gap <= 1e-9);
    }
  }
}

TEST_CASE("tree: rays and bi-infinite geodesics follow their ends") {
  TreeSpace T(4, 8);
  const BoundaryPoint e1 = T.end(word_from_string("ab"), word_from_string("a"));
  const BoundaryPoint e2 = T.end({}, word_from_string("b"));

  const Geodesic line = T.bi_infinite_geodesic(e1, e2);
  CHECK(line.kind == GeoKind::bi_infinite);
  for (double s = -6; s <= 6; s += 0.5)
    for (double t = -6; t <= 6; t += 0.5)
      CHECK(near(T.distance(T.point_at(line, s), T.point_at(line, t)), std::abs(s - t), 1e-9));
  // Anchor is the divergence vertex (the empty word here).
  CHECK(same_point(T.point_at(line, 0), T.vertex({})));
  CHECK(same_point(T.point_at(line, 3), T.vertex(word_from_string("bbb"))));
  CHECK(same_point(T.point_at(line, -2), T.vertex(word_from_string("ab"))));

  CHECK_THROWS_AS((void)T.bi_infinite_geodesic(e2, e2), degenerate_pair_error);

  auto rng = rng_for(20260817, 11);
  for (int it = 0; it < 10; ++it) {
    const SpacePoint x = random_tree_point(T, rng, 4);
    const Geodesic r = T.ray_from(x, e1);
    CHECK(r.s_min <= 0);
    CHECK(T.distance(T.point_at(r, r.s_min), x) <= 1e-12);
    for (double s = 0; s <= 8; s += 0.7)
      for (double t = 0; t <= 8; t += 0.9)
        CHECK(near(T.distance(T.point_at(r, s), T.point_at(r, t)), std::abs(s - t), 1e-9));
  }

  // Ends compare by their letter streams, not their spellings.
  CHECK(same_boundary_point(T.end(word_from_string("b"), word_from_string("b")), e2));
  CHECK(!same_boundary_point(e1, e2));
  CHECK_THROWS_AS((void)make_end(word_from_string("a"), word_from_string("A")),
                  invalid_parameter_error);
}

TEST_CASE("tree: projection attains the distance") {
  TreeSpace T(4, 8);
  auto rng = rng_for(20260817, 12);
  const Geodesic line = T.bi_infinite_geodesic(T.end({}, word_from_string("a")),
                                               T.end({}, word_from_string("b")));
  for (int it = 0; it < 30; ++it) {
    const SpacePoint x = random_tree_point(T, rng, 5);
    check_projection_is_min(T, line, x, -7.0, 7.0, 0.05);
  }
  for (int it = 0; it < 30; ++it) {
    const SpacePoint a = random_tree_point(T, rng, 5);
    const SpacePoint b = random_tree_point(T, rng, 5);
    if (same_point(a, b)) continue;
    const Geodesic g = T.geodesic(a, b);
    const SpacePoint x = random_tree_point(T, rng, 5);
    check_projection_is_min(T, g, x, g.s_min, g.s_max, std::max(0.02, g.length() / 200));
  }
}

TEST_CASE("tree: word translations act by isometries") {
  TreeSpace T(4, 8);
  const GroupElement g = TreeTranslation{word_from_string("ab"), T.tag()};
  auto rng = rng_for(20260817, 13);
  for (int it = 0; it < 300; ++it) {
    const SpacePoint a = random_tree_point(T, rng, 5);
    const SpacePoint b = random_tree_point(T, rng, 5);
    CHECK(near(T.distance(T.act(g, a), T.act(g, b)), T.distance(a, b), 1e-12));
  }
  // Vertices map by left multiplication.
  CHECK(same_point(T.act(g, T.vertex(word_from_string("Ba"))),
                   T.vertex(concat_reduce(word_from_string("ab"), word_from_string("Ba")))));
  // Edge midpoints survive cancellation: ab maps the edge (B, BA) onto the
  // edge (a, e), flipping its orientation.
  const SpacePoint mid = TreePoint{word_from_string("B"), Letter(1), 0.5, T.tag()};
  const SpacePoint moved = T.act(g, mid);
  CHECK(T.distance(moved, T.vertex(word_from_string("a"))) == 0.5);
  CHECK(T.distance(moved, T.vertex({})) == 0.5);
  CHECK(T.distance(moved, T.vertex(word_from_string("aB"))) == 1.5);

  // act commutes with point_at on geodesics and moves ends consistently.
  const Geodesic line = T.bi_infinite_geodesic(T.end({}, word_from_string("a")),
                                               T.end({}, word_from_string("b")));
  const Geodesic moved_line = T.act(g, line);
  for (double s = -5; s <= 5; s += 0.5)
    CHECK(T.distance(T.act(g, T.point_at(line, s)), T.point_at(moved_line, s)) <= 1e-12);
  const auto e = std::get<TreeEnd>(T.act(g, T.end({}, word_from_string("b"))));
  CHECK(same_boundary_point(BoundaryPoint{e}, T.end(word_from_string("ab"), word_from_string("b"))));
}

TEST_CASE("tree: ball samples form a net") {
  TreeSpace T(4, 6);
  auto rng = rng_for(20260817, 14);
  const SpacePoint c = TreePoint{word_from_string("a"), Letter(2), 0.4, T.tag()};
  const double radius = 2.3, res = 0.25;
  const auto net = T.ball_sample(c, radius, res);
  REQUIRE(!net.empty());
  for (const auto& p : net) CHECK(T.distance(p, c) <= radius + 1e-9);
  for (int it = 0; it < 400; ++it) {
    const SpacePoint probe = random_tree_point(T, rng, 4);
    if (T.distance(probe, c) > radius) continue;
    double best = kInf;
    for (const auto& p : net) best = std::min(best, T.distance(probe, p));
    CHECK(best <= res + 1e-9);
  }
}

TEST_CASE("tree: malformed input is rejected") {
  TreeSpace T(4, 8);
  CHECK_THROWS_AS((void)T.vertex(Word{Letter(0), Letter(1)}), invalid_parameter_error);
  CHECK_THROWS_AS((void)word_from_string("aA"), config_error);
  CHECK_THROWS_AS((void)word_from_string("xyz"), config_error);
  CHECK_THROWS_AS((void)TreeSpace(3, 8), invalid_parameter_error);
  CHECK_THROWS_AS((void)TreeSpace(4, 0), invalid_parameter_error);
  // Edge letter must extend the base without cancellation.
  const SpacePoint bad = TreePoint{word_from_string("a"), Letter(1), 0.5, T.tag()};
  CHECK_THROWS_AS((void)T.distance(bad, bad), invalid_parameter_error);
  // Foreign instance tags are rejected.
  TreeSpace T2(4, 8);
  CHECK_THROWS_AS((void)T.distance(T2.vertex({}), T2.vertex({})), incompatible_space_error);
  // Letters outside the alphabet.
  CHECK_THROWS_AS((void)T.vertex({Letter(7)}), incompatible_space_error);
  CHECK(T.words_of_length(2).size() == 12);  // 4 * 3
  CHECK(T.words_of_length(0).size() == 1);
}

// ---------------------------------------------------------------------------
// Graph
// ---------------------------------------------------------------------------

TEST_CASE("graph: distances match a subdivision oracle") {
  const GraphSpace G = test_graph();
  const std::vector<GraphSpace::Edge> edges = {{0, 1, 1.0}, {1, 2, 2.0}, {0, 2, 2.5}, {2, 3, 1.5},
                                               {3, 4, 1.0}, {0, 4, 7.0}, {4, 5, 0.5}};
  // Independent oracle: subdivide every edge into unit steps of 1/q and run
  // Dijkstra on the subdivision; interior points snap to subdivision nodes.
  const int q = 8;
  std::vector<std::vector<std::pair<int, double>>> adj;
  std::map<std::pair<std::pair<int, int>, int>, int> node_id;  // ((u,v) sorted, step)
  adj.resize(6);
  auto vid = [&](int v) { return v; };
  int next = 6;
  std::vector<std::vector<int>> chain(edges.size());
  for (std::size_t ei = 0; ei < edges.size(); ++ei) {
    const auto& e = edges[ei];
    const int steps = int(std::lround(e.w * q));
    std::vector<int> nodes{vid(e.u)};
    for (int k = 1; k < steps; ++k) {
      adj.push_back({});
      nodes.push_back(next++);
    }
    nodes.push_back(vid(e.v));
    for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
      adj[nodes[k]].push_back({nodes[k + 1], e.w / steps});
      adj[nodes[k + 1]].push_back({nodes[k], e.w / steps});
    }
    chain[ei] = nodes;
  }
  auto dijkstra = [&](int s, int t) {
    std::vector<double> d(adj.size(), kInf);
    d[s] = 0;
    std::priority_queue<std::pair<double, int>, std::vector<std::pair<double, int>>,
                        std::greater<>> pq;
    pq.push({0, s});
    while (!pq.empty()) {
      auto [dd, u] = pq.top();
      pq.pop();
      if (dd > d[u]) continue;
      for (auto [v, w] : adj[u])
        if (dd + w < d[v]) {
          d[v] = dd + w;
          pq.push({d[v], v});
        }
    }
    return d[t];
  };
  auto snap = [&](const GraphPoint& p, double* slack) {
    if (p.offset == 0) {
      *slack = 0;
      return vid(p.u);
    }
    for (std::size_t ei = 0; ei < edges.size(); ++ei) {
      const auto& e = edges[ei];
      if ((e.u == p.u && e.v == p.v) || (e.u == p.v && e.v == p.u)) {
        const int steps = int(chain[ei].size()) - 1;
        const double off = (e.u == p.u) ? p.offset : e.w - p.offset;
        const int k = std::clamp(int(std::lround(off / e.w * steps)), 0, steps);
        *slack = std::abs(off - double(k) * e.w / steps);
        return chain[ei][k];
      }
    }
    REQUIRE(false);
    return -1;
  };
  auto rng = rng_for(20260817, 15);
  for (int it = 0; it < 300; ++it) {
    const SpacePoint a = random_graph_point(G, rng, edges);
    const SpacePoint b = random_graph_point(G, rng, edges);
    const auto& ga = std::get<GraphPoint>(a);
    const auto& gb = std::get<GraphPoint>(b);
    double sa = 0, sb = 0;
    const int na = snap(ga, &sa);
    const int nb = snap(gb, &sb);
    const double est = (na == nb) ? 0.0 : dijkstra(na, nb);
    CHECK(near(G.distance(a, b), est, sa + sb + 1e-9));
  }
}

TEST_CASE("graph: frozen distances") {
  const GraphSpace G = test_graph();
  CHECK(G.distance(G.vertex(0), G.vertex(2)) == 2.5);        // direct edge beats 1+2
  CHECK(G.distance(G.vertex(0), G.vertex(4)) == 5.0);        // around, not the weight-7 edge
  CHECK(G.distance(G.vertex(0), G.vertex(5)) == 5.5);
  CHECK(G.distance(G.edge_point(0, 4, 1.0), G.vertex(0)) == 1.0);
  // Interior of the heavy edge: going back around can win.
  CHECK(near(G.distance(G.edge_point(0, 4, 6.5), G.vertex(0)), 5.5, 1e-12));
  // Same-edge pair where the detour through the graph beats the edge.
  CHECK(near(G.distance(G.edge_point(0, 4, 0.5), G.edge_point(0, 4, 6.5)), 0.5 + 5.0 + 0.5, 1e-12));
}

TEST_CASE("graph: metric axioms, geodesics, and projections") {
  const GraphSpace G = test_graph();
  const std::vector<GraphSpace::Edge> edges = {{0, 1, 1.0}, {1, 2, 2.0}, {0, 2, 2.5}, {2, 3, 1.5},
                                               {3, 4, 1.0}, {0, 4, 7.0}, {4, 5, 0.5}};
  auto rng = rng_for(20260817, 16);
  std::vector<SpacePoint> pts;
  for (int i = 0; i < 50; ++i) pts.push_back(random_graph_point(G, rng, edges));
  check_metric_axioms(G, pts, 20260820);
  for (int it = 0; it < 40; ++it) {
    const SpacePoint a = random_graph_point(G, rng, edges);
    const SpacePoint b = random_graph_point(G, rng, edges);
    check_geodesic_contract(G, a, b, 20260821 + it);
  }
  for (int it = 0; it < 40; ++it) {
    const SpacePoint a = random_graph_point(G, rng, edges);
    const SpacePoint b = random_graph_point(G, rng, edges);
    const SpacePoint x = random_graph_point(G, rng, edges);
    const Geodesic g = G.geodesic(a, b);
    check_projection_is_min(G, g, x, g.s_min, g.s_max, std::max(0.01, g.length() / 400));
  }
}

TEST_CASE("graph: ball samples form a net") {
  const GraphSpace G = test_graph();
  const std::vector<GraphSpace::Edge> edges = {{0, 1, 1.0}, {1, 2, 2.0}, {0, 2, 2.5}, {2, 3, 1.5},
                                               {3, 4, 1.0}, {0, 4, 7.0}, {4, 5, 0.5}};
  const SpacePoint c = G.edge_point(1, 2, 0.7);
  const double radius = 2.0, res = 0.2;
  const auto net = G.ball_sample(c, radius, res);
  REQUIRE(!net.empty());
  for (const auto& p : net) CHECK(G.distance(p, c) <= radius + 1e-9);
  auto rng = rng_for(20260817, 17);
  for (int it = 0; it < 400; ++it) {
    const SpacePoint probe = random_graph_point(G, rng, edges);
    if (G.distance(probe, c) > radius) continue;
    double best = kInf;
    for (const auto& p : net) best = std::min(best, G.distance(probe, p));
    CHECK(best <= res + 1e-9);
  }
}

TEST_CASE("graph: no boundary and no group action") {
  const GraphSpace G = test_graph();
  CHECK(!G.boundary_supported());
  CHECK_THROWS_AS((void)G.bi_infinite_geodesic(make_direction(0, 0), make_direction(1, 0)),
                  unsupported_space_error);
  CHECK_THROWS_AS((void)G.ray_from(G.vertex(0), make_direction(0, 0)), unsupported_space_error);
  CHECK_THROWS_AS((void)G.act(lattice_translation(1, 0), G.vertex(0)), unsupported_space_error);
}

TEST_CASE("graph: construction rejects malformed graphs") {
  CHECK_THROWS_AS((void)GraphSpace(2, {{0, 1, 1.0}, {1, 0, 2.0}}), config_error);
  CHECK_THROWS_AS((void)GraphSpace(2, {{0, 0, 1.0}}), config_error);
  CHECK_THROWS_AS((void)GraphSpace(2, {{0, 1, -1.0}}), config_error);
  CHECK_THROWS_AS((void)GraphSpace(3, {{0, 1, 1.0}}), config_error);  // disconnected
  const GraphSpace G = test_graph();
  CHECK_THROWS_AS((void)G.edge_point(0, 3, 0.5), invalid_parameter_error);  // no such edge
  CHECK_THROWS_AS((void)G.edge_point(0, 1, 1.5), invalid_parameter_error);  // past the end
  CHECK(same_point(G.edge_point(0, 1, 1.0), G.vertex(1)));
  CHECK(same_point(G.edge_point(1, 0, 0.3), G.edge_point(0, 1, 0.7)));
}

TEST_CASE("graph: edge list files parse with comments and 1-based ids") {
  const std::string path = "test_edges_tmp.txt";
  {
    std::ofstream out(path);
    out << "# toy graph\n";
    out << "1 2 1.5\n";
    out << "2 3 2.0  # inline note\n";
    out << "\n";
    out << "1 3 4.0\n";
  }
  const GraphSpace G = GraphSpace::from_edge_list(path);
  CHECK(G.vertex_count() == 3);
  CHECK(G.distance(G.vertex(0), G.vertex(2)) == 3.5);
  std::remove(path.c_str());
  CHECK_THROWS_AS((void)GraphSpace::from_edge_list("no_such_file.txt"), config_error);
}

// ---------------------------------------------------------------------------
// Config plumbing
// ---------------------------------------------------------------------------

TEST_CASE("space configs select and parameterize the space kind") {
  const std::string cfg_path = "test_space_cfg_tmp.txt";
  {
    std::ofstream out(cfg_path);
    out << "kind = tree\n";
    out << "degree = 6\n";
    out << "depth = 5\n";
  }
  const auto T = space_from_config(cfg_path);
  CHECK(T->name() == "tree");
  CHECK(dynamic_cast<TreeSpace&>(*T).degree() == 6);
  {
    std::ofstream out(cfg_path);
    out << "kind = spiked_plane\n";
    out << "window = 16\n";
  }
  const auto X = space_from_config(cfg_path);
  CHECK(X->name() == "spiked_plane");
  CHECK(dynamic_cast<SpikedPlane&>(*X).lattice_window() == 16);
  {
    std::ofstream out(cfg_path);
    out << "kind = nonsense\n";
  }
  CHECK_THROWS_AS((void)space_from_config(cfg_path), config_error);
  std::remove(cfg_path.c_str());
}

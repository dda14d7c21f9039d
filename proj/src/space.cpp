#include "morseb/space.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <set>
#include <sstream>
#include <tuple>

#include "morseb/config.hpp"

namespace morseb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vec2 foot(const SpikePoint& s) { return {double(s.m), double(s.n)}; }
Vec2 foot(const SpikeDirection& d) { return {double(d.m), double(d.n)}; }

int ifloor(double v) { return int(std::floor(v)); }

}  // namespace

// ---------------------------------------------------------------------------
// Point helpers
// ---------------------------------------------------------------------------

SpacePoint make_plane(double x, double y) { return PlanePoint{x, y}; }

SpacePoint make_spike(int m, int n, double t) {
  if (t < 0) throw invalid_parameter_error("spike height must be >= 0");
  if (t == 0) return PlanePoint{double(m), double(n)};
  return SpikePoint{m, n, t};
}

namespace {

// Canonical coordinates (x, y, height) shared by both spiked-plane point
// kinds; height-0 spike points coincide with the plane point at their foot.
std::array<double, 3> plane_key(const SpacePoint& p) {
  if (auto* pl = std::get_if<PlanePoint>(&p)) return {pl->x, pl->y, 0.0};
  const auto& s = std::get<SpikePoint>(p);
  return {double(s.m), double(s.n), s.t};
}

bool is_planar_kind(const SpacePoint& p) {
  return std::holds_alternative<PlanePoint>(p) || std::holds_alternative<SpikePoint>(p);
}

}  // namespace

bool same_point(const SpacePoint& a, const SpacePoint& b) {
  if (is_planar_kind(a) && is_planar_kind(b)) return plane_key(a) == plane_key(b);
  if (a.index() != b.index()) return false;
  if (auto* ta = std::get_if<TreePoint>(&a)) {
    const auto& tb = std::get<TreePoint>(b);
    return ta->tag == tb.tag && ta->base == tb.base &&
           (ta->offset == 0 ? tb.offset == 0
                            : ta->letter == tb.letter && ta->offset == tb.offset);
  }
  const auto& ga = std::get<GraphPoint>(a);
  const auto& gb = std::get<GraphPoint>(b);
  return ga.tag == gb.tag && ga.u == gb.u && ga.v == gb.v && ga.offset == gb.offset;
}

bool lex_less(const SpacePoint& a, const SpacePoint& b) {
  if (is_planar_kind(a) && is_planar_kind(b)) return plane_key(a) < plane_key(b);
  if (a.index() != b.index()) return a.index() < b.index();
  if (auto* ta = std::get_if<TreePoint>(&a)) {
    const auto& tb = std::get<TreePoint>(b);
    return std::tie(ta->base, ta->letter, ta->offset) < std::tie(tb.base, tb.letter, tb.offset);
  }
  const auto& ga = std::get<GraphPoint>(a);
  const auto& gb = std::get<GraphPoint>(b);
  return std::tie(ga.u, ga.v, ga.offset) < std::tie(gb.u, gb.v, gb.offset);
}

std::string to_string(const SpacePoint& p) {
  std::ostringstream os;
  if (auto* pl = std::get_if<PlanePoint>(&p)) {
    os << "plane(" << pl->x << "," << pl->y << ")";
  } else if (auto* s = std::get_if<SpikePoint>(&p)) {
    os << "spike(" << s->m << "," << s->n << ";" << s->t << ")";
  } else if (auto* t = std::get_if<TreePoint>(&p)) {
    os << "tree(" << word_to_string(t->base);
    if (t->offset > 0) os << "+" << word_to_string(Word{t->letter}) << ":" << t->offset;
    os << ")";
  } else {
    const auto& g = std::get<GraphPoint>(p);
    os << "graph(" << g.u + 1;
    if (g.offset > 0) os << "-" << g.v + 1 << ":" << g.offset;
    os << ")";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Boundary helpers
// ---------------------------------------------------------------------------

BoundaryPoint make_direction(int m, int n) { return SpikeDirection{m, n}; }

BoundaryPoint make_end(const Word& prefix, const Word& cycle, int tag) {
  if (cycle.empty()) throw invalid_parameter_error("tree end needs a nonempty cycle");
  const Word twice = concat_reduce(concat_reduce(prefix, cycle), cycle);
  if (twice.size() != prefix.size() + 2 * cycle.size())
    throw invalid_parameter_error("tree end word prefix*cycle^2 is not reduced");
  return TreeEnd{prefix, cycle, tag};
}

Letter end_letter(const TreeEnd& e, std::size_t i) {
  if (i < e.prefix.size()) return e.prefix[i];
  return e.cycle[(i - e.prefix.size()) % e.cycle.size()];
}

std::string to_string(const BoundaryPoint& b) {
  std::ostringstream os;
  if (auto* d = std::get_if<SpikeDirection>(&b)) {
    os << "dir(" << d->m << "," << d->n << ")";
  } else {
    const auto& e = std::get<TreeEnd>(b);
    os << "end(" << word_to_string(e.prefix) << ";" << word_to_string(e.cycle) << ")";
  }
  return os.str();
}

bool same_boundary_point(const BoundaryPoint& a, const BoundaryPoint& b) {
  if (a.index() != b.index()) return false;
  if (auto* da = std::get_if<SpikeDirection>(&a)) {
    const auto& db = std::get<SpikeDirection>(b);
    return da->m == db.m && da->n == db.n;
  }
  const auto& ea = std::get<TreeEnd>(a);
  const auto& eb = std::get<TreeEnd>(b);
  if (ea.tag != eb.tag) return false;
  // Two eventually periodic letter sequences agree everywhere iff they agree
  // on a prefix of length max preperiod + both periods.
  const std::size_t need =
      std::max(ea.prefix.size(), eb.prefix.size()) + ea.cycle.size() + eb.cycle.size() + 1;
  for (std::size_t i = 0; i < need; ++i)
    if (end_letter(ea, i) != end_letter(eb, i)) return false;
  return true;
}

bool lex_less(const BoundaryPoint& a, const BoundaryPoint& b) {
  if (a.index() != b.index()) return a.index() < b.index();
  if (auto* da = std::get_if<SpikeDirection>(&a)) {
    const auto& db = std::get<SpikeDirection>(b);
    return std::tie(da->m, da->n) < std::tie(db.m, db.n);
  }
  const auto& ea = std::get<TreeEnd>(a);
  const auto& eb = std::get<TreeEnd>(b);
  const std::size_t need =
      std::max(ea.prefix.size(), eb.prefix.size()) + ea.cycle.size() + eb.cycle.size() + 1;
  for (std::size_t i = 0; i < need; ++i) {
    if (end_letter(ea, i) != end_letter(eb, i)) return end_letter(ea, i) < end_letter(eb, i);
  }
  return false;
}

// ---------------------------------------------------------------------------
// Group element helpers
// ---------------------------------------------------------------------------

LatticeIsometry lattice_translation(int tx, int ty) {
  LatticeIsometry g;
  g.tx = tx;
  g.ty = ty;
  return g;
}

LatticeIsometry lattice_axis_swap() {
  LatticeIsometry g;
  g.lin = {0, 1, 1, 0};
  return g;
}

bool is_valid_lattice_isometry(const LatticeIsometry& g) {
  const int a = g.lin[0], b = g.lin[1], c = g.lin[2], d = g.lin[3];
  // Signed coordinate permutation: one entry of absolute value 1 per row and
  // column, all else zero.
  const bool diag = (b == 0 && c == 0 && std::abs(a) == 1 && std::abs(d) == 1);
  const bool anti = (a == 0 && d == 0 && std::abs(b) == 1 && std::abs(c) == 1);
  return diag || anti;
}

GroupElement inverse(const GroupElement& g) {
  if (auto* iso = std::get_if<LatticeIsometry>(&g)) {
    const int a = iso->lin[0], b = iso->lin[1], c = iso->lin[2], d = iso->lin[3];
    const int det = a * d - b * c;  // +-1 for signed permutations
    LatticeIsometry inv;
    inv.lin = {d * det, -b * det, -c * det, a * det};
    inv.tx = -(inv.lin[0] * iso->tx + inv.lin[1] * iso->ty);
    inv.ty = -(inv.lin[2] * iso->tx + inv.lin[3] * iso->ty);
    return inv;
  }
  const auto& t = std::get<TreeTranslation>(g);
  return TreeTranslation{inverse_word(t.w), t.tag};
}

namespace {

Vec2 apply_lin(const LatticeIsometry& g, Vec2 v) {
  return {g.lin[0] * v.x + g.lin[1] * v.y, g.lin[2] * v.x + g.lin[3] * v.y};
}

Vec2 apply_iso(const LatticeIsometry& g, Vec2 v) {
  Vec2 w = apply_lin(g, v);
  return {w.x + g.tx, w.y + g.ty};
}

std::pair<int, int> apply_iso(const LatticeIsometry& g, int m, int n) {
  return {g.lin[0] * m + g.lin[1] * n + g.tx, g.lin[2] * m + g.lin[3] * n + g.ty};
}

const LatticeIsometry& as_lattice(const GroupElement& g) {
  const auto* iso = std::get_if<LatticeIsometry>(&g);
  if (!iso) throw incompatible_space_error("spiked plane expects a lattice isometry");
  if (!is_valid_lattice_isometry(*iso))
    throw invalid_parameter_error("linear part does not preserve the lattice");
  return *iso;
}

}  // namespace

// ---------------------------------------------------------------------------
// Shared Space machinery
// ---------------------------------------------------------------------------

void Space::require_kind(const SpacePoint& p) const {
  const bool ok = (kind() == Kind::spiked_plane && is_planar_kind(p)) ||
                  (kind() == Kind::tree && std::holds_alternative<TreePoint>(p)) ||
                  (kind() == Kind::graph && std::holds_alternative<GraphPoint>(p));
  if (!ok)
    throw incompatible_space_error("point " + morseb::to_string(p) + " does not belong to " +
                                   name());
}

void Space::require_kind(const BoundaryPoint& b) const {
  const bool ok = (kind() == Kind::spiked_plane && std::holds_alternative<SpikeDirection>(b)) ||
                  (kind() == Kind::tree && std::holds_alternative<TreeEnd>(b));
  if (!ok)
    throw incompatible_space_error("boundary point " + morseb::to_string(b) +
                                   " does not belong to " + name());
}

void Space::require_kind(const Geodesic& g) const {
  const bool ok = (kind() == Kind::spiked_plane && std::holds_alternative<SpikedRep>(g.rep)) ||
                  (kind() == Kind::tree && std::holds_alternative<TreeRep>(g.rep)) ||
                  (kind() == Kind::graph && std::holds_alternative<GraphRep>(g.rep));
  if (!ok) throw incompatible_space_error("geodesic does not belong to " + name());
}

double Space::asymptotic_hausdorff(const Geodesic& alpha, const Geodesic& beta,
                                   double horizon) const {
  require_kind(alpha);
  require_kind(beta);
  if (horizon <= 0) throw invalid_parameter_error("horizon must be positive");
  if (alpha.kind == GeoKind::finite || beta.kind == GeoKind::finite)
    throw invalid_parameter_error("asymptotic_hausdorff expects infinite rays");
  if (!alpha.dir_max || !beta.dir_max || !same_boundary_point(*alpha.dir_max, *beta.dir_max))
    throw not_asymptotic_error("rays do not converge to the same boundary point");

  const double step = std::max(1e-3, std::min(0.05, horizon / 4000.0));
  const SpacePoint base = point_at(alpha, alpha.s_min);
  double sup = 0;
  for (double s = alpha.s_min; s <= alpha.s_min + horizon + step / 2; s += step)
    sup = std::max(sup, project_onto(beta, point_at(alpha, s)).dist);
  // beta points within the horizon ball around alpha's start.
  const double reach = horizon + distance(base, point_at(beta, beta.s_min));
  for (double s = beta.s_min; s <= beta.s_min + reach + step / 2; s += step) {
    const SpacePoint q = point_at(beta, s);
    if (distance(base, q) > horizon) continue;
    sup = std::max(sup, project_onto(alpha, q).dist);
  }
  return sup;
}

// ---------------------------------------------------------------------------
// SpikedPlane
// ---------------------------------------------------------------------------

SpikedPlane::SpikedPlane(int lattice_window) : lattice_window_(lattice_window) {
  if (lattice_window < 1) throw invalid_parameter_error("lattice window must be >= 1");
}

double SpikedPlane::distance(const SpacePoint& a, const SpacePoint& b) const {
  require_kind(a);
  require_kind(b);
  if (auto* pa = std::get_if<PlanePoint>(&a)) {
    if (auto* pb = std::get_if<PlanePoint>(&b)) return dist({pa->x, pa->y}, {pb->x, pb->y});
    const auto& sb = std::get<SpikePoint>(b);
    return sb.t + dist({pa->x, pa->y}, foot(sb));
  }
  const auto& sa = std::get<SpikePoint>(a);
  if (auto* pb = std::get_if<PlanePoint>(&b)) return sa.t + dist(foot(sa), {pb->x, pb->y});
  const auto& sb = std::get<SpikePoint>(b);
  if (sa.m == sb.m && sa.n == sb.n) return std::abs(sa.t - sb.t);
  return sa.t + sb.t + dist(foot(sa), foot(sb));
}

namespace {

// Assembles descent + planar segment + climb with parameter 0 at the start
// of the planar segment.  Heights of finite pieces anchor at s0; a descent
// from infinity anchors at s1 (see SpikePiece).
Geodesic assemble_spiked(std::optional<std::pair<Vec2, double>> descend_from,
                         std::optional<std::pair<Vec2, Vec2>> planar,
                         std::optional<std::pair<Vec2, double>> climb_to, bool descend_infinite) {
  Geodesic g;
  SpikedRep rep;
  if (descend_from) {
    const Vec2 f = descend_from->first;
    const double h = descend_from->second;
    SpikePiece p;
    p.m = ifloor(f.x + 0.5);
    p.n = ifloor(f.y + 0.5);
    p.slope = -1;
    p.s1 = 0;
    p.s0 = descend_infinite ? -kInf : -h;
    p.h0 = descend_infinite ? 0 : h;
    rep.pieces.push_back(p);
  }
  double planar_len = 0;
  if (planar) planar_len = dist(planar->first, planar->second);
  if (planar && (planar_len > 0 || (!descend_from && !climb_to))) {
    PlanarPiece p;
    p.s0 = 0;
    p.s1 = planar_len;
    p.p0 = planar->first;
    p.dir = planar_len > 0 ? (1.0 / planar_len) * (planar->second - planar->first) : Vec2{1, 0};
    rep.pieces.push_back(p);
  }
  if (climb_to) {
    const Vec2 f = climb_to->first;
    const double h = climb_to->second;
    SpikePiece p;
    p.m = ifloor(f.x + 0.5);
    p.n = ifloor(f.y + 0.5);
    p.slope = 1;
    p.s0 = planar_len;
    p.h0 = 0;
    p.s1 = std::isinf(h) ? kInf : planar_len + h;
    rep.pieces.push_back(p);
  }
  g.rep = std::move(rep);
  return g;
}

}  // namespace

Geodesic SpikedPlane::geodesic(const SpacePoint& a, const SpacePoint& b) const {
  require_kind(a);
  require_kind(b);
  const auto key_a = plane_key(a);
  const auto key_b = plane_key(b);

  if (auto* sa = std::get_if<SpikePoint>(&a)) {
    if (auto* sb = std::get_if<SpikePoint>(&b); sb && sa->m == sb->m && sa->n == sb->n) {
      // 1-dimensional case: vertical segment on one spike.
      Geodesic g;
      SpikedRep rep;
      SpikePiece p;
      p.m = sa->m;
      p.n = sa->n;
      p.s0 = 0;
      p.s1 = std::abs(sb->t - sa->t);
      p.h0 = sa->t;
      p.slope = (sb->t >= sa->t) ? 1 : -1;
      rep.pieces.push_back(p);
      g.rep = std::move(rep);
      g.kind = GeoKind::finite;
      g.s_min = 0;
      g.s_max = p.s1;
      return g;
    }
  }

  std::optional<std::pair<Vec2, double>> down, up;
  const Vec2 pa{key_a[0], key_a[1]}, pb{key_b[0], key_b[1]};
  if (key_a[2] > 0) down = {{pa.x, pa.y}, key_a[2]};
  if (key_b[2] > 0) up = {{pb.x, pb.y}, key_b[2]};
  Geodesic g = assemble_spiked(down, {{pa, pb}}, up, false);
  g.kind = GeoKind::finite;
  g.s_min = -key_a[2];
  g.s_max = dist(pa, pb) + key_b[2];
  return g;
}

Geodesic SpikedPlane::bi_infinite_geodesic(const BoundaryPoint& a, const BoundaryPoint& b) const {
  require_kind(a);
  require_kind(b);
  const auto& da = std::get<SpikeDirection>(a);
  const auto& db = std::get<SpikeDirection>(b);
  if (da.m == db.m && da.n == db.n)
    throw degenerate_pair_error("bi-infinite geodesic needs two distinct boundary points");
  Geodesic g = assemble_spiked({{foot(da), kInf}}, {{foot(da), foot(db)}}, {{foot(db), kInf}}, true);
  g.kind = GeoKind::bi_infinite;
  g.s_min = -kInf;
  g.s_max = kInf;
  g.dir_min = a;
  g.dir_max = b;
  return g;
}

Geodesic SpikedPlane::ray_from(const SpacePoint& x, const BoundaryPoint& a) const {
  require_kind(x);
  require_kind(a);
  const auto& d = std::get<SpikeDirection>(a);
  Geodesic g;
  if (auto* sx = std::get_if<SpikePoint>(&x); sx && sx->m == d.m && sx->n == d.n) {
    // Already on the target spike: climb straight up from height t.
    g = assemble_spiked(std::nullopt, std::nullopt, {{foot(d), kInf}}, false);
    std::get<SpikePiece>(std::get<SpikedRep>(g.rep).pieces.back()).h0 = sx->t;
  } else {
    const auto key = plane_key(x);
    const Vec2 px{key[0], key[1]};
    std::optional<std::pair<Vec2, double>> down;
    if (key[2] > 0) down = {{px.x, px.y}, key[2]};
    g = assemble_spiked(down, {{px, foot(d)}}, {{foot(d), kInf}}, false);
    if (down) {
      // Shift so the ray starts at parameter 0.
      for (auto& piece : std::get<SpikedRep>(g.rep).pieces)
        std::visit(
            [&](auto& pp) {
              pp.s0 += key[2];
              pp.s1 += key[2];
            },
            piece);
    }
  }
  g.kind = GeoKind::ray;
  g.s_min = 0;
  g.s_max = kInf;
  g.dir_max = a;
  return g;
}

std::vector<SpacePoint> SpikedPlane::ball_sample(const SpacePoint& center, double radius,
                                                 double resolution) const {
  require_kind(center);
  if (resolution <= 0) throw invalid_parameter_error("resolution must be positive");
  if (radius < 0) throw invalid_parameter_error("radius must be >= 0");
  if (radius == 0) return {center};

  const auto key = plane_key(center);
  const Vec2 c{key[0], key[1]};
  const double h = key[2];
  std::vector<SpacePoint> out;

  // Planar part: a square grid of spacing resolution/sqrt(2), so that every
  // disk point has an in-disk grid point within resolution (round each
  // coordinate toward the center).
  const double rp = radius - h;
  if (rp >= 0) {
    const double g = resolution / std::sqrt(2.0);
    const int kmax = int(std::floor(rp / g)) + 1;
    for (int i = -kmax; i <= kmax; ++i) {
      for (int j = -kmax; j <= kmax; ++j) {
        const Vec2 q{c.x + i * g, c.y + j * g};
        if (dist(q, c) <= rp) out.push_back(PlanePoint{q.x, q.y});
      }
    }
    // Spikes rooted inside the planar disk: the foot plus a vertical ladder
    // up to the remaining budget, tip included.
    for (int m = ifloor(c.x - rp); m <= ifloor(c.x + rp) + 1; ++m) {
      for (int n = ifloor(c.y - rp); n <= ifloor(c.y + rp) + 1; ++n) {
        const double budget = radius - (h + dist({double(m), double(n)}, c));
        if (budget < 0) continue;
        out.push_back(PlanePoint{double(m), double(n)});
        for (double t = resolution; t < budget; t += resolution)
          out.push_back(SpikePoint{m, n, t});
        if (budget > 0) out.push_back(SpikePoint{m, n, budget});
      }
    }
  }

  // Segment of the center's own spike (the ball always contains it).
  if (h > 0) {
    const auto& sc = std::get<SpikePoint>(center);
    const double lo = std::max(0.0, h - radius), hi = h + radius;
    for (double t = lo; t < hi; t += resolution) out.push_back(make_spike(sc.m, sc.n, t));
    out.push_back(SpikePoint{sc.m, sc.n, hi});
  }
  return out;
}

SpacePoint SpikedPlane::act(const GroupElement& g, const SpacePoint& p) const {
  require_kind(p);
  const LatticeIsometry& iso = as_lattice(g);
  if (auto* pl = std::get_if<PlanePoint>(&p)) {
    const Vec2 q = apply_iso(iso, {pl->x, pl->y});
    return PlanePoint{q.x, q.y};
  }
  const auto& s = std::get<SpikePoint>(p);
  const auto [m, n] = apply_iso(iso, s.m, s.n);
  return SpikePoint{m, n, s.t};
}

BoundaryPoint SpikedPlane::act(const GroupElement& g, const BoundaryPoint& b) const {
  require_kind(b);
  const LatticeIsometry& iso = as_lattice(g);
  const auto& d = std::get<SpikeDirection>(b);
  const auto [m, n] = apply_iso(iso, d.m, d.n);
  return SpikeDirection{m, n};
}

Geodesic SpikedPlane::act(const GroupElement& g, const Geodesic& gamma) const {
  require_kind(gamma);
  const LatticeIsometry& iso = as_lattice(g);
  Geodesic out = gamma;
  for (auto& piece : std::get<SpikedRep>(out.rep).pieces) {
    if (auto* pl = std::get_if<PlanarPiece>(&piece)) {
      pl->p0 = apply_iso(iso, pl->p0);
      pl->dir = apply_lin(iso, pl->dir);
    } else {
      auto& sp = std::get<SpikePiece>(piece);
      const auto [m, n] = apply_iso(iso, sp.m, sp.n);
      sp.m = m;
      sp.n = n;
    }
  }
  if (out.dir_min) out.dir_min = act(g, *out.dir_min);
  if (out.dir_max) out.dir_max = act(g, *out.dir_max);
  return out;
}

SpacePoint SpikedPlane::point_at(const Geodesic& gamma, double s) const {
  require_kind(gamma);
  const auto& rep = std::get<SpikedRep>(gamma.rep);
  if (rep.pieces.empty()) throw invalid_parameter_error("empty geodesic");
  s = std::clamp(s, gamma.s_min, gamma.s_max);
  for (std::size_t i = 0; i < rep.pieces.size(); ++i) {
    const auto& piece = rep.pieces[i];
    const double s1 = std::visit([](const auto& p) { return p.s1; }, piece);
    // Advance at piece boundaries: the later piece anchors its endpoint on
    // exact lattice data, so boundary parameters come out exact.
    if (s >= s1 && i + 1 < rep.pieces.size()) continue;
    if (auto* pl = std::get_if<PlanarPiece>(&piece)) {
      const double u = std::clamp(s, pl->s0, pl->s1) - pl->s0;
      const Vec2 q = pl->p0 + u * pl->dir;
      return PlanePoint{q.x, q.y};
    }
    const auto& sp = std::get<SpikePiece>(piece);
    const double anchor = std::isinf(sp.s0) ? sp.s1 : sp.s0;
    const double hgt = sp.h0 + sp.slope * (std::clamp(s, sp.s0, sp.s1) - anchor);
    return make_spike(sp.m, sp.n, std::max(0.0, hgt));
  }
  return point_at(gamma, gamma.s_max);
}

ProjectionResult SpikedPlane::project_onto(const Geodesic& gamma, const SpacePoint& x) const {
  require_kind(gamma);
  require_kind(x);
  const auto& rep = std::get<SpikedRep>(gamma.rep);
  if (rep.pieces.empty()) throw invalid_parameter_error("empty geodesic");
  const auto key = plane_key(x);
  const Vec2 px{key[0], key[1]};
  const double hx = key[2];
  const auto* sx = std::get_if<SpikePoint>(&x);

  ProjectionResult best{0, kInf};
  auto consider = [&](double param, double d) {
    if (d < best.dist || (d == best.dist && param < best.param)) best = {param, d};
  };

  for (const auto& piece : rep.pieces) {
    if (auto* pl = std::get_if<PlanarPiece>(&piece)) {
      const double len = pl->s1 - pl->s0;
      const auto pr = project_to_segment(px, pl->p0, pl->p0 + len * pl->dir);
      consider(pl->s0 + pr.param, hx + pr.dist);
    } else {
      const auto& sp = std::get<SpikePiece>(piece);
      // Height range covered by the piece and the parameter of its low end.
      double h_lo, h_hi, s_at_lo;
      if (sp.slope > 0) {
        h_lo = sp.h0;
        s_at_lo = sp.s0;
        h_hi = std::isinf(sp.s1) ? kInf : sp.h0 + (sp.s1 - sp.s0);
      } else if (std::isinf(sp.s0)) {
        h_lo = sp.h0;
        s_at_lo = sp.s1;
        h_hi = kInf;
      } else {
        h_lo = sp.h0 - (sp.s1 - sp.s0);
        s_at_lo = sp.s1;
        h_hi = sp.h0;
      }
      auto s_of_h = [&](double hgt) { return s_at_lo + sp.slope * (hgt - h_lo); };
      if (sx && sx->m == sp.m && sx->n == sp.n) {
        const double hgt = std::isinf(h_hi) ? std::max(hx, h_lo) : std::clamp(hx, h_lo, h_hi);
        consider(s_of_h(hgt), std::abs(hx - hgt));
      } else {
        consider(s_of_h(h_lo), hx + dist(px, {double(sp.m), double(sp.n)}) + h_lo);
      }
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// TreeSpace
// ---------------------------------------------------------------------------

namespace {
std::atomic_int g_next_tree_tag{1};
std::atomic_int g_next_graph_tag{1};
}  // namespace

TreeSpace::TreeSpace(int degree, int depth_cap)
    : degree_(degree), depth_cap_(depth_cap), tag_(g_next_tree_tag.fetch_add(1)) {
  if (degree < 2 || degree % 2 != 0 || degree > 16)
    throw invalid_parameter_error("tree degree must be even and in [2, 16]");
  if (depth_cap < 1) throw invalid_parameter_error("depth cap must be >= 1");
}

void TreeSpace::check_word(const Word& w) const {
  for (Letter l : w)
    if (l < 0 || l >= degree_) throw incompatible_space_error("letter outside tree alphabet");
  if (!is_reduced(w)) throw invalid_parameter_error("tree vertex word must be reduced");
}

void TreeSpace::check_end(const TreeEnd& e) const {
  if (e.tag != tag_) throw incompatible_space_error("tree end belongs to another tree instance");
  check_word(e.prefix);
  check_word(e.cycle);
  if (e.cycle.empty()) throw invalid_parameter_error("tree end needs a nonempty cycle");
}

const TreePoint& TreeSpace::pt(const SpacePoint& p) const {
  require_kind(p);
  const auto& t = std::get<TreePoint>(p);
  if (t.tag != tag_) throw incompatible_space_error("tree point belongs to another tree instance");
  check_word(t.base);
  if (t.offset < 0 || t.offset >= 1) throw invalid_parameter_error("edge offset must lie in [0,1)");
  if (t.offset > 0) {
    if (t.letter < 0 || t.letter >= degree_)
      throw incompatible_space_error("edge letter outside tree alphabet");
    if (!t.base.empty() && t.letter == inverse_letter(t.base.back()))
      throw invalid_parameter_error("tree point edge must extend its base vertex");
  }
  return t;
}

TreePoint TreeSpace::canonical(TreePoint p) const {
  if (p.offset == 0) p.letter = -1;
  return p;
}

SpacePoint TreeSpace::vertex(const Word& w) const {
  check_word(w);
  return TreePoint{w, -1, 0, tag_};
}

BoundaryPoint TreeSpace::end(const Word& prefix, const Word& cycle) const {
  check_word(prefix);
  check_word(cycle);
  return make_end(prefix, cycle, tag_);
}

TreeEnd TreeSpace::end_from_word(const Word& w) const {
  check_word(w);
  if (w.empty()) throw invalid_parameter_error("cannot extend the empty word to an end");
  return std::get<TreeEnd>(end(w, Word{w.back()}));
}

std::vector<Word> TreeSpace::words_of_length(int len) const {
  std::vector<Word> cur{Word{}};
  for (int i = 0; i < len; ++i) {
    std::vector<Word> next;
    next.reserve(cur.size() * (degree_ - 1) + 1);
    for (const auto& w : cur) {
      for (Letter l = 0; l < degree_; ++l) {
        if (!w.empty() && l == inverse_letter(w.back())) continue;
        Word e = w;
        e.push_back(l);
        next.push_back(std::move(e));
      }
    }
    cur = std::move(next);
  }
  return cur;
}

double TreeSpace::distance(const SpacePoint& a, const SpacePoint& b) const {
  const TreePoint ta = canonical(pt(a));
  const TreePoint tb = canonical(pt(b));
  if (ta.offset > 0 && tb.offset > 0 && ta.base == tb.base && ta.letter == tb.letter)
    return std::abs(ta.offset - tb.offset);
  // Otherwise every path runs through an edge endpoint of each point.
  auto ends = [](const TreePoint& t) {
    std::vector<std::pair<Word, double>> v;
    v.push_back({t.base, t.offset});
    if (t.offset > 0) {
      Word far = t.base;
      far.push_back(t.letter);
      v.push_back({std::move(far), 1 - t.offset});
    }
    return v;
  };
  double best = kInf;
  for (const auto& [wa, ca] : ends(ta))
    for (const auto& [wb, cb] : ends(tb)) best = std::min(best, ca + cb + word_distance(wa, wb));
  return best;
}

namespace {

// Letters along the tree path between two vertices: up from `from` to the
// longest common prefix, then down toward `to`.
Word path_letters(const Word& from, const Word& to) {
  const std::size_t k = common_prefix_length(from, to);
  Word out;
  out.reserve(from.size() + to.size() - 2 * k);
  for (std::size_t i = from.size(); i > k; --i) out.push_back(inverse_letter(from[i - 1]));
  for (std::size_t i = k; i < to.size(); ++i) out.push_back(to[i]);
  return out;
}

}  // namespace

Geodesic TreeSpace::geodesic(const SpacePoint& a, const SpacePoint& b) const {
  const TreePoint ta = canonical(pt(a));
  const TreePoint tb = canonical(pt(b));
  Geodesic g;
  g.kind = GeoKind::finite;
  TreeRep rep;
  rep.tag = tag_;

  if (ta.offset > 0 && tb.offset > 0 && ta.base == tb.base && ta.letter == tb.letter) {
    // Both points inside one edge; orient the segment from a to b.
    if (ta.offset <= tb.offset) {
      rep.anchor = ta.base;
      rep.pos.head = Word{ta.letter};
      g.s_min = ta.offset;
      g.s_max = tb.offset;
    } else {
      rep.anchor = ta.base;
      rep.anchor.push_back(ta.letter);
      rep.pos.head = Word{inverse_letter(ta.letter)};
      g.s_min = 1 - ta.offset;
      g.s_max = 1 - tb.offset;
    }
    g.rep = std::move(rep);
    return g;
  }

  auto endpoint = [](const TreePoint& t, bool far_side) {
    Word w = t.base;
    if (t.offset > 0 && far_side) w.push_back(t.letter);
    return w;
  };
  const Word va = endpoint(ta, false), va_far = endpoint(ta, true);
  const Word vb = endpoint(tb, false), vb_far = endpoint(tb, true);

  // Exit vertex of each point: the endpoint of its edge the path leaves
  // through.  Strict comparisons suffice; ties would force two distinct
  // geodesics, impossible in a tree.
  Word a_exit = va;
  double a_cost = 0;
  if (ta.offset > 0) {
    const double near_cost =
        ta.offset + std::min(word_distance(va, vb), word_distance(va, vb_far));
    const double far_cost =
        (1 - ta.offset) + std::min(word_distance(va_far, vb), word_distance(va_far, vb_far));
    if (far_cost < near_cost) {
      a_exit = va_far;
      a_cost = 1 - ta.offset;
    } else {
      a_cost = ta.offset;
    }
  }
  Word b_exit = vb;
  double b_cost = 0;
  if (tb.offset > 0) {
    const double near_cost = tb.offset + word_distance(vb, a_exit);
    const double far_cost = (1 - tb.offset) + word_distance(vb_far, a_exit);
    if (far_cost < near_cost) {
      b_exit = vb_far;
      b_cost = 1 - tb.offset;
    } else {
      b_cost = tb.offset;
    }
  }

  rep.anchor = a_exit;
  if (a_cost > 0) rep.neg.head = path_letters(a_exit, a_exit == va ? va_far : va);
  rep.pos.head = path_letters(a_exit, b_exit);
  const double spine = double(rep.pos.head.size());
  if (b_cost > 0) {
    const Word ext = path_letters(b_exit, b_exit == vb ? vb_far : vb);
    rep.pos.head.insert(rep.pos.head.end(), ext.begin(), ext.end());
  }
  g.s_min = -a_cost;
  g.s_max = spine + b_cost;
  g.rep = std::move(rep);
  return g;
}

Geodesic TreeSpace::bi_infinite_geodesic(const BoundaryPoint& a, const BoundaryPoint& b) const {
  require_kind(a);
  require_kind(b);
  const auto& ea = std::get<TreeEnd>(a);
  const auto& eb = std::get<TreeEnd>(b);
  check_end(ea);
  check_end(eb);
  if (same_boundary_point(a, b))
    throw degenerate_pair_error("bi-infinite geodesic needs two distinct ends");

  // Anchor at the divergence vertex: the longest common prefix of the two
  // infinite words (finite because the ends are distinct).
  const std::size_t need =
      std::max(ea.prefix.size(), eb.prefix.size()) + ea.cycle.size() + eb.cycle.size() + 2;
  Word anchor;
  std::size_t k = 0;
  while (k < need && end_letter(ea, k) == end_letter(eb, k)) {
    anchor.push_back(end_letter(ea, k));
    ++k;
  }
  Geodesic g;
  g.kind = GeoKind::bi_infinite;
  g.s_min = -kInf;
  g.s_max = kInf;
  TreeRep rep;
  rep.tag = tag_;
  rep.anchor = std::move(anchor);
  rep.neg.tail = ea;
  rep.neg.tail_start = k;
  rep.pos.tail = eb;
  rep.pos.tail_start = k;
  g.rep = std::move(rep);
  g.dir_min = a;
  g.dir_max = b;
  return g;
}

Geodesic TreeSpace::ray_from(const SpacePoint& x, const BoundaryPoint& a) const {
  const TreePoint tx = canonical(pt(x));
  require_kind(a);
  const auto& e = std::get<TreeEnd>(a);
  check_end(e);

  // Stream of the ray from a vertex: up to the divergence vertex with the
  // end's infinite word, then along the end.
  auto stream_from = [&](const Word& u) {
    std::size_t k = 0;
    while (k < u.size() && end_letter(e, k) == u[k]) ++k;
    TreeStream s;
    for (std::size_t i = u.size(); i > k; --i) s.head.push_back(inverse_letter(u[i - 1]));
    s.tail = e;
    s.tail_start = k;
    return s;
  };

  Geodesic g;
  g.kind = GeoKind::ray;
  g.s_max = kInf;
  g.dir_max = a;
  TreeRep rep;
  rep.tag = tag_;

  if (tx.offset == 0) {
    rep.anchor = tx.base;
    rep.pos = stream_from(tx.base);
    g.s_min = 0;
  } else {
    TreeStream from_base = stream_from(tx.base);
    const Letter first =
        from_base.head.empty() ? end_letter(e, from_base.tail_start) : from_base.head.front();
    if (first == tx.letter) {
      // The ray leaves through the far endpoint of x's edge.
      Word far = tx.base;
      far.push_back(tx.letter);
      rep.pos = stream_from(far);
      rep.anchor = std::move(far);
      rep.neg.head = Word{inverse_letter(tx.letter)};
      g.s_min = -(1 - tx.offset);
    } else {
      rep.anchor = tx.base;
      rep.pos = std::move(from_base);
      rep.neg.head = Word{tx.letter};
      g.s_min = -tx.offset;
    }
  }
  g.rep = std::move(rep);
  return g;
}

std::vector<SpacePoint> TreeSpace::ball_sample(const SpacePoint& center, double radius,
                                               double resolution) const {
  const TreePoint tc = canonical(pt(center));
  if (resolution <= 0) throw invalid_parameter_error("resolution must be positive");
  if (radius < 0) throw invalid_parameter_error("radius must be >= 0");
  if (radius == 0) return {center};

  const SpacePoint c = TreePoint{tc.base, tc.letter, tc.offset, tag_};
  // Vertices reachable within radius + 1 (so partially covered edges keep
  // their canonical owner in the search), by breadth-first search; the
  // neighbors of w are the reduced products w * l.
  std::set<Word> seen{tc.base};
  std::vector<Word> frontier{tc.base};
  std::vector<Word> in_reach{tc.base};
  while (!frontier.empty()) {
    std::vector<Word> next;
    for (const auto& w : frontier) {
      for (Letter l = 0; l < degree_; ++l) {
        Word nb = w;
        push_reduced(nb, l);
        if (seen.count(nb)) continue;
        if (distance(vertex(nb), c) > radius + 1) continue;
        seen.insert(nb);
        in_reach.push_back(nb);
        next.push_back(std::move(nb));
      }
    }
    frontier = std::move(next);
  }

  std::vector<SpacePoint> out;
  for (const auto& w : in_reach) {
    const SpacePoint v = vertex(w);
    if (distance(v, c) <= radius) out.push_back(v);
    // Sample the edges this vertex canonically owns (the ones extending it).
    for (Letter l = 0; l < degree_; ++l) {
      if (!w.empty() && l == inverse_letter(w.back())) continue;
      for (double t = resolution; t < 1.0; t += resolution) {
        TreePoint p{w, l, t, tag_};
        if (distance(p, c) <= radius) out.push_back(p);
      }
    }
  }
  return out;
}

SpacePoint TreeSpace::act(const GroupElement& g, const SpacePoint& p) const {
  const TreePoint tp = canonical(pt(p));
  const auto* tr = std::get_if<TreeTranslation>(&g);
  if (!tr) throw incompatible_space_error("tree expects a word translation");
  check_word(tr->w);
  const Word base2 = concat_reduce(tr->w, tp.base);
  if (tp.offset == 0) return TreePoint{base2, -1, 0, tag_};
  Word far = tp.base;
  far.push_back(tp.letter);
  const Word far2 = concat_reduce(tr->w, far);
  // Adjacent vertices stay adjacent; keep the shorter word as the base.
  if (far2.size() > base2.size()) return TreePoint{base2, far2.back(), tp.offset, tag_};
  return TreePoint{far2, base2.back(), 1 - tp.offset, tag_};
}

BoundaryPoint TreeSpace::act(const GroupElement& g, const BoundaryPoint& b) const {
  require_kind(b);
  const auto& e = std::get<TreeEnd>(b);
  check_end(e);
  const auto* tr = std::get_if<TreeTranslation>(&g);
  if (!tr) throw incompatible_space_error("tree expects a word translation");
  check_word(tr->w);
  // Expand enough cycles that all cancellation happens inside the expanded
  // prefix, then strip whole trailing cycles back off.
  Word big = e.prefix;
  const std::size_t copies = tr->w.size() / e.cycle.size() + 2;
  for (std::size_t i = 0; i < copies; ++i) big = concat_reduce(big, e.cycle);
  Word moved = concat_reduce(tr->w, big);
  while (moved.size() >= e.cycle.size() &&
         std::equal(e.cycle.begin(), e.cycle.end(), moved.end() - e.cycle.size()))
    moved.resize(moved.size() - e.cycle.size());
  return end(moved, e.cycle);
}

Geodesic TreeSpace::act(const GroupElement& g, const Geodesic& gamma) const {
  require_kind(gamma);
  const auto& rep = std::get<TreeRep>(gamma.rep);
  if (rep.tag != tag_) throw incompatible_space_error("geodesic belongs to another tree instance");
  const auto* tr = std::get_if<TreeTranslation>(&g);
  if (!tr) throw incompatible_space_error("tree expects a word translation");
  check_word(tr->w);

  Geodesic out = gamma;
  auto& orep = std::get<TreeRep>(out.rep);
  orep.anchor = concat_reduce(tr->w, rep.anchor);
  auto act_stream = [&](const TreeStream& s) {
    TreeStream ns;
    if (s.tail) {
      // Infinite side: recompute the stream from the moved anchor to the
      // moved end.
      const auto moved = std::get<TreeEnd>(act(g, BoundaryPoint{*s.tail}));
      std::size_t k = 0;
      while (k < orep.anchor.size() && end_letter(moved, k) == orep.anchor[k]) ++k;
      for (std::size_t i = orep.anchor.size(); i > k; --i)
        ns.head.push_back(inverse_letter(orep.anchor[i - 1]));
      ns.tail = moved;
      ns.tail_start = k;
    } else {
      // Finite side: move the far endpoint and rebuild the letter path.
      Word target = rep.anchor;
      for (Letter l : s.head) push_reduced(target, l);
      ns.head = path_letters(orep.anchor, concat_reduce(tr->w, target));
    }
    return ns;
  };
  orep.neg = act_stream(rep.neg);
  orep.pos = act_stream(rep.pos);
  if (out.dir_min) out.dir_min = act(g, *out.dir_min);
  if (out.dir_max) out.dir_max = act(g, *out.dir_max);
  return out;
}

SpacePoint TreeSpace::point_at(const Geodesic& gamma, double s) const {
  require_kind(gamma);
  const auto& rep = std::get<TreeRep>(gamma.rep);
  if (rep.tag != tag_) throw incompatible_space_error("geodesic belongs to another tree instance");
  s = std::clamp(s, gamma.s_min, gamma.s_max);
  const TreeStream& stream = (s >= 0) ? rep.pos : rep.neg;
  const double a = std::abs(s);
  const std::size_t whole = std::size_t(std::floor(a + 1e-12));
  const double frac = a - double(whole);
  Word w = rep.anchor;
  for (std::size_t i = 0; i < whole; ++i) push_reduced(w, stream.at(i));
  if (frac <= 1e-12) return vertex(w);
  const Letter next = stream.at(whole);
  Word far = w;
  push_reduced(far, next);
  if (far.size() > w.size()) return TreePoint{w, next, frac, tag_};
  return TreePoint{far, w.back(), 1 - frac, tag_};
}

ProjectionResult TreeSpace::project_onto(const Geodesic& gamma, const SpacePoint& x) const {
  require_kind(gamma);
  const TreePoint tx = canonical(pt(x));
  const auto& rep = std::get<TreeRep>(gamma.rep);
  if (rep.tag != tag_) throw incompatible_space_error("geodesic belongs to another tree instance");

  auto shared_len = [&](const TreeStream& st, const Word& p) {
    std::size_t k = 0;
    while (k < p.size()) {
      if (k >= st.head.size() && !st.tail) break;
      if (st.at(k) != p[k]) break;
      ++k;
    }
    return k;
  };
  // Unclamped projection of a vertex onto the full line: walk from the
  // anchor along whichever stream tracks the path longest.
  auto project_vertex = [&](const Word& v) -> std::pair<double, double> {
    const Word p = path_letters(rep.anchor, v);
    const std::size_t kp = shared_len(rep.pos, p);
    const std::size_t kn = shared_len(rep.neg, p);
    if (kp >= kn) return {double(kp), double(p.size() - kp)};
    return {-double(kn), double(p.size() - kn)};
  };

  double s_star, d;
  if (tx.offset == 0) {
    std::tie(s_star, d) = project_vertex(tx.base);
  } else {
    Word far = tx.base;
    far.push_back(tx.letter);
    const auto [sv, dv] = project_vertex(tx.base);
    const auto [sw, dw] = project_vertex(far);
    if (dv == 0 && dw == 0) {
      // x's edge lies on the line; x projects to itself.
      s_star = sv + (sw - sv) * tx.offset;
      d = 0;
    } else if (dv + tx.offset <= dw + (1 - tx.offset)) {
      s_star = sv;
      d = dv + tx.offset;
    } else {
      s_star = sw;
      d = dw + (1 - tx.offset);
    }
  }
  if (s_star < gamma.s_min) return {gamma.s_min, distance(point_at(gamma, gamma.s_min), x)};
  if (s_star > gamma.s_max) return {gamma.s_max, distance(point_at(gamma, gamma.s_max), x)};
  return {s_star, d};
}

// ---------------------------------------------------------------------------
// GraphSpace
// ---------------------------------------------------------------------------

GraphSpace::GraphSpace(int vertex_count, std::vector<Edge> edges)
    : n_(vertex_count), edges_(std::move(edges)), tag_(g_next_graph_tag.fetch_add(1)) {
  if (n_ < 1) throw config_error("graph needs at least one vertex");
  adj_.assign(n_, {});
  std::set<std::pair<int, int>> pairs;
  for (const auto& e : edges_) {
    if (e.u < 0 || e.u >= n_ || e.v < 0 || e.v >= n_)
      throw config_error("edge endpoint out of range");
    if (e.u == e.v) throw config_error("self-loops are not allowed");
    if (!(e.w > 0)) throw config_error("edge weights must be positive");
    if (!pairs.insert({std::min(e.u, e.v), std::max(e.u, e.v)}).second)
      throw config_error("duplicate edge");
    adj_[e.u].push_back({e.v, e.w});
    adj_[e.v].push_back({e.u, e.w});
  }
  dist_cache_.assign(n_, {});
  dist_ready_.assign(n_, false);
  const auto& d0 = dist_from(0);
  for (int v = 0; v < n_; ++v)
    if (std::isinf(d0[v])) throw config_error("graph must be connected");
}

GraphSpace GraphSpace::from_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open edge list: " + path);
  std::vector<Edge> edges;
  long maxv = 0;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    long u, v;
    double w;
    if (!(ls >> u)) continue;
    if (!(ls >> v >> w)) throw config_error("edge line needs 'u v weight': " + line);
    if (u < 1 || v < 1) throw config_error("vertex ids are 1-based");
    edges.push_back({int(u - 1), int(v - 1), w});
    maxv = std::max({maxv, u, v});
  }
  if (edges.empty()) throw config_error("edge list is empty");
  return GraphSpace(int(maxv), std::move(edges));
}

const GraphPoint& GraphSpace::pt(const SpacePoint& p) const {
  require_kind(p);
  const auto& g = std::get<GraphPoint>(p);
  if (g.tag != tag_)
    throw incompatible_space_error("graph point belongs to another graph instance");
  if (g.u < 0 || g.u >= n_ || g.v < 0 || g.v >= n_)
    throw incompatible_space_error("graph vertex id out of range");
  if (g.offset < 0) throw invalid_parameter_error("offset must be >= 0");
  if (g.offset > 0 && edge_weight(g.u, g.v) < g.offset)
    throw invalid_parameter_error("offset exceeds edge length");
  return g;
}

double GraphSpace::edge_weight(int u, int v) const {
  for (const auto& [w2, wt] : adj_[u])
    if (w2 == v) return wt;
  throw invalid_parameter_error("no such edge");
}

GraphPoint GraphSpace::canonical(GraphPoint p) const {
  if (p.u == p.v || p.offset == 0) return GraphPoint{p.u, p.u, 0, p.tag};
  const double w = edge_weight(p.u, p.v);
  if (p.offset == w) return GraphPoint{p.v, p.v, 0, p.tag};
  if (p.v < p.u) return GraphPoint{p.v, p.u, w - p.offset, p.tag};
  return p;
}

const std::vector<double>& GraphSpace::dist_from(int v) const {
  if (!dist_ready_[v]) {
    std::vector<double> d(n_, kInf);
    d[v] = 0;
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> q;
    q.push({0, v});
    while (!q.empty()) {
      auto [dd, u] = q.top();
      q.pop();
      if (dd > d[u]) continue;
      for (const auto& [w, wt] : adj_[u]) {
        if (d[u] + wt < d[w]) {
          d[w] = d[u] + wt;
          q.push({d[w], w});
        }
      }
    }
    dist_cache_[v] = std::move(d);
    dist_ready_[v] = true;
  }
  return dist_cache_[v];
}

std::vector<int> GraphSpace::shortest_path(int u, int v) const {
  const auto& du = dist_from(u);
  std::vector<int> rev{v};
  int cur = v;
  while (cur != u) {
    int nxt = -1;
    for (const auto& [w, wt] : adj_[cur]) {
      if (std::abs(du[cur] - wt - du[w]) < 1e-12 && (nxt == -1 || w < nxt)) nxt = w;
    }
    if (nxt == -1) throw error("internal: broken shortest-path walk");
    rev.push_back(nxt);
    cur = nxt;
  }
  std::reverse(rev.begin(), rev.end());
  return rev;
}

SpacePoint GraphSpace::vertex(int v) const {
  if (v < 0 || v >= n_) throw incompatible_space_error("graph vertex id out of range");
  return GraphPoint{v, v, 0, tag_};
}

SpacePoint GraphSpace::edge_point(int u, int v, double offset) const {
  if (u < 0 || u >= n_ || v < 0 || v >= n_)
    throw incompatible_space_error("graph vertex id out of range");
  if (offset < 0) throw invalid_parameter_error("offset must be >= 0");
  if (u == v) {
    if (offset != 0) throw invalid_parameter_error("offset on a vertex must be 0");
    return vertex(u);
  }
  if (offset > edge_weight(u, v)) throw invalid_parameter_error("offset exceeds edge length");
  return canonical(GraphPoint{u, v, offset, tag_});
}

double GraphSpace::distance(const SpacePoint& a, const SpacePoint& b) const {
  const GraphPoint ga = canonical(pt(a));
  const GraphPoint gb = canonical(pt(b));
  if (ga.offset > 0 && gb.offset > 0 && ga.u == gb.u && ga.v == gb.v) {
    // Same edge: straight along it, or detour around through the graph.
    const double w = edge_weight(ga.u, ga.v);
    const double direct = std::abs(ga.offset - gb.offset);
    return std::min(direct, w - direct + dist_from(ga.u)[ga.v]);
  }
  auto ends = [&](const GraphPoint& g) {
    std::vector<std::pair<int, double>> v;
    v.push_back({g.u, g.offset});
    if (g.offset > 0) v.push_back({g.v, edge_weight(g.u, g.v) - g.offset});
    return v;
  };
  double best = kInf;
  for (const auto& [va, ca] : ends(ga))
    for (const auto& [vb, cb] : ends(gb)) best = std::min(best, ca + cb + dist_from(va)[vb]);
  return best;
}

Geodesic GraphSpace::geodesic(const SpacePoint& a, const SpacePoint& b) const {
  const GraphPoint ga = canonical(pt(a));
  const GraphPoint gb = canonical(pt(b));
  Geodesic g;
  g.kind = GeoKind::finite;
  GraphRep rep;
  rep.tag = tag_;

  if (ga.offset > 0 && gb.offset > 0 && ga.u == gb.u && ga.v == gb.v) {
    const double w = edge_weight(ga.u, ga.v);
    const double direct = std::abs(ga.offset - gb.offset);
    if (direct <= w - direct + dist_from(ga.u)[ga.v]) {
      // Straight along the shared edge, oriented from a to b.
      if (ga.offset <= gb.offset) {
        rep.path = {ga.u, ga.v};
        rep.off0 = ga.offset;
      } else {
        rep.path = {ga.v, ga.u};
        rep.off0 = w - ga.offset;
      }
      rep.cum = {0, w};
      g.s_min = 0;
      g.s_max = direct;
      g.rep = std::move(rep);
      return g;
    }
  }

  auto ends = [&](const GraphPoint& p) {
    std::vector<std::pair<int, double>> v;
    v.push_back({p.u, p.offset});
    if (p.offset > 0) v.push_back({p.v, edge_weight(p.u, p.v) - p.offset});
    return v;
  };
  double best = kInf;
  int ea = ga.u, eb = gb.u;
  double ca = 0, cb = 0;
  for (const auto& [va, da] : ends(ga)) {
    for (const auto& [vb, db] : ends(gb)) {
      const double tot = da + db + dist_from(va)[vb];
      if (tot < best - 1e-15) {
        best = tot;
        ea = va;
        eb = vb;
        ca = da;
        cb = db;
      }
    }
  }
  std::vector<int> path = shortest_path(ea, eb);
  if (ca > 0) path.insert(path.begin(), ea == ga.u ? ga.v : ga.u);
  if (cb > 0) path.push_back(eb == gb.u ? gb.v : gb.u);
  rep.path = path;
  rep.cum.assign(path.size(), 0);
  for (std::size_t i = 1; i < path.size(); ++i)
    rep.cum[i] = rep.cum[i - 1] + edge_weight(path[i - 1], path[i]);
  rep.off0 = (ca > 0) ? edge_weight(path[0], path[1]) - ca : 0;
  g.s_min = 0;
  g.s_max = best;
  g.rep = std::move(rep);
  return g;
}

Geodesic GraphSpace::bi_infinite_geodesic(const BoundaryPoint&, const BoundaryPoint&) const {
  throw unsupported_space_error("a finite graph has no boundary at infinity");
}

Geodesic GraphSpace::ray_from(const SpacePoint&, const BoundaryPoint&) const {
  throw unsupported_space_error("a finite graph has no boundary at infinity");
}

std::vector<SpacePoint> GraphSpace::ball_sample(const SpacePoint& center, double radius,
                                                double resolution) const {
  pt(center);
  if (resolution <= 0) throw invalid_parameter_error("resolution must be positive");
  if (radius < 0) throw invalid_parameter_error("radius must be >= 0");
  if (radius == 0) return {center};
  std::vector<SpacePoint> out;
  for (int v = 0; v < n_; ++v)
    if (distance(vertex(v), center) <= radius) out.push_back(vertex(v));
  for (const auto& e : edges_) {
    for (double t = resolution; t < e.w; t += resolution) {
      const SpacePoint p = edge_point(e.u, e.v, t);
      if (distance(p, center) <= radius) out.push_back(p);
    }
  }
  return out;
}

SpacePoint GraphSpace::act(const GroupElement&, const SpacePoint&) const {
  throw unsupported_space_error("graph spaces carry no group action");
}

BoundaryPoint GraphSpace::act(const GroupElement&, const BoundaryPoint&) const {
  throw unsupported_space_error("graph spaces carry no group action");
}

Geodesic GraphSpace::act(const GroupElement&, const Geodesic&) const {
  throw unsupported_space_error("graph spaces carry no group action");
}

SpacePoint GraphSpace::point_at(const Geodesic& gamma, double s) const {
  require_kind(gamma);
  const auto& rep = std::get<GraphRep>(gamma.rep);
  if (rep.tag != tag_)
    throw incompatible_space_error("geodesic belongs to another graph instance");
  if (rep.path.empty()) throw invalid_parameter_error("empty geodesic");
  if (rep.path.size() == 1) return vertex(rep.path[0]);
  s = std::clamp(s, gamma.s_min, gamma.s_max);
  const double pos = rep.off0 + s;
  for (std::size_t i = 1; i < rep.path.size(); ++i) {
    if (pos <= rep.cum[i] + 1e-12 || i + 1 == rep.path.size()) {
      const double w = rep.cum[i] - rep.cum[i - 1];
      const double off = std::clamp(pos - rep.cum[i - 1], 0.0, w);
      return edge_point(rep.path[i - 1], rep.path[i], off);
    }
  }
  return vertex(rep.path.back());
}

ProjectionResult GraphSpace::project_onto(const Geodesic& gamma, const SpacePoint& x) const {
  require_kind(gamma);
  const auto& rep = std::get<GraphRep>(gamma.rep);
  if (rep.tag != tag_)
    throw incompatible_space_error("geodesic belongs to another graph instance");
  const GraphPoint gx = canonical(pt(x));
  if (rep.path.size() < 2) return {gamma.s_min, distance(x, point_at(gamma, gamma.s_min))};

  ProjectionResult best{gamma.s_min, kInf};
  auto consider = [&](double param, double d) {
    if (param < gamma.s_min - 1e-12 || param > gamma.s_max + 1e-12) return;
    param = std::clamp(param, gamma.s_min, gamma.s_max);
    if (d < best.dist - 1e-15 || (std::abs(d - best.dist) <= 1e-15 && param < best.param))
      best = {param, d};
  };
  for (std::size_t i = 1; i < rep.path.size(); ++i) {
    const int u = rep.path[i - 1], v = rep.path[i];
    const double w = rep.cum[i] - rep.cum[i - 1];
    const double base = rep.cum[i - 1] - rep.off0;
    if (gx.offset > 0 && ((gx.u == u && gx.v == v) || (gx.u == v && gx.v == u))) {
      // x sits on this very edge.
      consider(base + ((gx.u == u) ? gx.offset : w - gx.offset), 0);
      continue;
    }
    // Off this edge, d(x, point at t) = min(du + t, dv + w - t): rises from
    // both endpoints, so the per-edge minimum is at an endpoint.
    consider(base, distance(x, vertex(u)));
    consider(base + w, distance(x, vertex(v)));
  }
  // Domain endpoints (partial first/last edges cut interior candidates off).
  consider(gamma.s_min, distance(x, point_at(gamma, gamma.s_min)));
  consider(gamma.s_max, distance(x, point_at(gamma, gamma.s_max)));
  return best;
}

// ---------------------------------------------------------------------------
// Config loading
// ---------------------------------------------------------------------------

std::unique_ptr<Space> space_from_config(const std::string& path) {
  const Config cfg = Config::from_file(path);
  const std::string kind = cfg.get_or("kind", "spiked_plane");
  if (kind == "spiked_plane") return std::make_unique<SpikedPlane>(cfg.get_int("window", 64));
  if (kind == "tree")
    return std::make_unique<TreeSpace>(cfg.get_int("degree", 4), cfg.get_int("depth", 8));
  if (kind == "graph") {
    if (!cfg.has("edges")) throw config_error("graph space needs an 'edges' file path");
    return std::make_unique<GraphSpace>(GraphSpace::from_edge_list(cfg.get("edges")));
  }
  throw config_error("unknown space kind: " + kind);
}

}  // namespace morseb

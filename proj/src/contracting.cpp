#include "morseb/contracting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "morseb/util.hpp"

namespace morseb {

namespace {

// Shifts a spiked geodesic so that its first lattice anchor sits at the
// origin.  Every quantity computed below is derived from the geodesic and
// this anchor, so integer translates of the same geodesic reduce to the
// identical normalized instance and yield bitwise-equal estimates.
Geodesic normalize_for_sampling(const Space& X, const Geodesic& gamma) {
  const auto* rep = std::get_if<SpikedRep>(&gamma.rep);
  if (!rep || rep->pieces.empty()) return gamma;
  int ax = 0, ay = 0;
  bool found = false;
  for (const auto& piece : rep->pieces) {
    if (const auto* sp = std::get_if<SpikePiece>(&piece)) {
      ax = sp->m;
      ay = sp->n;
      found = true;
      break;
    }
  }
  if (!found) {
    const auto& pl = std::get<PlanarPiece>(rep->pieces.front());
    ax = static_cast<int>(std::llround(pl.p0.x));
    ay = static_cast<int>(std::llround(pl.p0.y));
  }
  if (ax == 0 && ay == 0) return gamma;
  return X.act(GroupElement{lattice_translation(-ax, -ay)}, gamma);
}

// Parameter window of the geodesic actually explored: the domain clamped to
// length `window` around parameter 0.
std::pair<double, double> core_interval(const Geodesic& gamma, double window) {
  double lo = std::max(gamma.s_min, -window / 2);
  double hi = std::min(gamma.s_max, window / 2);
  if (hi < lo) lo = hi = std::clamp(0.0, gamma.s_min, gamma.s_max);
  return {lo, hi};
}

// Station parameters along the geodesic from which ball centers are mined.
// The set depends on the window only by gaining entries as it grows, so a
// larger window always evaluates a superset of balls.
std::vector<double> station_params(const Geodesic& gamma, double window, double resolution) {
  std::vector<double> params;
  auto add = [&](double s) {
    if (s < gamma.s_min || s > gamma.s_max) return;
    for (double have : params)
      if (have == s) return;
    params.push_back(s);
  };
  add(0);
  if (std::isfinite(gamma.s_min)) add(gamma.s_min);
  if (std::isfinite(gamma.s_max)) add(gamma.s_max);
  for (double step = 2 * resolution; step <= window / 2; step *= 2) {
    add(step);
    add(-step);
  }
  std::sort(params.begin(), params.end());
  return params;
}

struct Candidate {
  double score = 0;   // projected spread of the three probe points
  double dist = 0;    // distance to the geodesic
  double radius = 0;  // largest multiple of the resolution below dist
  SpacePoint center;
};

// Cheap lower bound for the projection diameter of B(center, radius): walk
// distance `radius` from the center toward each end of its shadow and
// project the landing points.  Both walks stay inside the closed ball and
// off the geodesic, so the spread they realize is always legitimate.
double probe_spread(const Space& X, const Geodesic& geo, const SpacePoint& center, double param,
                    double radius) {
  double pmin = param, pmax = param;
  for (double side : {-1.0, 1.0}) {
    const SpacePoint target = X.point_at(geo, param + side * radius);
    const Geodesic leg = X.geodesic(center, target);
    const double reach = std::min(radius, leg.length());
    const double p = X.project_onto(geo, X.point_at(leg, leg.s_min + reach)).param;
    pmin = std::min(pmin, p);
    pmax = std::max(pmax, p);
  }
  return pmax - pmin;
}

}  // namespace

double contracting_constant_analytic(const Space& X, const Geodesic& gamma) {
  if (X.kind() != Space::Kind::spiked_plane)
    throw unsupported_space_error("analytic contracting constant needs the spiked plane");
  if (gamma.kind != GeoKind::bi_infinite || !gamma.dir_min || !gamma.dir_max)
    throw invalid_parameter_error("analytic contracting constant needs a bi-infinite geodesic");
  const auto& a = std::get<SpikeDirection>(*gamma.dir_min);
  const auto& b = std::get<SpikeDirection>(*gamma.dir_max);
  return std::hypot(double(a.m - b.m), double(a.n - b.n));
}

double contracting_constant_bruteforce(const Space& X, const Geodesic& gamma, double window,
                                       double resolution) {
  if (window <= 0) throw invalid_parameter_error("window must be positive");
  if (resolution <= 0) throw invalid_parameter_error("resolution must be positive");
  if (gamma.length() <= 0) throw degenerate_pair_error("cannot gauge a geodesic of length zero");
  const Geodesic geo = normalize_for_sampling(X, gamma);
  // Graph nets are globally bounded, so every scale can be evaluated in
  // full; the unbounded spaces prune scales once the probes stop improving.
  const bool prune_scales = X.kind() != Space::Kind::graph;

  double best = 0;
  for (double s : station_params(geo, window, resolution)) {
    const SpacePoint base = X.point_at(geo, s);
    double station_best = 0;
    // Double the offset scale until the window runs out or the probes stop
    // improving; the projection diameter of the best ball grows with the
    // offset until it saturates at the optimal constant.
    for (double h = 2 * resolution; h <= window; h *= 2) {
      const double before = station_best;
      std::vector<Candidate> cands;
      for (const SpacePoint& q : X.ball_sample(base, h, std::max(resolution, h / 4))) {
        const auto pr = X.project_onto(geo, q);
        if (pr.dist <= resolution) continue;
        Candidate c;
        c.dist = pr.dist;
        c.radius = resolution * (std::ceil(pr.dist / resolution) - 1);
        if (c.radius <= 0) continue;
        c.center = q;
        c.score = probe_spread(X, geo, q, pr.param, c.radius);
        station_best = std::max(station_best, c.score);
        cands.push_back(std::move(c));
      }
      if (prune_scales && station_best <= before + 1e-9) break;
      // Only the two most promising balls get the full net treatment: balls
      // nest, so weaker centers and smaller radii cannot add to the maximum
      // the probes have already ranked.
      std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.dist != b.dist) return a.dist > b.dist;
        return lex_less(a.center, b.center);
      });
      if (cands.size() > 2) cands.resize(2);
      for (const Candidate& c : cands) {
        double pmin = std::numeric_limits<double>::infinity();
        double pmax = -pmin;
        for (const SpacePoint& q : X.ball_sample(c.center, c.radius, resolution)) {
          const double p = X.project_onto(geo, q).param;
          pmin = std::min(pmin, p);
          pmax = std::max(pmax, p);
        }
        station_best = std::max(station_best, pmax - pmin);
      }
    }
    best = std::max(best, station_best);
  }
  return best;
}

double morse_deviation_sample(const Space& X, const Geodesic& gamma, double lambda, double eps,
                              int trials, double window, std::uint64_t seed) {
  if (lambda < 1) throw invalid_parameter_error("lambda must be at least 1");
  if (eps < 0) throw invalid_parameter_error("eps must be nonnegative");
  if (trials < 1) throw invalid_parameter_error("trials must be at least 1");
  if (window <= 0) throw invalid_parameter_error("window must be positive");
  const auto [lo, hi] = core_interval(gamma, window);
  if (hi - lo <= 0) return 0;

  auto rng = rng_for(seed, 0x6f736369u);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double best = 0;
  for (int trial = 0; trial < trials; ++trial) {
    double s0 = lo + unit(rng) * (hi - lo);
    double s1 = lo + unit(rng) * (hi - lo);
    if (s0 > s1) std::swap(s0, s1);
    if (s1 - s0 < 1e-9) continue;
    const int detours = 1 + int(rng() & 1);

    // Chain anchors on the geodesic with random sideways detours shallow
    // enough that a valid (lambda, eps)-quasi-geodesic can absorb them.
    std::vector<SpacePoint> chain;
    chain.push_back(X.point_at(gamma, s0));
    const double rho_cap = ((lambda - 1) * (s1 - s0) + lambda * eps) / (2.0 * detours);
    for (int i = 1; i <= detours; ++i) {
      const double u = s0 + (s1 - s0) * i / (detours + 1);
      const double rho = rho_cap * unit(rng);
      const auto net = X.ball_sample(X.point_at(gamma, u), rho, std::max(rho / 3, 1e-3));
      chain.push_back(net[rng() % net.size()]);
    }
    chain.push_back(X.point_at(gamma, s1));

    // Re-time by arc length, sampling each leg at its midpoint as well, and
    // reject the chain unless every sampled pair satisfies the
    // quasi-geodesic inequalities.
    std::vector<std::pair<double, SpacePoint>> timed;
    timed.emplace_back(0.0, chain.front());
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
      const double leg = X.distance(chain[i], chain[i + 1]);
      const double t0 = timed.back().first;
      if (leg > 1e-12) {
        const Geodesic seg = X.geodesic(chain[i], chain[i + 1]);
        timed.emplace_back(t0 + leg / 2, X.point_at(seg, (seg.s_min + seg.s_max) / 2));
      }
      timed.emplace_back(t0 + leg, chain[i + 1]);
    }
    bool valid = true;
    for (std::size_t i = 0; i < timed.size() && valid; ++i)
      for (std::size_t j = i + 1; j < timed.size(); ++j) {
        const double dt = timed[j].first - timed[i].first;
        const double d = X.distance(timed[i].second, timed[j].second);
        if (dt > lambda * d + lambda * eps + 1e-9 || d > lambda * dt + eps + 1e-9) {
          valid = false;
          break;
        }
      }
    if (!valid) continue;
    for (const auto& [t, p] : timed) best = std::max(best, X.project_onto(gamma, p).dist);
  }
  return best;
}

GaugeEstimate estimate_gauge(const Space& X, const Geodesic& gamma, double window,
                             double resolution, int trials, std::uint64_t seed) {
  GaugeEstimate out;
  out.window = window;
  out.ball_resolution = resolution;
  try {
    out.analytic_D = contracting_constant_analytic(X, gamma);
  } catch (const unsupported_space_error&) {
  } catch (const invalid_parameter_error&) {
  }
  out.bruteforce_D = contracting_constant_bruteforce(X, gamma, window, resolution);
  std::uint64_t cell = 0;
  for (double eps : {0.0, 1.0}) {
    // Any (lambda, eps)-quasi-geodesic is also one for every larger lambda,
    // so accumulate upward to keep the samples monotone in lambda.
    double running = 0;
    for (double lambda : {1.0, 2.0, 3.0}) {
      const double dev =
          morse_deviation_sample(X, gamma, lambda, eps, trials, window, mix_seed(seed, cell++));
      running = std::max(running, dev);
      out.morse_samples.push_back({lambda, eps, running});
    }
  }
  return out;
}

}  // namespace morseb

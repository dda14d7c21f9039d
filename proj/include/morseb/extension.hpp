#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "morseb/boundarymap.hpp"
#include "morseb/space.hpp"

namespace morseb {

/// Parameters for extending a boundary map to an interior map.  A point x is
/// covered by the triangles whose center lands in the ball around x of radius
/// R plus the height of x above the plane, so the construction follows rays
/// up spikes (triangle centers stay near the plane).  triple_search_radius
/// bounds how far from the foot of x candidate feet are enumerated and must
/// be at least R + D_cap; one extra unit covers the measured gap between a
/// center and the farthest vertex of its triangle, hence the defaults.
struct ExtensionConfig {
  double R = 1.5;
  double triple_search_radius = 4.5;
  double D_cap = 2.0;
  double resolution = 0.1;
  double image_diameter_bound = 12.0;  // image spreads above this raise a warning
};

struct CandidateTriple {
  std::array<BoundaryPoint, 3> feet;  // spike directions, lexicographically sorted
  SpacePoint center;
};

/// All triples of spike directions with non-collinear feet lying within
/// triple_search_radius of the foot of x, pairwise contracting constant at
/// most D_cap, and whose triangle center lies within R + height(x) of x,
/// sorted lexicographically by feet.  Collinear feet are rejected: their flat
/// triangle centers sit exactly on the lattice and carry no gate structure.
/// Exactly equivariant under integer translations.  Throws
/// empty_candidate_error carrying the nearest achievable center distance when
/// no triple qualifies; measured over a grid of plane offsets, the nearest
/// center is never farther than 0.41, so R >= 0.5 suffices at height zero.
std::vector<CandidateTriple> candidate_triples(const Space& X, const SpacePoint& x,
                                               const ExtensionConfig& cfg);

struct ExtendedPoint {
  SpacePoint value;            // center of the canonical candidate's image triangle
  double pi_diameter = 0;      // spread of the image centers over all candidates
  double image_gauge = 0;      // largest pairwise constant among image triples
  bool image_warning = false;  // pi_diameter exceeded cfg.image_diameter_bound
};

/// One point of the extension: the first (lexicographically least) candidate
/// triple is pushed through f and the image triangle's center is the value.
/// Every other candidate's image center contributes to pi_diameter, the
/// spread of the possible values; a bounded spread is what makes the choice
/// of triple immaterial, so exceeding image_diameter_bound is flagged.
ExtendedPoint extend(const Space& X, const BoundaryMap& f, const SpacePoint& x,
                     const ExtensionConfig& cfg);

struct FlipChain {
  std::vector<std::array<BoundaryPoint, 3>> triples;  // starts at T1, ends at T2
  std::vector<double> flip_values;                    // chosen pairing value per move
  std::vector<double> displacements;                  // center movement per move
  double c1_bound = 0;
  bool warning = false;  // some flip value exceeded c1_bound
};

/// Walks from T1 to T2 one vertex replacement at a time, so consecutive
/// triples share two vertices and the chain has at most four triples.  Each
/// move inserts the next vertex of T2 and drops the current vertex named by
/// min_flip's choice of pairing (vertices of T2 are never dropped; the next
/// best pairing is used instead).  c1 defaults to the measured bound 5.0 on
/// triples with pairwise constants <= 3 drawn from a 5x5 window; a flip value
/// above c1 sets the warning flag.
FlipChain flip_chain(const Space& X, const std::array<BoundaryPoint, 3>& T1,
                     const std::array<BoundaryPoint, 3>& T2, double resolution = 0.25,
                     double c1 = 5.0);

using PointMap = std::function<SpacePoint(const SpacePoint&)>;

struct QiFit {
  double lambda = 1;
  double eps = 0;
  std::size_t pairs_used = 0;
};

/// Least multiplier lambda >= 1, then least offset eps >= 0, with
/// d(x,y)/lambda - eps <= d(h(x),h(y)) <= lambda d(x,y) + eps over the first
/// pair_count point pairs of the sampled graph (pairs in index order).  On a
/// finite sample the additive term can absorb any deviation, so the least
/// multiplier is always 1 and eps is the largest gap |d(x,y) - d(h(x),h(y))|;
/// extending the pair list never shrinks either constant.
QiFit fit_qi_constants(const Space& X,
                       const std::vector<std::pair<SpacePoint, SpacePoint>>& graph,
                       std::size_t pair_count);

/// Largest distance d(x, h_inv(h(x))) over the sample.
double quasi_inverse_defect(const Space& X, const PointMap& h, const PointMap& h_inv,
                            const std::vector<SpacePoint>& sample);

/// Largest distance from h(point on the ray toward p) to the ray toward
/// f(p), over the given directions and ray parameters 0, step, ..., horizon.
/// Rays start at the plane origin.  Small values mean h moves rays toward p
/// to rays toward f(p), i.e. the boundary action of h is f on the window.
double boundary_agreement(const Space& X, const PointMap& h, const BoundaryMap& f,
                          const std::vector<BoundaryPoint>& rays, double horizon,
                          double step = 1.0);

/// Deterministic sample of plane points with coordinates uniform in
/// [-window, window]; sample i depends only on (seed, i).
std::vector<SpacePoint> plane_sample(unsigned seed, double window, std::size_t count);

/// Sampling plan for a full extension run.
struct ExtensionPlan {
  double window = 20.0;
  std::size_t point_count = 30;
  std::size_t pair_count = 300;
  std::size_t ray_count = 6;
  double horizon = 30.0;
  double ray_step = 2.0;
  unsigned seed = 1;
};

struct ExtensionRow {
  SpacePoint x;
  SpacePoint hx;
  double pi_diameter = 0;
  double image_gauge = 0;
};

struct ExtensionResult {
  std::vector<ExtensionRow> rows;
  double lambda = 1;
  double eps = 0;
  double quasi_inverse_defect = 0;
  double boundary_agreement = 0;
  double pi_diameter_max = 0;
  double image_gauge_max = 0;
  std::vector<std::string> warnings;
};

/// Evaluates the extension of f over a sampled window and assembles every
/// defect statistic: the fitted constants, the quasi-inverse defect against
/// the extension of the reversed map, and the boundary agreement along
/// ray_count directions (the first two are the axis directions).  Warnings
/// collect the points whose image spread exceeded the configured bound; an
/// empty warning list plus bounded statistics is the success certificate.
ExtensionResult run_extension(const Space& X, const BoundaryMap& f, const ExtensionConfig& cfg,
                              const ExtensionPlan& plan);

}  // namespace morseb

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "morseb/space.hpp"

namespace morseb {

/// One empirical Morse-gauge sample: the largest deviation from the geodesic
/// observed over randomized (lambda, eps)-quasi-geodesic paths with endpoints
/// on it.  A lower bound for the true gauge value, never a certificate.
struct MorseSample {
  double lambda = 1;
  double eps = 0;
  double max_deviation = 0;
};

/// Scalar gauge data for one geodesic: the contracting constant (exact when
/// a closed form exists, always a net-based lower-bound estimate) plus
/// sampled gauge values.
struct GaugeEstimate {
  std::optional<double> analytic_D;
  double bruteforce_D = 0;
  double window = 0;
  double ball_resolution = 0;
  std::vector<MorseSample> morse_samples;
};

/// Optimal contracting constant of a bi-infinite geodesic in the spiked
/// plane: the Euclidean distance between the two spike feet.
double contracting_constant_analytic(const Space& X, const Geodesic& gamma);

/// Net-based lower bound for the optimal contracting constant: the largest
/// projection diameter over a deterministic family of sampled balls disjoint
/// from the geodesic (centers within `window`, radii in steps of
/// `resolution`).  Converges to the optimum as resolution shrinks.
double contracting_constant_bruteforce(const Space& X, const Geodesic& gamma, double window,
                                       double resolution);

/// Largest observed deviation from `gamma` over `trials` randomized
/// (lambda, eps)-quasi-geodesic chains with endpoints on gamma (detour
/// insertion with arc-length timing; chains failing the quasi-geodesic
/// inequalities are rejected before measuring).  Deterministic per seed.
double morse_deviation_sample(const Space& X, const Geodesic& gamma, double lambda, double eps,
                              int trials, double window, std::uint64_t seed);

/// Bundles the analytic constant (when available), the brute-force estimate,
/// and a small grid of gauge samples.  Deviations are accumulated upward in
/// lambda, so each row dominates the rows with smaller lambda and equal eps.
GaugeEstimate estimate_gauge(const Space& X, const Geodesic& gamma, double window,
                             double resolution, int trials, std::uint64_t seed);

}  // namespace morseb

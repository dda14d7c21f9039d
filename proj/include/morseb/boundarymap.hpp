#pragma once

#include <array>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "morseb/space.hpp"

namespace morseb {

/// A bijection of the boundary, given by its forward and inverse actions and
/// a label used in reports.  Maps built by induced_map borrow the space they
/// were built from.
struct BoundaryMap {
  std::function<BoundaryPoint(const BoundaryPoint&)> forward;
  std::function<BoundaryPoint(const BoundaryPoint&)> inverse;
  std::string name;
};

BoundaryMap identity_map();

/// Exchanges the directions (m, 0) and (-m, 0) for every m and fixes every
/// other direction.  Spike directions only.
BoundaryMap swap_map();

/// Boundary action of a space isometry and of its inverse.
BoundaryMap induced_map(const Space& X, const GroupElement& g);

/// Identity outside a finite exception table; each listed pair of directions
/// is exchanged.  A direction may appear in at most one pair.
BoundaryMap table_map(const std::vector<std::pair<BoundaryPoint, BoundaryPoint>>& pairs);

/// Builds a map from a config file.  `map = identity | swap | affine | table`;
/// affine rules read `linear = a b c d` (row-major, default identity) and
/// `translate = tx ty`; tables read repeated `swap = m n m2 n2` lines.
BoundaryMap map_from_config(const Space& X, const std::string& path);

/// True when inverse(forward(p)) and forward(inverse(p)) return p for every
/// listed point.
bool round_trips(const BoundaryMap& f, const std::vector<BoundaryPoint>& points);

/// Samplers index deterministic streams: sample i depends only on the
/// constructor arguments and i, so batches can be evaluated in any order.
using PairSampler = std::function<std::pair<BoundaryPoint, BoundaryPoint>(std::size_t)>;
using TupleSampler = std::function<std::array<BoundaryPoint, 4>(std::size_t)>;

/// Distinct direction pairs with feet drawn uniformly from
/// [-window, window]^2.
PairSampler lattice_pair_sampler(unsigned seed, int window);

/// The marching family (n, 0), (n, 1) with n = i + 1: unit feet separation
/// for every sample.
PairSampler adjacent_pair_family();

/// Direction 4-tuples whose six pairwise analytic contracting constants stay
/// at most gauge_cap; the first foot is uniform in [-window, window]^2 and
/// the rest cluster within gauge_cap / 2 of it.  Requires gauge_cap >= 2.
TupleSampler lattice_tuple_sampler(const Space& X, unsigned seed, int window, double gauge_cap);

/// The 4-tuples (n,0), (n+1,0), (n,1), (n+1,1) with n = i + 1: one lattice
/// square per sample, constant gauge, mixing the swap axis with fixed
/// directions.
TupleSampler adjacent_square_family();

enum class StabilityVerdict { stable_within_sample, growth_detected };

struct StabilityRow {
  std::pair<BoundaryPoint, BoundaryPoint> pair;
  double D_in = 0;
  double D_out = 0;
};

/// Contracting constants before and after a boundary map.  rows are sorted
/// by D_in.  The map counts as growth-detected when some pair whose input
/// constant stays within verdict_bound is sent to a pair whose output
/// constant exceeds it; those rows are emitted as the witness family and
/// growth_rate is the least-squares slope of D_out per sample step over the
/// input-bounded rows.
struct StabilityProfile {
  std::vector<StabilityRow> rows;
  double verdict_bound = 0;
  StabilityVerdict verdict = StabilityVerdict::stable_within_sample;
  double growth_rate = 0;
  std::vector<StabilityRow> witness;
};

StabilityProfile stability_profile(const Space& X, const BoundaryMap& f, const PairSampler& pairs,
                                   std::size_t sample_count, double verdict_bound);

struct QmRow {
  double cr_in = 0;
  double cr_out = 0;
};

/// Cross ratios before and after a boundary map over tuples from one gauge
/// stratum, with the least linear upper envelope cr_out <= slope * cr_in +
/// intercept: slope is the largest observed output/input ratio and intercept
/// covers what remains (in particular the zero-input rows).
struct QmProfile {
  std::vector<QmRow> rows;
  double gauge = 0;
  double slope = 0;
  double intercept = 0;
};

/// Evaluates the four point formula on each sampled tuple and its image.
/// Every sampled tuple must keep its six pairwise analytic contracting
/// constants within gauge.
QmProfile qm_profile(const Space& X, const BoundaryMap& f, double gauge,
                     const TupleSampler& tuples, std::size_t sample_count);

}  // namespace morseb

#pragma once

#include <array>
#include <string>

#include "morseb/centers.hpp"
#include "morseb/space.hpp"

namespace morseb {

enum class CrossRatioMethod { centers, paulin };

/// Absolute cross ratio of an ordered boundary 4-tuple (a, b, c, d).  The
/// sign carries no extra information here and is dropped.
struct CrossRatioValue {
  double value = 0;
  CrossRatioMethod method = CrossRatioMethod::centers;

  // centers method: the larger of the two triangles' min-max levels, the grid
  // resolution the projections ran at, and the bracket width.  The
  // sup-over-center-sets reading of the same quantity lies in
  // [value, value + slack].
  double gauge = 0;
  double resolution = 0;
  double slack = 0;

  // paulin method: ray parameter the four point formula was evaluated at;
  // zero when the value is exact and no truncation was needed.
  double truncation = 0;
};

/// Distance between the projected centers of the ideal triangles (a, b, c)
/// and (a, c, d).
CrossRatioValue cross_ratio_centers(const Space& X, const BoundaryPoint& a, const BoundaryPoint& b,
                                    const BoundaryPoint& c, const BoundaryPoint& d,
                                    double resolution);

/// Four point formula: half the absolute difference between the summed
/// distances of the pairing {a,d},{b,c} and the pairing {a,b},{c,d}, measured
/// at points `truncation` far out along rays toward the four directions.  In
/// the spiked plane the truncation terms cancel and the value is returned in
/// closed form from the feet alone, independent of `truncation`.
CrossRatioValue cross_ratio_paulin(const Space& X, const BoundaryPoint& a, const BoundaryPoint& b,
                                   const BoundaryPoint& c, const BoundaryPoint& d,
                                   double truncation = 1000.0);

/// |centers value - paulin value| for the same tuple.
double compare_definitions(const Space& X, const BoundaryPoint& a, const BoundaryPoint& b,
                           const BoundaryPoint& c, const BoundaryPoint& d, double resolution,
                           double truncation = 1000.0);

/// The pairing chosen by min_flip: its label, its value, and the four points
/// in the chosen order.
struct FlipChoice {
  std::string pairing;  // one of "abcd", "acbd", "cabd"
  CrossRatioValue value;
  std::array<BoundaryPoint, 4> tuple;
};

/// Evaluates the three reorderings (a,b,c,d), (a,c,b,d), (c,a,b,d) with the
/// four point formula and returns the smallest; ties keep the earliest label.
FlipChoice min_flip(const Space& X, const BoundaryPoint& a, const BoundaryPoint& b,
                    const BoundaryPoint& c, const BoundaryPoint& d, double truncation = 1000.0);

}  // namespace morseb

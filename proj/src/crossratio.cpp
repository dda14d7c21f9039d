#include "morseb/crossratio.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <variant>

#include "morseb/errors.hpp"
#include "morseb/geometry.hpp"

namespace morseb {

namespace {

void require_distinct(const BoundaryPoint& a, const BoundaryPoint& b, const BoundaryPoint& c,
                      const BoundaryPoint& d) {
  const std::array<const BoundaryPoint*, 4> p = {&a, &b, &c, &d};
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (same_boundary_point(*p[i], *p[j]))
        throw degenerate_pair_error("cross ratio needs four pairwise distinct boundary points");
}

Vec2 foot_of(const BoundaryPoint& b) {
  const auto* d = std::get_if<SpikeDirection>(&b);
  if (!d) throw incompatible_space_error("boundary points are not spike directions");
  return {double(d->m), double(d->n)};
}

// Half the absolute pairing difference.  Grouped as two same-endpoint
// differences so that the shared truncation terms cancel first; on integer
// feet this keeps the adjacent-square value at exactly sqrt(2) - 1.
double pairing_value(double d_ad, double d_bc, double d_ab, double d_cd) {
  return 0.5 * std::abs((d_ad - d_ab) + (d_bc - d_cd));
}

}  // namespace

CrossRatioValue cross_ratio_centers(const Space& X, const BoundaryPoint& a, const BoundaryPoint& b,
                                    const BoundaryPoint& c, const BoundaryPoint& d,
                                    double resolution) {
  require_distinct(a, b, c, d);
  if (X.kind() == Space::Kind::graph)
    throw unsupported_space_error("cross ratios need a boundary at infinity");

  const CenterResult first = project(X, ideal_triangle(X, a, b, c), resolution);
  const CenterResult second = project(X, ideal_triangle(X, a, c, d), resolution);

  CrossRatioValue out;
  out.value = X.distance(first.center, second.center);
  out.method = CrossRatioMethod::centers;
  out.gauge = std::max(first.K_min, second.K_min);
  out.resolution = resolution;
  out.slack = 2.0 * std::max(first.E_K_diameter, second.E_K_diameter);
  return out;
}

CrossRatioValue cross_ratio_paulin(const Space& X, const BoundaryPoint& a, const BoundaryPoint& b,
                                   const BoundaryPoint& c, const BoundaryPoint& d,
                                   double truncation) {
  require_distinct(a, b, c, d);
  if (truncation <= 0) throw invalid_parameter_error("truncation must be positive");

  CrossRatioValue out;
  out.method = CrossRatioMethod::paulin;

  switch (X.kind()) {
    case Space::Kind::spiked_plane: {
      // Far out on the spikes every pairwise geodesic descends one spike and
      // climbs the other, so each distance is 2T + (feet distance) and the T
      // terms cancel: the value depends on the feet alone.
      const Vec2 A = foot_of(a), B = foot_of(b), C = foot_of(c), D = foot_of(d);
      out.value = pairing_value(dist(A, D), dist(B, C), dist(A, B), dist(C, D));
      out.truncation = 0;
      return out;
    }
    case Space::Kind::tree: {
      const auto& tree = dynamic_cast<const TreeSpace&>(X);
      const SpacePoint base = tree.vertex(Word{});
      auto far_point = [&](const BoundaryPoint& e) {
        return X.point_at(X.ray_from(base, e), truncation);
      };
      const SpacePoint pa = far_point(a), pb = far_point(b), pc = far_point(c), pd = far_point(d);
      out.value = pairing_value(X.distance(pa, pd), X.distance(pb, pc), X.distance(pa, pb),
                                X.distance(pc, pd));
      out.truncation = truncation;
      return out;
    }
    case Space::Kind::graph: break;
  }
  throw unsupported_space_error("cross ratios need a boundary at infinity");
}

double compare_definitions(const Space& X, const BoundaryPoint& a, const BoundaryPoint& b,
                           const BoundaryPoint& c, const BoundaryPoint& d, double resolution,
                           double truncation) {
  const CrossRatioValue via_centers = cross_ratio_centers(X, a, b, c, d, resolution);
  const CrossRatioValue via_formula = cross_ratio_paulin(X, a, b, c, d, truncation);
  return std::abs(via_centers.value - via_formula.value);
}

FlipChoice min_flip(const Space& X, const BoundaryPoint& a, const BoundaryPoint& b,
                    const BoundaryPoint& c, const BoundaryPoint& d, double truncation) {
  const std::array<std::array<BoundaryPoint, 4>, 3> orders = {{
      {a, b, c, d},
      {a, c, b, d},
      {c, a, b, d},
  }};
  static const std::array<const char*, 3> labels = {"abcd", "acbd", "cabd"};

  FlipChoice best;
  for (int i = 0; i < 3; ++i) {
    const auto& o = orders[i];
    const CrossRatioValue v = cross_ratio_paulin(X, o[0], o[1], o[2], o[3], truncation);
    if (i == 0 || v.value < best.value.value) best = FlipChoice{labels[i], v, o};
  }
  return best;
}

}  // namespace morseb

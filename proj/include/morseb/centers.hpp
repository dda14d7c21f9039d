#pragma once

#include <array>
#include <utility>
#include <vector>

#include "morseb/space.hpp"

namespace morseb {

/// A triangle with three distinct boundary points as vertices; sides[i] is
/// the bi-infinite geodesic from vertices[i] to vertices[(i + 1) % 3].
struct IdealTriangle {
  std::array<BoundaryPoint, 3> vertices;
  std::array<Geodesic, 3> sides;
};

/// Builds the triangle spanned by three pairwise distinct boundary points.
IdealTriangle ideal_triangle(const Space& X, const BoundaryPoint& a, const BoundaryPoint& b,
                             const BoundaryPoint& c);

/// Distance from a point to a side (global minimum over the side's pieces).
double side_distance(const Space& X, const SpacePoint& x, const Geodesic& side);

/// Least observed delta such that every sampled side point lies within delta
/// of the union of the other two sides; sampled at the given resolution over
/// parameters [-horizon, horizon] on each side.
double slim_constant(const Space& X, const IdealTriangle& T, double horizon, double resolution);

/// Net points whose distance to every side is at most K.  The effective grid
/// step is the largest power of two not exceeding the resolution, so nets of
/// translated triangles are exact translates.
std::vector<SpacePoint> e_k_set(const Space& X, const IdealTriangle& T, double K,
                                double resolution);

/// Diameter of the K-center net; throws empty_set_error when the net is empty.
double e_k_diameter_bound(const Space& X, const IdealTriangle& T, double K, double resolution);

/// Center data for one triangle.  gates[i] is the pair of points where the
/// two sides meeting at vertices[i] first enter the center set when walked
/// inward from that vertex.
struct CenterResult {
  SpacePoint center;
  double K_min = 0;
  double E_K_diameter = 0;  // diameter of the net at K = K_min + one grid step
  std::array<std::pair<SpacePoint, SpacePoint>, 3> gates;
};

/// The equivariant center projection: the net point minimizing the largest
/// side distance, ties broken lexicographically after translating the
/// lexicographically least spike foot to the origin.  Exactly equivariant
/// under integer translations.
CenterResult project(const Space& X, const IdealTriangle& T, double resolution);

}  // namespace morseb

#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "morseb/errors.hpp"
#include "morseb/geometry.hpp"
#include "morseb/words.hpp"

namespace morseb {

// ---------------------------------------------------------------------------
// Points
// ---------------------------------------------------------------------------

/// A point of the Euclidean plane underlying the spiked plane.
struct PlanePoint {
  double x = 0;
  double y = 0;
};

/// A point at height t > 0 on the vertical half-line attached at the lattice
/// point (m, n).  Height 0 is canonicalized to PlanePoint(m, n) on
/// construction, so a SpikePoint always has t > 0.
struct SpikePoint {
  int m = 0;
  int n = 0;
  double t = 0;
};

/// A point of a regular tree: the vertex `base`, or, when offset > 0, the
/// point at distance `offset` along the edge from `base` to `base * letter`
/// (the canonical representation keeps base the shorter endpoint).
struct TreePoint {
  Word base;
  Letter letter = -1;
  double offset = 0;
  int tag = 0;  // instance tag of the owning tree space
};

/// A point of a finite weighted graph: the vertex u, or, when offset > 0,
/// the point at distance `offset` from u along the edge {u, v}.
struct GraphPoint {
  int u = 0;
  int v = 0;
  double offset = 0;
  int tag = 0;  // instance tag of the owning graph space
};

using SpacePoint = std::variant<PlanePoint, SpikePoint, TreePoint, GraphPoint>;

SpacePoint make_plane(double x, double y);
SpacePoint make_spike(int m, int n, double t);
std::string to_string(const SpacePoint& p);

/// Exact equality after canonicalization (height-0 spike points equal the
/// plane point at their foot).
bool same_point(const SpacePoint& a, const SpacePoint& b);

/// Deterministic total order used for canonical choices and tie-breaking.
bool lex_less(const SpacePoint& a, const SpacePoint& b);

// ---------------------------------------------------------------------------
// Boundary points
// ---------------------------------------------------------------------------

/// The direction of the vertical half-line attached at lattice point (m, n).
struct SpikeDirection {
  int m = 0;
  int n = 0;
};

/// An end of a regular tree, written as an eventually periodic reduced edge
/// word prefix * cycle^inf.
struct TreeEnd {
  Word prefix;
  Word cycle;
  int tag = 0;
};

using BoundaryPoint = std::variant<SpikeDirection, TreeEnd>;

BoundaryPoint make_direction(int m, int n);
BoundaryPoint make_end(const Word& prefix, const Word& cycle, int tag = 0);
std::string to_string(const BoundaryPoint& b);
bool same_boundary_point(const BoundaryPoint& a, const BoundaryPoint& b);
bool lex_less(const BoundaryPoint& a, const BoundaryPoint& b);

/// The i-th letter (0-based) of the infinite word prefix * cycle^inf.
Letter end_letter(const TreeEnd& e, std::size_t i);

// ---------------------------------------------------------------------------
// Group elements
// ---------------------------------------------------------------------------

/// An isometry of the spiked plane preserving the lattice of spike feet:
/// x -> L x + t with L one of the eight signed coordinate permutations and
/// t an integer vector.
struct LatticeIsometry {
  std::array<int, 4> lin{1, 0, 0, 1};  // row-major: [a b; c d]
  int tx = 0;
  int ty = 0;
};

/// A tree isometry given by left multiplication with a reduced word.
struct TreeTranslation {
  Word w;
  int tag = 0;
};

using GroupElement = std::variant<LatticeIsometry, TreeTranslation>;

LatticeIsometry lattice_translation(int tx, int ty);
LatticeIsometry lattice_axis_swap();
/// Validates that lin is one of the eight lattice-preserving orthogonal maps.
bool is_valid_lattice_isometry(const LatticeIsometry& g);
GroupElement inverse(const GroupElement& g);

// ---------------------------------------------------------------------------
// Geodesics
// ---------------------------------------------------------------------------

enum class GeoKind { finite, ray, bi_infinite };

/// Straight planar segment piece; point(s) = p0 + (s - s0) * dir, |dir| = 1.
struct PlanarPiece {
  double s0 = 0, s1 = 0;
  Vec2 p0;
  Vec2 dir;
};

/// Vertical piece on the spike at (m, n); height(s) = h0 + slope * (s - s0)
/// with slope +1 (climb) or -1 (descent).  s0 may be -inf for a descent from
/// infinity, in which case h0 anchors the height at s1 instead.
struct SpikePiece {
  double s0 = 0, s1 = 0;
  int m = 0, n = 0;
  double h0 = 0;  // height at the finite anchor end (s0 if finite, else s1)
  int slope = 1;
};

using SpikedPiece = std::variant<PlanarPiece, SpikePiece>;

struct SpikedRep {
  std::vector<SpikedPiece> pieces;  // ordered by parameter
};

/// Letter stream feeding one side of a tree geodesic: a finite head followed
/// by the tail of an end (for infinite sides).
struct TreeStream {
  Word head;
  std::optional<TreeEnd> tail;
  std::size_t tail_start = 0;
  Letter at(std::size_t i) const {
    if (i < head.size()) return head[i];
    if (!tail) throw invalid_parameter_error("tree stream exhausted");
    return end_letter(*tail, tail_start + (i - head.size()));
  }
};

struct TreeRep {
  Word anchor;      // vertex at parameter 0
  TreeStream neg;   // letters toward decreasing parameter
  TreeStream pos;   // letters toward increasing parameter
  int tag = 0;
};

struct GraphRep {
  std::vector<int> path;     // vertex sequence
  std::vector<double> cum;   // cumulative length from path.front()
  double off0 = 0;           // start offset into first edge
  int tag = 0;
};

/// A unit-speed geodesic; d(point_at(s), point_at(t)) == |s - t| on the
/// parameter domain [s_min, s_max] (infinite ends use +-inf).
struct Geodesic {
  GeoKind kind = GeoKind::finite;
  double s_min = 0;
  double s_max = 0;
  std::variant<SpikedRep, TreeRep, GraphRep> rep;
  std::optional<BoundaryPoint> dir_min;  // boundary direction of the s -> -inf end
  std::optional<BoundaryPoint> dir_max;  // boundary direction of the s -> +inf end
  double length() const { return s_max - s_min; }
};

struct ProjectionResult {
  double param = 0;
  double dist = 0;
};

// ---------------------------------------------------------------------------
// Spaces
// ---------------------------------------------------------------------------

class Space {
 public:
  enum class Kind { spiked_plane, tree, graph };

  virtual ~Space() = default;
  virtual Kind kind() const = 0;
  virtual std::string name() const = 0;

  virtual double distance(const SpacePoint& a, const SpacePoint& b) const = 0;
  virtual Geodesic geodesic(const SpacePoint& a, const SpacePoint& b) const = 0;
  virtual Geodesic bi_infinite_geodesic(const BoundaryPoint& a, const BoundaryPoint& b) const = 0;
  virtual Geodesic ray_from(const SpacePoint& x, const BoundaryPoint& a) const = 0;

  /// A finite net of points covering the closed ball B(center, radius): every
  /// ball point lies within `resolution` of some sample.  radius == 0 yields
  /// just the center.
  virtual std::vector<SpacePoint> ball_sample(const SpacePoint& center, double radius,
                                              double resolution) const = 0;

  virtual SpacePoint act(const GroupElement& g, const SpacePoint& p) const = 0;
  virtual BoundaryPoint act(const GroupElement& g, const BoundaryPoint& b) const = 0;
  virtual Geodesic act(const GroupElement& g, const Geodesic& gamma) const = 0;

  /// Point of the geodesic at parameter s (clamped to the domain).
  virtual SpacePoint point_at(const Geodesic& gamma, double s) const = 0;

  /// Nearest-point projection of x onto the geodesic (global minimum over
  /// all pieces, exact per-piece closed forms).
  virtual ProjectionResult project_onto(const Geodesic& gamma, const SpacePoint& x) const = 0;

  virtual bool boundary_supported() const { return true; }

  /// One-sided horizon-bounded Hausdorff gap between two rays converging to
  /// the same boundary point; throws not_asymptotic_error otherwise.
  double asymptotic_hausdorff(const Geodesic& alpha, const Geodesic& beta, double horizon) const;

 protected:
  void require_kind(const SpacePoint& p) const;
  void require_kind(const BoundaryPoint& b) const;
  void require_kind(const Geodesic& g) const;
};

/// The Euclidean plane with a vertical half-line (spike) attached at every
/// integer lattice point.
///
/// Metric case analysis (all geodesics are concatenations of straight planar
/// segments and vertical spike segments):
///   plane-plane            : Euclidean distance, straight segment
///   spike(m,n,t)-plane(p)  : t + |(m,n) - p|, descend then straight
///   spike-spike, same foot : |t1 - t2|, vertical segment
///   spike-spike, feet F,G  : t1 + t2 + |F - G|, descend, cross, climb
/// A bi-infinite geodesic between two distinct spike directions descends one
/// spike, crosses between the feet, and climbs the other.
class SpikedPlane final : public Space {
 public:
  /// lattice_window bounds the feet enumerated by samplers and the CLI; the
  /// space itself has a spike at every lattice point.
  explicit SpikedPlane(int lattice_window = 64);

  Kind kind() const override { return Kind::spiked_plane; }
  std::string name() const override { return "spiked_plane"; }
  int lattice_window() const { return lattice_window_; }

  double distance(const SpacePoint& a, const SpacePoint& b) const override;
  Geodesic geodesic(const SpacePoint& a, const SpacePoint& b) const override;
  Geodesic bi_infinite_geodesic(const BoundaryPoint& a, const BoundaryPoint& b) const override;
  Geodesic ray_from(const SpacePoint& x, const BoundaryPoint& a) const override;
  std::vector<SpacePoint> ball_sample(const SpacePoint& center, double radius,
                                      double resolution) const override;
  SpacePoint act(const GroupElement& g, const SpacePoint& p) const override;
  BoundaryPoint act(const GroupElement& g, const BoundaryPoint& b) const override;
  Geodesic act(const GroupElement& g, const Geodesic& gamma) const override;
  SpacePoint point_at(const Geodesic& gamma, double s) const override;
  ProjectionResult project_onto(const Geodesic& gamma, const SpacePoint& x) const override;

 private:
  int lattice_window_;
};

/// The Cayley graph of a free group: the regular tree of even degree
/// `degree` with unit edge lengths.  depth_cap bounds enumerations performed
/// by samplers, not the space itself.
class TreeSpace final : public Space {
 public:
  explicit TreeSpace(int degree = 4, int depth_cap = 8);

  Kind kind() const override { return Kind::tree; }
  std::string name() const override { return "tree"; }
  int degree() const { return degree_; }
  int depth_cap() const { return depth_cap_; }
  int tag() const { return tag_; }

  double distance(const SpacePoint& a, const SpacePoint& b) const override;
  Geodesic geodesic(const SpacePoint& a, const SpacePoint& b) const override;
  Geodesic bi_infinite_geodesic(const BoundaryPoint& a, const BoundaryPoint& b) const override;
  Geodesic ray_from(const SpacePoint& x, const BoundaryPoint& a) const override;
  std::vector<SpacePoint> ball_sample(const SpacePoint& center, double radius,
                                      double resolution) const override;
  SpacePoint act(const GroupElement& g, const SpacePoint& p) const override;
  BoundaryPoint act(const GroupElement& g, const BoundaryPoint& b) const override;
  Geodesic act(const GroupElement& g, const Geodesic& gamma) const override;
  SpacePoint point_at(const Geodesic& gamma, double s) const override;
  ProjectionResult project_onto(const Geodesic& gamma, const SpacePoint& x) const override;

  SpacePoint vertex(const Word& w) const;
  BoundaryPoint end(const Word& prefix, const Word& cycle) const;
  /// All reduced words of exactly the given length.
  std::vector<Word> words_of_length(int len) const;
  /// Canonical end extending a nonempty reduced word (repeat the last letter).
  TreeEnd end_from_word(const Word& w) const;

  void check_word(const Word& w) const;
  void check_end(const TreeEnd& e) const;

 private:
  const TreePoint& pt(const SpacePoint& p) const;
  TreePoint canonical(TreePoint p) const;
  int degree_;
  int depth_cap_;
  int tag_;
};

/// A finite connected weighted graph with its shortest-path metric; points
/// may sit in edge interiors.  Has no boundary at infinity.
class GraphSpace final : public Space {
 public:
  struct Edge {
    int u, v;
    double w;
  };
  GraphSpace(int vertex_count, std::vector<Edge> edges);

  /// Parses an edge list: one "u v weight" triple per line, vertex ids
  /// 1-based, weights positive decimals.  '#' starts a comment.
  static GraphSpace from_edge_list(const std::string& path);

  Kind kind() const override { return Kind::graph; }
  std::string name() const override { return "graph"; }
  bool boundary_supported() const override { return false; }
  int tag() const { return tag_; }
  int vertex_count() const { return n_; }

  double distance(const SpacePoint& a, const SpacePoint& b) const override;
  Geodesic geodesic(const SpacePoint& a, const SpacePoint& b) const override;
  Geodesic bi_infinite_geodesic(const BoundaryPoint& a, const BoundaryPoint& b) const override;
  Geodesic ray_from(const SpacePoint& x, const BoundaryPoint& a) const override;
  std::vector<SpacePoint> ball_sample(const SpacePoint& center, double radius,
                                      double resolution) const override;
  SpacePoint act(const GroupElement& g, const SpacePoint& p) const override;
  BoundaryPoint act(const GroupElement& g, const BoundaryPoint& b) const override;
  Geodesic act(const GroupElement& g, const Geodesic& gamma) const override;
  SpacePoint point_at(const Geodesic& gamma, double s) const override;
  ProjectionResult project_onto(const Geodesic& gamma, const SpacePoint& x) const override;

  SpacePoint vertex(int v) const;
  SpacePoint edge_point(int u, int v, double offset) const;

 private:
  const GraphPoint& pt(const SpacePoint& p) const;
  GraphPoint canonical(GraphPoint p) const;
  const std::vector<double>& dist_from(int v) const;  // memoized Dijkstra
  std::vector<int> shortest_path(int u, int v) const;
  double edge_weight(int u, int v) const;

  int n_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::pair<int, double>>> adj_;
  mutable std::vector<std::vector<double>> dist_cache_;
  mutable std::vector<bool> dist_ready_;
  int tag_;
};

/// Builds a space from a key-value config file (kind = spiked_plane | tree |
/// graph plus kind-specific keys; see README).
std::unique_ptr<Space> space_from_config(const std::string& path);

}  // namespace morseb

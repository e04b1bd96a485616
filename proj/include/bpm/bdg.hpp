#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bpm/labeling.hpp"

namespace bpm::bdg {

using VertexId = std::int32_t;
using HalfEdgeId = std::int32_t;
inline constexpr HalfEdgeId kNoHalfEdge = -1;
inline constexpr VertexId kNoVertex = -1;

struct HalfEdge {
  VertexId origin = kNoVertex;
  HalfEdgeId twin = kNoHalfEdge;
  HalfEdgeId next = kNoHalfEdge;  // next half-edge in the rotation at origin
};

// Rotation-system embedding. Faces are the orbits of h -> next(twin(h)).
struct PlanarMap {
  std::vector<HalfEdge> half;
  std::vector<HalfEdgeId> vertex_rep;  // first half-edge per vertex
  HalfEdgeId root = kNoHalfEdge;       // oriented root edge, origin = e_-
  std::optional<VertexId> point;       // rho, when pointed
  std::vector<std::int32_t> labels;    // carried labels; empty when not carried
  bool labels_carried = false;

  std::size_t vertex_count() const { return vertex_rep.size(); }
  std::size_t edge_count() const { return half.size() / 2; }
  VertexId head(HalfEdgeId h) const { return half[half[h].twin].origin; }
  VertexId root_vertex() const { return half[root].origin; }
  long degree(VertexId v) const;
  std::vector<HalfEdgeId> rotation(VertexId v) const;
  std::vector<std::vector<HalfEdgeId>> faces() const;
  std::vector<long> bfs_distances(VertexId from) const;

  // Twin involution without fixed points; rotation orbits partition.
  void check_well_formed() const;
};

// ---------------------------------------------------------------------------
// Successors

inline constexpr long kSuccessorInfinity = -1;

// sigma(i) on the (periodic) white contour of a finite mobile: smallest j > i
// with l(c_j) = l(c_i) - 1, or kSuccessorInfinity when the label never drops.
std::vector<long> successors(const labels::Mobile& m);

// ---------------------------------------------------------------------------
// The finite BDG construction

PlanarMap phi_build(const labels::Mobile& m);

// Truncated construction. The caller supplies the explored stretch of the
// two-sided white contour; `frontier_*` say whether more contour exists
// beyond each end. Returns the ball of radius `radius` around the map root,
// certified exact (every vertex within distance `radius` carries its full
// incident edge set). Throws CertificationError with a suggested extension
// when the hull criterion fails.
struct ContourWindow {
  std::vector<std::int32_t> vertex;  // caller's white-vertex ids, contour order
  std::vector<std::int32_t> label;
  std::size_t origin = 0;            // index of contour position 0
  bool frontier_left = true;
  bool frontier_right = true;
};

struct TruncatedBall {
  PlanarMap map;
  long certified_radius = 0;
  std::vector<std::int32_t> source_vertex;  // map vertex -> caller id
};

TruncatedBall phi_build_window(const ContourWindow& w, int epsilon, long radius);

// ---------------------------------------------------------------------------
// Checks and metric

struct MapCheckReport {
  bool ok = true;
  std::string violation;  // first violation, human readable
  std::size_t vertices = 0, edges = 0, faces = 0;
  bool euler_ok = false, bipartite_ok = false, distance_ok = false, root_ok = false;
};

// Verifies Euler's formula, even face degrees, root incidence, and (when
// labels are carried and the map is pointed) d(v, rho) = l(v) - min l + 1.
MapCheckReport map_checks(const PlanarMap& pm);

// Subgraph spanned by vertices within graph distance r of `from` (default:
// the root vertex), with the rotation restricted.
PlanarMap map_ball(const PlanarMap& pm, long r, VertexId from = kNoVertex);

// Closed variant matching the truncated-build semantics: all edges incident
// to vertices within r, plus the boundary endpoints those edges reach.
PlanarMap map_ball_closed(const PlanarMap& pm, long r, VertexId from = kNoVertex);

// Canonical encoding of a rooted map; equal strings <=> equal rooted maps.
std::string canonical_code(const PlanarMap& pm);

struct MapDistance {
  bool identical = false;
  long agreement_radius = 0;
  Rational value = 0;
};

MapDistance map_distance(const PlanarMap& a, const PlanarMap& b, long up_to_R);

// Face degrees as multiset; key of the weight W(m) = prod q_(deg/2).
std::vector<long> face_degrees(const PlanarMap& pm);

// ---------------------------------------------------------------------------
// Export

std::string to_json(const PlanarMap& pm);
std::string to_dot(const PlanarMap& pm);

}  // namespace bpm::bdg

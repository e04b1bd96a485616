#include "bpm/bdg.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <json.hpp>
#include <limits>
#include <map>
#include <sstream>

#include "bpm/errors.hpp"

namespace bpm::bdg {

long PlanarMap::degree(VertexId v) const {
  long d = 0;
  const HalfEdgeId first = vertex_rep[v];
  if (first == kNoHalfEdge) return 0;
  HalfEdgeId h = first;
  do {
    ++d;
    h = half[h].next;
  } while (h != first);
  return d;
}

std::vector<HalfEdgeId> PlanarMap::rotation(VertexId v) const {
  std::vector<HalfEdgeId> out;
  const HalfEdgeId first = vertex_rep[v];
  if (first == kNoHalfEdge) return out;
  HalfEdgeId h = first;
  do {
    out.push_back(h);
    h = half[h].next;
  } while (h != first);
  return out;
}

std::vector<std::vector<HalfEdgeId>> PlanarMap::faces() const {
  std::vector<std::vector<HalfEdgeId>> out;
  std::vector<char> seen(half.size(), 0);
  for (HalfEdgeId h0 = 0; h0 < static_cast<HalfEdgeId>(half.size()); ++h0) {
    if (seen[h0]) continue;
    std::vector<HalfEdgeId> face;
    HalfEdgeId h = h0;
    do {
      seen[h] = 1;
      face.push_back(h);
      h = half[half[h].twin].next;
    } while (h != h0);
    out.push_back(std::move(face));
  }
  return out;
}

std::vector<long> PlanarMap::bfs_distances(VertexId from) const {
  std::vector<long> dist(vertex_count(), -1);
  std::deque<VertexId> queue;
  dist[from] = 0;
  queue.push_back(from);
  while (!queue.empty()) {
    const VertexId v = queue.front();
    queue.pop_front();
    for (HalfEdgeId h : rotation(v)) {
      const VertexId u = head(h);
      if (dist[u] < 0) {
        dist[u] = dist[v] + 1;
        queue.push_back(u);
      }
    }
  }
  return dist;
}

void PlanarMap::check_well_formed() const {
  if (half.size() % 2 != 0) throw StructuralError("odd number of half-edges");
  std::vector<char> in_rotation(half.size(), 0);
  for (VertexId v = 0; v < static_cast<VertexId>(vertex_count()); ++v) {
    for (HalfEdgeId h : rotation(v)) {
      if (half[h].origin != v) throw StructuralError("rotation origin mismatch");
      if (in_rotation[h]) throw StructuralError("half-edge in two rotations");
      in_rotation[h] = 1;
    }
  }
  for (HalfEdgeId h = 0; h < static_cast<HalfEdgeId>(half.size()); ++h) {
    if (!in_rotation[h]) throw StructuralError("half-edge missing from rotations");
    const HalfEdgeId t = half[h].twin;
    if (t == h) throw StructuralError("twin fixed point");
    if (half[t].twin != h) throw StructuralError("twin not an involution");
  }
}

// ---------------------------------------------------------------------------
// Successor matching

namespace {

struct Matching {
  // arc per source corner: target corner index, or kSuccessorInfinity
  std::vector<long> target;
  std::vector<std::vector<long>> incoming;  // per corner: source corners, ascending
};

// One left-to-right sweep; positions already laid out (one period for the
// finite case runs the sweep twice without re-pushing).
Matching match_corners(const std::vector<std::int32_t>& label, bool periodic) {
  const std::size_t n = label.size();
  Matching m;
  m.target.assign(n, kSuccessorInfinity);
  m.incoming.assign(n, {});
  std::vector<std::size_t> stack;
  auto sweep = [&](bool push) {
    for (std::size_t j = 0; j < n; ++j) {
      while (!stack.empty() && label[stack.back()] == label[j] + 1) {
        m.target[stack.back()] = static_cast<long>(j);
        stack.pop_back();
      }
      if (push) stack.push_back(j);
    }
  };
  sweep(true);
  if (periodic) sweep(false);
  for (std::size_t i = 0; i < n; ++i) {
    if (m.target[i] >= 0) m.incoming[m.target[i]].push_back(static_cast<long>(i));
  }
  for (auto& in : m.incoming) std::sort(in.begin(), in.end());
  return m;
}

// End of an arc at a corner; `other` is the contour position of the far end.
struct ArcEnd {
  long arc = 0;
  bool outgoing = false;
  long other = 0;
};

// Assembles a rotation-system map from corners, their vertex ids, and arcs.
// `corner_vertex[q]` gives the map vertex of corner q; arcs are (source
// corner, target corner or rho). Rotation at a vertex: corners in contour
// order, ends within a corner sorted by cyclic distance of the far end.
struct MapAssembler {
  long n_corners = 0;
  bool periodic = false;  // cyclic distance uses the period when true
  std::vector<VertexId> corner_vertex;
  std::vector<std::vector<long>> vertex_corners;  // per vertex, ascending
  std::size_t n_vertices = 0;

  std::vector<std::pair<long, long>> arcs;  // (source corner, target corner | -1 = rho)
  std::optional<VertexId> rho;

  PlanarMap build() const {
    PlanarMap pm;
    const std::size_t nv = n_vertices + (rho ? 1 : 0);
    pm.vertex_rep.assign(nv, kNoHalfEdge);
    pm.half.resize(2 * arcs.size());
    // half-edge ids: arc a -> source end 2a, target end 2a+1
    for (std::size_t a = 0; a < arcs.size(); ++a) {
      pm.half[2 * a].twin = static_cast<HalfEdgeId>(2 * a + 1);
      pm.half[2 * a + 1].twin = static_cast<HalfEdgeId>(2 * a);
    }
    // Ends per corner. Within a wedge the incoming arcs come first, nearest
    // source first (cyclically behind), and the outgoing arc closes the
    // wedge; this realizes the non-crossing nesting of the arcs.
    auto behind = [&](long q, long src) {
      long d = q - src;
      if (periodic) {
        d %= n_corners;
        if (d < 0) d += n_corners;
      }
      return d;
    };
    std::vector<std::vector<ArcEnd>> ends(n_corners);
    for (std::size_t a = 0; a < arcs.size(); ++a) {
      const auto [src, tgt] = arcs[a];
      ends[src].push_back({static_cast<long>(a), true, tgt});
      if (tgt >= 0) ends[tgt].push_back({static_cast<long>(a), false, src});
    }
    for (long q = 0; q < n_corners; ++q) {
      std::sort(ends[q].begin(), ends[q].end(), [&](const ArcEnd& x, const ArcEnd& y) {
        const long dx = x.outgoing ? std::numeric_limits<long>::max() : behind(q, x.other);
        const long dy = y.outgoing ? std::numeric_limits<long>::max() : behind(q, y.other);
        return dx < dy;
      });
    }
    // Rotations.
    auto link = [&](VertexId v, const std::vector<HalfEdgeId>& hs) {
      if (hs.empty()) return;
      for (std::size_t k = 0; k < hs.size(); ++k) {
        pm.half[hs[k]].origin = v;
        pm.half[hs[k]].next = hs[(k + 1) % hs.size()];
      }
      pm.vertex_rep[v] = hs.front();
    };
    for (std::size_t v = 0; v < n_vertices; ++v) {
      std::vector<HalfEdgeId> hs;
      for (long q : vertex_corners[v]) {
        for (const ArcEnd& e : ends[q]) {
          hs.push_back(static_cast<HalfEdgeId>(2 * e.arc + (e.outgoing ? 0 : 1)));
        }
      }
      link(static_cast<VertexId>(v), hs);
    }
    if (rho) {
      // reverse contour order around the external vertex
      std::vector<HalfEdgeId> hs;
      for (std::size_t a = arcs.size(); a-- > 0;) {
        if (arcs[a].second < 0) hs.push_back(static_cast<HalfEdgeId>(2 * a + 1));
      }
      link(*rho, hs);
      pm.point = *rho;
    }
    return pm;
  }
};

}  // namespace

std::vector<long> successors(const labels::Mobile& m) {
  const auto white = trees::contour(m.tree, trees::ContourKind::WhiteOnly);
  std::vector<std::int32_t> lab(white.vertices.size());
  for (std::size_t i = 0; i < white.vertices.size(); ++i) lab[i] = m.labels[white.vertices[i]];
  return match_corners(lab, /*periodic=*/true).target;
}

PlanarMap phi_build(const labels::Mobile& m) {
  if (m.truncated_fragment) {
    throw StructuralError("phi_build: finite construction needs a full mobile");
  }
  if (m.tree.edge_count() < 1) throw StructuralError("phi_build: mobile needs an edge");
  const std::string violation = labels::check_mobile(m);
  if (!violation.empty()) throw StructuralError("phi_build: " + violation);

  const auto white = trees::contour(m.tree, trees::ContourKind::WhiteOnly);
  const long C = static_cast<long>(white.vertices.size());
  std::vector<std::int32_t> lab(C);
  for (long i = 0; i < C; ++i) lab[i] = m.labels[white.vertices[i]];
  const Matching match = match_corners(lab, /*periodic=*/true);

  MapAssembler mb;
  mb.n_corners = C;
  mb.periodic = true;
  // Compact map vertex ids in order of first contour appearance.
  mb.corner_vertex.assign(C, kNoVertex);
  std::map<trees::NodeId, VertexId> vid;
  for (long q = 0; q < C; ++q) {
    const trees::NodeId w = white.vertices[q];
    auto it = vid.find(w);
    if (it == vid.end()) it = vid.emplace(w, static_cast<VertexId>(vid.size())).first;
    mb.corner_vertex[q] = it->second;
  }
  mb.n_vertices = vid.size();
  mb.vertex_corners.assign(mb.n_vertices, {});
  for (long q = 0; q < C; ++q) mb.vertex_corners[mb.corner_vertex[q]].push_back(q);
  mb.rho = static_cast<VertexId>(mb.n_vertices);
  for (long q = 0; q < C; ++q) mb.arcs.emplace_back(q, match.target[q]);

  PlanarMap pm = mb.build();

  // Carried labels; rho sits one below the minimum so the distance formula
  // extends to it.
  std::int32_t min_label = std::numeric_limits<std::int32_t>::max();
  pm.labels.assign(pm.vertex_count(), 0);
  for (const auto& [w, v] : vid) {
    pm.labels[v] = m.labels[w];
    min_label = std::min(min_label, m.labels[w]);
  }
  pm.labels[*pm.point] = min_label - 1;
  pm.labels_carried = true;

  // Root arc: corner 0 to its successor; epsilon = +1 points towards corner 0.
  pm.root = (m.epsilon == -1) ? 0 : 1;
  return pm;
}

TruncatedBall phi_build_window(const ContourWindow& w, int epsilon, long radius) {
  const long C = static_cast<long>(w.vertex.size());
  if (C == 0) throw StructuralError("empty contour window");
  if (w.label.size() != w.vertex.size()) throw StructuralError("window label size mismatch");
  const Matching match = match_corners(w.label, /*periodic=*/false);

  // Prefix minima guard against arcs arriving from beyond the left frontier.
  std::vector<std::int32_t> prefix_min(C);
  std::int32_t run = std::numeric_limits<std::int32_t>::max();
  for (long q = 0; q < C; ++q) {
    prefix_min[q] = run;  // min over positions strictly before q
    run = std::min(run, w.label[q]);
  }
  auto protected_from_left = [&](long q) {
    return !w.frontier_left || prefix_min[q] <= w.label[q];
  };

  const long origin = static_cast<long>(w.origin);
  if (origin < 0 || origin >= C) throw StructuralError("window origin out of range");

  // Map root corner.
  long root_corner = origin;
  if (epsilon == +1) {
    if (match.target[origin] < 0) {
      throw CertificationError("root successor unresolved; extend the window", C);
    }
    root_corner = match.target[origin];
  }

  // Vertex table over the window.
  std::map<std::int32_t, VertexId> vid;
  std::vector<VertexId> corner_vertex(C);
  for (long q = 0; q < C; ++q) {
    auto it = vid.find(w.vertex[q]);
    if (it == vid.end()) it = vid.emplace(w.vertex[q], static_cast<VertexId>(vid.size())).first;
    corner_vertex[q] = it->second;
  }
  std::vector<std::vector<long>> vertex_corners(vid.size());
  for (long q = 0; q < C; ++q) vertex_corners[corner_vertex[q]].push_back(q);

  // BFS over resolved arcs. The ball keeps every vertex within `radius` of
  // the root with its full incident edge set, plus the boundary neighbours
  // those edges reach (graph distance radius + 1, partial degrees).
  std::vector<std::vector<VertexId>> adj(vid.size());
  for (long q = 0; q < C; ++q) {
    if (match.target[q] >= 0) {
      adj[corner_vertex[q]].push_back(corner_vertex[match.target[q]]);
      adj[corner_vertex[match.target[q]]].push_back(corner_vertex[q]);
    }
  }
  const VertexId root_v = corner_vertex[root_corner];
  std::vector<long> dist(vid.size(), -1);
  std::deque<VertexId> queue = {root_v};
  dist[root_v] = 0;
  while (!queue.empty()) {
    const VertexId v = queue.front();
    queue.pop_front();
    if (dist[v] > radius) continue;
    for (VertexId u : adj[v]) {
      if (dist[u] < 0) {
        dist[u] = dist[v] + 1;
        queue.push_back(u);
      }
    }
  }
  // Certification: interior vertices need every corner's successor resolved
  // and protection against arcs arriving from beyond the left frontier.
  for (std::size_t v = 0; v < vid.size(); ++v) {
    if (dist[v] < 0 || dist[v] > radius) continue;
    for (long q : vertex_corners[v]) {
      if (match.target[q] < 0) {
        throw CertificationError("unresolved successor inside the ball; extend the window", C);
      }
      if (!protected_from_left(q)) {
        throw CertificationError("corner exposed to the left frontier; extend the window", C);
      }
    }
  }

  std::vector<VertexId> keep(vid.size(), kNoVertex);
  VertexId next_id = 0;
  for (std::size_t v = 0; v < vid.size(); ++v) {
    if (dist[v] >= 0 && dist[v] <= radius + 1) keep[v] = next_id++;
  }
  MapAssembler mb;
  mb.n_corners = C;
  mb.periodic = false;
  mb.n_vertices = static_cast<std::size_t>(next_id);
  mb.corner_vertex.assign(C, kNoVertex);
  mb.vertex_corners.assign(mb.n_vertices, {});
  for (long q = 0; q < C; ++q) {
    const VertexId kv = keep[corner_vertex[q]];
    mb.corner_vertex[q] = kv;
    if (kv != kNoVertex) mb.vertex_corners[kv].push_back(q);
  }
  auto interior = [&](long corner) {
    const VertexId cv = corner_vertex[corner];
    return dist[cv] >= 0 && dist[cv] <= radius;
  };
  long root_arc = -1;
  for (long q = 0; q < C; ++q) {
    const long t = match.target[q];
    if (t < 0) continue;
    if (!interior(q) && !interior(t)) continue;
    if (q == origin) root_arc = static_cast<long>(mb.arcs.size());
    mb.arcs.emplace_back(q, t);
  }
  PlanarMap pm = mb.build();
  pm.labels.assign(pm.vertex_count(), 0);
  for (std::size_t v = 0; v < vid.size(); ++v) {
    if (keep[v] == kNoVertex) continue;
    pm.labels[keep[v]] = w.label[vertex_corners[v].front()];
  }
  pm.labels_carried = true;
  if (root_arc < 0) throw CertificationError("root arc missing from ball", C);
  pm.root = static_cast<HalfEdgeId>(2 * root_arc + (epsilon == -1 ? 0 : 1));

  TruncatedBall ball;
  ball.map = std::move(pm);
  ball.certified_radius = radius;
  ball.source_vertex.assign(static_cast<std::size_t>(next_id), 0);
  for (const auto& [src, v] : vid) {
    if (keep[v] != kNoVertex) ball.source_vertex[keep[v]] = src;
  }
  return ball;
}

// ---------------------------------------------------------------------------

MapCheckReport map_checks(const PlanarMap& pm) {
  MapCheckReport rep;
  rep.vertices = pm.vertex_count();
  rep.edges = pm.edge_count();
  auto fail = [&](const std::string& why) {
    rep.ok = false;
    if (rep.violation.empty()) rep.violation = why;
  };
  try {
    pm.check_well_formed();
  } catch (const StructuralError& e) {
    fail(e.what());
    return rep;
  }
  const auto faces = pm.faces();
  rep.faces = faces.size();
  rep.euler_ok = (static_cast<long>(rep.vertices) - static_cast<long>(rep.edges) +
                      static_cast<long>(rep.faces) ==
                  2);
  if (!rep.euler_ok) fail("Euler formula violated");
  rep.bipartite_ok = true;
  for (const auto& f : faces) {
    if (f.size() % 2 != 0) {
      rep.bipartite_ok = false;
      fail("odd face degree " + std::to_string(f.size()));
      break;
    }
  }
  rep.root_ok = pm.root != kNoHalfEdge && pm.root < static_cast<HalfEdgeId>(pm.half.size());
  if (!rep.root_ok) fail("root half-edge invalid");
  if (pm.point && pm.labels_carried) {
    const auto dist = pm.bfs_distances(*pm.point);
    std::int32_t min_label = std::numeric_limits<std::int32_t>::max();
    for (VertexId v = 0; v < static_cast<VertexId>(pm.vertex_count()); ++v) {
      if (v != *pm.point) min_label = std::min(min_label, pm.labels[v]);
    }
    rep.distance_ok = true;
    for (VertexId v = 0; v < static_cast<VertexId>(pm.vertex_count()); ++v) {
      if (v == *pm.point) continue;
      if (dist[v] < 0) {
        rep.distance_ok = false;
        fail("map disconnected from the point");
        break;
      }
      if (dist[v] != pm.labels[v] - min_label + 1) {
        rep.distance_ok = false;
        fail("distance formula fails at vertex " + std::to_string(v) + ": d=" +
             std::to_string(dist[v]) + " label=" + std::to_string(pm.labels[v]));
        break;
      }
    }
  }
  return rep;
}

namespace {

// Restriction to a vertex subset with a per-half-edge keep rule; rotation
// order of survivors is preserved.
PlanarMap restrict_map(const PlanarMap& pm, const std::vector<VertexId>& keep,
                       VertexId next_id,
                       const std::function<bool(HalfEdgeId)>& keep_half) {
  PlanarMap out;
  out.vertex_rep.assign(static_cast<std::size_t>(next_id), kNoHalfEdge);
  std::vector<HalfEdgeId> hmap(pm.half.size(), kNoHalfEdge);
  for (HalfEdgeId h = 0; h < static_cast<HalfEdgeId>(pm.half.size()); ++h) {
    if (keep_half(h)) {
      hmap[h] = static_cast<HalfEdgeId>(out.half.size());
      out.half.emplace_back();
    }
  }
  for (HalfEdgeId h = 0; h < static_cast<HalfEdgeId>(pm.half.size()); ++h) {
    if (hmap[h] == kNoHalfEdge) continue;
    out.half[hmap[h]].origin = keep[pm.half[h].origin];
    out.half[hmap[h]].twin = hmap[pm.half[h].twin];
  }
  for (std::size_t v = 0; v < pm.vertex_count(); ++v) {
    if (keep[v] == kNoVertex) continue;
    std::vector<HalfEdgeId> hs;
    for (HalfEdgeId h : pm.rotation(static_cast<VertexId>(v))) {
      if (hmap[h] != kNoHalfEdge) hs.push_back(hmap[h]);
    }
    for (std::size_t k = 0; k < hs.size(); ++k) {
      out.half[hs[k]].next = hs[(k + 1) % hs.size()];
    }
    if (!hs.empty()) out.vertex_rep[keep[v]] = hs.front();
  }
  out.root = (pm.root != kNoHalfEdge && hmap[pm.root] != kNoHalfEdge) ? hmap[pm.root]
                                                                      : kNoHalfEdge;
  if (pm.point && keep[*pm.point] != kNoVertex) out.point = keep[*pm.point];
  if (pm.labels_carried) {
    out.labels.assign(static_cast<std::size_t>(next_id), 0);
    for (std::size_t v = 0; v < pm.vertex_count(); ++v) {
      if (keep[v] != kNoVertex) out.labels[keep[v]] = pm.labels[v];
    }
    out.labels_carried = true;
  }
  return out;
}

}  // namespace

PlanarMap map_ball(const PlanarMap& pm, long r, VertexId from) {
  if (from == kNoVertex) from = pm.root_vertex();
  const auto dist = pm.bfs_distances(from);
  std::vector<VertexId> keep(pm.vertex_count(), kNoVertex);
  VertexId next_id = 0;
  for (std::size_t v = 0; v < pm.vertex_count(); ++v) {
    if (dist[v] >= 0 && dist[v] <= r) keep[v] = next_id++;
  }
  return restrict_map(pm, keep, next_id, [&](HalfEdgeId h) {
    return keep[pm.half[h].origin] != kNoVertex && keep[pm.head(h)] != kNoVertex;
  });
}

PlanarMap map_ball_closed(const PlanarMap& pm, long r, VertexId from) {
  if (from == kNoVertex) from = pm.root_vertex();
  const auto dist = pm.bfs_distances(from);
  std::vector<VertexId> keep(pm.vertex_count(), kNoVertex);
  VertexId next_id = 0;
  for (std::size_t v = 0; v < pm.vertex_count(); ++v) {
    if (dist[v] >= 0 && dist[v] <= r + 1) keep[v] = next_id++;
  }
  return restrict_map(pm, keep, next_id, [&](HalfEdgeId h) {
    const long du = dist[pm.half[h].origin];
    const long dv = dist[pm.head(h)];
    if (du < 0 || dv < 0) return false;
    return du <= r || dv <= r;
  });
}

std::string canonical_code(const PlanarMap& pm) {
  std::ostringstream os;
  os << "v" << pm.vertex_count() << ";e" << pm.edge_count() << ";";
  if (pm.root == kNoHalfEdge) {
    os << "unrooted";
    if (pm.point) os << ";p0";
    return os.str();
  }
  // BFS over half-edges from the root; vertices numbered by discovery.
  std::vector<VertexId> number(pm.vertex_count(), kNoVertex);
  std::vector<HalfEdgeId> entry(pm.vertex_count(), kNoHalfEdge);
  VertexId next_num = 0;
  std::deque<VertexId> queue;
  auto discover = [&](VertexId v, HalfEdgeId via) {
    if (number[v] != kNoVertex) return;
    number[v] = next_num++;
    entry[v] = via;
    queue.push_back(v);
  };
  discover(pm.root_vertex(), pm.root);
  std::vector<VertexId> order = {pm.root_vertex()};
  while (!queue.empty()) {
    const VertexId v = queue.front();
    queue.pop_front();
    // Walk the rotation starting from the entry half-edge.
    HalfEdgeId h0 = entry[v];
    if (pm.half[h0].origin != v) h0 = pm.half[h0].twin;  // entered via twin
    HalfEdgeId h = h0;
    do {
      discover(pm.head(h), pm.half[h].twin);
      if (static_cast<std::size_t>(next_num) > pm.vertex_count()) break;
      h = pm.half[h].next;
    } while (h != h0);
  }
  // Emit rotations in discovery order using discovery numbers.
  std::vector<VertexId> by_number(pm.vertex_count(), kNoVertex);
  for (VertexId v = 0; v < static_cast<VertexId>(pm.vertex_count()); ++v) {
    if (number[v] != kNoVertex) by_number[number[v]] = v;
  }
  for (VertexId k = 0; k < next_num; ++k) {
    const VertexId v = by_number[k];
    HalfEdgeId h0 = entry[v];
    if (pm.half[h0].origin != v) h0 = pm.half[h0].twin;
    os << "[";
    HalfEdgeId h = h0;
    do {
      os << number[pm.head(h)] << ",";
      h = pm.half[h].next;
    } while (h != h0);
    os << "]";
  }
  os << ";p" << (pm.point ? std::to_string(number[*pm.point]) : "-");
  return os.str();
}

MapDistance map_distance(const PlanarMap& a, const PlanarMap& b, long up_to_R) {
  MapDistance d;
  long agree = -1;
  for (long r = 0; r <= up_to_R; ++r) {
    if (canonical_code(map_ball(a, r)) != canonical_code(map_ball(b, r))) break;
    agree = r;
  }
  if (agree == static_cast<long>(up_to_R) &&
      canonical_code(a) == canonical_code(b)) {
    d.identical = true;
    d.value = 0;
    return d;
  }
  if (agree < 0) {
    d.agreement_radius = -1;
    d.value = 1;  // differ already at radius 0: distance 1/(1+(-1))... capped at 1
    d.value = Rational(1);
    return d;
  }
  d.agreement_radius = agree;
  d.value = Rational(1, 1 + agree);
  return d;
}

std::vector<long> face_degrees(const PlanarMap& pm) {
  std::vector<long> out;
  for (const auto& f : pm.faces()) out.push_back(static_cast<long>(f.size()));
  std::sort(out.begin(), out.end());
  return out;
}

std::string to_json(const PlanarMap& pm) {
  nlohmann::json j;
  j["vertices"] = pm.vertex_count();
  j["edges"] = pm.edge_count();
  nlohmann::json rot = nlohmann::json::array();
  for (VertexId v = 0; v < static_cast<VertexId>(pm.vertex_count()); ++v) {
    nlohmann::json r = nlohmann::json::array();
    for (HalfEdgeId h : pm.rotation(v)) r.push_back(h);
    rot.push_back(r);
  }
  j["rotation"] = rot;
  nlohmann::json edges = nlohmann::json::array();
  for (HalfEdgeId h = 0; h < static_cast<HalfEdgeId>(pm.half.size()); ++h) {
    if (h < pm.half[h].twin) {
      edges.push_back(nlohmann::json::array({pm.half[h].origin, pm.head(h)}));
    }
  }
  j["edge_list"] = edges;
  j["root_half_edge"] = pm.root;
  if (pm.point) j["point"] = *pm.point;
  if (pm.labels_carried) j["labels"] = pm.labels;
  return j.dump();
}

std::string to_dot(const PlanarMap& pm) {
  std::ostringstream os;
  os << "graph map {\n";
  for (VertexId v = 0; v < static_cast<VertexId>(pm.vertex_count()); ++v) {
    os << "  n" << v;
    std::string extra;
    if (pm.point && *pm.point == v) extra = " shape=doublecircle";
    if (pm.labels_carried) {
      os << " [label=\"" << v << ":" << pm.labels[v] << "\"" << extra << "]";
    } else if (!extra.empty()) {
      os << " [" << extra << "]";
    }
    os << ";\n";
  }
  for (HalfEdgeId h = 0; h < static_cast<HalfEdgeId>(pm.half.size()); ++h) {
    if (h < pm.half[h].twin) {
      const bool is_root = (h == pm.root || pm.half[h].twin == pm.root);
      os << "  n" << pm.half[h].origin << " -- n" << pm.head(h);
      if (is_root) os << " [color=red penwidth=2]";
      os << ";\n";
    }
  }
  os << "}\n";
  return os.str();
}

}  // namespace bpm::bdg

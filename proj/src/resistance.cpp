#include "bpm/resistance.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include "bpm/errors.hpp"

namespace bpm::resist {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

struct UnionFind {
  std::vector<long> parent;
  explicit UnionFind(long n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  long find(long x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(long a, long b) { parent[find(a)] = find(b); }
};

}  // namespace

ResistorNetwork network_from_map(const bdg::PlanarMap& pm) {
  ResistorNetwork net;
  net.n = static_cast<long>(pm.vertex_count());
  for (bdg::HalfEdgeId h = 0; h < static_cast<bdg::HalfEdgeId>(pm.half.size()); ++h) {
    if (h < pm.half[h].twin) {
      net.edges.push_back({pm.half[h].origin, pm.head(h), 1.0});
    }
  }
  return net;
}

namespace {

struct Contracted {
  long n = 0;
  std::vector<ResistorNetwork::Edge> edges;  // finite conductances only
  std::vector<long> label;                   // old vertex -> contracted vertex
  std::vector<long> src, snk;
};

Contracted contract(const ResistorNetwork& net) {
  UnionFind uf(net.n);
  for (const auto& e : net.edges) {
    if (std::isinf(e.conductance)) uf.unite(e.u, e.v);
  }
  Contracted c;
  c.label.assign(net.n, -1);
  long next = 0;
  for (long v = 0; v < net.n; ++v) {
    const long r = uf.find(v);
    if (c.label[r] < 0) c.label[r] = next++;
    c.label[v] = c.label[r];
  }
  c.n = next;
  for (const auto& e : net.edges) {
    if (std::isinf(e.conductance)) continue;
    if (e.conductance <= 0) throw StructuralError("conductances must be positive");
    const long u = c.label[e.u], v = c.label[e.v];
    if (u != v) c.edges.push_back({u, v, e.conductance});
  }
  for (long a : net.source) c.src.push_back(c.label[a]);
  for (long b : net.sink) c.snk.push_back(c.label[b]);
  std::sort(c.src.begin(), c.src.end());
  c.src.erase(std::unique(c.src.begin(), c.src.end()), c.src.end());
  std::sort(c.snk.begin(), c.snk.end());
  c.snk.erase(std::unique(c.snk.begin(), c.snk.end()), c.snk.end());
  return c;
}

}  // namespace

std::optional<double> tree_series_resistance(const ResistorNetwork& net) {
  if (net.source.size() != 1 || net.sink.size() != 1) return std::nullopt;
  Contracted c = contract(net);
  if (static_cast<long>(c.edges.size()) != c.n - 1) return std::nullopt;  // not a tree
  if (c.src.size() != 1 || c.snk.size() != 1) return std::nullopt;
  // BFS path from src to snk accumulating resistances.
  std::vector<std::vector<std::pair<long, double>>> adj(c.n);
  for (const auto& e : c.edges) {
    adj[e.u].emplace_back(e.v, e.conductance);
    adj[e.v].emplace_back(e.u, e.conductance);
  }
  std::vector<double> res(c.n, -1.0);
  std::deque<long> queue = {c.src[0]};
  res[c.src[0]] = 0.0;
  while (!queue.empty()) {
    const long v = queue.front();
    queue.pop_front();
    for (const auto& [u, cond] : adj[v]) {
      if (res[u] < 0) {
        res[u] = res[v] + 1.0 / cond;
        queue.push_back(u);
      }
    }
  }
  if (res[c.snk[0]] < 0) return kInf;
  return res[c.snk[0]];
}

SolveReport effective_resistance(const ResistorNetwork& net, SolveMethod method, double tol) {
  SolveReport rep;
  if (net.source.empty() || net.sink.empty()) {
    throw StructuralError("effective resistance needs non-empty boundary sets");
  }
  Contracted c = contract(net);
  {
    std::vector<char> is_snk(c.n, 0);
    for (long b : c.snk) is_snk[b] = 1;
    for (long a : c.src) {
      if (is_snk[a]) {
        rep.r_eff = 0.0;  // boundary sets touch after contraction
        return rep;
      }
    }
  }
  // Connectivity from the sources over finite edges.
  std::vector<std::vector<std::pair<long, double>>> adj(c.n);
  for (const auto& e : c.edges) {
    adj[e.u].emplace_back(e.v, e.conductance);
    adj[e.v].emplace_back(e.u, e.conductance);
  }
  std::vector<char> reach(c.n, 0);
  {
    std::deque<long> queue(c.src.begin(), c.src.end());
    for (long a : c.src) reach[a] = 1;
    while (!queue.empty()) {
      const long v = queue.front();
      queue.pop_front();
      for (const auto& [u, cond] : adj[v]) {
        (void)cond;
        if (!reach[u]) {
          reach[u] = 1;
          queue.push_back(u);
        }
      }
    }
  }
  bool any_sink = false;
  for (long b : c.snk) any_sink = any_sink || reach[b];
  if (!any_sink) {
    rep.disconnected = true;
    rep.r_eff = kInf;
    return rep;
  }

  // Potentials: 1 on sources, 0 on sinks, harmonic elsewhere.
  std::vector<double> f(c.n, 0.0);
  std::vector<int> role(c.n, 0);  // 0 interior, 1 source, 2 sink
  for (long a : c.src) {
    role[a] = 1;
    f[a] = 1.0;
  }
  for (long b : c.snk) role[b] = 2;
  std::vector<long> interior;
  std::vector<long> index(c.n, -1);
  for (long v = 0; v < c.n; ++v) {
    if (role[v] == 0 && reach[v]) {
      index[v] = static_cast<long>(interior.size());
      interior.push_back(v);
    }
  }
  const long m = static_cast<long>(interior.size());
  const bool dense = (method == SolveMethod::Dense) ||
                     (method == SolveMethod::Auto && m <= 500);
  std::vector<double> x(m, 0.0);
  if (m > 0 && dense) {
    // L_II x = b with b from the source row.
    std::vector<double> A(static_cast<std::size_t>(m) * m, 0.0);
    std::vector<double> b(m, 0.0);
    for (const auto& e : c.edges) {
      const long iu = index[e.u], iv = index[e.v];
      if (iu >= 0) A[iu * m + iu] += e.conductance;
      if (iv >= 0) A[iv * m + iv] += e.conductance;
      if (iu >= 0 && iv >= 0) {
        A[iu * m + iv] -= e.conductance;
        A[iv * m + iu] -= e.conductance;
      }
      if (iu >= 0 && role[e.v] == 1) b[iu] += e.conductance;
      if (iv >= 0 && role[e.u] == 1) b[iv] += e.conductance;
    }
    // Gaussian elimination with partial pivoting.
    std::vector<long> piv(m);
    std::iota(piv.begin(), piv.end(), 0);
    for (long k = 0; k < m; ++k) {
      long best = k;
      for (long r = k + 1; r < m; ++r) {
        if (std::fabs(A[r * m + k]) > std::fabs(A[best * m + k])) best = r;
      }
      if (best != k) {
        for (long j = 0; j < m; ++j) std::swap(A[k * m + j], A[best * m + j]);
        std::swap(b[k], b[best]);
      }
      const double pivot = A[k * m + k];
      if (std::fabs(pivot) < 1e-300) throw NumericError("singular Laplacian block");
      for (long r = k + 1; r < m; ++r) {
        const double factor = A[r * m + k] / pivot;
        if (factor == 0.0) continue;
        for (long j = k; j < m; ++j) A[r * m + j] -= factor * A[k * m + j];
        b[r] -= factor * b[k];
      }
    }
    for (long k = m - 1; k >= 0; --k) {
      double acc = b[k];
      for (long j = k + 1; j < m; ++j) acc -= A[k * m + j] * x[j];
      x[k] = acc / A[k * m + k];
    }
  } else if (m > 0) {
    // Jacobi-preconditioned conjugate gradient, matrix-free.
    std::vector<double> diag(m, 0.0), b(m, 0.0);
    std::vector<std::vector<std::pair<long, double>>> iadj(m);
    for (const auto& e : c.edges) {
      const long iu = index[e.u], iv = index[e.v];
      if (iu >= 0) diag[iu] += e.conductance;
      if (iv >= 0) diag[iv] += e.conductance;
      if (iu >= 0 && iv >= 0) {
        iadj[iu].emplace_back(iv, e.conductance);
        iadj[iv].emplace_back(iu, e.conductance);
      }
      if (iu >= 0 && role[e.v] == 1) b[iu] += e.conductance;
      if (iv >= 0 && role[e.u] == 1) b[iv] += e.conductance;
    }
    auto apply = [&](const std::vector<double>& in, std::vector<double>& out) {
      for (long i = 0; i < m; ++i) {
        double acc = diag[i] * in[i];
        for (const auto& [j, cij] : iadj[i]) acc -= cij * in[j];
        out[i] = acc;
      }
    };
    std::vector<double> r = b, z(m), p(m), Ap(m);
    double bnorm = 0.0;
    for (double v : b) bnorm += v * v;
    bnorm = std::sqrt(bnorm);
    if (bnorm == 0.0) bnorm = 1.0;
    for (long i = 0; i < m; ++i) z[i] = r[i] / diag[i];
    p = z;
    double rz = 0.0;
    for (long i = 0; i < m; ++i) rz += r[i] * z[i];
    const long max_iter = 40 * m + 200;
    long it = 0;
    for (; it < max_iter; ++it) {
      double rn = 0.0;
      for (double v : r) rn += v * v;
      if (std::sqrt(rn) <= tol * bnorm) break;
      apply(p, Ap);
      double pAp = 0.0;
      for (long i = 0; i < m; ++i) pAp += p[i] * Ap[i];
      if (pAp <= 0) throw NumericError("CG breakdown on the Laplacian");
      const double alpha = rz / pAp;
      for (long i = 0; i < m; ++i) {
        x[i] += alpha * p[i];
        r[i] -= alpha * Ap[i];
      }
      for (long i = 0; i < m; ++i) z[i] = r[i] / diag[i];
      double rz_new = 0.0;
      for (long i = 0; i < m; ++i) rz_new += r[i] * z[i];
      const double beta = rz_new / rz;
      rz = rz_new;
      for (long i = 0; i < m; ++i) p[i] = z[i] + beta * p[i];
    }
    if (it >= max_iter) throw NumericError("CG did not meet the tolerance");
    rep.iterations = it;
  }
  for (long k = 0; k < m; ++k) f[interior[k]] = x[k];
  double energy = 0.0;
  for (const auto& e : c.edges) {
    const double df = f[e.u] - f[e.v];
    energy += e.conductance * df * df;
  }
  rep.energy = energy;
  rep.r_eff = (energy > 0) ? 1.0 / energy : kInf;
  return rep;
}

// ---------------------------------------------------------------------------
// Star system

std::pair<long, bdg::VertexId> StarSystem::dstar_with_meet(bdg::VertexId x,
                                                           bdg::VertexId y) const {
  const auto& lab = star_ball.map.labels;
  long steps = 0;
  while (x != y) {
    bdg::VertexId* climb = nullptr;
    if (lab[x] > lab[y]) {
      climb = &x;
    } else if (lab[y] > lab[x]) {
      climb = &y;
    } else {
      // equal labels, distinct vertices: both must climb
      if (star_parent[x] == bdg::kNoVertex || star_parent[y] == bdg::kNoVertex) {
        throw CertificationError("d* walk left the certified star ball", 0);
      }
      x = star_parent[x];
      y = star_parent[y];
      steps += 2;
      continue;
    }
    if (star_parent[*climb] == bdg::kNoVertex) {
      throw CertificationError("d* walk left the certified star ball", 0);
    }
    *climb = star_parent[*climb];
    ++steps;
  }
  return {steps, x};
}

long StarSystem::dstar(bdg::VertexId x, bdg::VertexId y) const {
  return dstar_with_meet(x, y).first;
}

long StarSystem::dsharp(bdg::VertexId u, bdg::VertexId v) const {
  if (u == v) return 0;
  return dstar(vstar[u], vstar[v]) + (is_star[u] ? 0 : 1) + (is_star[v] ? 0 : 1);
}

long StarSystem::dsharp_root(bdg::VertexId v) const {
  if (v == m_root) return 0;
  return dstar_root[vstar[v]] + (is_star[v] ? 0 : 1);
}

StarSystem build_star_system(samplers::LimitSampler& sampler,
                             samplers::LimitTruncation& trunc, long r_map, long r_star) {
  if (!trunc.condensation()) throw PhaseError("star map needs the condensation phase");
  StarSystem sys;
  long window = sampler.options().window_each_side;
  for (int attempt = 0;; ++attempt) {
    try {
      const auto sw = sampler.star_window(trunc);
      sys.star_ball = bdg::phi_build_window(sw, trunc.mobile.epsilon, r_star);
      // r-hat as a mobile node, then the M ball centered there.
      const std::int32_t rhat_node =
          sys.star_ball.source_vertex[sys.star_ball.map.root_vertex()];
      auto mw = sampler.mobile_window(trunc);
      std::size_t center = mw.vertex.size();
      for (std::size_t i = 0; i < mw.vertex.size(); ++i) {
        if (mw.vertex[i] == rhat_node) {
          center = i;
          break;
        }
      }
      if (center == mw.vertex.size()) throw StructuralError("r-hat not in the contour window");
      mw.origin = center;
      sys.m_ball = bdg::phi_build_window(mw, -1, r_map);
      break;
    } catch (const CertificationError&) {
      if (attempt >= 63) throw;
      sampler.extend_window(trunc, window);
      window *= 2;
    }
  }
  sys.m_root = sys.m_ball.map.root_vertex();
  sys.star_root = sys.star_ball.map.root_vertex();
  sys.certified_radius = r_map;

  // Index star-ball vertices by their mobile node.
  std::map<std::int32_t, bdg::VertexId> star_index;
  for (bdg::VertexId v = 0; v < static_cast<bdg::VertexId>(sys.star_ball.map.vertex_count());
       ++v) {
    star_index[sys.star_ball.source_vertex[v]] = v;
  }
  const auto& mtree = trunc.mobile.tree;
  const trees::NodeId s0 = mtree.nodes[trunc.s].parent;
  sys.vstar.assign(sys.m_ball.map.vertex_count(), bdg::kNoVertex);
  sys.is_star.assign(sys.m_ball.map.vertex_count(), 0);
  for (bdg::VertexId v = 0; v < static_cast<bdg::VertexId>(sys.m_ball.map.vertex_count());
       ++v) {
    const trees::NodeId node = sys.m_ball.source_vertex[v];
    const trees::NodeId dec_root = trunc.decoration_root_of[node];
    const trees::NodeId star_node = (dec_root == trees::kNoNode) ? s0 : dec_root;
    const auto it = star_index.find(star_node);
    if (it == star_index.end()) {
      throw CertificationError("projection leaves the star ball; enlarge r_star", r_star);
    }
    sys.vstar[v] = it->second;
    sys.is_star[v] = (node == star_node);
  }

  // Successor parents in the star ball: the unique neighbour one label down.
  const auto& smap = sys.star_ball.map;
  sys.star_parent.assign(smap.vertex_count(), bdg::kNoVertex);
  for (bdg::VertexId v = 0; v < static_cast<bdg::VertexId>(smap.vertex_count()); ++v) {
    for (bdg::HalfEdgeId h : smap.rotation(v)) {
      const bdg::VertexId u = smap.head(h);
      if (smap.labels[u] == smap.labels[v] - 1) {
        sys.star_parent[v] = u;
        break;
      }
    }
  }
  sys.star_s_index.assign(smap.vertex_count(), 0);
  for (bdg::VertexId v = 0; v < static_cast<bdg::VertexId>(smap.vertex_count()); ++v) {
    const trees::NodeId node = sys.star_ball.source_vertex[v];
    const auto it = trunc.s_child_number.find(node);
    sys.star_s_index[v] = (it == trunc.s_child_number.end()) ? 0 : it->second;
  }
  sys.dstar_root = smap.bfs_distances(sys.star_root);
  sys.m_dist_root = sys.m_ball.map.bfs_distances(sys.m_root);
  return sys;
}

ProjectedNetwork project_network(const StarSystem& sys) {
  ProjectedNetwork out;
  const auto& smap = sys.star_ball.map;
  const auto& lab = smap.labels;
  // Conductance per star edge, keyed by the deeper endpoint (larger label).
  std::vector<double> cond(smap.vertex_count(), 0.0);
  const auto& mmap = sys.m_ball.map;
  for (bdg::HalfEdgeId h = 0; h < static_cast<bdg::HalfEdgeId>(mmap.half.size()); ++h) {
    if (h >= mmap.half[h].twin) continue;
    bdg::VertexId x = sys.vstar[mmap.half[h].origin];
    bdg::VertexId y = sys.vstar[mmap.head(h)];
    // Walk the unique star path, adding |e|_* to every edge on it.
    long len = sys.dstar(x, y);
    out.total_edge_length += len;
    if (len == 0) continue;
    std::vector<bdg::VertexId> px, py;
    while (x != y) {
      if (lab[x] > lab[y]) {
        px.push_back(x);
        x = sys.star_parent[x];
      } else if (lab[y] > lab[x]) {
        py.push_back(y);
        y = sys.star_parent[y];
      } else {
        px.push_back(x);
        py.push_back(y);
        x = sys.star_parent[x];
        y = sys.star_parent[y];
      }
    }
    for (bdg::VertexId t : px) cond[t] += static_cast<double>(len);
    for (bdg::VertexId t : py) cond[t] += static_cast<double>(len);
  }
  out.net.n = static_cast<long>(smap.vertex_count());
  for (bdg::VertexId v = 0; v < static_cast<bdg::VertexId>(smap.vertex_count()); ++v) {
    if (cond[v] > 0.0) {
      if (sys.star_parent[v] == bdg::kNoVertex) {
        throw CertificationError("projected edge leaves the star ball", 0);
      }
      out.net.edges.push_back({v, sys.star_parent[v], cond[v]});
      out.total_conductance += cond[v];
    }
  }
  return out;
}

VolumeProfile volume_profile(const StarSystem& sys, const std::vector<long>& R_list) {
  VolumeProfile vp;
  vp.R = R_list;
  vp.proxy_warning = true;
  const auto& mmap = sys.m_ball.map;
  for (long R : R_list) {
    double omega = 0.0;
    for (bdg::VertexId v = 0; v < static_cast<bdg::VertexId>(mmap.vertex_count()); ++v) {
      if (sys.m_dist_root[v] > sys.certified_radius) continue;  // partial degrees
      if (sys.dsharp_root(v) < R) omega += static_cast<double>(mmap.degree(v));
    }
    vp.omega.push_back(omega);
    long cnt = 0;
    for (long d : sys.dstar_root) cnt += (d >= 0 && d < R);
    vp.ball_dstar.push_back(cnt);
  }
  return vp;
}

JLambdaReport j_lambda(const StarSystem& sys, long R, double lambda, long point_probes) {
  JLambdaReport rep;
  rep.R = R;
  rep.lambda = lambda;
  const auto profile = volume_profile(sys, {R});
  rep.omega = profile.omega[0];
  const double R2 = static_cast<double>(R) * R;
  rep.vol_lower = rep.omega >= R2 / lambda;
  rep.vol_upper = rep.omega <= R2 * lambda;

  // Resistance from r-hat to the d#-complement (finite proxy).
  ResistorNetwork net = network_from_map(sys.m_ball.map);
  net.source = {sys.m_root};
  std::vector<bdg::VertexId> inside;
  for (bdg::VertexId v = 0; v < static_cast<bdg::VertexId>(sys.m_ball.map.vertex_count());
       ++v) {
    if (v == sys.m_root) continue;
    if (sys.dsharp_root(v) >= R) {
      net.sink.push_back(v);
    } else {
      inside.push_back(v);
    }
  }
  if (net.sink.empty()) {
    rep.res_lower = false;  // window cannot see the complement
    rep.res_point = false;
    return rep;
  }
  rep.reff_boundary = effective_resistance(net).r_eff;
  rep.res_lower = rep.reff_boundary >= static_cast<double>(R) / lambda;

  // Existence clause: probe the nearest vertices in d# order.
  std::sort(inside.begin(), inside.end(), [&](bdg::VertexId a, bdg::VertexId b) {
    return sys.dsharp_root(a) < sys.dsharp_root(b);
  });
  rep.best_point_ratio = kInf;
  for (long i = 0; i < std::min<long>(point_probes, static_cast<long>(inside.size())); ++i) {
    const bdg::VertexId y = inside[i];
    ResistorNetwork pair_net = network_from_map(sys.m_ball.map);
    pair_net.source = {sys.m_root};
    pair_net.sink = {y};
    const double reff = effective_resistance(pair_net).r_eff;
    const double ratio = reff / std::max<long>(1, sys.dsharp_root(y));
    rep.best_point_ratio = std::min(rep.best_point_ratio, ratio);
    if (ratio <= lambda) {
      rep.res_point = true;
      break;
    }
  }
  return rep;
}

ShortingCheck shorting_check(const StarSystem& sys, long R) {
  ShortingCheck out;
  ResistorNetwork net = network_from_map(sys.m_ball.map);
  net.source = {sys.m_root};
  for (bdg::VertexId v = 0; v < static_cast<bdg::VertexId>(sys.m_ball.map.vertex_count());
       ++v) {
    if (v != sys.m_root && sys.dsharp_root(v) >= R) net.sink.push_back(v);
  }
  if (net.sink.empty()) throw CertificationError("no d# boundary in the window", R);
  out.reff_map = effective_resistance(net).r_eff;

  ProjectedNetwork proj = project_network(sys);
  proj.net.source = {sys.star_root};
  std::vector<char> sink_star(sys.star_ball.map.vertex_count(), 0);
  for (long b : net.sink) sink_star[sys.vstar[b]] = 1;
  sink_star[sys.star_root] = 0;  // keep the boundary disjoint from the source
  for (bdg::VertexId v = 0; v < static_cast<bdg::VertexId>(sink_star.size()); ++v) {
    if (sink_star[v]) proj.net.sink.push_back(v);
  }
  out.reff_projected = effective_resistance(proj.net).r_eff;
  return out;
}

DecorationStats decoration_statistics(const samplers::LimitTruncation& t, long R) {
  if (!t.condensation()) throw PhaseError("decorations need the condensation phase");
  DecorationStats ds;
  ds.R = R;
  const auto& m = t.mobile;
  const trees::NodeId s0 = m.tree.nodes[t.s].parent;
  const std::int32_t base = m.labels[s0];

  // Flank first passages on the stored increments (labels relative to s_0).
  auto first_passage = [&](const std::vector<trees::NodeId>& flank, long target,
                           bool exact) -> long {
    if (target == 0) return 0;
    long i = 0;
    for (trees::NodeId c : flank) {
      ++i;
      const long rel = m.labels[c] - base;
      if (exact ? (rel == -target) : (rel <= -target)) return i;
    }
    throw CertificationError("flank window too small for the requested R",
                             static_cast<long>(flank.size()) * 2 + 16);
  };
  ds.i_plus = first_passage(t.s_children_left, R, true);
  ds.i_minus = first_passage(t.s_children_right, R, false);
  const long im_prev = first_passage(t.s_children_right, R - 1, false);
  ds.N_of_R = ds.i_plus + im_prev - 1;

  // Per-decoration size and label displacement over the window.
  std::map<long, std::int32_t> root_label;
  root_label[0] = base;
  for (const auto& [node, num] : t.s_child_number) root_label[num] = m.labels[node];
  std::map<long, long> min_label;
  for (trees::NodeId v = 0; v < static_cast<trees::NodeId>(m.tree.node_count()); ++v) {
    if (v == t.s) continue;
    const trees::NodeId dec_root = t.decoration_root_of[v];
    long idx = 0;
    if (dec_root != trees::kNoNode) idx = t.s_child_number.at(dec_root);
    ds.size[idx] += 1;
    if (m.tree.nodes[v].colour == trees::Colour::White) {
      const long disp = std::abs(static_cast<long>(m.labels[v]) - root_label[idx]);
      auto [it, fresh] = ds.delta_ell.try_emplace(idx, disp);
      if (!fresh) it->second = std::max(it->second, disp);
      auto [mit, mfresh] = min_label.try_emplace(idx, m.labels[v]);
      if (!mfresh) mit->second = std::min<long>(mit->second, m.labels[v]);
    }
  }

  // m(R): min label over decorations -i^-(R-1) < i <= i^+(R), relative to s_0.
  long mn = 0;
  for (long i = -(im_prev - 1); i <= ds.i_plus; ++i) {
    const auto it = min_label.find(i);
    if (it != min_label.end()) mn = std::min(mn, it->second - base);
  }
  ds.m_of_R = mn;
  return ds;
}

}  // namespace bpm::resist

#include "bpm/walk.hpp"

#include <algorithm>
#include <cmath>

#include "bpm/errors.hpp"
#include "bpm/labeling.hpp"

namespace bpm::walk {

void WalkStats::merge(const WalkStats& other) {
  if (returns_at.size() < other.returns_at.size()) returns_at.resize(other.returns_at.size(), 0);
  for (std::size_t i = 0; i < other.returns_at.size(); ++i) returns_at[i] += other.returns_at[i];
  walkers += other.walkers;
  steps = std::max(steps, other.steps);
}

WalkStats run_srw(const bdg::PlanarMap& pm, const std::vector<char>& unsafe, long steps,
                  long walkers, RngStream& rng) {
  const bdg::VertexId origin = pm.root_vertex();
  WalkStats ws;
  ws.origin = origin;
  ws.steps = steps;
  ws.walkers = walkers;
  ws.returns_at.assign(static_cast<std::size_t>(steps / 2) + 1, 0);
  // Flat adjacency with multiplicity (uniform neighbour = uniform incident edge).
  std::vector<std::int32_t> adj;
  std::vector<std::int32_t> offset(pm.vertex_count() + 1, 0);
  for (bdg::VertexId v = 0; v < static_cast<bdg::VertexId>(pm.vertex_count()); ++v) {
    offset[v + 1] = offset[v] + static_cast<std::int32_t>(pm.degree(v));
  }
  adj.resize(offset.back());
  {
    std::vector<std::int32_t> at(pm.vertex_count(), 0);
    for (bdg::VertexId v = 0; v < static_cast<bdg::VertexId>(pm.vertex_count()); ++v) {
      for (bdg::HalfEdgeId h : pm.rotation(v)) adj[offset[v] + at[v]++] = pm.head(h);
    }
  }
  for (long w = 0; w < walkers; ++w) {
    bdg::VertexId pos = origin;
    ++ws.returns_at[0];
    for (long t = 1; t <= steps; ++t) {
      const std::int32_t d = offset[pos + 1] - offset[pos];
      if (d == 0) throw StructuralError("walk reached an isolated vertex");
      pos = adj[offset[pos] + static_cast<std::int32_t>(rng.below(static_cast<std::uint64_t>(d)))];
      if (!unsafe.empty() && unsafe[pos]) {
        throw CertificationError("walker reached the ball boundary; enlarge the ball", t);
      }
      if ((t & 1) == 0 && pos == origin) ++ws.returns_at[t / 2];
    }
  }
  return ws;
}

Rational exact_return_prob(const bdg::PlanarMap& pm, long n, bdg::VertexId origin) {
  if (pm.vertex_count() > 12) throw CapacityError("exact walk oracle limited to 12 vertices");
  const std::size_t nv = pm.vertex_count();
  std::vector<std::vector<std::pair<bdg::VertexId, long>>> nbr(nv);
  std::vector<long> deg(nv, 0);
  for (bdg::VertexId v = 0; v < static_cast<bdg::VertexId>(nv); ++v) {
    std::map<bdg::VertexId, long> mult;
    for (bdg::HalfEdgeId h : pm.rotation(v)) ++mult[pm.head(h)];
    for (const auto& [u, k] : mult) {
      nbr[v].emplace_back(u, k);
      deg[v] += k;
    }
  }
  std::vector<Rational> dist(nv, Rational(0));
  dist[origin] = 1;
  for (long t = 0; t < n; ++t) {
    std::vector<Rational> next(nv, Rational(0));
    for (std::size_t v = 0; v < nv; ++v) {
      if (dist[v] == 0) continue;
      const Rational share = dist[v] / Rational(deg[v]);
      for (const auto& [u, k] : nbr[v]) next[u] += share * Rational(k);
    }
    dist = std::move(next);
  }
  return dist[origin];
}

namespace {

SpectralFit fit_loglog(const std::vector<std::pair<double, double>>& pts, long n_min,
                       long n_max, bool shrunk) {
  SpectralFit fit;
  fit.n_min = n_min;
  fit.n_max = n_max;
  fit.window_shrunk = shrunk;
  const std::size_t m = pts.size();
  if (m < 2) throw NumericError("spectral fit needs at least two usable points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = m * sxx - sx * sx;
  if (denom <= 0) throw NumericError("degenerate spectral fit window");
  const double slope = (m * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / m;
  double ss = 0;
  for (const auto& [x, y] : pts) {
    const double r = y - (intercept + slope * x);
    ss += r * r;
  }
  const double var_slope = (m > 2) ? ss / (m - 2) * m / denom : 0.0;
  fit.slope = slope;
  fit.ds_estimate = -2.0 * slope;
  fit.stderr_ = 2.0 * std::sqrt(std::max(0.0, var_slope));
  return fit;
}

}  // namespace

SpectralFit fit_spectral_dimension(const WalkStats& ws, long n_min, long n_max) {
  std::vector<double> p(ws.returns_at.size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = ws.p_hat(static_cast<long>(i));
  return fit_spectral_dimension(p, n_min, n_max);
}

SpectralFit fit_spectral_dimension(const std::vector<double>& p2n, long n_min, long n_max) {
  if (n_min < 1 || n_max <= n_min ||
      n_max >= static_cast<long>(p2n.size())) {
    throw StructuralError("spectral fit window out of collected range");
  }
  std::vector<std::pair<double, double>> pts;
  bool shrunk = false;
  for (long n = n_min; n <= n_max; ++n) {
    if (p2n[n] <= 0.0) {
      shrunk = true;  // zero-count bin dropped
      continue;
    }
    pts.emplace_back(std::log(static_cast<double>(n)), std::log(p2n[n]));
  }
  return fit_loglog(pts, n_min, n_max, shrunk);
}

// ---------------------------------------------------------------------------

DegreeBoundLaw degree_bound_law(const weights::OffspringLaws& laws) {
  const double pi0 = laws.pi0();
  if (pi0 >= 1.0) {
    throw PhaseError("degree bound law needs pi_0 < 1 (otherwise the UIPTree branch applies)");
  }
  DegreeBoundLaw dbl;
  // p  = sum_{r>=1} pi_{r+1} P(X^{(r)}_{r+1} >= 1)
  // p' = sum_{r>=1} pi_{r+1} P(X^{(r)}_{1} = -1), bridge of length r+1.
  // The marginals have closed forms (hockey-stick sums over E_{r+1}):
  //   P(last >= 1) = C(2r-1, r)/C(2r+1, r) = (r+1)/(2(2r+1))
  //   P(first = -1) = C(2r, r-1)/C(2r+1, r) = r/(2r+1)
  // validated against enumeration in the tests. Both coefficients are
  // bounded, so the pi tail certifies the truncation.
  double tail = 1.0 - laws.pi(0) - laws.pi(1);
  for (long r = 1; r < 20'000'000; ++r) {
    const double w = laws.pi(r + 1);
    tail -= w;
    dbl.p += w * (r + 1.0) / (2.0 * (2.0 * r + 1.0));
    dbl.p_prime += w * r / (2.0 * r + 1.0);
    if (tail < 1e-12 && r > 4) break;
  }
  return dbl;
}

long sample_degree_bound(const DegreeBoundLaw& dbl, const weights::OffspringLaws& laws,
                         RngStream& rng) {
  const long terms = 2 + laws.sample_xi_white(rng) + laws.sample_xi_white(rng);
  long total = rng.geometric_from_one(dbl.p_prime);  // zeta'
  for (long j = 0; j < terms; ++j) total += 1 + rng.geometric_from_one(dbl.p);
  return total;
}

DominanceReport check_degree_domination(const std::vector<long>& degrees,
                                        long censored_degrees,
                                        const std::vector<long>& bound_draws, double alpha) {
  DominanceReport rep;
  rep.censored = censored_degrees;
  rep.degree_samples = static_cast<long>(degrees.size()) + censored_degrees;
  rep.bound_samples = static_cast<long>(bound_draws.size());
  if (degrees.empty() || bound_draws.empty()) throw StructuralError("empty samples");

  std::vector<long> deg_sorted = degrees;
  std::vector<long> bound_sorted = bound_draws;
  std::sort(deg_sorted.begin(), deg_sorted.end());
  std::sort(bound_sorted.begin(), bound_sorted.end());
  // S(k) = P(X > k); censored draws count as above every threshold.
  auto survival = [](const std::vector<long>& sorted, long k, long extra, long total) {
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), k);
    return static_cast<double>((sorted.end() - it) + extra) / total;
  };
  auto s_deg = [&](long k) {
    return survival(deg_sorted, k, censored_degrees, rep.degree_samples);
  };
  auto s_bound = [&](long k) { return survival(bound_sorted, k, 0, rep.bound_samples); };

  // Evaluate at the jump points of either step function.
  std::vector<long> ks = deg_sorted;
  ks.insert(ks.end(), bound_sorted.begin(), bound_sorted.end());
  ks.push_back(0);
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

  const double band = std::sqrt(std::log(2.0 / alpha) / (2.0 * rep.degree_samples)) +
                      std::sqrt(std::log(2.0 / alpha) / (2.0 * rep.bound_samples));
  rep.band = band;
  rep.dominated = true;
  for (long k : ks) {
    const double diff = s_deg(k) - s_bound(k);
    rep.max_violation = std::max(rep.max_violation, diff);
    if (diff > band) rep.dominated = false;
  }
  // Log-survival slope of the (uncensored) degree law.
  std::vector<std::pair<double, double>> pts;
  for (long k : deg_sorted) {
    const double s = survival(deg_sorted, k, 0, static_cast<long>(deg_sorted.size()));
    if (s > 0 && (pts.empty() || pts.back().first != static_cast<double>(k))) {
      pts.emplace_back(static_cast<double>(k), std::log(s));
    }
  }
  if (pts.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [x, y] : pts) {
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double denom = pts.size() * sxx - sx * sx;
    rep.log_survival_slope = (pts.size() * sxy - sx * sy) / denom;
  }
  return rep;
}

}  // namespace bpm::walk

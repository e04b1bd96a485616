#pragma once

#include <optional>
#include <vector>

#include "bpm/bdg.hpp"
#include "bpm/numbers.hpp"
#include "bpm/rng.hpp"
#include "bpm/weights.hpp"

namespace bpm::walk {

struct WalkStats {
  std::vector<std::int64_t> returns_at;  // index n: walkers back at the origin at time 2n
  long steps = 0;
  long walkers = 0;
  bdg::VertexId origin = 0;

  double p_hat(long n) const {
    return walkers > 0 ? static_cast<double>(returns_at[n]) / walkers : 0.0;
  }

  void merge(const WalkStats& other);
};

// Simple random walk on a (multigraph) map ball; a step onto a vertex in
// `unsafe` aborts with an error carrying the excursion radius, so confined
// runs stay unbiased. Parallel edges weight the neighbour choice through the
// rotation.
WalkStats run_srw(const bdg::PlanarMap& pm, const std::vector<char>& unsafe, long steps,
                  long walkers, RngStream& rng);

// Exact return probability by repeated transition application; <= 12 vertices.
Rational exact_return_prob(const bdg::PlanarMap& pm, long n, bdg::VertexId origin);

struct SpectralFit {
  double ds_estimate = 0.0;
  double stderr_ = 0.0;
  long n_min = 0, n_max = 0;
  bool window_shrunk = false;
  double slope = 0.0;
};

// Least squares of log p(2n) on log n over [n_min, n_max]; d_s = -2 slope.
SpectralFit fit_spectral_dimension(const WalkStats& ws, long n_min, long n_max);

// Fit on an averaged curve (annealed) given per-n probabilities.
SpectralFit fit_spectral_dimension(const std::vector<double>& p2n, long n_min, long n_max);

// ---------------------------------------------------------------------------
// Degree domination (the recurrence hypothesis)

struct DegreeBoundLaw {
  double p = 0.0;        // stopping probability, counterclockwise scheme
  double p_prime = 0.0;  // clockwise scheme
};

// p = (1-pi0) sum_r P(xi_black = r) P(last bridge increment >= 1), with the
// bridge marginals in closed form and a certified series tail.
DegreeBoundLaw degree_bound_law(const weights::OffspringLaws& laws);

// zeta' + sum_{j=1}^{2+xi1+xi2} (1 + zeta_j).
long sample_degree_bound(const DegreeBoundLaw& dbl, const weights::OffspringLaws& laws,
                         RngStream& rng);

struct DominanceReport {
  bool dominated = false;        // S_deg(k) <= S_bound(k) + band for all k
  double max_violation = 0.0;    // max over k of S_deg - S_bound (no band)
  double band = 0.0;             // DKW(alpha) band, both samples combined
  double log_survival_slope = 0.0;  // fitted on the degree sample
  long degree_samples = 0, bound_samples = 0;
  long censored = 0;
};

// One-sided dominance of the degree survival by the bound survival, with a
// DKW band at level alpha. `censored_degrees` counts draws whose exploration
// was cut short; they are treated as arbitrarily large (conservative for the
// dominance direction) and excluded from the tail-slope fit.
DominanceReport check_degree_domination(const std::vector<long>& degrees,
                                        long censored_degrees,
                                        const std::vector<long>& bound_draws, double alpha);

}  // namespace bpm::walk

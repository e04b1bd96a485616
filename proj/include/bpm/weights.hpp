#pragma once

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bpm/numbers.hpp"
#include "bpm/rng.hpp"

namespace bpm::weights {

enum class Family { FiniteSupport, PowerLaw, Geometric, Explicit };

// Face weights q_i, one per face of degree 2i. Two of the built-in families
// are parameterized directly in tree-weight space (w_i = C(2i-1, i-1) q_i),
// which is how the condensation examples are usually written:
//   FiniteSupport: w_i given on a finite index set (w_0 = 1 implicit)
//   PowerLaw:      w_i = c * i^(-beta), i >= 1
//   Geometric:     w_i = a * b^i, i >= 1   (w == 1 is a = b = 1)
//   Explicit:      q_i given on a finite index set
// The radius of convergence of g is declared per family (finite support ->
// infinity, power law -> 1, geometric -> 1/b). Numeric estimation of R is
// deliberately not offered; an Explicit family may declare radius zero to get
// the degenerate pi = delta_0 regime.
struct FaceWeights {
  Family family = Family::Explicit;
  std::map<long, Rational> table;  // q for Explicit, w for FiniteSupport
  double c = 0.0, beta = 0.0;      // PowerLaw
  double a = 0.0, b = 0.0;         // Geometric
  bool zero_radius = false;        // explicit degenerate declaration

  static FaceWeights explicit_q(std::map<long, Rational> q);
  static FaceWeights finite_w(std::map<long, Rational> w);
  static FaceWeights power_law(double c, double beta);
  static FaceWeights geometric(double a, double b);
  static FaceWeights all_ones() { return geometric(1.0, 1.0); }
  static FaceWeights degenerate_zero_radius();

  static FaceWeights from_json(const std::string& text);
  std::string to_json() const;

  // Throws ConfigError when the weights violate q_i >= 0 or (for the
  // analysis entry points) when no q_i > 0 with i >= 2 exists.
  void validate(bool require_nondegenerate) const;

  double declared_radius() const;  // +inf for entire families
};

// w_0 = 1, w_i = C(2i-1, i-1) q_i. Exact values available whenever the
// family parameters are exactly representable (everything except PowerLaw
// with non-integer beta).
class TreeWeights {
 public:
  explicit TreeWeights(FaceWeights fw);

  double value(long i) const;
  std::optional<Rational> exact(long i) const;
  Rational exact_or_throw(long i) const;
  bool is_exact() const { return exact_family_; }

  // Largest index with w_i != 0; nullopt for infinite support.
  std::optional<long> max_support() const;

  double q_value(long i) const;

  const FaceWeights& face() const { return fw_; }

  static constexpr long kExactIndexCap = 1'000'000;

 private:
  FaceWeights fw_;
  bool exact_family_ = false;
};

struct GenFnAnalysis {
  double radius = std::numeric_limits<double>::infinity();
  double gamma = 0.0;  // may be +inf
  double tau = 0.0;
  double g_of_tau = 1.0;
  double g_prime_of_tau = 0.0;
  double solver_tolerance = 1e-12;
};

// gamma as the limit of t g'(t)/g(t) at t -> R (closed form per family), tau
// by bisection on the monotone ratio when gamma >= 1, else tau = R.
GenFnAnalysis analyze(const TreeWeights& tw);

// Series evaluation helpers, exposed for tests. Certified tails per family.
double eval_g(const TreeWeights& tw, double t);
double eval_g_prime(const TreeWeights& tw, double t);

// All offspring laws of the limit construction. Immutable and cheap to copy.
class OffspringLaws {
 public:
  OffspringLaws(const TreeWeights& tw, const GenFnAnalysis& a);

  const GenFnAnalysis& analysis() const { return analysis_; }

  double pi(long i) const;
  double pi0() const { return pi(0); }
  double kappa() const { return kappa_; }
  double kappa_tilde() const { return kappa_tilde_; }
  bool condensation() const { return kappa_ < 1.0 - 1e-12; }

  double pi_partial_sum(long n) const;  // sum_{i<=n} pi_i

  // xi_white ~ Geometric(pi0) on {0,1,...}; xi_black on {0,1,...}.
  double xi_white_pmf(long i) const;
  double xi_black_pmf(long i) const;
  // Size-biased laws; hat variants live on {1,2,...} plus an atom at infinity.
  double xi_white_hat_pmf(long i) const;
  double xi_black_hat_pmf(long i) const;
  double xi_black_hat_infinity() const;  // (1-kappa)/pi0
  double xi_hat_pmf(long k) const;       // k pi_k
  double xi_hat_infinity() const { return 1.0 - kappa_; }
  // Spine-outgrowth count in the bad decoration: P(k) = (k+1) pi_{k+1} / kappa.
  double xi_tilde_pmf(long k) const;

  // E(xi^r) by partial summation with a certified tail (closed forms via the
  // zeta function for the power-law family). nullopt when divergent.
  std::optional<double> moment(int r) const;

  long sample_xi(RngStream& rng) const;
  long sample_xi_white(RngStream& rng) const;
  long sample_xi_black(RngStream& rng) const;
  long sample_xi_white_hat(RngStream& rng) const;
  // nullopt encodes the atom at infinity.
  std::optional<long> sample_xi_black_hat(RngStream& rng) const;
  std::optional<long> sample_xi_hat(RngStream& rng) const;
  long sample_xi_tilde(RngStream& rng) const;

  const TreeWeights& tree_weights() const { return tw_; }

  static constexpr long kSampleIndexCap = 8'000'000;

 private:
  long walk_inversion(RngStream& rng, double (OffspringLaws::*pmf)(long) const,
                      double total) const;

  TreeWeights tw_;
  GenFnAnalysis analysis_;
  double kappa_ = 0.0;
  double kappa_tilde_ = 0.0;
};

// Convenience: full package from a face-weight config.
struct WeightPackage {
  TreeWeights tw;
  GenFnAnalysis analysis;
  OffspringLaws laws;
};

WeightPackage make_package(const FaceWeights& fw);

}  // namespace bpm::weights

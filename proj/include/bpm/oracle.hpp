#pragma once

#include <string>
#include <vector>

#include "bpm/bdg.hpp"
#include "bpm/labeling.hpp"
#include "bpm/numbers.hpp"
#include "bpm/plane_tree.hpp"
#include "bpm/weights.hpp"

namespace bpm::oracle {

inline constexpr long kTreeEnumCap = 12;
inline constexpr long kMobileEnumCap = 5;

// All preorder outdegree sequences of plane trees with n edges.
std::vector<std::vector<int>> enumerate_lukasiewicz(long n);

// Materialized trees; |Gamma_n| = Catalan(n).
std::vector<trees::PlaneTree> enumerate_trees(long n);

// All mobiles with n edges and root label 0 (epsilon fixed by the caller).
std::vector<labels::Mobile> enumerate_mobiles(long n);

BigInt catalan(long n);

struct ExactDistribution {
  std::vector<std::string> support;  // canonical forms, sorted
  std::vector<Rational> probs;

  Rational prob_of(const std::string& key) const;
  bool sums_to_one() const;
};

// nu_n: simply generated tree law, weight prod_v w_outdeg(v).
ExactDistribution exact_nu(const weights::TreeWeights& tw, long n);

// tilde-nu_n directly: weight prod over black vertices of w_deg(v).
ExactDistribution exact_nu_tilde(const weights::TreeWeights& tw, long n);

// nu_n pushed through Psi; equals exact_nu_tilde exactly.
ExactDistribution exact_nu_pushforward(const weights::TreeWeights& tw, long n);

// mu_n two ways: over maps keyed by canonical code. `pipeline` pushes the
// mobile measure nu_tilde(T)/(2 lambda(T)) through Phi; `direct` weighs each
// map in the pipeline's support by W(m) = prod_f q_(deg f / 2) read off the
// faces. Both exact; asserted equal in tests.
struct MuPair {
  ExactDistribution pipeline;
  ExactDistribution direct;
};

MuPair exact_mu(const weights::TreeWeights& tw, long n);

// Canonical code invariant under the choice of root edge (point kept).
std::string unrooted_code(const bdg::PlanarMap& pm);

}  // namespace bpm::oracle

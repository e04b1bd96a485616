#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bpm/numbers.hpp"
#include "bpm/plane_tree.hpp"
#include "bpm/rng.hpp"

namespace bpm::labels {

using trees::NodeId;
using trees::PlaneTree;

// Label increments clockwise around one black vertex of degree r: r integers,
// each >= -1, summing to zero (an element of E_r).
using Bridge = std::vector<int>;

struct Mobile {
  PlaneTree tree;  // coloured white (even generations) / black (odd)
  std::vector<std::int32_t> labels;  // per node id; valid at white nodes
  int epsilon = +1;
  // Truncations are generally not mobiles: the label rules are not checked.
  bool truncated_fragment = false;

  std::int32_t root_label() const { return labels[tree.root()]; }
};

inline constexpr long kBridgeEnumerationCap = 12;
inline constexpr long kBridgeDpCap = 256;

// Exhaustive E_r, |result| = C(2r-1, r-1). CapacityError above the cap.
std::vector<Bridge> enumerate_bridges(long r);

BigInt bridge_set_size(long r);  // |E_r|

// Uniform element of E_r in O(r log r): shifting each increment by one turns
// E_r into the compositions of r into r non-negative parts, i.e. placements
// of r - 1 bars among 2r - 1 slots, so a uniform (r-1)-subset does it. Exact,
// and it stays cheap at the heavy-tailed degrees of the condensation phase
// where rejection against the zero-sum event degenerates.
Bridge sample_bridge_uniform(long r, RngStream& rng);

// Rejection of i.i.d. increments conditioned on zero sum; acceptance
// Theta(r^{-1/2}). Kept as an independent cross-check of the direct sampler.
Bridge sample_bridge_rejection(long r, RngStream& rng);

// Exactly uniform via the sequential counting method; for cross-checks.
Bridge sample_bridge_dp(long r, RngStream& rng);

// P(X = k) = 2^{-k-2}, k >= -1.
inline long sample_increment_iid(RngStream& rng) { return rng.bridge_increment(); }

// Closed-form marginals of a uniform bridge of length `degree`, used by the
// degree-domination law. Validated against enumerate_bridges in tests.
Rational bridge_last_step_ge1_prob(long degree);
Rational bridge_first_step_minus1_prob(long degree);

// Propagates labels root-down. `bridges` maps every finite-degree black
// vertex to a Bridge whose length equals its degree.
Mobile assign_labels(const PlaneTree& t, const std::map<NodeId, Bridge>& bridges,
                     std::int32_t root_label, int epsilon);

// Inverse of assign_labels: recover the increments around each black vertex.
std::map<NodeId, Bridge> extract_bridges(const Mobile& m);

// Checks rule (1) at every black vertex; returns a human-readable violation
// or the empty string.
std::string check_mobile(const Mobile& m);

// lambda(T): number of allowed labelings with the root label fixed.
BigInt count_labelings(const PlaneTree& t);

// Tree truncation with labels restricted; flagged as fragment.
Mobile mobile_truncate(const Mobile& m, long R);

std::string serialize(const Mobile& m);
Mobile deserialize_mobile(const std::string& line);

}  // namespace bpm::labels

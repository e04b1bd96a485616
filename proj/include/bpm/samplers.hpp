#pragma once

#include <map>
#include <optional>
#include <vector>

#include "bpm/bdg.hpp"
#include "bpm/labeling.hpp"
#include "bpm/plane_tree.hpp"
#include "bpm/rng.hpp"
#include "bpm/weights.hpp"

namespace bpm::samplers {

using weights::WeightPackage;

// ---------------------------------------------------------------------------
// Finite simply generated trees, mobiles, maps

// Exact nu_n sampler. Small n enumerates Gamma_n with exact weights; larger n
// samples the outdegree sequence conditioned on total sum (partition-function
// convolution table) and arranges it into a tree by the cycle lemma.
class NuSampler {
 public:
  NuSampler(const WeightPackage& pkg, long n);

  trees::PlaneTree sample(RngStream& rng) const;

  long n() const { return n_; }
  static constexpr long kEnumerationCutoff = 12;
  static constexpr long kConvolutionCap = 4096;

 private:
  const WeightPackage& pkg_;
  long n_ = 0;
  // enumeration path
  std::vector<std::vector<int>> words_;
  std::vector<double> cumulative_;
  // convolution path: table_[m][s] = P(sum of m iid xi = s), 0 <= s <= n
  std::vector<std::vector<double>> table_;

  trees::PlaneTree sample_by_convolution(RngStream& rng) const;
};

trees::PlaneTree sample_sgt_n(const WeightPackage& pkg, long n, RngStream& rng);
labels::Mobile sample_mobile_n(const WeightPackage& pkg, long n, RngStream& rng);
bdg::PlanarMap sample_map_n(const WeightPackage& pkg, long n, RngStream& rng);

// Uniform bridges at every finite black vertex of a tree (the label half of
// the mobile measure).
labels::Mobile attach_uniform_labels(const trees::PlaneTree& mobile_tree, RngStream& rng);

// ---------------------------------------------------------------------------
// The infinite limit

struct LimitOptions {
  long spine_budget = 64;        // spine edges materialized when the spine is infinite
  long window_each_side = 8;     // children of the infinite vertex per flank
  long outgrowth_cap = 10'000'000;
};

// Truncation of the limit mobile: the materialized fragment plus enough
// bookkeeping to extend it deterministically (per-unit derived rng streams).
struct LimitTruncation {
  labels::Mobile mobile;                    // fragment; labels on white vertices
  std::vector<trees::NodeId> spine;         // S_0 = root, alternating colours
  trees::NodeId s = trees::kNoNode;         // infinite-degree black vertex, if reached
  bool spine_complete = false;              // true iff the spine ended at s
  bool labels_attached = false;
  std::vector<trees::NodeId> s_children_left;   // s_1, s_2, ...
  std::vector<trees::NodeId> s_children_right;  // s_-1, s_-2, ...

  bool condensation() const { return s != trees::kNoNode; }
  long spine_length_edges() const { return static_cast<long>(spine.size()) - 1; }

  // Decoration index of a white vertex: i if it sits in the subtree of s_i,
  // 0 for the spine side (the bad decoration). Condensation phase only.
  long decoration_index(trees::NodeId white) const;

  std::vector<trees::NodeId> decoration_root_of;  // white node -> s_i node (or root-side marker)
  std::map<trees::NodeId, long> s_child_number;   // s_i node -> i
  // Stored randomness so label propagation is reproducible under extension.
  std::map<trees::NodeId, labels::Bridge> bridges;
  std::map<trees::NodeId, int> s_increments;
};

// Grows limit mobiles; extension requests keep previously generated parts
// bit-identical (every spine step and every s-child owns a derived stream).
class LimitSampler {
 public:
  LimitSampler(const WeightPackage& pkg, RngStream base, LimitOptions opts = {});

  // Structure only (labels all zero).
  LimitTruncation sample_tree();
  // Structure plus labels (bridges at finite black vertices, iid increments
  // around the infinite vertex).
  LimitTruncation sample_mobile();

  // Extends the window / spine of a truncation produced by this sampler.
  void extend_window(LimitTruncation& t, long extra_each_side);
  void extend_spine(LimitTruncation& t, long extra_edges);

  // Two-sided white contour of the fragment, cut at the frontier, origin at
  // the root's first corner. Vertex ids are tree node ids.
  bdg::ContourWindow mobile_window(const LimitTruncation& t) const;

  // White contour window of the star mobile (s and its neighbours only).
  bdg::ContourWindow star_window(const LimitTruncation& t) const;

  const LimitOptions& options() const { return opts_; }

 private:
  friend struct LimitBuild;
  WeightPackage pkg_;
  RngStream base_;
  LimitOptions opts_;
  bool with_labels_ = false;

  LimitTruncation build(long spine_budget, long window_each_side);
};

// Certified graph ball of the limit map: grows the truncation until
// phi_build_window certifies radius r.
struct LimitBallResult {
  bdg::TruncatedBall ball;
  LimitTruncation truncation;
};

LimitBallResult sample_limit_ball(const WeightPackage& pkg, long r, RngStream rng,
                                  LimitOptions opts = {});

// Ball of the UIPTree (the kappa = 0 limit).
LimitBallResult sample_uiptree_ball(long r, RngStream rng, LimitOptions opts = {});

// Degree of the map root e- in the limit map, from corner counts and local
// predecessor stretches; far successor targets are never resolved, so the
// typical cost stays small. Returns nullopt when locating e- (epsilon = +1)
// exceeds `node_cap` materialized nodes: the exploration depth of that
// first passage is heavy-tailed with infinite mean, and callers must treat
// a censored draw conservatively.
std::optional<long> sample_root_degree(const WeightPackage& pkg, RngStream rng,
                                       long node_cap = (1L << 21), LimitOptions opts = {});

// ---------------------------------------------------------------------------
// Auxiliary processes

// Modified Galton--Watson process with pi_i = 2^{-i-1}: first generation
// (i+1) pi_{i+1}, later generations pi.
long sample_Yn(long n, RngStream& rng);

struct YnExact {
  double p_zero;  // P(Y_n = 0) = (n/(n+1))^2
  double mean;    // E(Y_n) = 2 for n >= 1
};
YnExact yn_exact(long n);

// Distance from the root to the cut vertex z_R in the UIPTree.
long sample_LR(long R, RngStream& rng);
// P(L_R = k); closed forms, exact rationals.
Rational lr_exact(long R, long k);

// |Dec_i| via the Lukasiewicz first-passage construction; `bad` composes the
// geometric spine, per-vertex outgrowth counts, and GW totals.
long sample_decoration_size(const weights::OffspringLaws& laws, bool bad, RngStream& rng,
                            long cap = 10'000'000);

}  // namespace bpm::samplers

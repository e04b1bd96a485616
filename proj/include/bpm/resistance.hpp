#pragma once

#include <map>
#include <optional>
#include <vector>

#include "bpm/bdg.hpp"
#include "bpm/numbers.hpp"
#include "bpm/samplers.hpp"

namespace bpm::resist {

// ---------------------------------------------------------------------------
// Conductance networks

struct ResistorNetwork {
  struct Edge {
    long u = 0, v = 0;
    double conductance = 1.0;  // +inf means contract before solving
  };
  long n = 0;
  std::vector<Edge> edges;
  std::vector<long> source;  // A: potential 1
  std::vector<long> sink;    // B: potential 0
};

ResistorNetwork network_from_map(const bdg::PlanarMap& pm);

enum class SolveMethod { Auto, Dense, ConjugateGradient };

struct SolveReport {
  double r_eff = 0.0;       // +inf when disconnected
  bool disconnected = false;
  long iterations = 0;
  double energy = 0.0;
};

// Dirichlet problem on the graph Laplacian; infinite conductances contracted
// by union-find first. Dense elimination below 500 interior vertices as the
// oracle path, Jacobi-preconditioned CG above (relative tolerance 1e-10).
SolveReport effective_resistance(const ResistorNetwork& net,
                                 SolveMethod method = SolveMethod::Auto,
                                 double tol = 1e-10);

// Exact series value for tree networks (after contraction) with singleton
// boundary sets; nullopt when the shape does not apply.
std::optional<double> tree_series_resistance(const ResistorNetwork& net);

// ---------------------------------------------------------------------------
// Star map, d#, projection

// M and M* balls built from one limit truncation, with the projection
// v -> v* and successor-tree bookkeeping. The reference vertex is r-hat, the
// BDG root of the star map, in both balls.
struct StarSystem {
  bdg::TruncatedBall m_ball;
  bdg::TruncatedBall star_ball;
  bdg::VertexId m_root = 0;     // r-hat in the M ball
  bdg::VertexId star_root = 0;  // r-hat in the M* ball
  std::vector<bdg::VertexId> vstar;      // M-ball vertex -> M*-ball vertex
  std::vector<char> is_star;             // M-ball vertex equals its projection
  std::vector<bdg::VertexId> star_parent;  // successor in M*; kNoVertex at the frontier
  std::vector<long> dstar_root;            // d*(r-hat, x) for star vertices
  std::vector<long> m_dist_root;           // graph distance in the M ball from r-hat
  long certified_radius = 0;               // M-ball interior radius around r-hat

  std::vector<long> star_s_index;  // star vertex -> i of s_i (0 for s_0)

  long dstar(bdg::VertexId x, bdg::VertexId y) const;  // tree metric in M*
  // Also reports the meeting vertex of the two successor geodesics.
  std::pair<long, bdg::VertexId> dstar_with_meet(bdg::VertexId x, bdg::VertexId y) const;
  // d#(u, v) = d*(u*, v*) + (1 - delta_{u,u*}) + (1 - delta_{v,v*})
  long dsharp(bdg::VertexId u, bdg::VertexId v) const;
  long dsharp_root(bdg::VertexId v) const;
};

StarSystem build_star_system(samplers::LimitSampler& sampler,
                             samplers::LimitTruncation& trunc, long r_map, long r_star);

// Conductances c_xy = sum of |e|_* over M-ball edges whose projection path
// uses the star edge xy; decoration edges are the contracted (infinite) ones,
// so the network lives on the star vertices directly.
struct ProjectedNetwork {
  ResistorNetwork net;            // on star-ball vertex ids
  double total_conductance = 0.0; // sum of c_xy
  double total_edge_length = 0.0; // sum over M edges of |e|_*; equal by construction
};

ProjectedNetwork project_network(const StarSystem& sys);

// ---------------------------------------------------------------------------
// Volume and the Kumagai-Misumi diagnostic

struct VolumeProfile {
  std::vector<long> R;
  std::vector<double> omega;        // degree measure of B(R; d#)
  std::vector<long> ball_dstar;     // |B(R; d*)| in the star ball
  bool proxy_warning = false;       // finite window proxies the infinite map
};

VolumeProfile volume_profile(const StarSystem& sys, const std::vector<long>& R_list);

struct JLambdaReport {
  long R = 0;
  double lambda = 0.0;
  bool vol_lower = false, vol_upper = false, res_lower = false, res_point = false;
  double omega = 0.0;
  double reff_boundary = 0.0;
  double best_point_ratio = 0.0;  // min over probed y of R_eff / d#
  bool proxy_warning = true;      // boundary is the finite-window proxy of B^c
  bool in_J() const { return vol_lower && vol_upper && res_lower && res_point; }
};

JLambdaReport j_lambda(const StarSystem& sys, long R, double lambda, long point_probes = 24);

// Both sides of the shorting comparison at radius R.
struct ShortingCheck {
  double reff_map = 0.0;
  double reff_projected = 0.0;
};

ShortingCheck shorting_check(const StarSystem& sys, long R);

// ---------------------------------------------------------------------------
// Decoration statistics

struct DecorationStats {
  std::map<long, long> size;       // i -> |Dec_i| over the materialized window
  std::map<long, long> delta_ell;  // i -> max |l(s_i) - l(y)|, white y in Dec_i
  long i_plus = 0;                 // first passage of the left flank to -R
  long i_minus = 0;                // first passage of the right flank to <= -R
  long R = 0;
  long m_of_R = 0;                 // min label over the i-window, relative to l(s_0)
  long N_of_R = 0;                 // i+(R) + i-(R-1) - 1
};

DecorationStats decoration_statistics(const samplers::LimitTruncation& t, long R);

}  // namespace bpm::resist

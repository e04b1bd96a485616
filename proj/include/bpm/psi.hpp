#pragma once

#include <map>
#include <vector>

#include "bpm/plane_tree.hpp"

namespace bpm::psi {

using trees::NodeId;
using trees::PlaneTree;

// Bookkeeping of the forward construction: for each leaf v of the input,
// eta(v) and the ancestry block (b_1(v), ..., b_eta(v)) it is joined to,
// ordered from the earliest ancestor down to the parent of v.
struct PsiTrace {
  std::map<NodeId, long> eta;
  std::map<NodeId, std::vector<NodeId>> blocks;
};

struct PsiResult {
  PlaneTree tree;                  // white root, colours alternating
  PsiTrace trace;
  std::vector<NodeId> to_output;   // input node id -> output node id
};

// Leaf/internal recolouring bijection from trees onto unlabelled mobiles.
// Input needs at least one edge. Output black degrees equal the original
// outdegrees; output white degrees equal eta.
PsiResult psi_forward(const PlaneTree& t);

PlaneTree psi_inverse(const PlaneTree& t);

// Psi of an explored portion of a larger tree, truncated to radius R. By
// continuity the result stabilizes once the exploration is deep enough;
// callers verify stabilization by growing the input.
PlaneTree psi_forward_truncated(const PlaneTree& explored, long R);

std::string trace_to_json(const PsiTrace& trace);

}  // namespace bpm::psi

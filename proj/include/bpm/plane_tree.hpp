#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bpm/errors.hpp"
#include "bpm/numbers.hpp"

namespace bpm::trees {

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

enum class Colour : std::uint8_t { White = 0, Black = 1 };

// Ordered rooted plane tree with the signed child-index convention: a vertex
// of outdegree c has children at exactly the integer positions
// (floor(-c/2), floor(c/2)], ordered 0 first, then positive ascending, then
// negative ascending. Truncations keep the original indices, so a stored
// index set is not always the canonical one for its outdegree.
struct TreeNode {
  NodeId parent = kNoNode;
  std::int32_t signed_index = 0;
  Colour colour = Colour::White;
  std::vector<NodeId> children;  // left to right
};

struct PlaneTree {
  std::vector<TreeNode> nodes;

  PlaneTree() { nodes.emplace_back(); }

  NodeId root() const { return 0; }
  std::size_t node_count() const { return nodes.size(); }
  std::size_t edge_count() const { return nodes.size() - 1; }
  long outdeg(NodeId v) const { return static_cast<long>(nodes[v].children.size()); }
  // Paper convention: deg(v) = outdeg(v) + 1 away from the root, outdeg at the root.
  long degree(NodeId v) const { return outdeg(v) + (v == root() ? 0 : 1); }

  NodeId add_child(NodeId parent) {
    NodeId id = static_cast<NodeId>(nodes.size());
    nodes.emplace_back();
    nodes[id].parent = parent;
    nodes[parent].children.push_back(id);
    return id;
  }
};

// Canonical signed index of the child at left-to-right position pos among c.
inline std::int32_t signed_index_for_position(long pos, long c) {
  if (pos == 0) return 0;
  if (pos <= c / 2) return static_cast<std::int32_t>(pos);
  return static_cast<std::int32_t>(pos - c);
}

inline long position_for_signed_index(std::int32_t idx, long c) {
  if (idx > 0) return idx;
  if (idx == 0) return 0;
  return idx + c;
}

// Rewrites every node's child indices to the canonical set for its outdegree.
void assign_canonical_indices(PlaneTree& t);

// True when every finite node's child indices are exactly the canonical set.
bool has_canonical_indices(const PlaneTree& t);

// Root coloured white, alternating by generation.
void colour_by_generation(PlaneTree& t);

std::vector<std::int32_t> compute_generations(const PlaneTree& t);

// Builds the tree whose preorder outdegree list is `out` (a Lukasiewicz word).
PlaneTree from_preorder_outdegrees(const std::vector<int>& out);

std::vector<int> to_preorder_outdegrees(const PlaneTree& t);

bool equal(const PlaneTree& a, const PlaneTree& b);

// ---------------------------------------------------------------------------
// Contours

enum class ContourKind { Left, Right, TwoSided, WhiteOnly };

struct ContourSequence {
  ContourKind kind = ContourKind::Left;
  std::vector<NodeId> vertices;
  std::vector<std::int32_t> corner_of;  // k-th visit index of that vertex, 0-based
  // For TwoSided/WhiteOnly: index into `vertices` of contour position 0.
  std::size_t origin = 0;
};

// Finite-tree contours. Left/Right have 2n entries (positions 0..2n-1) for a
// tree with n >= 1 edges, a single entry for the one-vertex tree. TwoSided
// glues c_i^(L) (i >= 0) and c_(-i)^(R) (i < 0); one period is stored and
// positions wrap, so index with contour_at. WhiteOnly is the even-position
// subsequence of the left contour.
ContourSequence contour(const PlaneTree& t, ContourKind kind);

// Vertex at (periodic) contour position pos; negative positions allowed.
inline NodeId contour_at(const ContourSequence& seq, long pos) {
  const long period = static_cast<long>(seq.vertices.size());
  long p = (static_cast<long>(seq.origin) + pos) % period;
  if (p < 0) p += period;
  return seq.vertices[p];
}

// ---------------------------------------------------------------------------
// Truncation and the local metric

// Preorder copy of the subtree of vertices passing `keep` (which must hold
// for the root and be closed upward). new_id maps old ids, kNoNode if cut.
struct FilteredCopy {
  PlaneTree tree;
  std::vector<NodeId> new_id;
};
FilteredCopy copy_preorder_filtered(const PlaneTree& t,
                                    const std::vector<char>& keep);

// Subtree with vertices in V^[R]: generation <= R and every signed index on
// the address in (floor(-R/2), floor(R/2)].
PlaneTree truncate(const PlaneTree& t, long R);

// The keep mask of V^[R] membership, shared with the mobile truncation.
std::vector<char> truncation_mask(const PlaneTree& t, long R);

struct TreeDistance {
  bool identical = false;
  long agreement_radius = 0;  // sup{R : truncations agree}; meaningful when !identical
  Rational value = 0;         // 1/(1+R), or exact 0 when identical
};

TreeDistance tree_distance(const PlaneTree& a, const PlaneTree& b);

// ---------------------------------------------------------------------------
// Canonical serialization: preorder list of [outdegree, [signed indices]].

std::string serialize(const PlaneTree& t);
PlaneTree deserialize_tree(const std::string& line);

}  // namespace bpm::trees

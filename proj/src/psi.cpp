#include "bpm/psi.hpp"

#include <algorithm>
#include <json.hpp>

#include "bpm/errors.hpp"

namespace bpm::psi {

namespace {

bool is_leaf(const PlaneTree& t, NodeId v) {
  return v != t.root() && t.nodes[v].children.empty();
}

bool is_rightmost_child(const PlaneTree& t, NodeId v) {
  const NodeId p = t.nodes[v].parent;
  return p != trees::kNoNode && t.nodes[p].children.back() == v;
}

// rml(v): the leaf reached from v by following rightmost children.
std::vector<NodeId> rightmost_leaf_descent(const PlaneTree& t) {
  std::vector<NodeId> rml(t.node_count(), trees::kNoNode);
  const auto order = [&] {
    std::vector<NodeId> pre;
    pre.reserve(t.node_count());
    std::vector<NodeId> stack = {t.root()};
    while (!stack.empty()) {
      NodeId v = stack.back();
      stack.pop_back();
      pre.push_back(v);
      const auto& ch = t.nodes[v].children;
      for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
    }
    return pre;
  }();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const NodeId v = *it;
    rml[v] = t.nodes[v].children.empty() ? v : rml[t.nodes[v].children.back()];
  }
  return rml;
}

}  // namespace

PsiResult psi_forward(const PlaneTree& t) {
  if (t.edge_count() < 1) throw StructuralError("psi needs at least one edge");

  PsiResult res;
  res.trace.eta.clear();

  // Ancestry runs: the contour climbs from each leaf for as long as the
  // previous vertex was a rightmost child.
  for (NodeId v = 0; v < static_cast<NodeId>(t.node_count()); ++v) {
    if (!is_leaf(t, v)) continue;
    std::vector<NodeId> run = {t.nodes[v].parent};  // A_1
    NodeId below = v;
    while (is_rightmost_child(t, below)) {
      const NodeId top = run.back();
      if (top == t.root()) break;
      run.push_back(t.nodes[top].parent);
      below = top;
    }
    res.trace.eta[v] = static_cast<long>(run.size());
    std::vector<NodeId> blocks(run.rbegin(), run.rend());  // b_1 = earliest ancestor
    res.trace.blocks[v] = std::move(blocks);
  }

  const auto rml = rightmost_leaf_descent(t);

  // Root of the output: first white vertex in the right contour sequence.
  const NodeId out_root_src = rml[t.root()];

  res.to_output.assign(t.node_count(), trees::kNoNode);
  PlaneTree out;
  res.to_output[out_root_src] = out.root();

  // Alternating construction. White vertices take their children from the
  // ancestry block; black vertices take theirs from the rightmost-leaf
  // descents of all input children but the last (which supplies the arc to
  // the black vertex's own output parent).
  std::vector<std::pair<NodeId, NodeId>> stack = {{out_root_src, out.root()}};
  while (!stack.empty()) {
    auto [src, dst] = stack.back();
    stack.pop_back();
    if (is_leaf(t, src)) {
      const auto& blocks = res.trace.blocks.at(src);
      const bool at_root = (dst == out.root());
      for (std::size_t i = at_root ? 0 : 1; i < blocks.size(); ++i) {
        const NodeId child_src = blocks[i];
        if (res.to_output[child_src] != trees::kNoNode) {
          throw StructuralError("psi: vertex reached twice");
        }
        NodeId nd = out.add_child(dst);
        res.to_output[child_src] = nd;
        stack.emplace_back(child_src, nd);
      }
    } else {
      const auto& ch = t.nodes[src].children;
      for (std::size_t i = 0; i + 1 < ch.size(); ++i) {
        const NodeId child_src = rml[ch[i]];
        if (res.to_output[child_src] != trees::kNoNode) {
          throw StructuralError("psi: vertex reached twice");
        }
        NodeId nd = out.add_child(dst);
        res.to_output[child_src] = nd;
        stack.emplace_back(child_src, nd);
      }
    }
  }

  if (out.node_count() != t.node_count()) {
    throw StructuralError("psi: output did not cover the input vertex set");
  }
  trees::assign_canonical_indices(out);
  trees::colour_by_generation(out);
  res.tree = std::move(out);
  return res;
}

PlaneTree psi_inverse(const PlaneTree& tp) {
  const std::size_t n_nodes = tp.node_count();
  if (tp.edge_count() < 1) throw StructuralError("psi_inverse needs at least one edge");
  // Alternating colouring with white root is implied by generations.
  const auto gens = trees::compute_generations(tp);
  auto white = [&](NodeId v) { return gens[v] % 2 == 0; };

  // Recover the original parent of every vertex.
  std::vector<NodeId> parent(n_nodes, trees::kNoNode);
  NodeId t_root = trees::kNoNode;
  for (NodeId v = 0; v < static_cast<NodeId>(n_nodes); ++v) {
    if (white(v)) {
      const auto& ch = tp.nodes[v].children;
      if (!ch.empty()) {
        parent[v] = ch.back();
      } else if (v != tp.root()) {
        parent[v] = tp.nodes[v].parent;
      } else {
        throw StructuralError("psi_inverse: white root without children");
      }
    } else {
      const NodeId pv = tp.nodes[v].parent;
      const auto& sib = tp.nodes[pv].children;
      const auto pos = std::find(sib.begin(), sib.end(), v) - sib.begin();
      if (pos > 0) {
        parent[v] = sib[pos - 1];
      } else if (pv == tp.root()) {
        t_root = v;  // leftmost black child of the output root
      } else {
        parent[v] = tp.nodes[pv].parent;
      }
    }
  }
  if (t_root == trees::kNoNode) throw StructuralError("psi_inverse: no root candidate");

  std::vector<std::vector<NodeId>> kids(n_nodes);
  for (NodeId v = 0; v < static_cast<NodeId>(n_nodes); ++v) {
    if (v == t_root) continue;
    if (parent[v] == trees::kNoNode) throw StructuralError("psi_inverse: orphan vertex");
    kids[parent[v]].push_back(v);
  }

  // Depths in the reconstructed tree (cycle-safe).
  std::vector<int> depth(n_nodes, -1);
  depth[t_root] = 0;
  for (NodeId v = 0; v < static_cast<NodeId>(n_nodes); ++v) {
    NodeId u = v;
    std::vector<NodeId> path;
    while (depth[u] < 0) {
      path.push_back(u);
      u = parent[u];
      if (u == trees::kNoNode || path.size() > n_nodes) {
        throw StructuralError("psi_inverse: parent relation is not a tree");
      }
    }
    int d = depth[u];
    for (auto it = path.rbegin(); it != path.rend(); ++it) depth[*it] = ++d;
  }

  // Order children bottom-up using rightmost-leaf descents.
  std::vector<NodeId> by_depth(n_nodes);
  for (NodeId v = 0; v < static_cast<NodeId>(n_nodes); ++v) by_depth[v] = v;
  std::sort(by_depth.begin(), by_depth.end(),
            [&](NodeId a, NodeId b) { return depth[a] > depth[b]; });

  std::vector<NodeId> rml(n_nodes, trees::kNoNode);
  for (NodeId v : by_depth) {
    if (kids[v].empty()) {
      if (!white(v)) throw StructuralError("psi_inverse: black leaf in reconstruction");
      rml[v] = v;
      continue;
    }
    // v is black/internal: its arc mate list is the output-children of v plus
    // the output-parent, in that left-to-right order.
    const auto& out_children = tp.nodes[v].children;
    std::map<NodeId, long> pos;
    for (std::size_t i = 0; i < out_children.size(); ++i) pos[out_children[i]] = static_cast<long>(i);
    const NodeId out_parent =
        (v == tp.root()) ? trees::kNoNode : tp.nodes[v].parent;
    const long last_pos = static_cast<long>(out_children.size());
    auto key = [&](NodeId child) {
      const NodeId mate = rml[child];
      if (mate == trees::kNoNode) throw StructuralError("psi_inverse: unresolved descent");
      if (mate == out_parent) return last_pos;
      auto it = pos.find(mate);
      if (it == pos.end()) throw StructuralError("psi_inverse: descent leaf not an arc mate");
      return it->second;
    };
    std::sort(kids[v].begin(), kids[v].end(),
              [&](NodeId a, NodeId b) { return key(a) < key(b); });
    if (key(kids[v].back()) != last_pos) {
      throw StructuralError("psi_inverse: rightmost child does not close the block");
    }
    rml[v] = rml[kids[v].back()];
  }

  // Assemble the plane tree in preorder.
  PlaneTree t;
  std::vector<std::pair<NodeId, NodeId>> stack = {{t_root, t.root()}};
  std::size_t built = 1;
  while (!stack.empty()) {
    auto [src, dst] = stack.back();
    stack.pop_back();
    for (NodeId c : kids[src]) {
      NodeId nd = t.add_child(dst);
      ++built;
      stack.emplace_back(c, nd);
    }
  }
  if (built != n_nodes) throw StructuralError("psi_inverse: reconstruction incomplete");
  trees::assign_canonical_indices(t);
  return t;
}

PlaneTree psi_forward_truncated(const PlaneTree& explored, long R) {
  return trees::truncate(psi_forward(explored).tree, R);
}

std::string trace_to_json(const PsiTrace& trace) {
  nlohmann::json j;
  nlohmann::json eta, blocks;
  for (const auto& [v, e] : trace.eta) eta[std::to_string(v)] = e;
  for (const auto& [v, b] : trace.blocks) blocks[std::to_string(v)] = b;
  j["eta"] = eta;
  j["blocks"] = blocks;
  return j.dump();
}

}  // namespace bpm::psi

#include "bpm/plane_tree.hpp"

#include <algorithm>
#include <json.hpp>

namespace bpm::trees {

void assign_canonical_indices(PlaneTree& t) {
  for (auto& node : t.nodes) {
    const long c = static_cast<long>(node.children.size());
    for (long pos = 0; pos < c; ++pos) {
      t.nodes[node.children[pos]].signed_index = signed_index_for_position(pos, c);
    }
  }
}

bool has_canonical_indices(const PlaneTree& t) {
  for (const auto& node : t.nodes) {
    const long c = static_cast<long>(node.children.size());
    for (long pos = 0; pos < c; ++pos) {
      if (t.nodes[node.children[pos]].signed_index != signed_index_for_position(pos, c)) {
        return false;
      }
    }
  }
  return true;
}

void colour_by_generation(PlaneTree& t) {
  const auto gens = compute_generations(t);
  for (std::size_t v = 0; v < t.nodes.size(); ++v) {
    t.nodes[v].colour = (gens[v] % 2 == 0) ? Colour::White : Colour::Black;
  }
}

std::vector<std::int32_t> compute_generations(const PlaneTree& t) {
  std::vector<std::int32_t> gen(t.nodes.size(), 0);
  // Nodes are created parent-first by every builder; verify and fall back if not.
  for (std::size_t v = 1; v < t.nodes.size(); ++v) {
    const NodeId p = t.nodes[v].parent;
    if (p < 0 || static_cast<std::size_t>(p) >= v) {
      // Generic pass for trees assembled in arbitrary order.
      std::vector<NodeId> stack = {t.root()};
      while (!stack.empty()) {
        NodeId u = stack.back();
        stack.pop_back();
        for (NodeId c : t.nodes[u].children) {
          gen[c] = gen[u] + 1;
          stack.push_back(c);
        }
      }
      return gen;
    }
    gen[v] = gen[p] + 1;
  }
  return gen;
}

PlaneTree from_preorder_outdegrees(const std::vector<int>& out) {
  if (out.empty()) throw StructuralError("empty outdegree sequence");
  PlaneTree t;
  std::vector<std::pair<NodeId, int>> stack;  // (node, children still to attach)
  stack.emplace_back(t.root(), out[0]);
  for (std::size_t i = 1; i < out.size(); ++i) {
    while (!stack.empty() && stack.back().second == 0) stack.pop_back();
    if (stack.empty()) throw StructuralError("outdegree sequence closes early");
    NodeId child = t.add_child(stack.back().first);
    --stack.back().second;
    stack.emplace_back(child, out[i]);
  }
  while (!stack.empty() && stack.back().second == 0) stack.pop_back();
  if (!stack.empty()) throw StructuralError("outdegree sequence does not close");
  assign_canonical_indices(t);
  return t;
}

std::vector<int> to_preorder_outdegrees(const PlaneTree& t) {
  std::vector<int> out;
  out.reserve(t.nodes.size());
  std::vector<NodeId> stack = {t.root()};
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    out.push_back(static_cast<int>(t.outdeg(v)));
    const auto& ch = t.nodes[v].children;
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

namespace {

bool equal_rec(const PlaneTree& a, NodeId va, const PlaneTree& b, NodeId vb) {
  if (a.nodes[va].signed_index != b.nodes[vb].signed_index) return false;
  const auto& ca = a.nodes[va].children;
  const auto& cb = b.nodes[vb].children;
  if (ca.size() != cb.size()) return false;
  for (std::size_t i = 0; i < ca.size(); ++i) {
    if (!equal_rec(a, ca[i], b, cb[i])) return false;
  }
  return true;
}

}  // namespace

bool equal(const PlaneTree& a, const PlaneTree& b) {
  if (a.node_count() != b.node_count()) return false;
  return equal_rec(a, a.root(), b, b.root());
}

ContourSequence contour(const PlaneTree& t, ContourKind kind) {
  if (kind == ContourKind::TwoSided) {
    // One period of the two-sided sequence: positions -(2n-1)..0..? We lay out
    // a single period [c_{-(2n-1)}, ..., c_{-1}, c_0, ...]: by 2n-periodicity
    // the negative side is the right contour reversed. Stored left to right
    // with `origin` pointing at position 0.
    ContourSequence left = contour(t, ContourKind::Left);
    ContourSequence out;
    out.kind = ContourKind::TwoSided;
    const std::size_t period = left.vertices.size();
    out.vertices.reserve(period);
    // c_{-i} = c^{(R)}_{i} = c^{(L)}_{2n-i} by periodicity; one period of the
    // two-sided sequence is just the left period rotated so that position 0
    // sits at `origin`. We keep the plain left period and origin = 0.
    out.vertices = left.vertices;
    out.corner_of = left.corner_of;
    out.origin = 0;
    return out;
  }
  ContourSequence seq;
  seq.kind = kind;
  const bool leftmost_first = (kind != ContourKind::Right);
  std::vector<std::int32_t> visits(t.node_count(), 0);
  std::vector<std::size_t> next_child(t.node_count(), 0);
  auto emit = [&](NodeId v) {
    seq.vertices.push_back(v);
    seq.corner_of.push_back(visits[v]++);
  };
  NodeId cur = t.root();
  emit(cur);
  while (true) {
    const auto& ch = t.nodes[cur].children;
    if (next_child[cur] < ch.size()) {
      const std::size_t pos = next_child[cur]++;
      cur = leftmost_first ? ch[pos] : ch[ch.size() - 1 - pos];
      emit(cur);
    } else {
      if (cur == t.root()) break;
      cur = t.nodes[cur].parent;
      emit(cur);
    }
  }
  if (t.edge_count() > 0) {
    seq.vertices.pop_back();  // drop the wrap entry c_{2n} = c_0
    seq.corner_of.pop_back();
  }
  if (kind == ContourKind::WhiteOnly) {
    ContourSequence white;
    white.kind = ContourKind::WhiteOnly;
    std::vector<std::int32_t> white_visits(t.node_count(), 0);
    for (std::size_t i = 0; i < seq.vertices.size(); i += 2) {
      const NodeId v = seq.vertices[i];
      white.vertices.push_back(v);
      white.corner_of.push_back(white_visits[v]++);
    }
    return white;
  }
  return seq;
}

FilteredCopy copy_preorder_filtered(const PlaneTree& t, const std::vector<char>& keep) {
  if (!keep[t.root()]) throw StructuralError("filtered copy must keep the root");
  FilteredCopy out;
  out.new_id.assign(t.node_count(), kNoNode);
  out.new_id[t.root()] = out.tree.root();
  out.tree.nodes[0].signed_index = t.nodes[t.root()].signed_index;
  out.tree.nodes[0].colour = t.nodes[t.root()].colour;
  struct Frame {
    NodeId src;
    std::size_t next = 0;
  };
  std::vector<Frame> stack = {{t.root(), 0}};
  while (!stack.empty()) {
    const NodeId src = stack.back().src;
    const auto& kids = t.nodes[src].children;
    bool descended = false;
    while (stack.back().next < kids.size()) {
      const NodeId c = kids[stack.back().next++];
      if (!keep[c]) continue;
      const NodeId nc = out.tree.add_child(out.new_id[src]);
      out.tree.nodes[nc].signed_index = t.nodes[c].signed_index;
      out.tree.nodes[nc].colour = t.nodes[c].colour;
      out.new_id[c] = nc;
      stack.push_back({c, 0});
      descended = true;
      break;
    }
    if (!descended) stack.pop_back();
  }
  return out;
}

std::vector<char> truncation_mask(const PlaneTree& t, long R) {
  if (R < 0) throw StructuralError("truncate: negative radius");
  const long hi = R / 2;
  const long lo = -(R / 2) - (R % 2);  // floor(-R/2)
  const auto gens = compute_generations(t);
  std::vector<char> keep(t.node_count(), 0);
  keep[t.root()] = 1;
  // ids ascend from parent to child in every builder, so one pass suffices
  for (NodeId v = 1; v < static_cast<NodeId>(t.node_count()); ++v) {
    const NodeId p = t.nodes[v].parent;
    const std::int32_t idx = t.nodes[v].signed_index;
    keep[v] = keep[p] && gens[v] <= R && idx > lo && idx <= hi;
  }
  return keep;
}

PlaneTree truncate(const PlaneTree& t, long R) {
  return copy_preorder_filtered(t, truncation_mask(t, R)).tree;
}

TreeDistance tree_distance(const PlaneTree& a, const PlaneTree& b) {
  TreeDistance d;
  if (equal(a, b)) {
    d.identical = true;
    d.value = 0;
    return d;
  }
  // Beyond this radius both truncations equal the full trees.
  auto stab = [](const PlaneTree& t) {
    long r = 0;
    const auto gens = compute_generations(t);
    for (std::size_t v = 0; v < t.nodes.size(); ++v) {
      r = std::max(r, static_cast<long>(gens[v]));
      r = std::max(r, 2 * std::abs(static_cast<long>(t.nodes[v].signed_index)) + 1);
    }
    return r;
  };
  const long r_max = std::max(stab(a), stab(b)) + 1;
  long agree = -1;
  for (long R = 0; R <= r_max; ++R) {
    if (!equal(truncate(a, R), truncate(b, R))) break;
    agree = R;
  }
  if (agree < 0) {
    // Root-only truncations always coincide, so R = 0 agreement is automatic.
    throw StructuralError("tree_distance: R = 0 truncations differ");
  }
  d.agreement_radius = agree;
  d.value = Rational(1, 1 + agree);
  return d;
}

std::string serialize(const PlaneTree& t) {
  nlohmann::json arr = nlohmann::json::array();
  std::vector<NodeId> stack = {t.root()};
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    nlohmann::json idx = nlohmann::json::array();
    for (NodeId c : t.nodes[v].children) idx.push_back(t.nodes[c].signed_index);
    arr.push_back(nlohmann::json::array({t.outdeg(v), idx}));
    const auto& ch = t.nodes[v].children;
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
  }
  return arr.dump();
}

PlaneTree deserialize_tree(const std::string& line) {
  const nlohmann::json arr = nlohmann::json::parse(line);
  if (!arr.is_array() || arr.empty()) throw StructuralError("bad tree serialization");
  PlaneTree t;
  std::vector<std::pair<NodeId, long>> stack;
  std::size_t at = 0;
  std::vector<std::vector<std::int32_t>> pending_idx;
  auto open = [&](NodeId node) {
    const auto& entry = arr.at(at++);
    const long out = entry.at(0).get<long>();
    pending_idx.push_back(entry.at(1).get<std::vector<std::int32_t>>());
    if (static_cast<long>(pending_idx.back().size()) != out) {
      throw StructuralError("bad tree serialization: index list length");
    }
    stack.emplace_back(node, out);
  };
  open(t.root());
  while (!stack.empty()) {
    if (stack.back().second == 0) {
      stack.pop_back();
      pending_idx.pop_back();
      continue;
    }
    const NodeId node = stack.back().first;
    const std::size_t pos = t.nodes[node].children.size();
    const std::int32_t sidx = pending_idx.back()[pos];
    --stack.back().second;
    NodeId child = t.add_child(node);
    t.nodes[child].signed_index = sidx;
    open(child);
  }
  if (at != arr.size()) throw StructuralError("bad tree serialization: trailing entries");
  return t;
}

}  // namespace bpm::trees

#include "bpm/samplers.hpp"

#include <algorithm>
#include <cmath>

#include "bpm/errors.hpp"
#include "bpm/oracle.hpp"
#include "bpm/psi.hpp"

namespace bpm::samplers {

// ---------------------------------------------------------------------------
// NuSampler

NuSampler::NuSampler(const WeightPackage& pkg, long n) : pkg_(pkg), n_(n) {
  if (n < 1) throw StructuralError("tree size must be >= 1");
  if (n <= kEnumerationCutoff) {
    words_ = oracle::enumerate_lukasiewicz(n);
    cumulative_.reserve(words_.size());
    double acc = 0.0;
    for (const auto& word : words_) {
      double w = 1.0;
      for (int d : word) w *= pkg_.tw.value(d);
      acc += w;
      cumulative_.push_back(acc);
    }
    if (acc <= 0.0) throw StructuralError("empty support: Z_n = 0");
    return;
  }
  if (n > kConvolutionCap) {
    throw CapacityError("nu sampler: n beyond the convolution cap");
  }
  // table_[m][s] = P(sum of m iid xi draws = s), for m <= n+1, s <= n.
  table_.assign(static_cast<std::size_t>(n + 2), std::vector<double>(n + 1, 0.0));
  table_[0][0] = 1.0;
  std::vector<double> pi(n + 1);
  for (long d = 0; d <= n; ++d) pi[d] = pkg_.laws.pi(d);
  for (long m = 1; m <= n + 1; ++m) {
    for (long s = 0; s <= n; ++s) {
      double acc = 0.0;
      const auto& prev = table_[m - 1];
      for (long d = 0; d <= s; ++d) {
        if (pi[d] != 0.0 && prev[s - d] != 0.0) acc += pi[d] * prev[s - d];
      }
      table_[m][s] = acc;
    }
  }
  if (table_[n + 1][n] <= 0.0) throw StructuralError("empty support: Z_n = 0");
}

trees::PlaneTree NuSampler::sample(RngStream& rng) const {
  if (!words_.empty()) {
    const double u = rng.uniform01() * cumulative_.back();
    const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
    const std::size_t k = std::min<std::size_t>(
        static_cast<std::size_t>(it - cumulative_.begin()), words_.size() - 1);
    return trees::from_preorder_outdegrees(words_[k]);
  }
  return sample_by_convolution(rng);
}

trees::PlaneTree NuSampler::sample_by_convolution(RngStream& rng) const {
  const long n = n_;
  std::vector<int> degs(static_cast<std::size_t>(n + 1), 0);
  long s = n;
  for (long t = 0; t <= n; ++t) {
    const long m_rem = n - t;  // draws after this one
    const double z = table_[m_rem + 1][s];
    double u = rng.uniform01() * z;
    long chosen = -1;
    double best = -1.0;
    long best_d = 0;
    for (long d = 0; d <= s; ++d) {
      const double term = pkg_.laws.pi(d) * table_[m_rem][s - d];
      if (term > best) {
        best = term;
        best_d = d;
      }
      u -= term;
      if (u < 0) {
        chosen = d;
        break;
      }
    }
    if (chosen < 0) chosen = best_d;  // float slack at the cdf top
    degs[t] = static_cast<int>(chosen);
    s -= chosen;
  }
  if (s != 0) throw NumericError("degree sequence does not sum to n");
  // Cycle lemma: rotate to start right after the first minimum of the
  // prefix sums of (d_i - 1).
  long min_sum = 0, run = 0, cut = 0;
  for (long i = 0; i <= n; ++i) {
    run += degs[i] - 1;
    if (run < min_sum) {
      min_sum = run;
      cut = i + 1;
    }
  }
  std::vector<int> word;
  word.reserve(n + 1);
  for (long i = 0; i <= n; ++i) word.push_back(degs[(cut + i) % (n + 1)]);
  return trees::from_preorder_outdegrees(word);
}

trees::PlaneTree sample_sgt_n(const WeightPackage& pkg, long n, RngStream& rng) {
  NuSampler sampler(pkg, n);
  return sampler.sample(rng);
}

labels::Mobile attach_uniform_labels(const trees::PlaneTree& mobile_tree, RngStream& rng) {
  trees::PlaneTree t = mobile_tree;
  trees::colour_by_generation(t);
  std::map<trees::NodeId, labels::Bridge> bridges;
  for (trees::NodeId v = 0; v < static_cast<trees::NodeId>(t.node_count()); ++v) {
    if (t.nodes[v].colour == trees::Colour::Black) {
      bridges[v] = labels::sample_bridge_uniform(t.degree(v), rng);
    }
  }
  const int eps = rng.bernoulli(0.5) ? +1 : -1;
  return labels::assign_labels(t, bridges, 0, eps);
}

labels::Mobile sample_mobile_n(const WeightPackage& pkg, long n, RngStream& rng) {
  const auto t = sample_sgt_n(pkg, n, rng);
  const auto mobile_tree = psi::psi_forward(t).tree;
  return attach_uniform_labels(mobile_tree, rng);
}

bdg::PlanarMap sample_map_n(const WeightPackage& pkg, long n, RngStream& rng) {
  return bdg::phi_build(sample_mobile_n(pkg, n, rng));
}

// ---------------------------------------------------------------------------
// LimitSampler

namespace {

constexpr std::uint64_t kSpineStreamBase = 0x5350494e00000000ull;
constexpr std::uint64_t kLeftStreamBase = 0x4c45465400000000ull;
constexpr std::uint64_t kRightStreamBase = 0x5249474800000000ull;
constexpr std::uint64_t kLabelSubStream = 0x4c41424cull;
constexpr std::uint64_t kEpsilonStream = 0x45505351ull;

}  // namespace

long LimitTruncation::decoration_index(trees::NodeId white) const {
  const trees::NodeId root_dec = decoration_root_of[white];
  if (root_dec == trees::kNoNode) return 0;
  const auto it = s_child_number.find(root_dec);
  if (it == s_child_number.end()) throw StructuralError("unknown decoration root");
  return it->second;
}

LimitSampler::LimitSampler(const WeightPackage& pkg, RngStream base, LimitOptions opts)
    : pkg_(pkg), base_(base), opts_(opts) {}

// Builder: creates units (spine steps, s-children) with per-unit streams so
// extensions never disturb existing draws.
struct LimitBuild {
  LimitSampler& self;
  LimitTruncation& t;
  bool with_labels;

  trees::PlaneTree& tree() { return t.mobile.tree; }

  trees::NodeId new_node(trees::NodeId parent, trees::Colour colour, trees::NodeId dec_root) {
    trees::NodeId id = (parent == trees::kNoNode)
                           ? t.mobile.tree.root()
                           : t.mobile.tree.add_child(parent);
    t.mobile.tree.nodes[id].colour = colour;
    t.mobile.labels.resize(t.mobile.tree.node_count(), 0);
    t.decoration_root_of.resize(t.mobile.tree.node_count(), trees::kNoNode);
    t.decoration_root_of[id] = dec_root;
    return id;
  }

  // Two-type GW outgrowth below `root`; draws from `rng`. Counts nodes
  // against the cap.
  void grow_outgrowth(trees::NodeId root, RngStream& rng, long& budget) {
    std::vector<trees::NodeId> stack = {root};
    while (!stack.empty()) {
      const trees::NodeId v = stack.back();
      stack.pop_back();
      const bool white = t.mobile.tree.nodes[v].colour == trees::Colour::White;
      const long k = white ? self.pkg_.laws.sample_xi_white(rng)
                           : self.pkg_.laws.sample_xi_black(rng);
      for (long i = 0; i < k; ++i) {
        if (--budget < 0) throw CapacityError("outgrowth cap breached (near-critical laws)");
        stack.push_back(new_node(v, white ? trees::Colour::Black : trees::Colour::White,
                                 t.decoration_root_of[v]));
      }
    }
  }

  // Draw bridges for every black vertex in the subtree of `from` (inclusive
  // when black), in node-id order, from the unit's label stream.
  void draw_bridges(trees::NodeId from, RngStream label_rng) {
    if (!with_labels) return;
    std::vector<trees::NodeId> stack = {from};
    std::vector<trees::NodeId> blacks;
    while (!stack.empty()) {
      const trees::NodeId v = stack.back();
      stack.pop_back();
      if (t.mobile.tree.nodes[v].colour == trees::Colour::Black && v != t.s) {
        blacks.push_back(v);
      }
      for (trees::NodeId c : t.mobile.tree.nodes[v].children) stack.push_back(c);
    }
    std::sort(blacks.begin(), blacks.end());
    for (trees::NodeId b : blacks) {
      t.bridges[b] = labels::sample_bridge_uniform(t.mobile.tree.degree(b), label_rng);
    }
  }

  // One white spine vertex (even depth): hat-xi-white children, one special.
  // Returns the special black child.
  trees::NodeId expand_special_white(trees::NodeId w, long depth) {
    RngStream rng = self.base_.derive(kSpineStreamBase + static_cast<std::uint64_t>(depth));
    RngStream label_rng = rng.derive(kLabelSubStream);
    const long k = self.pkg_.laws.sample_xi_white_hat(rng);
    const long special = static_cast<long>(rng.below(static_cast<std::uint64_t>(k)));
    long budget = self.opts_.outgrowth_cap;
    trees::NodeId special_child = trees::kNoNode;
    std::vector<trees::NodeId> normals;
    for (long i = 0; i < k; ++i) {
      const trees::NodeId c = new_node(w, trees::Colour::Black, trees::kNoNode);
      if (i == special) {
        special_child = c;
      } else {
        normals.push_back(c);
      }
    }
    for (trees::NodeId c : normals) grow_outgrowth(c, rng, budget);
    for (trees::NodeId c : normals) draw_bridges(c, label_rng.derive(c));
    return special_child;
  }

  // One black spine vertex (odd depth). Returns the special white child, or
  // kNoNode when the vertex has infinite degree (it becomes s).
  trees::NodeId expand_special_black(trees::NodeId b, long depth) {
    RngStream rng = self.base_.derive(kSpineStreamBase + static_cast<std::uint64_t>(depth));
    RngStream label_rng = rng.derive(kLabelSubStream);
    // UIPTree-degenerate regime: the special black vertex is s outright.
    const auto r = (self.pkg_.laws.pi0() >= 1.0)
                       ? std::optional<long>{}
                       : self.pkg_.laws.sample_xi_black_hat(rng);
    if (!r) {
      t.s = b;
      t.spine_complete = true;
      return trees::kNoNode;
    }
    const long special = static_cast<long>(rng.below(static_cast<std::uint64_t>(*r)));
    long budget = self.opts_.outgrowth_cap;
    trees::NodeId special_child = trees::kNoNode;
    std::vector<trees::NodeId> normals;
    for (long i = 0; i < *r; ++i) {
      const trees::NodeId c = new_node(b, trees::Colour::White, trees::kNoNode);
      if (i == special) {
        special_child = c;
      } else {
        normals.push_back(c);
      }
    }
    for (trees::NodeId c : normals) grow_outgrowth(c, rng, budget);
    for (trees::NodeId c : normals) draw_bridges(c, label_rng.derive(c));
    if (with_labels) {
      t.bridges[b] = labels::sample_bridge_uniform(t.mobile.tree.degree(b), label_rng);
    }
    return special_child;
  }

  // One child of the infinite vertex; j >= 1, left flank when `left`.
  // Appended out of order; reorder_s_children fixes the child list once per
  // growth batch (keeps flank extension linear overall).
  void add_s_child(long j, bool left) {
    RngStream rng = self.base_.derive((left ? kLeftStreamBase : kRightStreamBase) +
                                      static_cast<std::uint64_t>(j));
    RngStream label_rng = rng.derive(kLabelSubStream);
    const trees::NodeId node = new_node(t.s, trees::Colour::White, trees::kNoNode);
    t.mobile.tree.nodes[node].signed_index =
        left ? static_cast<std::int32_t>(j - 1) : static_cast<std::int32_t>(-j);
    t.decoration_root_of[node] = node;
    if (left) {
      t.s_children_left.push_back(node);
      t.s_child_number[node] = j;
    } else {
      t.s_children_right.push_back(node);
      t.s_child_number[node] = -j;
    }
    long budget = self.opts_.outgrowth_cap;
    grow_outgrowth(node, rng, budget);
    draw_bridges(node, label_rng.derive(node));
    if (with_labels) {
      t.s_increments[node] = static_cast<int>(labels::sample_increment_iid(label_rng));
    }
  }

  // Child order of s: [s_1 .. s_pos][s_-neg .. s_-1].
  void reorder_s_children() {
    if (t.s == trees::kNoNode) return;
    auto& kids = t.mobile.tree.nodes[t.s].children;
    kids.clear();
    kids.insert(kids.end(), t.s_children_left.begin(), t.s_children_left.end());
    kids.insert(kids.end(), t.s_children_right.rbegin(), t.s_children_right.rend());
  }

  void propagate_labels() {
    if (!with_labels) return;
    auto& m = t.mobile;
    m.labels.assign(m.tree.node_count(), 0);
    m.labels[m.tree.root()] = 0;
    // Root-down; ids ascend from parent to child, so one ordered pass works.
    // Black vertices use their bridge, s uses the stored increments.
    for (trees::NodeId v = 0; v < static_cast<trees::NodeId>(m.tree.node_count()); ++v) {
      if (m.tree.nodes[v].colour != trees::Colour::Black) continue;
      const std::int32_t y0 = m.labels[m.tree.nodes[v].parent];
      if (v == t.s) {
        // left chain then right chain, both anchored at the parent label
        std::int32_t acc = y0;
        for (trees::NodeId c : t.s_children_left) {
          acc += t.s_increments.at(c);
          m.labels[c] = acc;
        }
        acc = y0;
        for (trees::NodeId c : t.s_children_right) {
          acc -= t.s_increments.at(c);
          m.labels[c] = acc;
        }
        continue;
      }
      const auto& b = t.bridges.at(v);
      std::int32_t acc = y0;
      const auto& kids = m.tree.nodes[v].children;
      for (std::size_t i = 0; i < kids.size(); ++i) {
        acc += b[i];
        m.labels[kids[i]] = acc;
      }
    }
  }
};

LimitTruncation LimitSampler::build(long spine_budget, long window_each_side) {
  LimitTruncation t;
  t.mobile.tree = trees::PlaneTree();
  t.mobile.tree.nodes[0].colour = trees::Colour::White;
  t.mobile.labels.assign(1, 0);
  t.mobile.truncated_fragment = true;
  t.decoration_root_of.assign(1, trees::kNoNode);
  t.labels_attached = with_labels_;

  RngStream eps_rng = base_.derive(kEpsilonStream);
  t.mobile.epsilon = eps_rng.bernoulli(0.5) ? +1 : -1;

  LimitBuild builder{*this, t, with_labels_};
  t.spine.push_back(t.mobile.tree.root());
  long depth = 0;
  for (;;) {
    const trees::NodeId tip = t.spine.back();
    if (depth % 2 == 0) {
      const trees::NodeId next = builder.expand_special_white(tip, depth);
      t.spine.push_back(next);
      ++depth;
    } else {
      if (!pkg_.laws.condensation() && depth >= spine_budget) break;  // frontier cut
      const trees::NodeId next = builder.expand_special_black(tip, depth);
      if (next == trees::kNoNode) break;  // reached s
      t.spine.push_back(next);
      ++depth;
      if (depth > 2'000'000) throw CapacityError("spine did not terminate");
    }
  }
  if (t.condensation()) {
    for (long j = 1; j <= window_each_side; ++j) {
      builder.add_s_child(j, true);
      builder.add_s_child(j, false);
    }
    builder.reorder_s_children();
  }
  builder.propagate_labels();
  return t;
}

LimitTruncation LimitSampler::sample_tree() {
  with_labels_ = false;
  return build(opts_.spine_budget, opts_.window_each_side);
}

LimitTruncation LimitSampler::sample_mobile() {
  with_labels_ = true;
  return build(opts_.spine_budget, opts_.window_each_side);
}

void LimitSampler::extend_window(LimitTruncation& t, long extra_each_side) {
  if (!t.condensation()) throw PhaseError("no infinite vertex to extend around");
  with_labels_ = t.labels_attached;
  LimitBuild builder{*this, t, with_labels_};
  const long left0 = static_cast<long>(t.s_children_left.size());
  const long right0 = static_cast<long>(t.s_children_right.size());
  for (long j = 1; j <= extra_each_side; ++j) {
    builder.add_s_child(left0 + j, true);
    builder.add_s_child(right0 + j, false);
  }
  builder.reorder_s_children();
  builder.propagate_labels();
}

void LimitSampler::extend_spine(LimitTruncation& t, long extra_edges) {
  if (t.condensation()) throw PhaseError("spine already complete");
  with_labels_ = t.labels_attached;
  LimitBuild builder{*this, t, with_labels_};
  long depth = t.spine_length_edges();
  const long target = depth + extra_edges;
  for (;;) {
    const trees::NodeId tip = t.spine.back();
    if (depth % 2 == 0) {
      t.spine.push_back(builder.expand_special_white(tip, depth));
      ++depth;
    } else {
      if (depth >= target) break;
      const trees::NodeId next = builder.expand_special_black(tip, depth);
      if (next == trees::kNoNode) break;
      t.spine.push_back(next);
      ++depth;
    }
  }
  builder.propagate_labels();
}

namespace {

// Cyclic white contour of the fragment, with labels.
struct CyclicWhite {
  std::vector<trees::NodeId> vertex;
  std::vector<std::int32_t> label;
};

CyclicWhite white_cycle(const labels::Mobile& m) {
  CyclicWhite cw;
  const auto seq = trees::contour(m.tree, trees::ContourKind::WhiteOnly);
  cw.vertex = seq.vertices;
  cw.label.reserve(cw.vertex.size());
  for (trees::NodeId v : cw.vertex) cw.label.push_back(m.labels[v]);
  return cw;
}

bdg::ContourWindow cut_window(const CyclicWhite& cw, std::size_t cut) {
  // Window = [cut..end) ++ [0..cut); origin points at old position 0.
  bdg::ContourWindow w;
  const std::size_t C = cw.vertex.size();
  w.vertex.reserve(C);
  w.label.reserve(C);
  for (std::size_t i = 0; i < C; ++i) {
    const std::size_t p = (cut + i) % C;
    w.vertex.push_back(cw.vertex[p]);
    w.label.push_back(cw.label[p]);
  }
  w.origin = C - cut;
  w.frontier_left = true;
  w.frontier_right = true;
  return w;
}

}  // namespace

bdg::ContourWindow LimitSampler::mobile_window(const LimitTruncation& t) const {
  if (!t.labels_attached) throw StructuralError("window needs labels; use sample_mobile");
  const CyclicWhite cw = white_cycle(t.mobile);
  std::size_t cut = 0;
  if (t.condensation()) {
    // First white corner belonging to a right-flank decoration.
    for (std::size_t p = 0; p < cw.vertex.size(); ++p) {
      const long dec = t.decoration_index(cw.vertex[p]);
      if (dec < 0) {
        cut = p;
        break;
      }
    }
    if (cut == 0) throw StructuralError("right flank not materialized");
  } else {
    // Frontier black vertex at the spine tip: cut between its two enclosing
    // white corners in the full contour.
    const trees::NodeId b_cut = t.spine.back();
    const auto full = trees::contour(t.mobile.tree, trees::ContourKind::Left);
    std::size_t q = full.vertices.size();
    for (std::size_t i = 0; i < full.vertices.size(); ++i) {
      if (full.vertices[i] == b_cut) {
        q = i;
        break;
      }
    }
    if (q == full.vertices.size()) throw StructuralError("frontier vertex not in contour");
    cut = (q + 1) / 2;
  }
  return cut_window(cw, cut);
}

bdg::ContourWindow LimitSampler::star_window(const LimitTruncation& t) const {
  if (!t.condensation()) throw PhaseError("star mobile needs the condensation phase");
  if (!t.labels_attached) throw StructuralError("window needs labels; use sample_mobile");
  bdg::ContourWindow w;
  const auto& m = t.mobile;
  const trees::NodeId s0 = m.tree.nodes[t.s].parent;
  for (auto it = t.s_children_right.rbegin(); it != t.s_children_right.rend(); ++it) {
    w.vertex.push_back(*it);
    w.label.push_back(m.labels[*it]);
  }
  w.origin = w.vertex.size();
  w.vertex.push_back(s0);
  w.label.push_back(m.labels[s0]);
  for (trees::NodeId c : t.s_children_left) {
    w.vertex.push_back(c);
    w.label.push_back(m.labels[c]);
  }
  w.frontier_left = true;
  w.frontier_right = true;
  return w;
}

LimitBallResult sample_limit_ball(const WeightPackage& pkg, long r, RngStream rng,
                                  LimitOptions opts) {
  LimitSampler sampler(pkg, rng, opts);
  LimitTruncation t = sampler.sample_mobile();
  long window = opts.window_each_side;
  long spine = opts.spine_budget;
  for (int attempt = 0; attempt < 64; ++attempt) {
    try {
      const auto w = sampler.mobile_window(t);
      auto ball = bdg::phi_build_window(w, t.mobile.epsilon, r);
      return LimitBallResult{std::move(ball), std::move(t)};
    } catch (const CertificationError&) {
      if (t.condensation()) {
        sampler.extend_window(t, window);
        window *= 2;
      } else {
        sampler.extend_spine(t, spine);
        spine *= 2;
      }
    }
  }
  throw CertificationError("limit ball certification did not converge", r);
}

LimitBallResult sample_uiptree_ball(long r, RngStream rng, LimitOptions opts) {
  const auto pkg = weights::make_package(weights::FaceWeights::degenerate_zero_radius());
  return sample_limit_ball(pkg, r, rng, opts);
}

namespace {

// Degree of the white vertex holding contour position `at`, read off the
// window: its corner count plus, per corner, the label-(l+1) corners in the
// stretch back to the previous label-<= l position. Returns nullopt when the
// window must grow (flank exits).
std::optional<long> window_degree(const bdg::ContourWindow& w, std::size_t at) {
  const std::int32_t id = w.vertex[at];
  const std::int32_t lv = w.label[at];
  long corners = 0;
  long predecessors = 0;
  for (std::size_t q = 0; q < w.vertex.size(); ++q) {
    if (w.vertex[q] != id) continue;
    ++corners;
    // scan back to the previous label <= lv
    std::size_t p = q;
    while (true) {
      if (p == 0) return std::nullopt;  // stretch leaves the window
      --p;
      if (w.label[p] <= lv) break;
      if (w.label[p] == lv + 1) ++predecessors;
    }
  }
  return corners + predecessors;
}

}  // namespace

std::optional<long> sample_root_degree(const WeightPackage& pkg, RngStream rng,
                                       long node_cap, LimitOptions opts) {
  LimitSampler sampler(pkg, rng, opts);
  LimitTruncation t = sampler.sample_mobile();
  long grow = opts.window_each_side;
  for (;;) {
    const auto w = sampler.mobile_window(t);
    std::size_t at = w.origin;
    bool found = true;
    if (t.mobile.epsilon == +1) {
      // e- is the successor of the root corner: first label drop after it.
      found = false;
      for (std::size_t p = w.origin + 1; p < w.vertex.size(); ++p) {
        if (w.label[p] == w.label[w.origin] - 1) {
          at = p;
          found = true;
          break;
        }
      }
    }
    if (found) {
      const auto deg = window_degree(w, at);
      if (deg) return deg;
    }
    if (static_cast<long>(t.mobile.tree.node_count()) > node_cap) return std::nullopt;
    if (t.condensation()) {
      sampler.extend_window(t, grow);
    } else {
      sampler.extend_spine(t, grow);
    }
    grow *= 2;
  }
}

// ---------------------------------------------------------------------------
// Auxiliary processes

namespace {

long sample_pi_uiptree(RngStream& rng) {
  // pi_i = 2^{-i-1}
  return rng.geometric_from_one(0.5) - 1;
}

}  // namespace

long sample_Yn(long n, RngStream& rng) {
  if (n == 0) return 1;
  // First generation: (i+1) 2^{-i-2} = sum of two geometric(1/2) counts.
  long pop = (rng.geometric_from_one(0.5) - 1) + (rng.geometric_from_one(0.5) - 1);
  for (long g = 2; g <= n && pop > 0; ++g) {
    long next = 0;
    for (long i = 0; i < pop; ++i) next += sample_pi_uiptree(rng);
    pop = next;
  }
  return pop;
}

YnExact yn_exact(long n) {
  if (n == 0) return {0.0, 1.0};
  const double ratio = static_cast<double>(n) / (n + 1);
  return {ratio * ratio, 2.0};
}

long sample_LR(long R, RngStream& rng) {
  if (R < 1) throw StructuralError("L_R needs R >= 1");
  const long half = R / 2;
  for (long j = 0; j < half; ++j) {
    if (sample_Yn(R - j, rng) > 0) return j;
  }
  return half;
}

Rational lr_exact(long R, long k) {
  if (R < 1) throw StructuralError("L_R needs R >= 1");
  const long half = R / 2;
  if (k < 0 || k > half) return Rational(0);
  if (k < half) {
    return Rational(2 * R - 2 * k + 1) / Rational(BigInt(R + 1) * BigInt(R + 1));
  }
  const Rational top(R - half + 1);
  return (top / Rational(R + 1)) * (top / Rational(R + 1));
}

long sample_decoration_size(const weights::OffspringLaws& laws, bool bad, RngStream& rng,
                            long cap) {
  auto gw_total = [&]() {
    long walk = 0;
    for (long steps = 1; steps <= cap; ++steps) {
      walk += laws.sample_xi(rng) - 1;
      if (walk == -1) return steps;
    }
    throw CapacityError("decoration size walk exceeded the cap");
  };
  if (!bad) return gw_total();
  const double kappa = laws.kappa();
  if (kappa >= 1.0) throw PhaseError("bad decoration needs kappa < 1");
  long total = gw_total();
  const long L = rng.geometric_from_one(1.0 - kappa) - 1;
  for (long i = 0; i < L; ++i) {
    const long branches = laws.sample_xi_tilde(rng);
    for (long j = 0; j < branches; ++j) total += gw_total();
  }
  return total;
}

}  // namespace bpm::samplers

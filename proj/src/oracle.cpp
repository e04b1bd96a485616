#include "bpm/oracle.hpp"

#include <algorithm>
#include <map>

#include "bpm/errors.hpp"
#include "bpm/psi.hpp"

namespace bpm::oracle {

namespace {

void lukasiewicz_rec(long remaining_nodes, long open, std::vector<int>& prefix,
                     std::vector<std::vector<int>>& out) {
  if (remaining_nodes == 0) {
    if (open == 0) out.push_back(prefix);
    return;
  }
  if (open == 0) return;
  // Next vertex may have outdegree 0..remaining_nodes-1 (open slots grow).
  for (long d = 0; d + open - 1 <= remaining_nodes - 1 && d <= remaining_nodes - 1; ++d) {
    prefix.push_back(static_cast<int>(d));
    lukasiewicz_rec(remaining_nodes - 1, open - 1 + d, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<std::vector<int>> enumerate_lukasiewicz(long n) {
  if (n < 0 || n > kTreeEnumCap) throw CapacityError("tree enumeration beyond cap");
  std::vector<std::vector<int>> out;
  std::vector<int> prefix;
  // Root has outdegree d >= 0; n+1 vertices in total.
  for (long d = 0; d <= n; ++d) {
    prefix.push_back(static_cast<int>(d));
    lukasiewicz_rec(n, d, prefix, out);
    prefix.pop_back();
  }
  return out;
}

std::vector<trees::PlaneTree> enumerate_trees(long n) {
  std::vector<trees::PlaneTree> out;
  for (const auto& word : enumerate_lukasiewicz(n)) {
    out.push_back(trees::from_preorder_outdegrees(word));
  }
  return out;
}

BigInt catalan(long n) {
  if (n == 0) return 1;
  return binomial(2 * n, n) / BigInt(n + 1);
}

std::vector<labels::Mobile> enumerate_mobiles(long n) {
  if (n < 1 || n > kMobileEnumCap) throw CapacityError("mobile enumeration beyond cap");
  std::vector<labels::Mobile> out;
  for (auto& t : enumerate_trees(n)) {
    trees::colour_by_generation(t);
    std::vector<trees::NodeId> blacks;
    for (trees::NodeId v = 0; v < static_cast<trees::NodeId>(t.node_count()); ++v) {
      if (t.nodes[v].colour == trees::Colour::Black) blacks.push_back(v);
    }
    // Cartesian product of bridge choices.
    std::vector<std::vector<labels::Bridge>> choices;
    for (trees::NodeId b : blacks) choices.push_back(labels::enumerate_bridges(t.degree(b)));
    std::vector<std::size_t> idx(blacks.size(), 0);
    for (;;) {
      std::map<trees::NodeId, labels::Bridge> assignment;
      for (std::size_t k = 0; k < blacks.size(); ++k) assignment[blacks[k]] = choices[k][idx[k]];
      out.push_back(labels::assign_labels(t, assignment, 0, +1));
      std::size_t k = 0;
      while (k < idx.size()) {
        if (++idx[k] < choices[k].size()) break;
        idx[k] = 0;
        ++k;
      }
      if (k == idx.size()) break;
      if (idx.empty()) break;
    }
    if (blacks.empty()) {
      // No black vertices only happens for n = 0; excluded by the cap check.
    }
  }
  return out;
}

Rational ExactDistribution::prob_of(const std::string& key) const {
  const auto it = std::lower_bound(support.begin(), support.end(), key);
  if (it == support.end() || *it != key) return Rational(0);
  return probs[static_cast<std::size_t>(it - support.begin())];
}

bool ExactDistribution::sums_to_one() const {
  Rational acc(0);
  for (const auto& p : probs) acc += p;
  return acc == 1;
}

namespace {

ExactDistribution normalize(std::map<std::string, Rational>&& weights) {
  Rational z(0);
  for (const auto& [k, w] : weights) z += w;
  if (z == 0) throw StructuralError("empty support: partition function is zero");
  ExactDistribution d;
  for (auto& [k, w] : weights) {
    d.support.push_back(k);
    d.probs.push_back(w / z);
  }
  return d;
}

Rational sgt_weight(const weights::TreeWeights& tw, const trees::PlaneTree& t) {
  Rational acc(1);
  for (trees::NodeId v = 0; v < static_cast<trees::NodeId>(t.node_count()); ++v) {
    acc *= tw.exact_or_throw(t.outdeg(v));
  }
  return acc;
}

Rational mobile_tree_weight(const weights::TreeWeights& tw, const trees::PlaneTree& t) {
  Rational acc(1);
  for (trees::NodeId v = 0; v < static_cast<trees::NodeId>(t.node_count()); ++v) {
    if (t.nodes[v].colour == trees::Colour::Black) acc *= tw.exact_or_throw(t.degree(v));
  }
  return acc;
}

}  // namespace

ExactDistribution exact_nu(const weights::TreeWeights& tw, long n) {
  std::map<std::string, Rational> w;
  for (const auto& t : enumerate_trees(n)) {
    w[trees::serialize(t)] += sgt_weight(tw, t);
  }
  return normalize(std::move(w));
}

ExactDistribution exact_nu_tilde(const weights::TreeWeights& tw, long n) {
  std::map<std::string, Rational> w;
  for (auto& t : enumerate_trees(n)) {
    trees::colour_by_generation(t);
    w[trees::serialize(t)] += mobile_tree_weight(tw, t);
  }
  return normalize(std::move(w));
}

ExactDistribution exact_nu_pushforward(const weights::TreeWeights& tw, long n) {
  std::map<std::string, Rational> w;
  for (const auto& t : enumerate_trees(n)) {
    const auto image = psi::psi_forward(t).tree;
    w[trees::serialize(image)] += sgt_weight(tw, t);
  }
  return normalize(std::move(w));
}

MuPair exact_mu(const weights::TreeWeights& tw, long n) {
  std::map<std::string, Rational> pipeline;
  std::map<std::string, Rational> direct;
  for (const auto& m : enumerate_mobiles(n)) {
    const Rational tree_w = mobile_tree_weight(tw, m.tree);
    const Rational lam(labels::count_labelings(m.tree));
    for (int eps : {-1, +1}) {
      labels::Mobile me = m;
      me.epsilon = eps;
      const auto pm = bdg::phi_build(me);
      const std::string key = bdg::canonical_code(pm);
      // tilde-mu weight: nu_tilde(T) / (2 lambda(T)); normalization shared.
      pipeline[key] += tree_w / (2 * lam);
      if (direct.find(key) == direct.end()) {
        Rational wm(1);
        for (long fdeg : bdg::face_degrees(pm)) {
          if (fdeg % 2 != 0) throw StructuralError("odd face degree in oracle map");
          const Rational wi = tw.exact_or_throw(fdeg / 2);
          // q_i = w_i / C(2i-1, i-1)
          wm *= wi / Rational(bridge_count(fdeg / 2));
        }
        direct[key] = wm;
      }
    }
  }
  MuPair out;
  out.pipeline = normalize(std::move(pipeline));
  out.direct = normalize(std::move(direct));
  return out;
}

std::string unrooted_code(const bdg::PlanarMap& pm) {
  std::string best;
  bdg::PlanarMap copy = pm;
  for (bdg::HalfEdgeId h = 0; h < static_cast<bdg::HalfEdgeId>(pm.half.size()); ++h) {
    copy.root = h;
    std::string code = bdg::canonical_code(copy);
    if (best.empty() || code < best) best = std::move(code);
  }
  return best;
}

}  // namespace bpm::oracle

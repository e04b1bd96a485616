#include "bpm/labeling.hpp"

#include <algorithm>
#include <json.hpp>
#include <limits>
#include <unordered_set>

#include "bpm/errors.hpp"

namespace bpm::labels {

namespace {

void enumerate_rec(long remaining, long target, Bridge& prefix, std::vector<Bridge>& out) {
  if (remaining == 0) {
    if (target == 0) out.push_back(prefix);
    return;
  }
  // x <= target + (remaining - 1) keeps the completion count positive.
  for (long x = -1; x <= target + remaining - 1; ++x) {
    prefix.push_back(static_cast<int>(x));
    enumerate_rec(remaining - 1, target - x, prefix, out);
    prefix.pop_back();
  }
}

BigInt random_below(RngStream& rng, const BigInt& n) {
  if (n <= 1) return BigInt(0);
  const std::size_t bits = mpz_sizeinbase(n.get_mpz_t(), 2);
  for (;;) {
    BigInt r(0);
    for (std::size_t got = 0; got < bits; got += 32) {
      r <<= 32;
      r += static_cast<unsigned long>(rng.next_u32());
    }
    r >>= (32 - bits % 32) % 32;
    if (r < n) return r;
  }
}

}  // namespace

std::vector<Bridge> enumerate_bridges(long r) {
  if (r < 1) throw StructuralError("bridge length must be >= 1");
  if (r > kBridgeEnumerationCap) throw CapacityError("bridge enumeration beyond cap");
  std::vector<Bridge> out;
  Bridge prefix;
  enumerate_rec(r, 0, prefix, out);
  return out;
}

BigInt bridge_set_size(long r) { return bridge_count(r); }

Bridge sample_bridge_uniform(long r, RngStream& rng) {
  if (r < 1) throw StructuralError("bridge length must be >= 1");
  if (r == 1) return {0};
  // Uniform (r-1)-subset of {0,...,2r-2} marking the bar slots (Floyd).
  std::vector<long> bars;
  bars.reserve(r - 1);
  {
    std::unordered_set<long> chosen;
    for (long j = 2 * r - 1 - (r - 1); j < 2 * r - 1; ++j) {
      const long t = static_cast<long>(rng.below(static_cast<std::uint64_t>(j + 1)));
      chosen.insert(chosen.count(t) ? j : t);
    }
    bars.assign(chosen.begin(), chosen.end());
    std::sort(bars.begin(), bars.end());
  }
  Bridge b;
  b.reserve(r);
  long prev = -1;
  for (long bar : bars) {
    b.push_back(static_cast<int>(bar - prev - 1 - 1));  // stars in the gap, shifted back
    prev = bar;
  }
  b.push_back(static_cast<int>((2 * r - 2) - prev - 1));
  return b;
}

Bridge sample_bridge_rejection(long r, RngStream& rng) {
  if (r < 1) throw StructuralError("bridge length must be >= 1");
  Bridge b(r);
  for (;;) {
    long sum = 0;
    for (long i = 0; i < r; ++i) {
      b[i] = static_cast<int>(rng.bridge_increment());
      sum += b[i];
    }
    if (sum == 0) return b;
  }
}

Bridge sample_bridge_dp(long r, RngStream& rng) {
  if (r < 1) throw StructuralError("bridge length must be >= 1");
  if (r > kBridgeDpCap) throw CapacityError("bridge DP sampler beyond cap");
  Bridge b;
  b.reserve(r);
  long target = 0;
  for (long m = r; m >= 1; --m) {
    const BigInt total = shifted_compositions(m, target);
    BigInt u = random_below(rng, total);
    for (long x = -1;; ++x) {
      const BigInt ways = shifted_compositions(m - 1, target - x);
      if (u < ways) {
        b.push_back(static_cast<int>(x));
        target -= x;
        break;
      }
      u -= ways;
      if (x > target + m) throw NumericError("bridge DP walked out of range");
    }
  }
  return b;
}

Rational bridge_last_step_ge1_prob(long degree) {
  if (degree < 1) throw StructuralError("degree must be >= 1");
  return Rational(binomial(2 * degree - 3, degree - 1)) / Rational(bridge_count(degree));
}

Rational bridge_first_step_minus1_prob(long degree) {
  if (degree < 1) throw StructuralError("degree must be >= 1");
  return Rational(binomial(2 * degree - 2, degree - 2)) / Rational(bridge_count(degree));
}

Mobile assign_labels(const PlaneTree& t, const std::map<NodeId, Bridge>& bridges,
                     std::int32_t root_label, int epsilon) {
  Mobile m;
  m.tree = t;
  trees::colour_by_generation(m.tree);
  m.labels.assign(t.node_count(), 0);
  m.epsilon = epsilon;
  m.labels[t.root()] = root_label;
  std::vector<NodeId> stack = {t.root()};
  while (!stack.empty()) {
    const NodeId white = stack.back();
    stack.pop_back();
    const std::int32_t y0 = m.labels[white];
    for (NodeId black : m.tree.nodes[white].children) {
      const long deg = m.tree.degree(black);
      auto it = bridges.find(black);
      if (it == bridges.end()) throw StructuralError("missing bridge for a black vertex");
      const Bridge& b = it->second;
      if (static_cast<long>(b.size()) != deg) {
        throw StructuralError("bridge length does not match black degree");
      }
      std::int32_t acc = y0;
      const auto& kids = m.tree.nodes[black].children;
      for (std::size_t j = 0; j < kids.size(); ++j) {
        long next = static_cast<long>(acc) + b[j];
        if (next > std::numeric_limits<std::int32_t>::max() ||
            next < std::numeric_limits<std::int32_t>::min()) {
          throw NumericError("label overflow");
        }
        acc = static_cast<std::int32_t>(next);
        m.labels[kids[j]] = acc;
        stack.push_back(kids[j]);
      }
    }
  }
  return m;
}

std::map<NodeId, Bridge> extract_bridges(const Mobile& m) {
  std::map<NodeId, Bridge> out;
  for (NodeId v = 0; v < static_cast<NodeId>(m.tree.node_count()); ++v) {
    if (m.tree.nodes[v].colour != trees::Colour::Black) continue;
    const NodeId parent = m.tree.nodes[v].parent;
    if (parent == trees::kNoNode) throw StructuralError("black root is not a mobile");
    Bridge b;
    std::int32_t prev = m.labels[parent];
    for (NodeId c : m.tree.nodes[v].children) {
      b.push_back(static_cast<int>(m.labels[c] - prev));
      prev = m.labels[c];
    }
    b.push_back(static_cast<int>(m.labels[parent] - prev));
    out[v] = std::move(b);
  }
  return out;
}

std::string check_mobile(const Mobile& m) {
  if (m.labels.size() != m.tree.node_count()) return "label array size mismatch";
  for (NodeId v = 0; v < static_cast<NodeId>(m.tree.node_count()); ++v) {
    const auto gens_colour_ok =
        (m.tree.nodes[v].colour == trees::Colour::White) ==
        ((v == m.tree.root()) || m.tree.nodes[m.tree.nodes[v].parent].colour == trees::Colour::Black);
    if (!gens_colour_ok) return "colours do not alternate";
  }
  for (const auto& [black, b] : extract_bridges(m)) {
    long sum = 0;
    for (int x : b) {
      if (x < -1) return "label increment below -1 at black vertex " + std::to_string(black);
      sum += x;
    }
    if (sum != 0) return "label increments do not close at black vertex " + std::to_string(black);
  }
  return "";
}

BigInt count_labelings(const PlaneTree& t) {
  BigInt acc(1);
  for (NodeId v = 0; v < static_cast<NodeId>(t.node_count()); ++v) {
    if (t.nodes[v].colour == trees::Colour::Black) acc *= bridge_count(t.degree(v));
  }
  return acc;
}

Mobile mobile_truncate(const Mobile& m, long R) {
  Mobile out;
  out.epsilon = m.epsilon;
  out.truncated_fragment = true;
  auto copy = trees::copy_preorder_filtered(m.tree, trees::truncation_mask(m.tree, R));
  out.tree = std::move(copy.tree);
  out.labels.assign(out.tree.node_count(), 0);
  for (NodeId v = 0; v < static_cast<NodeId>(m.tree.node_count()); ++v) {
    if (copy.new_id[v] != trees::kNoNode) out.labels[copy.new_id[v]] = m.labels[v];
  }
  return out;
}

std::string serialize(const Mobile& m) {
  nlohmann::json j;
  j["tree"] = nlohmann::json::parse(trees::serialize(m.tree));
  nlohmann::json lab = nlohmann::json::array();
  // Preorder, matching the tree serialization; black entries emitted as null.
  std::vector<NodeId> stack = {m.tree.root()};
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    if (m.tree.nodes[v].colour == trees::Colour::White) {
      lab.push_back(m.labels[v]);
    } else {
      lab.push_back(nullptr);
    }
    const auto& ch = m.tree.nodes[v].children;
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
  }
  j["labels"] = lab;
  j["epsilon"] = m.epsilon;
  if (m.truncated_fragment) j["fragment"] = true;
  return j.dump();
}

Mobile deserialize_mobile(const std::string& line) {
  const nlohmann::json j = nlohmann::json::parse(line);
  Mobile m;
  m.tree = trees::deserialize_tree(j.at("tree").dump());
  trees::colour_by_generation(m.tree);
  m.epsilon = j.at("epsilon").get<int>();
  m.truncated_fragment = j.value("fragment", false);
  m.labels.assign(m.tree.node_count(), 0);
  const auto& lab = j.at("labels");
  // Preorder ids: node ids are assigned in the same DFS order by the builder.
  std::vector<NodeId> order;
  std::vector<NodeId> stack = {m.tree.root()};
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    order.push_back(v);
    const auto& ch = m.tree.nodes[v].children;
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
  }
  if (lab.size() != order.size()) throw StructuralError("mobile labels length mismatch");
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (!lab.at(k).is_null()) m.labels[order[k]] = lab.at(k).get<std::int32_t>();
  }
  return m;
}

}  // namespace bpm::labels

#include <doctest.h>

#include <cmath>
#include <map>

#include "bpm/labeling.hpp"
#include "bpm/oracle.hpp"

using namespace bpm;
using labels::Bridge;

TEST_SUITE_BEGIN("labeling");

TEST_CASE("bridge enumeration counts") {
  CHECK(labels::enumerate_bridges(1) == std::vector<Bridge>{{0}});
  const auto e2 = labels::enumerate_bridges(2);
  CHECK(e2.size() == 3);  // (-1,1), (0,0), (1,-1)
  CHECK(labels::enumerate_bridges(3).size() == 10);
  for (long r = 1; r <= 8; ++r) {
    const auto er = labels::enumerate_bridges(r);
    CHECK(BigInt(er.size()) == labels::bridge_set_size(r));
    for (const auto& b : er) {
      long sum = 0;
      for (int x : b) {
        CHECK(x >= -1);
        sum += x;
      }
      CHECK(sum == 0);
    }
  }
  CHECK_THROWS_AS(labels::enumerate_bridges(13), CapacityError);
}

TEST_CASE("uniform bridge sampling") {
  RngStream rng(11, 0);
  SUBCASE("r = 1 is constant") {
    for (int k = 0; k < 16; ++k) CHECK(labels::sample_bridge_uniform(1, rng) == Bridge{0});
  }
  SUBCASE("r = 2 frequencies are 1/3 each (3 sigma at 1e5)") {
    std::map<Bridge, long> freq;
    const long N = 100000;
    for (long k = 0; k < N; ++k) ++freq[labels::sample_bridge_uniform(2, rng)];
    REQUIRE(freq.size() == 3);
    const double tol = 3.0 * std::sqrt((1.0 / 3) * (2.0 / 3) / N);
    for (const auto& [b, c] : freq) {
      CHECK(std::fabs(static_cast<double>(c) / N - 1.0 / 3) < tol);
    }
  }
  SUBCASE("r = 6 coordinate mean is zero by exchangeability") {
    const long N = 100000;
    double acc = 0;
    for (long k = 0; k < N; ++k) acc += labels::sample_bridge_uniform(6, rng)[0];
    // coordinate variance under the bridge law is below the iid variance 2
    CHECK(std::fabs(acc / N) < 3.0 * std::sqrt(2.0 / N));
  }
}

TEST_CASE("rejection sampler agrees with the direct one") {
  RngStream rng(18, 0);
  const long r = 3;
  const auto all = labels::enumerate_bridges(r);
  std::map<Bridge, long> direct, rejected;
  const long N = 60000;
  for (long k = 0; k < N; ++k) {
    ++direct[labels::sample_bridge_uniform(r, rng)];
    ++rejected[labels::sample_bridge_rejection(r, rng)];
  }
  const double p = 1.0 / static_cast<double>(all.size());
  for (const auto& b : all) {
    const double tol = 4.0 * std::sqrt(p * (1 - p) / N);
    CHECK(std::fabs(static_cast<double>(direct[b]) / N - p) < tol);
    CHECK(std::fabs(static_cast<double>(rejected[b]) / N - p) < tol);
  }
  // large degrees stay cheap
  const auto big = labels::sample_bridge_uniform(2'000'000, rng);
  long sum = 0;
  for (int x : big) {
    CHECK(x >= -1);
    sum += x;
  }
  CHECK(sum == 0);
}

TEST_CASE("exact DP sampler agrees with the uniform law") {
  RngStream rng(12, 0);
  const long r = 4;
  const auto all = labels::enumerate_bridges(r);
  std::map<Bridge, long> freq;
  const long N = 70000;
  for (long k = 0; k < N; ++k) ++freq[labels::sample_bridge_dp(r, rng)];
  const double p = 1.0 / static_cast<double>(all.size());
  for (const auto& b : all) {
    const double tol = 4.0 * std::sqrt(p * (1 - p) / N);
    CHECK(std::fabs(static_cast<double>(freq[b]) / N - p) < tol);
  }
  CHECK_THROWS_AS(labels::sample_bridge_dp(300, rng), CapacityError);
}

TEST_CASE("iid increment law") {
  RngStream rng(13, 0);
  const long N = 1000000;
  std::map<long, long> freq;
  double mean = 0, sq = 0;
  for (long k = 0; k < N; ++k) {
    const long x = labels::sample_increment_iid(rng);
    ++freq[x];
    mean += x;
    sq += static_cast<double>(x) * x;
  }
  mean /= N;
  sq /= N;
  CHECK(std::fabs(static_cast<double>(freq[-1]) / N - 0.5) < 3 * std::sqrt(0.25 / N));
  CHECK(std::fabs(static_cast<double>(freq[0]) / N - 0.25) < 3 * std::sqrt(0.1875 / N));
  CHECK(std::fabs(mean) < 3 * std::sqrt(2.0 / N));
  CHECK(std::fabs(sq - mean * mean - 2.0) < 0.05);  // Var = 2
}

TEST_CASE("closed-form bridge marginals match enumeration") {
  for (long d = 1; d <= 8; ++d) {
    long last_ge1 = 0, first_m1 = 0;
    const auto all = labels::enumerate_bridges(d);
    for (const auto& b : all) {
      last_ge1 += (b.back() >= 1);
      first_m1 += (b.front() == -1);
    }
    CHECK(labels::bridge_last_step_ge1_prob(d) ==
          Rational(BigInt(last_ge1)) / Rational(BigInt(all.size())));
    CHECK(labels::bridge_first_step_minus1_prob(d) ==
          Rational(BigInt(first_m1)) / Rational(BigInt(all.size())));
    if (d >= 2) {
      // the rational ratios reduce to (r+1)/(2(2r+1)) and r/(2r+1) at d = r+1
      const long r = d - 1;
      CHECK(labels::bridge_last_step_ge1_prob(d) == Rational(r + 1, 2 * (2 * r + 1)));
      CHECK(labels::bridge_first_step_minus1_prob(d) == Rational(r, 2 * r + 1));
    }
  }
}

TEST_CASE("label propagation") {
  SUBCASE("single black vertex of degree 2 with bridge (-1,1)") {
    auto t = trees::from_preorder_outdegrees({1, 1, 0});
    trees::colour_by_generation(t);
    const auto m = labels::assign_labels(t, {{1, {-1, 1}}}, 0, +1);
    CHECK(m.labels[2] == -1);
    CHECK(labels::check_mobile(m).empty());
  }
  SUBCASE("all-zero bridges keep every label at the root label") {
    auto t = trees::from_preorder_outdegrees({2, 2, 0, 0, 0});
    trees::colour_by_generation(t);
    std::map<trees::NodeId, Bridge> bridges;
    for (trees::NodeId v = 0; v < static_cast<trees::NodeId>(t.node_count()); ++v) {
      if (t.nodes[v].colour == trees::Colour::Black) {
        bridges[v] = Bridge(t.degree(v), 0);
      }
    }
    const auto m = labels::assign_labels(t, bridges, 5, -1);
    for (trees::NodeId v = 0; v < static_cast<trees::NodeId>(t.node_count()); ++v) {
      if (t.nodes[v].colour == trees::Colour::White) CHECK(m.labels[v] == 5);
    }
  }
  SUBCASE("two-level propagation composes increments") {
    // root - black(deg2) - white - black(deg2) - white
    auto t = trees::from_preorder_outdegrees({1, 1, 1, 1, 0});
    trees::colour_by_generation(t);
    const auto m = labels::assign_labels(t, {{1, {2, -2}}, {3, {-1, 1}}}, 0, +1);
    CHECK(m.labels[2] == 2);
    CHECK(m.labels[4] == 1);  // 2 + (-1)
  }
  SUBCASE("degree mismatch is a structural error") {
    auto t = trees::from_preorder_outdegrees({1, 1, 0});
    trees::colour_by_generation(t);
    CHECK_THROWS_AS(labels::assign_labels(t, {{1, {0}}}, 0, +1), StructuralError);
  }
}

TEST_CASE("bridge extraction inverts assignment") {
  RngStream rng(14, 0);
  for (long n = 1; n <= 4; ++n) {
    for (auto t : oracle::enumerate_trees(n)) {
      trees::colour_by_generation(t);
      std::map<trees::NodeId, Bridge> bridges;
      for (trees::NodeId v = 0; v < static_cast<trees::NodeId>(t.node_count()); ++v) {
        if (t.nodes[v].colour == trees::Colour::Black) {
          bridges[v] = labels::sample_bridge_uniform(t.degree(v), rng);
        }
      }
      const auto m = labels::assign_labels(t, bridges, 0, +1);
      CHECK(labels::extract_bridges(m) == bridges);
    }
  }
}

TEST_CASE("counting labelings") {
  SUBCASE("frozen examples") {
    auto t1 = trees::from_preorder_outdegrees({1, 1, 0});  // one black vertex, degree 2
    trees::colour_by_generation(t1);
    CHECK(labels::count_labelings(t1) == 3);
    auto t2 = trees::from_preorder_outdegrees({2, 0, 0});  // two blacks of degree 1
    trees::colour_by_generation(t2);
    CHECK(labels::count_labelings(t2) == 1);
    // black degrees {2,3}: 3 * 10 = 30
    auto t3 = trees::from_preorder_outdegrees({2, 1, 0, 2, 0, 0});
    trees::colour_by_generation(t3);
    CHECK(labels::count_labelings(t3) == 30);
  }
  SUBCASE("brute force over label vectors for all trees with <= 4 edges") {
    for (long n = 1; n <= 4; ++n) {
      for (auto t : oracle::enumerate_trees(n)) {
        trees::colour_by_generation(t);
        // enumerate label vectors on non-root whites in [-n, n]; validity is
        // increments >= -1 around every black vertex (sums close for free)
        std::vector<trees::NodeId> whites;
        for (trees::NodeId v = 1; v < static_cast<trees::NodeId>(t.node_count()); ++v) {
          if (t.nodes[v].colour == trees::Colour::White) whites.push_back(v);
        }
        labels::Mobile m;
        m.tree = t;
        m.labels.assign(t.node_count(), 0);
        long count = 0;
        const long base = 2 * n + 1;
        long total = 1;
        for (std::size_t i = 0; i < whites.size(); ++i) total *= base;
        for (long code = 0; code < total; ++code) {
          long c = code;
          for (auto w : whites) {
            m.labels[w] = static_cast<std::int32_t>(c % base - n);
            c /= base;
          }
          bool ok = true;
          for (const auto& [black, b] : labels::extract_bridges(m)) {
            (void)black;
            for (int x : b) ok = ok && (x >= -1);
          }
          count += ok;
        }
        CHECK(BigInt(count) == labels::count_labelings(t));
      }
    }
  }
}

TEST_CASE("mobile truncation restricts labels and flags the fragment") {
  auto t = trees::from_preorder_outdegrees({1, 2, 1, 0, 0});
  trees::colour_by_generation(t);
  RngStream rng(15, 0);
  std::map<trees::NodeId, Bridge> bridges;
  for (trees::NodeId v = 0; v < static_cast<trees::NodeId>(t.node_count()); ++v) {
    if (t.nodes[v].colour == trees::Colour::Black) {
      bridges[v] = labels::sample_bridge_uniform(t.degree(v), rng);
    }
  }
  const auto m = labels::assign_labels(t, bridges, 0, +1);
  const auto frag0 = labels::mobile_truncate(m, 0);
  CHECK(frag0.tree.node_count() == 1);
  CHECK(frag0.labels[0] == 0);
  CHECK(frag0.truncated_fragment);
  const auto fragall = labels::mobile_truncate(m, 50);
  CHECK(trees::equal(fragall.tree, m.tree));
  CHECK(fragall.labels == m.labels);
  const auto frag2 = labels::mobile_truncate(m, 2);
  CHECK(frag2.tree.node_count() < m.tree.node_count());
}

TEST_CASE("mobile serialization round trip") {
  RngStream rng(16, 0);
  for (auto t : oracle::enumerate_trees(3)) {
    trees::colour_by_generation(t);
    std::map<trees::NodeId, Bridge> bridges;
    for (trees::NodeId v = 0; v < static_cast<trees::NodeId>(t.node_count()); ++v) {
      if (t.nodes[v].colour == trees::Colour::Black) {
        bridges[v] = labels::sample_bridge_uniform(t.degree(v), rng);
      }
    }
    const auto m = labels::assign_labels(t, bridges, 0, -1);
    const auto back = labels::deserialize_mobile(labels::serialize(m));
    CHECK(trees::equal(back.tree, m.tree));
    CHECK(back.labels == m.labels);
    CHECK(back.epsilon == m.epsilon);
  }
}

TEST_CASE("conditioned prefixes approach the iid law (lemma claim)") {
  // For r in {50, 200}: the law of (x_1, x_2, x_3) under the uniform bridge
  // approaches the product of iid increment laws.
  RngStream rng(17, 0);
  const long N = 100000;
  for (long r : {50L, 200L}) {
    std::map<std::array<int, 3>, long> freq;
    for (long k = 0; k < N; ++k) {
      const auto b = labels::sample_bridge_uniform(r, rng);
      ++freq[{b[0], b[1], b[2]}];
    }
    auto piid = [](int x) { return std::pow(2.0, -x - 2.0); };
    for (const std::array<int, 3> cell : {std::array<int, 3>{0, 0, 0},
                                          std::array<int, 3>{-1, 0, 1},
                                          std::array<int, 3>{-1, -1, 2}}) {
      const double p = piid(cell[0]) * piid(cell[1]) * piid(cell[2]);
      const double tol = 3.0 * std::sqrt(p * (1 - p) / N);
      CHECK(std::fabs(static_cast<double>(freq[cell]) / N - p) < tol);
    }
  }
}

TEST_SUITE_END();

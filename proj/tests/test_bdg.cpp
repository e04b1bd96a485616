#include <doctest.h>

#include <algorithm>
#include <set>

#include "bpm/bdg.hpp"
#include "bpm/oracle.hpp"
#include "bpm/samplers.hpp"

using namespace bpm;

namespace {

std::multiset<long> black_degrees(const labels::Mobile& m) {
  std::multiset<long> out;
  for (trees::NodeId v = 0; v < static_cast<trees::NodeId>(m.tree.node_count()); ++v) {
    if (m.tree.nodes[v].colour == trees::Colour::Black) out.insert(m.tree.degree(v));
  }
  return out;
}

}  // namespace

TEST_SUITE_BEGIN("bdg");

TEST_CASE("successors") {
  SUBCASE("all labels equal send every corner to rho") {
    auto t = trees::from_preorder_outdegrees({1, 2, 0, 0});
    trees::colour_by_generation(t);
    const auto m = labels::assign_labels(t, {{1, {0, 0, 0}}}, 0, +1);
    for (long s : bdg::successors(m)) CHECK(s == bdg::kSuccessorInfinity);
  }
  SUBCASE("label drop right after position 0") {
    auto t = trees::from_preorder_outdegrees({1, 1, 0});
    trees::colour_by_generation(t);
    const auto m = labels::assign_labels(t, {{1, {-1, 1}}}, 0, +1);
    const auto s = bdg::successors(m);
    CHECK(s[0] == 1);
    CHECK(s[1] == bdg::kSuccessorInfinity);
  }
  SUBCASE("wrap-around successor") {
    // labels along the white contour: 0, -1, 0; the last corner's successor
    // wraps to position 1.
    auto t = trees::from_preorder_outdegrees({1, 2, 0, 0});
    trees::colour_by_generation(t);
    const auto m = labels::assign_labels(t, {{1, {-1, 1, 0}}}, 0, +1);
    const auto s = bdg::successors(m);
    CHECK(s[2] == 1);
  }
}

TEST_CASE("single black vertex gives a plane tree with r+1 vertices") {
  RngStream rng(21, 0);
  for (long r = 1; r <= 5; ++r) {
    auto word = std::vector<int>{1};
    word.push_back(static_cast<int>(r - 1));
    for (long i = 0; i + 1 < r; ++i) word.push_back(0);
    auto t = trees::from_preorder_outdegrees(word);
    trees::colour_by_generation(t);
    for (int rep = 0; rep < 8; ++rep) {
      const auto m =
          labels::assign_labels(t, {{1, labels::sample_bridge_uniform(r, rng)}}, 0, +1);
      const auto pm = bdg::phi_build(m);
      CHECK(pm.vertex_count() == static_cast<std::size_t>(r + 1));
      CHECK(pm.edge_count() == static_cast<std::size_t>(r));
      CHECK(pm.faces().size() == 1);  // trees have a single face
      const auto rep_check = bdg::map_checks(pm);
      CHECK(rep_check.ok);
    }
  }
}

TEST_CASE("exhaustive mobile checks through n = 5") {
  for (long n = 1; n <= 5; ++n) {
    long count = 0;
    for (auto m : oracle::enumerate_mobiles(n)) {
      ++count;
      for (int eps : {-1, +1}) {
        m.epsilon = eps;
        const auto pm = bdg::phi_build(m);
        pm.check_well_formed();
        REQUIRE(pm.edge_count() == m.tree.edge_count());

        // faces <-> black vertices, face degree = 2 * black degree
        const auto fd = bdg::face_degrees(pm);
        std::vector<long> expect;
        for (long d : black_degrees(m)) expect.push_back(2 * d);
        std::sort(expect.begin(), expect.end());
        REQUIRE(fd == expect);

        // |V| = |V_white| + 1, Euler, bipartite parity, distance formula
        std::size_t whites = 0;
        for (const auto& node : m.tree.nodes) {
          whites += (node.colour == trees::Colour::White);
        }
        REQUIRE(pm.vertex_count() == whites + 1);
        const auto rep = bdg::map_checks(pm);
        REQUIRE_MESSAGE(rep.ok, rep.violation);
        REQUIRE(rep.euler_ok);
        REQUIRE(rep.bipartite_ok);
        REQUIRE(rep.distance_ok);

        // epsilon convention: the root vertex is the mobile root for -1 and
        // carries label 0; for +1 it is the successor end (label -1) or rho.
        if (eps == -1) {
          REQUIRE(pm.labels[pm.root_vertex()] == 0);
        } else {
          const bool at_point = pm.point && *pm.point == pm.root_vertex();
          REQUIRE((at_point || pm.labels[pm.root_vertex()] == -1));
        }
      }
    }
    CHECK(count > 0);
  }
}

TEST_CASE("rho arcs: every corner at the minimum label connects to the point") {
  for (auto m : oracle::enumerate_mobiles(3)) {
    const auto pm = bdg::phi_build(m);
    REQUIRE(pm.point.has_value());
    std::int32_t min_label = 1 << 30;
    for (bdg::VertexId v = 0; v < static_cast<bdg::VertexId>(pm.vertex_count()); ++v) {
      if (v != *pm.point) min_label = std::min(min_label, pm.labels[v]);
    }
    // rho's degree equals the number of white corners at the minimum label
    const auto white = trees::contour(m.tree, trees::ContourKind::WhiteOnly);
    long min_corners = 0;
    for (auto v : white.vertices) min_corners += (m.labels[v] == min_label);
    CHECK(pm.degree(*pm.point) == min_corners);
  }
}

TEST_CASE("map metric and balls") {
  // star through rho (A) versus path of length 2 (B): equal at radius 0,
  // different at radius 1.
  auto ta = trees::from_preorder_outdegrees({1, 0});
  trees::colour_by_generation(ta);
  const auto ma = labels::assign_labels(ta, {{1, {0}}}, 0, -1);
  const auto pa = bdg::phi_build(ma);

  auto tb = trees::from_preorder_outdegrees({1, 1, 0});
  trees::colour_by_generation(tb);
  const auto mb = labels::assign_labels(tb, {{1, {-1, 1}}}, 0, -1);
  const auto pb = bdg::phi_build(mb);

  SUBCASE("identical maps are flagged") {
    const auto d = bdg::map_distance(pa, pa, 8);
    CHECK(d.identical);
  }
  SUBCASE("difference at radius 1 gives 1/(1+0) = 1") {
    const auto d = bdg::map_distance(pa, pb, 8);
    CHECK_FALSE(d.identical);
    CHECK(d.agreement_radius == 0);
    CHECK(d.value == Rational(1, 1));
  }
  SUBCASE("ball of a small-diameter map is the map") {
    const auto ball = bdg::map_ball(pb, 10);
    CHECK(bdg::canonical_code(ball) == bdg::canonical_code(pb));
  }
}

TEST_CASE("truncated construction certifies exact balls") {
  const auto pkg = weights::make_package(weights::FaceWeights::degenerate_zero_radius());
  SUBCASE("radius zero is the root with its full edge set") {
    const auto res = samplers::sample_uiptree_ball(0, RngStream(31, 1));
    CHECK(res.ball.certified_radius == 0);
    CHECK(res.ball.map.degree(res.ball.map.root_vertex()) > 0);
  }
  SUBCASE("UIPTree balls are trees") {
    for (int k = 0; k < 10; ++k) {
      const auto res = samplers::sample_uiptree_ball(4, RngStream(31, 2 + k));
      const auto& pm = res.ball.map;
      pm.check_well_formed();
      CHECK(pm.edge_count() == pm.vertex_count() - 1);
      const auto dist = pm.bfs_distances(pm.root_vertex());
      for (auto d : dist) CHECK(d >= 0);  // connected
    }
  }
  SUBCASE("ball monotonicity under nesting") {
    for (int k = 0; k < 20; ++k) {
      RngStream rng(32, k);
      samplers::LimitSampler sampler(pkg, rng);
      auto trunc = sampler.sample_mobile();
      for (int attempt = 0; attempt < 32; ++attempt) {
        try {
          const auto w = sampler.mobile_window(trunc);
          const auto b3 = bdg::phi_build_window(w, trunc.mobile.epsilon, 3);
          const auto b2 = bdg::phi_build_window(w, trunc.mobile.epsilon, 2);
          CHECK(bdg::canonical_code(bdg::map_ball_closed(b3.map, 2)) ==
                bdg::canonical_code(b2.map));
          break;
        } catch (const CertificationError&) {
          sampler.extend_window(trunc, 8 << attempt);
        }
      }
    }
  }
}

TEST_CASE("window certification errors instead of guessing") {
  // A window with shallow labels on the flanks cannot certify radius 2.
  bdg::ContourWindow w;
  w.vertex = {0, 1, 2};
  w.label = {0, 0, 0};
  w.origin = 1;
  CHECK_THROWS_AS(bdg::phi_build_window(w, -1, 2), CertificationError);
}

TEST_CASE("exports are well formed") {
  auto t = trees::from_preorder_outdegrees({1, 2, 0, 0});
  trees::colour_by_generation(t);
  const auto m = labels::assign_labels(t, {{1, {-1, 0, 1}}}, 0, +1);
  const auto pm = bdg::phi_build(m);
  const auto js = bdg::to_json(pm);
  CHECK(js.find("rotation") != std::string::npos);
  const auto dot = bdg::to_dot(pm);
  CHECK(dot.find("graph map {") == 0);
}

TEST_SUITE_END();

#include <doctest.h>

#include <map>
#include <set>

#include "bpm/oracle.hpp"

using namespace bpm;
using weights::FaceWeights;

TEST_SUITE_BEGIN("oracle");

TEST_CASE("tree enumeration hits the Catalan numbers") {
  CHECK(oracle::enumerate_trees(1).size() == 1);
  CHECK(oracle::enumerate_trees(3).size() == 5);
  for (long n = 0; n <= 8; ++n) {
    CHECK(BigInt(oracle::enumerate_lukasiewicz(n).size()) == oracle::catalan(n));
  }
}

TEST_CASE("mobile enumeration counts sum the labelings") {
  for (long n = 1; n <= 4; ++n) {
    BigInt expected(0);
    for (auto t : oracle::enumerate_trees(n)) {
      trees::colour_by_generation(t);
      expected += labels::count_labelings(t);
    }
    CHECK(BigInt(oracle::enumerate_mobiles(n).size()) == expected);
  }
}

TEST_CASE("canonical serialization is injective on enumerated supports") {
  for (long n = 1; n <= 5; ++n) {
    std::set<std::string> keys;
    const auto all = oracle::enumerate_trees(n);
    for (const auto& t : all) keys.insert(trees::serialize(t));
    CHECK(keys.size() == all.size());
  }
}

TEST_CASE("psi pushforward identity, exact in the rationals") {
  const auto ones = weights::TreeWeights(FaceWeights::all_ones());
  const auto bimodal = weights::TreeWeights(FaceWeights::finite_w({{2, Rational(3)}}));
  for (long n = 1; n <= 6; ++n) {
    for (const auto* tw : {&ones, &bimodal}) {
      if (tw == &bimodal && n % 2 == 1) continue;  // no bimodal tree has odd size
      const auto push = oracle::exact_nu_pushforward(*tw, n);
      const auto direct = oracle::exact_nu_tilde(*tw, n);
      REQUIRE(push.support == direct.support);
      for (std::size_t i = 0; i < push.probs.size(); ++i) {
        CHECK(push.probs[i] == direct.probs[i]);
      }
      CHECK(push.sums_to_one());
    }
  }
}

TEST_CASE("mu_n: pipeline pushforward equals the direct face-weight law") {
  const auto ones = weights::TreeWeights(FaceWeights::all_ones());
  const auto bimodal = weights::TreeWeights(FaceWeights::finite_w({{2, Rational(1)}}));
  for (long n = 1; n <= 4; ++n) {
    {
      const auto mu = oracle::exact_mu(ones, n);
      REQUIRE(mu.pipeline.support == mu.direct.support);
      for (std::size_t i = 0; i < mu.pipeline.probs.size(); ++i) {
        CHECK(mu.pipeline.probs[i] == mu.direct.probs[i]);
      }
      CHECK(mu.pipeline.sums_to_one());
      CHECK(mu.direct.sums_to_one());
    }
    if (n % 2 == 0) {  // bimodal support needs even n
      const auto mu = oracle::exact_mu(bimodal, n);
      REQUIRE(mu.pipeline.support == mu.direct.support);
      for (std::size_t i = 0; i < mu.pipeline.probs.size(); ++i) {
        CHECK(mu.pipeline.probs[i] == mu.direct.probs[i]);
      }
    }
  }
}

TEST_CASE("n = 1 map law is a single point") {
  const auto q1 = weights::TreeWeights(FaceWeights::explicit_q({{1, Rational(1)}, {2, Rational(1)}}));
  const auto mu = oracle::exact_mu(q1, 1);
  CHECK(mu.pipeline.support.size() == 2);  // two root orientations of one edge
  Rational total(0);
  for (const auto& p : mu.pipeline.probs) total += p;
  CHECK(total == 1);
}

TEST_CASE("stationary rooting: probability depends only on the unrooted map") {
  const auto ones = weights::TreeWeights(FaceWeights::all_ones());
  for (long n = 2; n <= 4; ++n) {
    const auto mu = oracle::exact_mu(ones, n);
    // group the support by the root-invariant code; probabilities are equal
    // within a group
    std::map<std::string, std::vector<Rational>> groups;
    for (auto m : oracle::enumerate_mobiles(n)) {
      for (int eps : {-1, +1}) {
        m.epsilon = eps;
        const auto pm = bdg::phi_build(m);
        groups[oracle::unrooted_code(pm)].push_back(
            mu.pipeline.prob_of(bdg::canonical_code(pm)));
      }
    }
    for (const auto& [key, probs] : groups) {
      for (const auto& p : probs) CHECK(p == probs.front());
    }
  }
}

TEST_CASE("face-degree classes are equiprobable within a class") {
  const auto ones = weights::TreeWeights(FaceWeights::all_ones());
  const auto mu = oracle::exact_mu(ones, 3);
  // two maps with the same face-degree multiset have the same probability
  std::map<std::string, std::vector<Rational>> by_faces;
  for (auto m : oracle::enumerate_mobiles(3)) {
    const auto pm = bdg::phi_build(m);
    std::string key;
    for (long d : bdg::face_degrees(pm)) key += std::to_string(d) + ",";
    by_faces[key].push_back(mu.direct.prob_of(bdg::canonical_code(pm)));
  }
  for (const auto& [key, probs] : by_faces) {
    for (const auto& p : probs) CHECK(p == probs.front());
  }
}

TEST_SUITE_END();

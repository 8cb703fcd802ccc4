#include <algorithm>
#include <set>

#include "doctest.h"
#include "polyembed/embedding.hpp"
#include "polyembed/zoo.hpp"

using namespace polyembed;

namespace {

Rational q(long n, long d = 1) {
  Rational r(n, d);
  r.canonicalize();
  return r;
}

DiscreteLoss signed_zero_one(long factor) { return zoo::zero_one(std::vector<std::string>{"1", "-1"}).scaled(factor); }

std::set<Vec, LexLess> trim_set(const DiscreteLoss& loss) {
  auto t = trim(loss);
  return {t.vectors.begin(), t.vectors.end()};
}

}  // namespace

TEST_CASE("conjugate of binary zero-one against its closed form") {
  auto loss = conjugate_surrogate(zoo::zero_one(2));
  CHECK(loss.dimension() == 2);
  CHECK(loss.eval(Vec{q(1), q(0)}) == Vec{q(0), q(1)});
  CHECK(loss.eval(Vec{q(0), q(1)}) == Vec{q(1), q(0)});
  CHECK(loss.eval(Vec{q(0), q(0)}) == Vec{q(1, 2), q(1, 2)});
  Sampler sampler(1);
  for (int k = 0; k < 200; ++k) {
    Vec u = sampler.point(2, 4);
    Rational c = std::max({u[0], u[1], Rational((u[0] + u[1] + 1) / 2)});
    CHECK(loss.eval(u) == Vec{c - u[0], c - u[1]});
  }
  CHECK(lineality_space(loss).size() == 1);
  CHECK(quotient(loss).reduced.dimension() == 1);
}

TEST_CASE("conjugate at the origin is the largest bayes risk") {
  // For zero-one the largest risk sits at the uniform distribution.
  for (std::size_t n : {2u, 3u, 4u}) {
    auto loss = conjugate_surrogate(zoo::zero_one(n));
    CHECK(loss.eval(zeros(n)) == Vec(n, Rational(1) - q(1, static_cast<long>(n))));
  }
  // Abstaining at 1/2 caps the risk at 1/2.
  CHECK(conjugate_surrogate(zoo::abstain(3)).eval(zeros(3)) == Vec(3, q(1, 2)));
}

TEST_CASE("hinge embeds twice zero-one with the identity on the labels") {
  auto target = signed_zero_one(2);
  auto verdict = verify_embedding(zoo::hinge(), target);
  REQUIRE(verdict.embeds);
  REQUIRE(verdict.map.reports.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& name = target.reports()[verdict.map.reports[i]];
    CHECK(verdict.map.points[i] == Vec{name == "1" ? q(1) : q(-1)});
    CHECK(zoo::hinge().eval(verdict.map.points[i]) == target.loss(verdict.map.reports[i]));
  }
}

TEST_CASE("hinge does not embed unscaled zero-one") {
  auto verdict = verify_embedding(zoo::hinge(), signed_zero_one(1));
  CHECK_FALSE(verdict.embeds);
  CHECK(verdict.vector_from_target);
  CHECK((verdict.differing_vector == Vec{q(0), q(1)} || verdict.differing_vector == Vec{q(1), q(0)}));
  CHECK(verdict.surrogate_risk != verdict.target_risk);
  CHECK(bayes_risk(signed_zero_one(1), verdict.risk_gap_distribution).value == verdict.target_risk);
  CHECK(surrogate_risk(zoo::hinge(), verdict.risk_gap_distribution).value == verdict.surrogate_risk);
}

TEST_CASE("binary encoded surrogate embeds twice abstain with codes and the origin") {
  auto target = zoo::abstain(4).scaled(2);
  auto verdict = verify_embedding(zoo::bep(4), target);
  REQUIRE(verdict.embeds);
  CHECK(verdict.map.reports.size() == 5);
  for (std::size_t i = 0; i < verdict.map.reports.size(); ++i) {
    auto r = verdict.map.reports[i];
    if (target.reports()[r] == "abstain") {
      CHECK(verdict.map.points[i] == Vec{q(0), q(0)});
    } else {
      CHECK(verdict.map.points[i] == zoo::bep_code(4, r));
    }
  }
}

TEST_CASE("every zoo target is embedded by its conjugate surrogate") {
  Sampler sampler(21);
  for (const auto& loss :
       {zoo::zero_one(2), zoo::zero_one(3), zoo::abstain(3), zoo::l4_target(3, 1), zoo::top_k(4, 2),
        zoo::structured_abstain(zoo::indicator_set_function(2), 2), zoo::ordered_partition(3)}) {
    auto surrogate = conjugate_surrogate(loss);
    auto analysis = analyze(surrogate);
    auto verdict = verify_embedding(analysis, loss);
    CHECK(verdict.embeds);
    for (std::size_t i = 0; i < verdict.map.reports.size(); ++i) {
      CHECK(surrogate.eval(verdict.map.points[i]) == loss.loss(verdict.map.reports[i]));
    }
    std::set<Vec, LexLess> points(verdict.map.points.begin(), verdict.map.points.end());
    CHECK(points.size() == verdict.map.points.size());
    for (int k = 0; k < 100; ++k) {
      Vec p = k % 2 ? sampler.distribution(loss.outcome_count()) : sampler.sparse_distribution(loss.outcome_count());
      CHECK(surrogate_risk(surrogate, p).value == bayes_risk(loss, p).value);
    }
  }
}

TEST_CASE("every zoo surrogate embeds its own restriction") {
  for (const auto& surrogate : {zoo::hinge(), zoo::bep(4), zoo::bep(3), zoo::ww_hinge(3)}) {
    auto analysis = analyze(surrogate);
    CHECK(verify_embedding(analysis, analysis.embedded).embeds);
  }
}

TEST_CASE("embedding compares trims, so redundant target reports do not matter") {
  // With two labels the abstain vector is the midpoint of the two others.
  auto target = zoo::abstain(2).scaled(2);
  CHECK(trim_set(target) == trim_set(zoo::zero_one(2).scaled(2)));
  auto verdict = verify_embedding(zoo::bep(2), target);
  CHECK(verdict.embeds);
  CHECK(verdict.map.reports.size() == 2);
}

TEST_CASE("outcome labels must agree") {
  CHECK_THROWS(verify_embedding(zoo::hinge(), zoo::zero_one(2)));
}

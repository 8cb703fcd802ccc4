#include <set>
#include <sstream>

#include "doctest.h"
#include "polyembed/errors.hpp"
#include "polyembed/zoo.hpp"

using namespace polyembed;

namespace {

Rational q(long n, long d = 1) {
  Rational r(n, d);
  r.canonicalize();
  return r;
}

std::set<Vec, LexLess> trim_set(const DiscreteLoss& loss) {
  auto t = trim(loss);
  return {t.vectors.begin(), t.vectors.end()};
}

// Loss of an ordered partition written as blocks "12|3", evaluated from the chain of unions.
Vec ordered_partition_oracle(const std::string& name, std::size_t n) {
  std::vector<std::set<std::size_t>> chain{{}};
  std::set<std::size_t> so_far;
  std::stringstream blocks(name);
  std::string block;
  while (std::getline(blocks, block, '|')) {
    for (char c : block) so_far.insert(static_cast<std::size_t>(c - '1'));
    chain.push_back(so_far);
  }
  Vec loss(n);
  for (std::size_t y = 0; y < n; ++y) {
    long total = -1;
    for (std::size_t i = 1; i < chain.size(); ++i) {
      if (!chain[i - 1].count(y)) total += static_cast<long>(chain[i].size());
    }
    loss[y] = total;
  }
  return loss;
}

}  // namespace

TEST_CASE("zero-one and abstain") {
  auto zero_one = zoo::zero_one(2);
  CHECK(zero_one.matrix() == Matrix{{q(0), q(1)}, {q(1), q(0)}});
  for (std::size_t n : {2u, 3u, 5u}) {
    CHECK(bayes_risk(zoo::zero_one(n), Vec(n, q(1, static_cast<long>(n)))).value == 1 - q(1, static_cast<long>(n)));
  }
  auto abstain = zoo::abstain(3);
  CHECK(abstain.report_count() == 4);
  CHECK(abstain.loss(abstain.report_index("abstain")) == Vec(3, q(1, 2)));
  CHECK(zoo::abstain(3, q(1, 3)).loss(3) == Vec(3, q(1, 3)));
  for (std::size_t y = 0; y < 3; ++y) CHECK(sgn(abstain.loss(y)[y]) == 0);
  auto two = trim(zoo::abstain(2));
  CHECK(two.vectors.size() == 2);
  CHECK(std::count(two.reports.begin(), two.reports.end(), std::size_t{2}) == 0);
  CHECK_THROWS_AS(zoo::abstain(3, q(1)), DomainError);
  CHECK_THROWS_AS(zoo::zero_one(1), DomainError);
  CHECK_THROWS_AS(zoo::zero_one(9), GuardExceeded);
}

TEST_CASE("hinge and the binary encoded surrogate") {
  CHECK(zoo::hinge().eval(Vec{q(1, 2)}) == Vec{q(1, 2), q(3, 2)});
  CHECK(zoo::bep_dimension(4) == 2);
  CHECK(zoo::bep_dimension(5) == 3);
  std::set<Vec, LexLess> codes;
  for (std::size_t i = 0; i < 8; ++i) codes.insert(zoo::bep_code(8, i));
  CHECK(codes.size() == 8);
  CHECK(zoo::bep_code(4, 0) == Vec{q(1), q(1)});

  auto bep = zoo::bep(2);
  auto hinge = zoo::hinge();
  Sampler sampler(4);
  for (int k = 0; k < 100; ++k) {
    Vec u = sampler.point(1, 3);
    auto a = bep.eval(u), b = hinge.eval(u);
    // Label "1" carries code +1 and label "2" code -1.
    CHECK(a == b);
  }
}

TEST_CASE("threshold links") {
  Vec u{q(3, 5), q(1, 5)};
  CHECK(zoo::psi_inf(4)(u) == "abstain");
  CHECK(zoo::psi_1(4)(u) == "abstain");
  CHECK(zoo::psi_inf(4)(Vec{q(1), q(1)}) == "1");
  CHECK(zoo::psi_1(4)(Vec{q(1), q(1, 2)}) == "1");
  CHECK(zoo::psi_inf(4)(Vec{q(1), q(1, 2)}) == "abstain");
  for (std::size_t i = 0; i < 4; ++i) {
    auto code = zoo::bep_code(4, i);
    CHECK(zoo::psi_inf(4)(code) == std::to_string(i + 1));
    CHECK(zoo::psi_1(4)(code) == std::to_string(i + 1));
  }
  CHECK(zoo::sign_link()(Vec{q(0)}) == "1");
  CHECK(zoo::sign_link()(Vec{q(-1, 9)}) == "-1");
  CHECK(zoo::shifted_sign_link()(Vec{q(99, 100)}) == "-1");
}

TEST_CASE("Weston-Watkins hinge") {
  for (std::size_t n : {2u, 3u, 4u}) {
    auto ww = zoo::ww_hinge(n);
    CHECK(ww.eval(zeros(n)) == Vec(n, Rational(static_cast<long>(n) - 1)));
    Sampler sampler(n);
    for (int k = 0; k < 50; ++k) {
      Vec u = sampler.point(n, 2);
      auto value = ww.eval(u);
      for (std::size_t y = 0; y < n; ++y) {
        Rational expected = 0;
        for (std::size_t i = 0; i < n; ++i) {
          if (i != y) expected += std::max(Rational(0), Rational(1 - (u[y] - u[i])));
        }
        CHECK(value[y] == expected);
      }
    }
  }
}

TEST_CASE("ordered partitions") {
  // Counts of ordered set partitions.
  CHECK(zoo::ordered_partition(2).report_count() == 3);
  CHECK(zoo::ordered_partition(3).report_count() == 13);
  CHECK(zoo::ordered_partition(4).report_count() == 75);
  for (std::size_t n : {2u, 3u, 4u}) {
    auto loss = zoo::ordered_partition(n);
    std::set<std::string> seen(loss.reports().begin(), loss.reports().end());
    CHECK(seen.size() == loss.report_count());
    for (std::size_t r = 0; r < loss.report_count(); ++r) {
      CHECK(loss.loss(r) == ordered_partition_oracle(loss.reports()[r], n));
    }
  }
  auto two = zoo::ordered_partition(2);
  CHECK(two.loss(two.report_index("1|2"))[0] == 0);
  CHECK_THROWS_AS(zoo::ordered_partition(7), GuardExceeded);
}

TEST_CASE("top-k losses, surrogates and link") {
  auto loss = zoo::top_k(4, 2);
  CHECK(loss.report_count() == 6);
  auto row = loss.loss(loss.report_index("{1,2}"));
  CHECK(row == Vec{q(0), q(0), q(1), q(1)});
  CHECK(trim(loss).vectors.size() == 6);

  auto l4 = zoo::l4_target(4, 2);
  CHECK(l4.loss(l4.report_index("{}")) == Vec(4, q(1)));
  CHECK(l4.loss(l4.report_index("{1}")) == Vec{q(0), q(3, 2), q(3, 2), q(3, 2)});

  for (const auto& surrogate : {zoo::topk_surrogate(4, 2), zoo::l4_surrogate(4, 2), zoo::ww_hinge(3)}) {
    auto lineality = lineality_space(surrogate);
    REQUIRE(lineality.size() == 1);
    CHECK(lineality[0] == Vec(surrogate.dimension(), lineality[0][0]));
  }

  // Largest entry against the shifted averages of the m largest entries, m > k.
  auto topk = zoo::topk_surrogate(4, 2);
  Sampler sampler(8);
  for (int s = 0; s < 50; ++s) {
    Vec u = sampler.point(4, 2);
    Vec sorted = u;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    Rational best = sorted[0], sum = sorted[0] + sorted[1];
    for (std::size_t m = 3; m <= 4; ++m) {
      sum += sorted[m - 1];
      best = std::max(best, Rational(1 - q(2, static_cast<long>(m)) + sum / static_cast<long>(m)));
    }
    auto value = topk.eval(u);
    for (std::size_t y = 0; y < 4; ++y) CHECK(value[y] == best - u[y]);
  }

  auto link = zoo::argmax_link(4, 2);
  CHECK(link(Vec{q(4), q(3), q(2), q(1)}) == "{1,2}");
  CHECK(link(Vec{q(1), q(3), q(2), q(3)}) == "{2,4}");
  CHECK(link(Vec{q(0), q(0), q(0), q(0)}) == "{1,2}");
  CHECK_THROWS(zoo::top_k(4, 4));
}

TEST_CASE("structured abstain") {
  auto loss = zoo::structured_abstain(zoo::indicator_set_function(2), 2);
  CHECK(loss.report_count() == 9);
  CHECK(loss.outcome_count() == 4);
  CHECK(loss.loss(loss.report_index("00")) == Vec(4, q(1)));
  for (std::size_t y = 0; y < 4; ++y) CHECK(loss.loss(loss.report_index(loss.outcomes()[y]))[y] == 0);

  SUBCASE("the indicator agrees with the binary encoded surrogate at codes and the origin") {
    for (std::size_t k : {1u, 2u, 3u}) {
      auto structured = zoo::structured_abstain(zoo::indicator_set_function(k), k);
      const std::size_t n = std::size_t{1} << k;
      auto bep = zoo::bep(n);
      std::vector<Vec> points{zeros(k)};
      for (std::size_t i = 0; i < n; ++i) points.push_back(zoo::bep_code(n, i));
      for (const auto& point : points) {
        CHECK(bep.eval(point) == structured.loss(structured.report_index(zoo::code_name(point))));
      }
    }
  }
  SUBCASE("a modular set function gives a weighted Hamming loss") {
    const std::size_t k = 2;
    auto modular = zoo::structured_abstain(zoo::cardinality_set_function(k), k);
    // Each coordinate costs 0 when right, 1 when abstained and 2 when wrong.
    Matrix rows;
    std::vector<std::string> names;
    for (std::size_t r = 0; r < modular.report_count(); ++r) {
      const auto& name = modular.reports()[r];
      Vec row;
      for (const auto& outcome : modular.outcomes()) {
        long cost = 0;
        for (std::size_t j = 0; j < k; ++j) cost += name[j] == outcome[j] ? 0 : name[j] == '0' ? 1 : 2;
        row.push_back(cost);
      }
      rows.push_back(row);
      names.push_back(name);
    }
    DiscreteLoss hamming(modular.outcomes(), names, rows);
    CHECK(modular.matrix() == hamming.matrix());
    CHECK(trim_set(modular) == trim_set(hamming));
  }
  SUBCASE("invalid set functions") {
    std::vector<Rational> shifted(4, q(1));
    CHECK_THROWS_AS(zoo::structured_abstain(shifted, 2), InvalidSetFunction);
    std::vector<Rational> negative{q(0), q(-1), q(1), q(1)};
    CHECK_THROWS_AS(zoo::structured_abstain(negative, 2), InvalidSetFunction);
    CHECK_THROWS_AS(zoo::structured_abstain(std::vector<Rational>(3), 2), InvalidSetFunction);
    CHECK_THROWS_AS(zoo::structured_abstain(zoo::indicator_set_function(5), 5), GuardExceeded);
  }
}

TEST_CASE("named construction") {
  auto spec = zoo::parse_spec("zoo:topk_surrogate?n=4&k=2");
  CHECK(spec.name == "topk_surrogate");
  CHECK(spec.integer("n", 0) == 4);
  CHECK(spec.integer("missing", 7) == 7);
  CHECK(zoo::is_surrogate(spec));
  CHECK_FALSE(zoo::is_discrete(spec));
  CHECK(zoo::make_surrogate(spec).dimension() == 4);
  CHECK(zoo::make_discrete(zoo::parse_spec("abstain?n=4&alpha=1/3")).loss(4) == Vec(4, q(1, 3)));
  CHECK(zoo::make_discrete(zoo::parse_spec("zoo:zero_one")).outcome_count() == 3);
  CHECK(zoo::make_link(zoo::parse_spec("zoo:psi_inf?n=4"))(Vec{q(1), q(1)}) == "1");
  CHECK(zoo::make_discrete(zoo::parse_spec("structured_abstain?k=2&f=cardinality")).report_count() == 9);
  CHECK_THROWS_AS(zoo::parse_spec("zoo:abstain?n"), ParseError);
  CHECK_THROWS(zoo::make_discrete(zoo::parse_spec("nothing")));
  for (const auto& name : zoo::names()) {
    auto entry = zoo::parse_spec(name);
    if (zoo::is_discrete(entry)) CHECK_NOTHROW(zoo::make_discrete(entry));
    if (zoo::is_surrogate(entry)) CHECK_NOTHROW(zoo::make_surrogate(entry));
    if (zoo::is_link(entry)) CHECK_NOTHROW(zoo::make_link(entry));
  }
}

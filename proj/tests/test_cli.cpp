#include <algorithm>
#include <set>

#include "doctest.h"
#include "polyembed/document.hpp"
#include "polyembed/errors.hpp"
#include "polyembed/plot.hpp"

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

}  // namespace

TEST_CASE("documents round trip every zoo entry") {
  for (const auto& name : zoo::names()) {
    auto spec = zoo::parse_spec(name);
    if (zoo::is_discrete(spec)) {
      auto loss = zoo::make_discrete(spec);
      auto text = to_document(loss);
      auto back = parse_discrete(text);
      CHECK(back.outcomes() == loss.outcomes());
      CHECK(back.reports() == loss.reports());
      CHECK(back.matrix() == loss.matrix());
      CHECK(to_document(back) == text);
    }
    if (zoo::is_surrogate(spec)) {
      auto loss = zoo::make_surrogate(spec);
      auto text = to_document(loss);
      auto back = parse_surrogate(text);
      CHECK(back.dimension() == loss.dimension());
      for (std::size_t y = 0; y < loss.outcome_count(); ++y) CHECK(back.pieces(y) == loss.pieces(y));
      CHECK(to_document(back) == text);
    }
  }
}

TEST_CASE("link documents answer the same queries") {
  auto target = zoo::abstain(4).scaled(2);
  auto geometry = surrogate_geometry(zoo::bep(4));
  auto artifact = build_link(geometry, target, {Norm::L1, q(1)});
  auto text = to_document(artifact);
  auto back = parse_artifact(text);
  CHECK(to_document(back) == text);
  CHECK(back.epsilon() == 1);
  CHECK(back.norm() == Norm::L1);
  CHECK(*back.bound().value == *artifact.bound().value);
  Sampler sampler(2);
  for (int k = 0; k < 200; ++k) {
    Vec u = sampler.point(2, 2);
    CHECK(back.envelope(u) == artifact.envelope(u));
  }
}

TEST_CASE("documents reject floating point and malformed input") {
  const std::string good =
      R"({"format":1,"kind":"discrete","outcomes":["a","b"],"reports":[{"name":"x","loss":["0","1/2"]}]})";
  CHECK(parse_discrete(good).loss(0) == Vec{q(0), q(1, 2)});
  auto replaced = [&](const std::string& from, const std::string& to) {
    auto text = good;
    text.replace(text.find(from), from.size(), to);
    return text;
  };
  CHECK_THROWS_AS(parse_discrete(replaced("\"1/2\"", "0.5")), ParseError);
  CHECK_THROWS_AS(parse_discrete(replaced("\"1/2\"", "\"0.5\"")), ParseError);
  CHECK_THROWS_AS(parse_discrete(replaced("\"1/2\"", "\"1e0\"")), ParseError);
  CHECK_THROWS_AS(parse_discrete(replaced("\"format\":1", "\"format\":2")), ParseError);
  CHECK_THROWS_AS(parse_discrete(replaced("[\"0\",\"1/2\"]", "[\"0\"]")), ParseError);
  CHECK_THROWS_AS(parse_discrete(replaced("\"kind\":\"discrete\"", "\"kind\":\"surrogate\"")), ParseError);
  CHECK_THROWS_AS(parse_discrete("{"), ParseError);
  CHECK_THROWS_AS(parse_surrogate(good), ParseError);
}

TEST_CASE("the conjugate surrogate survives serialization and analysis") {
  for (const auto& loss : {zoo::zero_one(3), zoo::abstain(3), zoo::ordered_partition(3)}) {
    auto surrogate = parse_surrogate(to_document(conjugate_surrogate(loss)));
    CHECK(trim_set(analyze(surrogate).embedded) == trim_set(loss));
  }
}

TEST_CASE("simplex plots") {
  SUBCASE("zero-one cells meet at the center") {
    auto plot = simplex_plot(zoo::zero_one(3));
    REQUIRE(plot.cells.size() == 3);
    Vec center(3, q(1, 3));
    for (const auto& cell : plot.cells) {
      CHECK(cell.corners.size() == 4);
      CHECK(std::count(cell.corners.begin(), cell.corners.end(), center) == 1);
    }
  }
  SUBCASE("the abstain cell crosses the mode boundaries") {
    auto zero_one = zoo::zero_one(3);
    auto plot = simplex_plot(zoo::abstain(3), std::nullopt, &zero_one);
    REQUIRE(plot.cells.size() == 4);
    CHECK(plot.overlay.size() == 3);
    for (const auto& cell : plot.cells) CHECK(cell.contained == (cell.report != "abstain"));
    auto svg = render_svg(plot);
    CHECK(svg == render_svg(simplex_plot(zoo::abstain(3), std::nullopt, &zero_one)));
    CHECK(svg.find("width=\"800\" height=\"693\"") != std::string::npos);
    CHECK(svg.find("stroke-dasharray") != std::string::npos);
  }
  SUBCASE("a slice of four outcomes") {
    auto loss = zoo::zero_one(4);
    auto slice = parse_slice(loss, "y4=1/4");
    CHECK(slice.outcome == 3);
    auto plot = simplex_plot(loss, slice);
    // At 1/4 the fourth label is optimal only at the center of the slice.
    CHECK(plot.cells.size() == 3);
    CHECK(simplex_plot(loss, parse_slice(loss, "y4=2/5")).cells.size() == 4);
    CHECK_THROWS_AS(simplex_plot(loss), UnsupportedDimension);
    CHECK_THROWS_AS(parse_slice(loss, "y9=1/4"), ParseError);
  }
}

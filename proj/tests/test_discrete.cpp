#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "doctest.h"
#include "polyembed/discrete_loss.hpp"
#include "polyembed/errors.hpp"
#include "polyembed/zoo.hpp"

using namespace polyembed;

namespace {

Rational q(long n, long d = 1) {
  Rational r(n, d);
  r.canonicalize();
  return r;
}

DiscreteLoss from_rows(const Matrix& rows) {
  std::vector<std::string> reports;
  for (std::size_t r = 0; r < rows.size(); ++r) reports.push_back("r" + std::to_string(r));
  return DiscreteLoss(zoo::labels(rows.front().size()), reports, rows);
}

// All distributions whose entries are multiples of 1/grid.
std::vector<Vec> grid(std::size_t n, long steps) {
  std::vector<Vec> out;
  std::vector<long> counts(n, 0);
  std::function<void(std::size_t, long)> fill = [&](std::size_t i, long left) {
    if (i + 1 == n) {
      counts[i] = left;
      Vec p;
      for (auto c : counts) p.push_back(q(c, steps));
      out.push_back(std::move(p));
      return;
    }
    for (long c = 0; c <= left; ++c) {
      counts[i] = c;
      fill(i + 1, left - c);
    }
  };
  fill(0, steps);
  return out;
}

// Distinct (minimizing vectors, support) pairs met on a grid.
std::size_t grid_face_count(const DiscreteLoss& loss, long steps) {
  std::set<std::pair<std::set<Vec, LexLess>, std::vector<std::size_t>>> keys;
  for (const auto& p : grid(loss.outcome_count(), steps)) {
    Rational best;
    std::set<Vec, LexLess> winners;
    for (const auto& row : loss.matrix()) {
      Rational value = 0;
      for (std::size_t y = 0; y < p.size(); ++y) value += p[y] * row[y];
      if (winners.empty() || value < best) {
        best = value;
        winners = {row};
      } else if (value == best) {
        winners.insert(row);
      }
    }
    std::vector<std::size_t> support;
    for (std::size_t y = 0; y < p.size(); ++y) {
      if (sgn(p[y]) > 0) support.push_back(y);
    }
    keys.emplace(std::move(winners), std::move(support));
  }
  return keys.size();
}

std::vector<DiscreteLoss> small_zoo() {
  return {zoo::zero_one(2),        zoo::zero_one(3),      zoo::abstain(2), zoo::abstain(3),
          zoo::abstain(4),         zoo::top_k(4, 2),      zoo::l4_target(3, 1),
          zoo::ordered_partition(3), zoo::structured_abstain(zoo::indicator_set_function(2), 2)};
}

}  // namespace

TEST_CASE("bayes risk of zero-one at the uniform distribution ties both labels") {
  auto risk = bayes_risk(zoo::zero_one(2), Vec{q(1, 2), q(1, 2)});
  CHECK(risk.value == q(1, 2));
  CHECK(risk.argmin == std::vector<std::size_t>{0, 1});
}

TEST_CASE("bayes risk at a point mass picks the column minimizers") {
  auto loss = zoo::abstain(3);
  for (std::size_t y = 0; y < 3; ++y) {
    auto risk = bayes_risk(loss, unit_vector(3, y));
    CHECK(risk.value == 0);
    CHECK(risk.argmin == std::vector<std::size_t>{y});
  }
}

TEST_CASE("abstaining wins when no label has half the mass") {
  auto loss = zoo::abstain(4);
  auto risk = bayes_risk(loss, Vec{q(2, 5), q(3, 10), q(1, 5), q(1, 10)});
  CHECK(risk.value == q(1, 2));
  CHECK(risk.argmin == std::vector<std::size_t>{loss.report_index("abstain")});
}

TEST_CASE("bayes risk rejects vectors that are not distributions") {
  auto loss = zoo::zero_one(2);
  CHECK_THROWS_AS(bayes_risk(loss, Vec{q(1, 2), q(1, 3)}), NotADistribution);
  CHECK_THROWS_AS(bayes_risk(loss, Vec{q(3, 2), q(-1, 2)}), NotADistribution);
  CHECK_THROWS_AS(bayes_risk(loss, Vec{q(1)}), NotADistribution);
}

TEST_CASE("the bayes argmin attains the risk and every other report is strictly worse") {
  Sampler sampler(11);
  for (const auto& loss : small_zoo()) {
    for (int k = 0; k < 100; ++k) {
      Vec p = k % 2 ? sampler.distribution(loss.outcome_count()) : sampler.sparse_distribution(loss.outcome_count());
      auto risk = bayes_risk(loss, p);
      for (std::size_t r = 0; r < loss.report_count(); ++r) {
        bool in = std::find(risk.argmin.begin(), risk.argmin.end(), r) != risk.argmin.end();
        if (in) {
          CHECK(dot(p, loss.loss(r)) == risk.value);
        } else {
          CHECK(dot(p, loss.loss(r)) > risk.value);
        }
      }
    }
  }
}

TEST_CASE("level set of a zero-one label is the half of the segment where it has the majority") {
  auto loss = zoo::zero_one(2);
  auto level = level_set(loss, loss.report_index("1"));
  CHECK(level.full_dimensional);
  CHECK(level.region.contains_point(Vec{q(1, 2), q(1, 2)}));
  CHECK(level.region.contains_point(Vec{q(3, 4), q(1, 4)}));
  CHECK_FALSE(level.region.contains_point(Vec{q(1, 4), q(3, 4)}));
}

TEST_CASE("abstaining with two labels is optimal at a single point") {
  auto loss = zoo::abstain(2);
  auto level = level_set(loss, loss.report_index("abstain"));
  CHECK_FALSE(level.full_dimensional);
  auto vertices = polyhedron_vertices(level.region);
  REQUIRE(vertices.vertices.size() == 1);
  CHECK(vertices.vertices.front() == Vec{q(1, 2), q(1, 2)});
}

TEST_CASE("duplicated reports share their level set") {
  auto loss = from_rows({{q(0), q(1)}, {q(1), q(0)}, {q(0), q(1)}});
  auto a = level_set(loss, 0).region;
  auto b = level_set(loss, 2).region;
  CHECK(contains(a, b));
  CHECK(contains(b, a));
  CHECK_THROWS_AS(loss.report_index("missing"), UnknownReport);
  CHECK_THROWS_AS(level_set(loss, 7), UnknownReport);
}

TEST_CASE("abstain cell for three labels is the triangle of half-mass midpoints") {
  auto loss = zoo::abstain(3);
  auto level = level_set(loss, loss.report_index("abstain"));
  auto vertices = polyhedron_vertices(level.region);
  CHECK_FALSE(vertices.has_rays);
  std::vector<Vec> expected{{q(0), q(1, 2), q(1, 2)}, {q(1, 2), q(0), q(1, 2)}, {q(1, 2), q(1, 2), q(0)}};
  std::sort(expected.begin(), expected.end(), LexLess{});
  CHECK(vertices.vertices == expected);

  auto inside = relative_interior_point(level.region);
  REQUIRE(inside);
  for (const auto& v : *inside) {
    CHECK(sgn(v) > 0);
    CHECK(v < q(1, 2));
  }
}

TEST_CASE("abstain cell for four labels is not inside a zero-one mode cell") {
  auto abstain = zoo::abstain(4);
  auto zero_one = zoo::zero_one(4);
  CHECK_FALSE(contains(level_set(zero_one, 0).region, level_set(abstain, abstain.report_index("abstain")).region));
}

TEST_CASE("trim drops the loss vector optimal only at the midpoint") {
  auto loss = from_rows({{q(0), q(2)}, {q(1), q(1)}, {q(2), q(0)}});
  auto t = trim(loss);
  CHECK(t.vectors == std::vector<Vec>{{q(0), q(2)}, {q(2), q(0)}});
  CHECK(t.reports == std::vector<std::size_t>{0, 2});
}

TEST_CASE("trim keeps one copy of repeated rows, the earliest") {
  auto t = trim(from_rows({{q(1), q(0)}, {q(0), q(1)}, {q(1), q(0)}}));
  CHECK(t.vectors.size() == 2);
  CHECK(t.reports == std::vector<std::size_t>{0, 1});
}

TEST_CASE("abstaining is redundant with two labels") {
  auto t = trim(zoo::abstain(2));
  CHECK(t.vectors == std::vector<Vec>{{q(0), q(1)}, {q(1), q(0)}});
}

TEST_CASE("trim agrees with the vectors that win strictly at sampled distributions") {
  Sampler sampler(5);
  for (const auto& loss : small_zoo()) {
    std::set<Vec, LexLess> winners;
    for (int k = 0; k < 3000; ++k) {
      Vec p = sampler.distribution(loss.outcome_count());
      auto risk = bayes_risk(loss, p);
      std::set<Vec, LexLess> here;
      for (auto r : risk.argmin) here.insert(loss.loss(r));
      if (here.size() == 1) winners.insert(*here.begin());
    }
    auto t = trim(loss);
    CHECK(std::set<Vec, LexLess>(t.vectors.begin(), t.vectors.end()) == winners);
  }
}

TEST_CASE("trimming the trimmed loss changes nothing") {
  for (const auto& loss : small_zoo()) {
    auto once = trim(loss);
    auto twice = trim(loss.restricted(once.reports));
    CHECK(once.vectors == twice.vectors);
  }
}

TEST_CASE("equal full-dimensional level sets come from equal loss vectors") {
  for (const auto& loss : small_zoo()) {
    std::vector<LevelSet> levels;
    for (std::size_t r = 0; r < loss.report_count(); ++r) {
      auto level = level_set(loss, r);
      if (level.full_dimensional) levels.push_back(std::move(level));
    }
    for (std::size_t i = 0; i < levels.size(); ++i) {
      for (std::size_t j = i + 1; j < levels.size(); ++j) {
        bool same = contains(levels[i].region, levels[j].region) && contains(levels[j].region, levels[i].region);
        if (same) CHECK(loss.loss(levels[i].report) == loss.loss(levels[j].report));
      }
    }
  }
}

TEST_CASE("redundancy report classifications") {
  SUBCASE("abstain with four labels keeps every report") {
    for (const auto& entry : redundancy_report(zoo::abstain(4))) CHECK(entry.status == Redundancy::Kept);
  }
  SUBCASE("abstain with two labels is strictly inside a label cell") {
    auto loss = zoo::abstain(2);
    auto report = redundancy_report(loss);
    auto& entry = report[loss.report_index("abstain")];
    CHECK(entry.status == Redundancy::StrictlyRedundant);
    REQUIRE(entry.other);
    CHECK(*entry.other < 2);
  }
  SUBCASE("a single report is kept") {
    auto report = redundancy_report(from_rows({{q(1), q(1)}}));
    CHECK(report.front().status == Redundancy::Kept);
  }
  SUBCASE("a repeated row points at its first copy") {
    auto report = redundancy_report(from_rows({{q(1), q(0)}, {q(0), q(1)}, {q(1), q(0)}}));
    CHECK(report[2].status == Redundancy::Duplicate);
    CHECK(report[2].other == std::optional<std::size_t>(0));
  }
}

TEST_CASE("every distribution lies in some level set") {
  Sampler sampler(3);
  for (const auto& loss : {zoo::abstain(3), zoo::top_k(4, 2), zoo::ordered_partition(3)}) {
    std::vector<Polyhedron> regions;
    for (std::size_t r = 0; r < loss.report_count(); ++r) regions.push_back(level_set(loss, r).region);
    for (int k = 0; k < 1000; ++k) {
      Vec p = k % 3 ? sampler.distribution(loss.outcome_count()) : sampler.sparse_distribution(loss.outcome_count());
      CHECK(std::any_of(regions.begin(), regions.end(), [&](const Polyhedron& g) { return g.contains_point(p); }));
    }
  }
}

TEST_CASE("cell complex face counts match a grid census") {
  // Grids fine enough to hit every vertex of these complexes.
  CHECK(cell_complex(zoo::zero_one(2)).faces.size() == 5);
  CHECK(grid_face_count(zoo::zero_one(2), 12) == 5);
  CHECK(cell_complex(zoo::abstain(3)).faces.size() == 19);
  CHECK(grid_face_count(zoo::abstain(3), 12) == 19);
  CHECK(cell_complex(zoo::zero_one(3)).faces.size() == grid_face_count(zoo::zero_one(3), 12));
  CHECK(cell_complex(zoo::abstain(4)).faces.size() == grid_face_count(zoo::abstain(4), 12));
  CHECK(cell_complex(zoo::ordered_partition(3)).faces.size() == grid_face_count(zoo::ordered_partition(3), 12));
}

TEST_CASE("a loss with one trim vector splits the simplex only by support") {
  auto complex = cell_complex(from_rows({{q(1), q(1)}, {q(2), q(1)}}));
  CHECK(complex.trimmed.vectors.size() == 1);
  CHECK(complex.faces.size() == 3);
  CHECK(complex.faces.front().dimension == 1);
}

TEST_CASE("optimal reports and support are constant inside every face") {
  Sampler sampler(17);
  for (const auto& loss : {zoo::abstain(3), zoo::zero_one(3), zoo::top_k(4, 2)}) {
    auto complex = cell_complex(loss);
    auto corners = complex.vertex_points();
    for (const auto& face : complex.faces) {
      CHECK(face.closure.contains_point(face.witness));
      CHECK(bayes_risk(loss, face.witness).argmin == face.optimal_reports);
      // Positive combinations of all vertices of a polytope lie in its relative interior.
      for (int k = 0; k < 10; ++k) {
        Vec weights = sampler.distribution(face.vertices.size());
        Vec p = zeros(loss.outcome_count());
        for (std::size_t i = 0; i < face.vertices.size(); ++i) {
          p = add(p, scale(complex.faces[face.vertices[i]].witness, weights[i]));
        }
        CHECK(bayes_risk(loss, p).argmin == face.optimal_reports);
        std::vector<std::size_t> support;
        for (std::size_t y = 0; y < p.size(); ++y) {
          if (sgn(p[y]) > 0) support.push_back(y);
        }
        CHECK(support == face.support);
      }
    }
    CHECK(std::is_sorted(complex.faces.begin(), complex.faces.end(),
                         [](const SimplexFace& a, const SimplexFace& b) { return a.dimension > b.dimension; }));
    for (const auto& c : corners) CHECK(sum(c) == 1);
  }
}

TEST_CASE("cell complex guard") {
  CHECK_THROWS_AS(cell_complex(zoo::ordered_partition(3), 5), GuardExceeded);
}

TEST_CASE("discrete loss construction rejects malformed input") {
  CHECK_THROWS_AS(DiscreteLoss({"a"}, {"r"}, {{q(0)}}), DomainError);
  CHECK_THROWS_AS(DiscreteLoss({"a", "b"}, {}, {}), DomainError);
  CHECK_THROWS_AS(DiscreteLoss({"a", "b"}, {"r", "r"}, {{q(0), q(1)}, {q(1), q(0)}}), DomainError);
  CHECK_THROWS_AS(DiscreteLoss({"a", "b"}, {"r"}, {{q(0), q(-1)}}), DomainError);
  CHECK_THROWS_AS(DiscreteLoss({"a", "b"}, {"r"}, {{q(0)}}), DomainError);
}

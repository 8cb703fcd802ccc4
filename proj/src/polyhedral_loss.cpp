#include "polyembed/polyhedral_loss.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "polyembed/errors.hpp"

namespace polyembed {

PolyhedralLoss::PolyhedralLoss(std::size_t dimension, std::vector<std::string> outcomes,
                               std::vector<std::vector<AffinePiece>> pieces)
    : dimension_(dimension), outcomes_(std::move(outcomes)) {
  if (pieces.size() != outcomes_.size()) throw DomainError("one piece list per outcome is required");
  for (std::size_t y = 0; y < pieces.size(); ++y) {
    if (pieces[y].empty()) throw DomainError("outcome '" + outcomes_[y] + "' has no pieces");
    std::vector<AffinePiece> unique;
    std::set<Vec, LexLess> seen;
    for (auto& piece : pieces[y]) {
      if (piece.slope.size() != dimension_) throw DomainError("piece slope has the wrong dimension");
      Vec key = piece.slope;
      key.push_back(piece.intercept);
      if (seen.insert(std::move(key)).second) unique.push_back(std::move(piece));
    }
    // min t subject to t >= <a,u> + c over all pieces must be bounded and nonnegative.
    Polyhedron epigraph(dimension_ + 1);
    for (const auto& piece : unique) {
      Vec normal = piece.slope;
      normal.push_back(-1);
      epigraph.add_inequality(std::move(normal), -piece.intercept);
    }
    auto low = lp_solve(unit_vector(dimension_ + 1, dimension_), Sense::Minimize, epigraph);
    if (!low.optimal() || sgn(low.value) < 0) {
      throw DomainError("loss on outcome '" + outcomes_[y] + "' takes negative values");
    }
    pieces_.push_back(std::move(unique));
  }
}

std::size_t PolyhedralLoss::piece_count() const {
  std::size_t total = 0;
  for (const auto& list : pieces_) total += list.size();
  return total;
}

Vec PolyhedralLoss::eval(std::span<const Rational> u) const {
  Vec out(outcomes_.size());
  for (std::size_t y = 0; y < pieces_.size(); ++y) {
    bool first = true;
    for (const auto& piece : pieces_[y]) {
      Rational value = dot(piece.slope, u) + piece.intercept;
      if (first || value > out[y]) out[y] = std::move(value);
      first = false;
    }
  }
  return out;
}

Rational PolyhedralLoss::expected(std::span<const Rational> p, std::span<const Rational> u) const {
  return dot(p, eval(u));
}

Matrix lineality_space(const PolyhedralLoss& loss) {
  Matrix slopes;
  for (std::size_t y = 0; y < loss.outcome_count(); ++y) {
    for (const auto& piece : loss.pieces(y)) slopes.push_back(piece.slope);
  }
  return null_space(std::move(slopes), loss.dimension());
}

Vec Quotient::lift(std::span<const Rational> v) const { return multiply(section, v); }

Vec Quotient::project(std::span<const Rational> u) const { return multiply(projection, u); }

namespace {

Matrix identity_matrix(std::size_t d) {
  Matrix m;
  for (std::size_t i = 0; i < d; ++i) m.push_back(unit_vector(d, i));
  return m;
}

}  // namespace

Quotient quotient(const PolyhedralLoss& loss) {
  const std::size_t d = loss.dimension();
  if (lineality_space(loss).empty()) {
    return Quotient{loss, identity_matrix(d), identity_matrix(d), true};
  }
  Matrix slopes;
  for (std::size_t y = 0; y < loss.outcome_count(); ++y) {
    for (const auto& piece : loss.pieces(y)) slopes.push_back(piece.slope);
  }
  // Rows of `basis` span the orthogonal complement of the lineality space.
  Matrix basis = row_basis(std::move(slopes));
  const std::size_t r = basis.size();
  Matrix gram(r, Vec(r));
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < r; ++j) gram[i][j] = dot(basis[i], basis[j]);
  }
  // projection = gram^{-1} * basis, solved column by column.
  Matrix projection(r, Vec(d));
  for (std::size_t c = 0; c < d; ++c) {
    Vec rhs(r);
    for (std::size_t i = 0; i < r; ++i) rhs[i] = basis[i][c];
    auto column = solve_square(gram, rhs);
    for (std::size_t i = 0; i < r; ++i) projection[i][c] = (*column)[i];
  }
  std::vector<std::vector<AffinePiece>> pieces(loss.outcome_count());
  for (std::size_t y = 0; y < loss.outcome_count(); ++y) {
    for (const auto& piece : loss.pieces(y)) pieces[y].push_back({multiply(basis, piece.slope), piece.intercept});
  }
  return Quotient{PolyhedralLoss(r, loss.outcomes(), std::move(pieces)), transpose(basis, d), std::move(projection),
                  false};
}

std::string point_name(std::span<const Rational> u) { return to_string(u); }

DiscreteLoss restrict_to(const PolyhedralLoss& loss, std::span<const Vec> points) {
  std::vector<std::string> names;
  Matrix rows;
  for (const auto& u : points) {
    names.push_back(point_name(u));
    rows.push_back(loss.eval(u));
  }
  return DiscreteLoss(loss.outcomes(), std::move(names), std::move(rows));
}

SurrogateRisk surrogate_risk(const PolyhedralLoss& loss, std::span<const Rational> p) {
  require_distribution(p, loss.outcome_count());
  const std::size_t d = loss.dimension();
  const std::size_t n = loss.outcome_count();
  Polyhedron epigraph(d + n);
  for (std::size_t y = 0; y < n; ++y) {
    for (const auto& piece : loss.pieces(y)) {
      Vec normal = piece.slope;
      normal.resize(d + n);
      normal[d + y] = -1;
      epigraph.add_inequality(std::move(normal), -piece.intercept);
    }
  }
  Vec objective = zeros(d + n);
  for (std::size_t y = 0; y < n; ++y) objective[d + y] = p[y];
  auto best = lp_solve(objective, Sense::Minimize, epigraph);
  return {best.value, Vec(best.witness.begin(), best.witness.begin() + static_cast<std::ptrdiff_t>(d))};
}

Polyhedron optimal_set(const PolyhedralLoss& loss, std::span<const Rational> p) {
  require_distribution(p, loss.outcome_count());
  const std::size_t d = loss.dimension();
  std::vector<std::size_t> support;
  for (std::size_t y = 0; y < p.size(); ++y) {
    if (sgn(p[y]) > 0) support.push_back(y);
  }
  const std::size_t m = support.size();
  // Variables (u, t_k) for outcomes k in the support.
  Polyhedron face(d + m);
  Vec objective = zeros(d + m);
  for (std::size_t k = 0; k < m; ++k) {
    objective[d + k] = p[support[k]];
    for (const auto& piece : loss.pieces(support[k])) {
      Vec normal = piece.slope;
      normal.resize(d + m);
      normal[d + k] = -1;
      face.add_inequality(std::move(normal), -piece.intercept);
    }
  }
  auto best = lp_solve(objective, Sense::Minimize, face);
  face.add_inequality(objective, best.value);

  // Pieces tight on the whole optimal face become equalities, so each t_k
  // is eliminated by substitution.
  auto implied = implicit_equalities(face);
  Polyhedron sharp(d + m);
  for (std::size_t i = 0; i < face.inequalities().size(); ++i) {
    const auto& c = face.inequalities()[i];
    if (std::binary_search(implied.begin(), implied.end(), i)) {
      sharp.add_equality(c.normal, c.offset);
    } else {
      sharp.add_inequality(c.normal, c.offset);
    }
  }
  std::vector<std::size_t> drop;
  for (std::size_t k = 0; k < m; ++k) drop.push_back(d + k);
  return fourier_motzkin_eliminate(sharp, drop);
}

namespace {

struct Representatives {
  std::vector<Vec> points;
  DiscreteLoss embedded;
  SimplexComplex complex;
};

bool is_refinement_vertex(const PolyhedralLoss& loss, std::span<const Rational> u) {
  const std::size_t d = loss.dimension();
  Matrix directions;
  for (std::size_t y = 0; y < loss.outcome_count(); ++y) {
    const auto& pieces = loss.pieces(y);
    std::vector<Rational> values;
    Rational top;
    for (std::size_t j = 0; j < pieces.size(); ++j) {
      values.push_back(dot(pieces[j].slope, u) + pieces[j].intercept);
      if (j == 0 || values[j] > top) top = values[j];
    }
    std::optional<std::size_t> anchor;
    for (std::size_t j = 0; j < pieces.size(); ++j) {
      if (values[j] != top) continue;
      if (!anchor) {
        anchor = j;
      } else {
        directions.push_back(subtract(pieces[j].slope, pieces[*anchor].slope));
      }
    }
  }
  return rank(std::move(directions)) == d;
}

Representatives build_representatives(const PolyhedralLoss& loss, const GeometryLimits& limits) {
  const std::size_t d = loss.dimension();
  std::vector<Vec> points;
  if (d == 0) {
    points.emplace_back();
  } else {
    std::set<Constraint, bool (*)(const Constraint&, const Constraint&)> planes(
        [](const Constraint& a, const Constraint& b) {
          if (a.normal != b.normal) return lex_less(a.normal, b.normal);
          return a.offset < b.offset;
        });
    for (std::size_t y = 0; y < loss.outcome_count(); ++y) {
      const auto& pieces = loss.pieces(y);
      for (std::size_t j = 0; j < pieces.size(); ++j) {
        for (std::size_t k = j + 1; k < pieces.size(); ++k) {
          Vec normal = subtract(pieces[j].slope, pieces[k].slope);
          auto lead = std::find_if(normal.begin(), normal.end(), [](const Rational& v) { return sgn(v) != 0; });
          if (lead == normal.end()) continue;
          Rational offset = pieces[k].intercept - pieces[j].intercept;
          Rational factor = 1 / *lead;
          for (auto& v : normal) v *= factor;
          offset *= factor;
          planes.insert({std::move(normal), std::move(offset)});
        }
      }
    }
    std::vector<Constraint> list(planes.begin(), planes.end());
    const std::size_t h = list.size();
    double subsets = 1;
    for (std::size_t i = 0; i < d; ++i) subsets = subsets * static_cast<double>(h - i) / static_cast<double>(i + 1);
    if (h >= d && subsets > static_cast<double>(limits.max_subsets)) {
      throw GuardExceeded("representative set needs " + std::to_string(static_cast<long long>(subsets)) +
                          " hyperplane subsets");
    }
    std::set<Vec, LexLess> found;
    if (h >= d) {
      std::vector<std::size_t> pick(d);
      for (std::size_t i = 0; i < d; ++i) pick[i] = i;
      for (;;) {
        Matrix system;
        Vec rhs;
        for (auto i : pick) {
          system.push_back(list[i].normal);
          rhs.push_back(list[i].offset);
        }
        if (auto x = solve_square(std::move(system), std::move(rhs)); x && !found.count(*x)) {
          if (is_refinement_vertex(loss, *x)) found.insert(std::move(*x));
        }
        std::size_t pos = d;
        while (pos > 0 && pick[pos - 1] == h - d + pos - 1) --pos;
        if (pos == 0) break;
        ++pick[pos - 1];
        for (std::size_t j = pos; j < d; ++j) pick[j] = pick[j - 1] + 1;
      }
    }
    if (found.empty()) {
      throw NotRepresentative("the linearity regions have no vertices; quotient the lineality space first");
    }
    points.assign(found.begin(), found.end());
  }

  DiscreteLoss embedded = restrict_to(loss, points);
  SimplexComplex complex = cell_complex(embedded);
  // Both risks are concave and the embedded one is affine on every cell, so
  // agreement at the cell vertices gives agreement everywhere.
  for (const auto& q : complex.vertex_points()) {
    if (surrogate_risk(loss, q).value != bayes_risk(embedded, q).value) {
      throw NotRepresentative("the vertex set misses the optimum at p = " + to_string(q));
    }
  }
  return {std::move(points), std::move(embedded), std::move(complex)};
}

}  // namespace

std::vector<Vec> representative_set(const PolyhedralLoss& loss, const GeometryLimits& limits) {
  return build_representatives(loss, limits).points;
}

OptimalSetFamily optimal_set_range(const PolyhedralLoss& loss, const SimplexComplex& complex) {
  OptimalSetFamily family;
  std::map<std::vector<std::size_t>, std::vector<std::size_t>> by_optimal_points;
  for (std::size_t f = 0; f < complex.faces.size(); ++f) {
    const auto& face = complex.faces[f];
    Polyhedron candidate = optimal_set(loss, face.witness);
    auto& group = by_optimal_points[face.optimal_reports];
    std::optional<std::size_t> match;
    for (auto id : group) {
      if (contains(family.members[id], candidate) && contains(candidate, family.members[id])) {
        match = id;
        break;
      }
    }
    if (!match) {
      match = family.members.size();
      family.members.push_back(std::move(candidate));
      family.member_faces.emplace_back();
      group.push_back(*match);
    }
    family.face_member.push_back(*match);
    family.member_faces[*match].push_back(f);
  }
  return family;
}

Analysis analyze(const PolyhedralLoss& loss, bool auto_quotient, const GeometryLimits& limits) {
  Quotient q = auto_quotient ? quotient(loss)
                             : Quotient{loss, identity_matrix(loss.dimension()), identity_matrix(loss.dimension()), true};
  auto reps = build_representatives(q.reduced, limits);
  return Analysis{std::move(q), std::move(reps.points), std::move(reps.embedded), std::move(reps.complex)};
}

}  // namespace polyembed

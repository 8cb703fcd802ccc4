#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "polyembed/rational.hpp"

namespace polyembed {

// One linear constraint <normal, x> (<= or ==) offset.
struct Constraint {
  Vec normal;
  Rational offset;

  friend bool operator==(const Constraint&, const Constraint&) = default;
};

// H-representation {x : A x <= b, E x = f}.
class Polyhedron {
 public:
  Polyhedron() = default;
  explicit Polyhedron(std::size_t dimension) : dimension_(dimension) {}
  Polyhedron(std::size_t dimension, std::vector<Constraint> inequalities,
             std::vector<Constraint> equalities = {});

  static Polyhedron point(std::span<const Rational> x);

  std::size_t dimension() const { return dimension_; }
  const std::vector<Constraint>& inequalities() const { return inequalities_; }
  const std::vector<Constraint>& equalities() const { return equalities_; }

  void add_inequality(Vec normal, Rational offset);
  void add_equality(Vec normal, Rational offset);

  bool contains_point(std::span<const Rational> x) const;
  Polyhedron intersect(const Polyhedron& other) const;
  // Pullback {x : map * x in this}, for a linear map with dimension() rows.
  Polyhedron pullback(const Matrix& map, std::size_t source_dimension) const;

 private:
  std::size_t dimension_ = 0;
  std::vector<Constraint> inequalities_;
  std::vector<Constraint> equalities_;
};

enum class Norm { Infinity, L1 };

enum class Sense { Minimize, Maximize };

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpOutcome {
  LpStatus status = LpStatus::Infeasible;
  Rational value;
  Vec witness;

  bool optimal() const { return status == LpStatus::Optimal; }
};

// Exact two-phase simplex with Bland's rule over free variables.
LpOutcome lp_solve(std::span<const Rational> objective, Sense sense, const Polyhedron& region);

bool is_empty(const Polyhedron& region);

struct VertexEnumeration {
  std::vector<Vec> vertices;  // lexicographically sorted
  bool has_rays = false;
};

struct GeometryLimits {
  std::size_t max_dimension = 6;
  std::size_t max_subsets = 1'000'000;
  std::size_t max_constraints = 100'000;
};

VertexEnumeration polyhedron_vertices(const Polyhedron& region, const GeometryLimits& limits = {});

// Indices of inequalities that hold with equality on all of the region.
std::vector<std::size_t> implicit_equalities(const Polyhedron& region);

// Point maximizing the smallest slack among inequalities that are not
// implied equalities; nothing when the region is empty.
std::optional<Vec> relative_interior_point(const Polyhedron& region);

// Affine dimension of a nonempty region, or -1 when empty.
int affine_dimension(const Polyhedron& region);

// Whether inner is a subset of outer.
bool contains(const Polyhedron& outer, const Polyhedron& inner);

// Nothing stands for an infinite distance (empty region).
std::optional<Rational> distance(std::span<const Rational> point, const Polyhedron& region, Norm norm);

// Smallest distance between points of two regions.
std::optional<Rational> set_distance(const Polyhedron& lhs, const Polyhedron& rhs, Norm norm);

struct MinMax {
  Rational value;
  Vec point;
};

// min over u of the largest distance from u to a member; nothing when a member is empty.
std::optional<MinMax> minmax_distance(std::span<const Polyhedron> family, Norm norm);

// Projection onto the coordinates not listed in `eliminate`, kept in order.
Polyhedron fourier_motzkin_eliminate(const Polyhedron& region, std::span<const std::size_t> eliminate,
                                     const GeometryLimits& limits = {});

// Drop duplicate, trivial and LP-redundant inequalities.
Polyhedron remove_redundancy(const Polyhedron& region);

// Closed norm ball thickening {x : dist(x, region) <= radius}.
Polyhedron thicken(const Polyhedron& region, const Rational& radius, Norm norm);

}  // namespace polyembed

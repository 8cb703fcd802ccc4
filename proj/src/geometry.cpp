#include <algorithm>
#include <map>
#include <set>

#include "polyembed/errors.hpp"
#include "polyembed/geometry.hpp"

namespace polyembed {

Polyhedron::Polyhedron(std::size_t dimension, std::vector<Constraint> inequalities,
                       std::vector<Constraint> equalities)
    : dimension_(dimension), inequalities_(std::move(inequalities)), equalities_(std::move(equalities)) {}

Polyhedron Polyhedron::point(std::span<const Rational> x) {
  Polyhedron p(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) p.add_equality(unit_vector(x.size(), i), x[i]);
  return p;
}

void Polyhedron::add_inequality(Vec normal, Rational offset) {
  inequalities_.push_back({std::move(normal), std::move(offset)});
}

void Polyhedron::add_equality(Vec normal, Rational offset) {
  equalities_.push_back({std::move(normal), std::move(offset)});
}

bool Polyhedron::contains_point(std::span<const Rational> x) const {
  for (const auto& c : inequalities_) {
    if (dot(c.normal, x) > c.offset) return false;
  }
  for (const auto& c : equalities_) {
    if (dot(c.normal, x) != c.offset) return false;
  }
  return true;
}

Polyhedron Polyhedron::intersect(const Polyhedron& other) const {
  Polyhedron out = *this;
  for (const auto& c : other.inequalities_) out.inequalities_.push_back(c);
  for (const auto& c : other.equalities_) out.equalities_.push_back(c);
  return out;
}

Polyhedron Polyhedron::pullback(const Matrix& map, std::size_t source_dimension) const {
  auto pull = [&](const Constraint& c) {
    Vec normal = zeros(source_dimension);
    for (std::size_t i = 0; i < map.size(); ++i) {
      if (sgn(c.normal[i]) == 0) continue;
      for (std::size_t j = 0; j < source_dimension; ++j) normal[j] += c.normal[i] * map[i][j];
    }
    return Constraint{std::move(normal), c.offset};
  };
  Polyhedron out(source_dimension);
  for (const auto& c : inequalities_) out.inequalities_.push_back(pull(c));
  for (const auto& c : equalities_) out.equalities_.push_back(pull(c));
  return out;
}

namespace {

// Copy `source` into coordinates [offset, offset + source.dimension()) of `target`.
void embed_block(Polyhedron& target, const Polyhedron& source, std::size_t offset) {
  auto widen = [&](const Constraint& c) {
    Vec normal = zeros(target.dimension());
    for (std::size_t j = 0; j < c.normal.size(); ++j) normal[offset + j] = c.normal[j];
    return normal;
  };
  for (const auto& c : source.inequalities()) target.add_inequality(widen(c), c.offset);
  for (const auto& c : source.equalities()) target.add_equality(widen(c), c.offset);
}

Vec padded(std::size_t size, std::initializer_list<std::pair<std::size_t, Rational>> entries) {
  Vec v = zeros(size);
  for (const auto& [i, value] : entries) v[i] += value;
  return v;
}

struct InteriorSearch {
  std::vector<std::size_t> implied;
  Vec point;
};

std::optional<InteriorSearch> search_interior(const Polyhedron& region) {
  const std::size_t d = region.dimension();
  auto feasible = lp_solve(zeros(d), Sense::Minimize, region);
  if (!feasible.optimal()) return std::nullopt;
  const auto& ineqs = region.inequalities();
  std::vector<std::size_t> candidates(ineqs.size());
  for (std::size_t i = 0; i < ineqs.size(); ++i) candidates[i] = i;
  std::vector<std::size_t> implied;
  Vec point = feasible.witness;
  while (!candidates.empty()) {
    // Variables (x, s): maximize s with slack s on every candidate inequality.
    Polyhedron lifted(d + 1);
    for (auto i : candidates) {
      Vec normal = ineqs[i].normal;
      normal.push_back(1);
      lifted.add_inequality(std::move(normal), ineqs[i].offset);
    }
    for (auto i : implied) {
      Vec normal = ineqs[i].normal;
      normal.push_back(0);
      lifted.add_equality(std::move(normal), ineqs[i].offset);
    }
    for (const auto& e : region.equalities()) {
      Vec normal = e.normal;
      normal.push_back(0);
      lifted.add_equality(std::move(normal), e.offset);
    }
    lifted.add_inequality(unit_vector(d + 1, d), 1);
    auto best = lp_solve(unit_vector(d + 1, d), Sense::Maximize, lifted);
    point.assign(best.witness.begin(), best.witness.begin() + static_cast<std::ptrdiff_t>(d));
    if (sgn(best.value) > 0) break;

    Polyhedron current(d);
    for (auto i : implied) current.add_equality(ineqs[i].normal, ineqs[i].offset);
    for (const auto& e : region.equalities()) current.add_equality(e.normal, e.offset);
    for (auto i : candidates) current.add_inequality(ineqs[i].normal, ineqs[i].offset);
    std::vector<std::size_t> remaining;
    for (auto i : candidates) {
      if (dot(ineqs[i].normal, point) < ineqs[i].offset) {
        remaining.push_back(i);
        continue;
      }
      auto low = lp_solve(ineqs[i].normal, Sense::Minimize, current);
      if (low.optimal() && low.value == ineqs[i].offset) {
        implied.push_back(i);
      } else {
        remaining.push_back(i);
      }
    }
    candidates = std::move(remaining);
  }
  std::sort(implied.begin(), implied.end());
  return InteriorSearch{std::move(implied), std::move(point)};
}

Constraint normalized(Constraint c) {
  auto it = std::find_if(c.normal.begin(), c.normal.end(), [](const Rational& v) { return sgn(v) != 0; });
  if (it == c.normal.end()) return c;
  Rational factor = 1 / abs(*it);
  for (auto& v : c.normal) v *= factor;
  c.offset *= factor;
  return c;
}

struct ConstraintLess {
  bool operator()(const Constraint& a, const Constraint& b) const {
    if (a.normal != b.normal) return lex_less(a.normal, b.normal);
    return a.offset < b.offset;
  }
};

Polyhedron empty_region(std::size_t d) {
  Polyhedron p(d);
  p.add_inequality(zeros(d), -1);
  return p;
}

// Normalize, drop trivial rows, and keep only the tightest of parallel duplicates.
std::optional<Polyhedron> tidy(const Polyhedron& region) {
  const std::size_t d = region.dimension();
  std::map<Vec, Rational, LexLess> tightest;
  for (const auto& raw : region.inequalities()) {
    auto c = normalized(raw);
    if (is_zero(c.normal)) {
      if (sgn(c.offset) < 0) return std::nullopt;
      continue;
    }
    auto [it, inserted] = tightest.emplace(c.normal, c.offset);
    if (!inserted && c.offset < it->second) it->second = c.offset;
  }
  std::set<Constraint, ConstraintLess> eqs;
  for (const auto& raw : region.equalities()) {
    auto c = normalized(raw);
    if (is_zero(c.normal)) {
      if (sgn(c.offset) != 0) return std::nullopt;
      continue;
    }
    eqs.insert(std::move(c));
  }
  Polyhedron out(d);
  for (auto& [normal, offset] : tightest) out.add_inequality(normal, offset);
  for (const auto& c : eqs) out.add_equality(c.normal, c.offset);
  return out;
}

}  // namespace

bool is_empty(const Polyhedron& region) {
  return !lp_solve(zeros(region.dimension()), Sense::Minimize, region).optimal();
}

VertexEnumeration polyhedron_vertices(const Polyhedron& region, const GeometryLimits& limits) {
  const std::size_t d = region.dimension();
  if (d > limits.max_dimension) {
    throw GuardExceeded("vertex enumeration limited to dimension " + std::to_string(limits.max_dimension));
  }
  VertexEnumeration result;
  if (is_empty(region)) return result;
  for (std::size_t i = 0; i < d && !result.has_rays; ++i) {
    for (auto sense : {Sense::Maximize, Sense::Minimize}) {
      if (lp_solve(unit_vector(d, i), sense, region).status == LpStatus::Unbounded) {
        result.has_rays = true;
        break;
      }
    }
  }

  Matrix augmented;
  for (const auto& e : region.equalities()) {
    Vec row = e.normal;
    row.push_back(e.offset);
    augmented.push_back(std::move(row));
  }
  Matrix eq_rows = row_basis(augmented);
  const std::size_t eq_rank = eq_rows.size();
  if (eq_rank > d) return result;
  const std::size_t k = d - eq_rank;
  const auto& ineqs = region.inequalities();
  const std::size_t m = ineqs.size();
  if (k > m) return result;

  double subsets = 1;
  for (std::size_t i = 0; i < k; ++i) subsets = subsets * static_cast<double>(m - i) / static_cast<double>(i + 1);
  if (subsets > static_cast<double>(limits.max_subsets)) {
    throw GuardExceeded("vertex enumeration exceeds " + std::to_string(limits.max_subsets) + " subsets");
  }

  std::set<Vec, LexLess> found;
  std::vector<std::size_t> pick(k);
  for (std::size_t i = 0; i < k; ++i) pick[i] = i;
  for (;;) {
    Matrix system;
    Vec rhs;
    for (const auto& row : eq_rows) {
      system.emplace_back(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(d));
      rhs.push_back(row[d]);
    }
    for (auto i : pick) {
      system.push_back(ineqs[i].normal);
      rhs.push_back(ineqs[i].offset);
    }
    if (auto x = solve_square(std::move(system), std::move(rhs)); x && region.contains_point(*x)) {
      found.insert(std::move(*x));
    }
    std::size_t pos = k;
    while (pos > 0 && pick[pos - 1] == m - k + pos - 1) --pos;
    if (pos == 0) break;
    ++pick[pos - 1];
    for (std::size_t j = pos; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
  result.vertices.assign(found.begin(), found.end());
  return result;
}

std::vector<std::size_t> implicit_equalities(const Polyhedron& region) {
  auto search = search_interior(region);
  if (!search) {
    std::vector<std::size_t> all(region.inequalities().size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return all;
  }
  return search->implied;
}

std::optional<Vec> relative_interior_point(const Polyhedron& region) {
  auto search = search_interior(region);
  if (!search) return std::nullopt;
  return search->point;
}

int affine_dimension(const Polyhedron& region) {
  auto search = search_interior(region);
  if (!search) return -1;
  Matrix normals;
  for (const auto& e : region.equalities()) normals.push_back(e.normal);
  for (auto i : search->implied) normals.push_back(region.inequalities()[i].normal);
  return static_cast<int>(region.dimension() - rank(std::move(normals)));
}

bool contains(const Polyhedron& outer, const Polyhedron& inner) {
  if (is_empty(inner)) return true;
  for (const auto& c : outer.inequalities()) {
    auto high = lp_solve(c.normal, Sense::Maximize, inner);
    if (!high.optimal() || high.value > c.offset) return false;
  }
  for (const auto& c : outer.equalities()) {
    for (auto sense : {Sense::Maximize, Sense::Minimize}) {
      auto extreme = lp_solve(c.normal, sense, inner);
      if (!extreme.optimal() || extreme.value != c.offset) return false;
    }
  }
  return true;
}

namespace {

// Add constraints bounding the norm of (x - y) by the variable at `bound`,
// using auxiliary variables starting at `aux` for the 1-norm.
void add_norm_bound(Polyhedron& p, std::size_t d, std::size_t x, std::optional<std::size_t> y,
                    std::span<const Rational> fixed_y, std::size_t bound, std::size_t aux, Norm norm) {
  const std::size_t n = p.dimension();
  for (std::size_t i = 0; i < d; ++i) {
    const std::size_t slack = norm == Norm::Infinity ? bound : aux + i;
    Rational rhs = y ? Rational(0) : fixed_y[i];
    Vec up = padded(n, {{x + i, 1}, {slack, -1}});
    Vec down = padded(n, {{x + i, -1}, {slack, -1}});
    if (y) {
      up[*y + i] -= 1;
      down[*y + i] += 1;
    }
    p.add_inequality(std::move(up), rhs);
    p.add_inequality(std::move(down), -rhs);
  }
  if (norm == Norm::L1) {
    Vec total = zeros(n);
    for (std::size_t i = 0; i < d; ++i) total[aux + i] = 1;
    total[bound] = -1;
    p.add_inequality(std::move(total), 0);
  }
}

}  // namespace

std::optional<Rational> distance(std::span<const Rational> point, const Polyhedron& region, Norm norm) {
  if (region.contains_point(point)) return Rational(0);
  const std::size_t d = region.dimension();
  // Variables: x (d), t, and d auxiliaries for the 1-norm.
  const std::size_t n = 2 * d + 1;
  Polyhedron lifted(n);
  embed_block(lifted, region, 0);
  add_norm_bound(lifted, d, 0, std::nullopt, point, d, d + 1, norm);
  auto best = lp_solve(unit_vector(n, d), Sense::Minimize, lifted);
  if (!best.optimal()) return std::nullopt;
  return best.value;
}

std::optional<Rational> set_distance(const Polyhedron& lhs, const Polyhedron& rhs, Norm norm) {
  const std::size_t d = lhs.dimension();
  // Variables: x (d), y (d), t, auxiliaries (d).
  const std::size_t n = 3 * d + 1;
  Polyhedron lifted(n);
  embed_block(lifted, lhs, 0);
  embed_block(lifted, rhs, d);
  add_norm_bound(lifted, d, 0, d, {}, 2 * d, 2 * d + 1, norm);
  auto best = lp_solve(unit_vector(n, 2 * d), Sense::Minimize, lifted);
  if (!best.optimal()) return std::nullopt;
  return best.value;
}

std::optional<MinMax> minmax_distance(std::span<const Polyhedron> family, Norm norm) {
  if (family.empty()) return std::nullopt;
  const std::size_t d = family.front().dimension();
  // Variables: u (d), t, then per member x_k (d) and auxiliaries (d).
  const std::size_t block = 2 * d;
  const std::size_t n = d + 1 + family.size() * block;
  Polyhedron lifted(n);
  for (std::size_t k = 0; k < family.size(); ++k) {
    const std::size_t x = d + 1 + k * block;
    embed_block(lifted, family[k], x);
    add_norm_bound(lifted, d, x, 0, {}, d, x + d, norm);
  }
  auto best = lp_solve(unit_vector(n, d), Sense::Minimize, lifted);
  if (!best.optimal()) return std::nullopt;
  return MinMax{best.value, Vec(best.witness.begin(), best.witness.begin() + static_cast<std::ptrdiff_t>(d))};
}

Polyhedron remove_redundancy(const Polyhedron& region) {
  const std::size_t d = region.dimension();
  auto cleaned = tidy(region);
  if (!cleaned || is_empty(*cleaned)) return empty_region(d);

  Matrix augmented;
  for (const auto& e : cleaned->equalities()) {
    Vec row = e.normal;
    row.push_back(e.offset);
    augmented.push_back(std::move(row));
  }
  std::vector<Constraint> eqs;
  for (auto& row : row_basis(augmented)) {
    Rational offset = row.back();
    row.pop_back();
    eqs.push_back(normalized({std::move(row), std::move(offset)}));
  }

  std::vector<Constraint> kept = cleaned->inequalities();
  for (std::size_t i = 0; i < kept.size();) {
    Polyhedron others(d, {}, eqs);
    for (std::size_t j = 0; j < kept.size(); ++j) {
      if (j != i) others.add_inequality(kept[j].normal, kept[j].offset);
    }
    auto high = lp_solve(kept[i].normal, Sense::Maximize, others);
    if (high.optimal() && high.value <= kept[i].offset) {
      kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      ++i;
    }
  }
  return Polyhedron(d, std::move(kept), std::move(eqs));
}

Polyhedron fourier_motzkin_eliminate(const Polyhedron& region, std::span<const std::size_t> eliminate,
                                     const GeometryLimits& limits) {
  const std::size_t d = region.dimension();
  std::vector<Constraint> ineqs = region.inequalities();
  std::vector<Constraint> eqs = region.equalities();
  for (auto v : eliminate) {
    auto pivot = std::find_if(eqs.begin(), eqs.end(), [&](const Constraint& c) { return sgn(c.normal[v]) != 0; });
    if (pivot != eqs.end()) {
      Constraint e = *pivot;
      eqs.erase(pivot);
      auto substitute = [&](Constraint& c) {
        if (sgn(c.normal[v]) == 0) return;
        Rational f = c.normal[v] / e.normal[v];
        for (std::size_t j = 0; j < d; ++j) c.normal[j] -= f * e.normal[j];
        c.offset -= f * e.offset;
      };
      for (auto& c : ineqs) substitute(c);
      for (auto& c : eqs) substitute(c);
      continue;
    }
    std::vector<Constraint> next, upper, lower;
    for (auto& c : ineqs) {
      int s = sgn(c.normal[v]);
      (s == 0 ? next : s > 0 ? upper : lower).push_back(std::move(c));
    }
    if (next.size() + upper.size() * lower.size() > limits.max_constraints) {
      throw GuardExceeded("Fourier-Motzkin elimination exceeds " + std::to_string(limits.max_constraints) +
                          " constraints");
    }
    for (const auto& u : upper) {
      for (const auto& l : lower) {
        Rational a = -l.normal[v];
        const Rational& b = u.normal[v];
        Constraint c{Vec(d), a * u.offset + b * l.offset};
        for (std::size_t j = 0; j < d; ++j) c.normal[j] = a * u.normal[j] + b * l.normal[j];
        c.normal[v] = 0;
        next.push_back(std::move(c));
      }
    }
    ineqs = std::move(next);
    if (!upper.empty() && !lower.empty()) {
      auto pruned = remove_redundancy(Polyhedron(d, std::move(ineqs), eqs));
      ineqs = pruned.inequalities();
      eqs = pruned.equalities();
    }
  }
  std::vector<bool> dropped(d, false);
  for (auto v : eliminate) dropped[v] = true;
  auto shrink = [&](const Constraint& c) {
    Constraint out{{}, c.offset};
    for (std::size_t j = 0; j < d; ++j) {
      if (!dropped[j]) out.normal.push_back(c.normal[j]);
    }
    return out;
  };
  std::size_t kept_dim = static_cast<std::size_t>(std::count(dropped.begin(), dropped.end(), false));
  Polyhedron projected(kept_dim);
  for (const auto& c : ineqs) {
    auto s = shrink(c);
    projected.add_inequality(std::move(s.normal), std::move(s.offset));
  }
  for (const auto& c : eqs) {
    auto s = shrink(c);
    projected.add_equality(std::move(s.normal), std::move(s.offset));
  }
  return remove_redundancy(projected);
}

Polyhedron thicken(const Polyhedron& region, const Rational& radius, Norm norm) {
  const std::size_t d = region.dimension();
  // Variables: u (d), x (d), auxiliaries (d) for the 1-norm; radius is a constant.
  const std::size_t n = 3 * d;
  Polyhedron lifted(n);
  embed_block(lifted, region, d);
  for (std::size_t i = 0; i < d; ++i) {
    if (norm == Norm::Infinity) {
      lifted.add_inequality(padded(n, {{i, 1}, {d + i, -1}}), radius);
      lifted.add_inequality(padded(n, {{i, -1}, {d + i, 1}}), radius);
    } else {
      lifted.add_inequality(padded(n, {{i, 1}, {d + i, -1}, {2 * d + i, -1}}), 0);
      lifted.add_inequality(padded(n, {{i, -1}, {d + i, 1}, {2 * d + i, -1}}), 0);
    }
  }
  if (norm == Norm::L1) {
    Vec total = zeros(n);
    for (std::size_t i = 0; i < d; ++i) total[2 * d + i] = 1;
    lifted.add_inequality(std::move(total), radius);
  }
  std::vector<std::size_t> drop;
  for (std::size_t j = d; j < n; ++j) drop.push_back(j);
  return fourier_motzkin_eliminate(lifted, drop);
}

}  // namespace polyembed

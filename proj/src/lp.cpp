#include <algorithm>

#include "polyembed/geometry.hpp"

namespace polyembed {

namespace {

// Dense tableau for min c^T z, M z = rhs, z >= 0 with rhs >= 0.
class Tableau {
 public:
  Tableau(Matrix rows, std::vector<std::size_t> basis, std::size_t columns)
      : rows_(std::move(rows)), basis_(std::move(basis)), columns_(columns) {}

  // Reduced costs for `cost` given the current basis; cost has columns_ entries.
  void price(const Vec& cost) {
    objective_ = Vec(columns_ + 1);
    for (std::size_t j = 0; j < columns_; ++j) objective_[j] = cost[j];
    objective_[columns_] = 0;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const Rational& cb = cost[basis_[i]];
      if (sgn(cb) == 0) continue;
      const Vec& row = rows_[i];
      for (std::size_t j = 0; j <= columns_; ++j) {
        if (sgn(row[j]) != 0) objective_[j] -= cb * row[j];
      }
    }
  }

  // Bland's rule over columns below `limit`; false when unbounded.
  bool run(std::size_t limit) {
    for (;;) {
      std::size_t entering = limit;
      for (std::size_t j = 0; j < limit; ++j) {
        if (sgn(objective_[j]) < 0) {
          entering = j;
          break;
        }
      }
      if (entering == limit) return true;
      std::size_t leaving = rows_.size();
      Rational best;
      for (std::size_t i = 0; i < rows_.size(); ++i) {
        const Rational& a = rows_[i][entering];
        if (sgn(a) <= 0) continue;
        Rational ratio = rows_[i][columns_] / a;
        if (leaving == rows_.size() || ratio < best || (ratio == best && basis_[i] < basis_[leaving])) {
          leaving = i;
          best = std::move(ratio);
        }
      }
      if (leaving == rows_.size()) return false;
      pivot(leaving, entering);
    }
  }

  void pivot(std::size_t r, std::size_t c) {
    Vec& prow = rows_[r];
    if (prow[c] != 1) {
      Rational inv = 1 / prow[c];
      for (auto& v : prow) {
        if (sgn(v) != 0) v *= inv;
      }
    }
    std::vector<std::size_t> support;
    for (std::size_t j = 0; j <= columns_; ++j) {
      if (sgn(prow[j]) != 0) support.push_back(j);
    }
    auto eliminate = [&](Vec& row) {
      if (sgn(row[c]) == 0) return;
      Rational f = row[c];
      for (auto j : support) row[j] -= f * prow[j];
    };
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (i != r) eliminate(rows_[i]);
    }
    eliminate(objective_);
    basis_[r] = c;
  }

  // Negated objective value.
  const Rational& objective_rhs() const { return objective_[columns_]; }

  // Pivot artificial columns (>= first_artificial) out of the basis and drop them.
  void remove_artificials(std::size_t first_artificial) {
    for (std::size_t i = 0; i < rows_.size();) {
      if (basis_[i] < first_artificial) {
        ++i;
        continue;
      }
      std::size_t k = first_artificial;
      for (std::size_t j = 0; j < first_artificial; ++j) {
        if (sgn(rows_[i][j]) != 0) {
          k = j;
          break;
        }
      }
      if (k == first_artificial) {
        rows_.erase(rows_.begin() + static_cast<std::ptrdiff_t>(i));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(i));
        continue;
      }
      pivot(i, k);
      ++i;
    }
    for (auto& row : rows_) {
      Rational rhs = row[columns_];
      row.resize(first_artificial + 1);
      row[first_artificial] = std::move(rhs);
    }
    columns_ = first_artificial;
  }

  Vec solution() const {
    Vec z = zeros(columns_);
    for (std::size_t i = 0; i < rows_.size(); ++i) z[basis_[i]] = rows_[i][columns_];
    return z;
  }

 private:
  Matrix rows_;
  std::vector<std::size_t> basis_;
  std::size_t columns_;
  Vec objective_;
};

}  // namespace

LpOutcome lp_solve(std::span<const Rational> objective, Sense sense, const Polyhedron& region) {
  const std::size_t d = region.dimension();
  const auto& ineqs = region.inequalities();
  const auto& eqs = region.equalities();
  const std::size_t structural = 2 * d + ineqs.size();
  const std::size_t m = ineqs.size() + eqs.size();

  Matrix rows;
  rows.reserve(m);
  std::vector<bool> needs_artificial;
  auto build_row = [&](const Constraint& c, std::size_t slack) {
    Vec row(structural + 1);
    bool negate = sgn(c.offset) < 0;
    for (std::size_t j = 0; j < d; ++j) {
      if (sgn(c.normal[j]) == 0) continue;
      row[2 * j] = negate ? Rational(-c.normal[j]) : c.normal[j];
      row[2 * j + 1] = -row[2 * j];
    }
    if (slack < structural) row[slack] = negate ? -1 : 1;
    row[structural] = negate ? Rational(-c.offset) : c.offset;
    rows.push_back(std::move(row));
    needs_artificial.push_back(negate || slack == structural);
  };
  for (std::size_t i = 0; i < ineqs.size(); ++i) build_row(ineqs[i], 2 * d + i);
  for (const auto& e : eqs) build_row(e, structural);

  std::size_t artificials = static_cast<std::size_t>(std::count(needs_artificial.begin(), needs_artificial.end(), true));
  const std::size_t columns = structural + artificials;
  std::vector<std::size_t> basis(m);
  std::size_t next = structural;
  for (std::size_t i = 0; i < m; ++i) {
    Rational rhs = rows[i][structural];
    rows[i].resize(columns + 1);
    rows[i][columns] = std::move(rhs);
    if (columns > structural) rows[i][structural] = 0;
    if (needs_artificial[i]) {
      rows[i][next] = 1;
      basis[i] = next++;
    } else {
      basis[i] = 2 * d + i;
    }
  }
  Tableau tableau(std::move(rows), std::move(basis), columns);
  LpOutcome outcome;
  if (artificials > 0) {
    Vec phase_one = zeros(columns);
    for (std::size_t j = structural; j < columns; ++j) phase_one[j] = 1;
    tableau.price(phase_one);
    tableau.run(columns);
    if (sgn(tableau.objective_rhs()) != 0) {
      outcome.status = LpStatus::Infeasible;
      return outcome;
    }
    tableau.remove_artificials(structural);
  }

  Vec cost = zeros(structural);
  const bool maximize = sense == Sense::Maximize;
  for (std::size_t j = 0; j < d; ++j) {
    cost[2 * j] = maximize ? Rational(-objective[j]) : objective[j];
    cost[2 * j + 1] = -cost[2 * j];
  }
  tableau.price(cost);
  if (!tableau.run(structural)) {
    outcome.status = LpStatus::Unbounded;
    return outcome;
  }
  Vec z = tableau.solution();
  outcome.witness = Vec(d);
  for (std::size_t j = 0; j < d; ++j) outcome.witness[j] = z[2 * j] - z[2 * j + 1];
  outcome.value = dot(objective, outcome.witness);
  outcome.status = LpStatus::Optimal;
  return outcome;
}

}  // namespace polyembed

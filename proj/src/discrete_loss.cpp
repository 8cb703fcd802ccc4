#include "polyembed/discrete_loss.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "polyembed/errors.hpp"

namespace polyembed {

DiscreteLoss::DiscreteLoss(std::vector<std::string> outcomes, std::vector<std::string> reports, Matrix losses)
    : outcomes_(std::move(outcomes)), reports_(std::move(reports)), losses_(std::move(losses)) {
  if (outcomes_.size() < 2) throw DomainError("a discrete loss needs at least two outcomes");
  if (reports_.empty()) throw DomainError("a discrete loss needs at least one report");
  if (losses_.size() != reports_.size()) throw DomainError("one loss row per report is required");
  std::set<std::string> seen;
  for (std::size_t r = 0; r < reports_.size(); ++r) {
    if (!seen.insert(reports_[r]).second) throw DomainError("duplicate report name '" + reports_[r] + "'");
    if (losses_[r].size() != outcomes_.size()) throw DomainError("row '" + reports_[r] + "' has the wrong length");
    for (const auto& v : losses_[r]) {
      if (sgn(v) < 0) throw DomainError("row '" + reports_[r] + "' has a negative entry");
    }
  }
}

std::size_t DiscreteLoss::report_index(std::string_view name) const {
  auto it = std::find(reports_.begin(), reports_.end(), name);
  if (it == reports_.end()) throw UnknownReport("unknown report '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - reports_.begin());
}

DiscreteLoss DiscreteLoss::restricted(std::span<const std::size_t> reports) const {
  std::vector<std::string> names;
  Matrix rows;
  for (auto r : reports) {
    names.push_back(reports_.at(r));
    rows.push_back(losses_.at(r));
  }
  return DiscreteLoss(outcomes_, std::move(names), std::move(rows));
}

DiscreteLoss DiscreteLoss::scaled(const Rational& factor) const {
  Matrix rows;
  for (const auto& row : losses_) rows.push_back(scale(row, factor));
  return DiscreteLoss(outcomes_, reports_, std::move(rows));
}

void require_distribution(std::span<const Rational> p, std::size_t outcomes) {
  if (p.size() != outcomes) throw NotADistribution("distribution has the wrong length");
  for (const auto& v : p) {
    if (sgn(v) < 0) throw NotADistribution("distribution has a negative entry");
  }
  if (sum(p) != 1) throw NotADistribution("distribution does not sum to one");
}

Polyhedron probability_simplex(std::size_t n) {
  Polyhedron p(n);
  for (std::size_t y = 0; y < n; ++y) p.add_inequality(scale(unit_vector(n, y), -1), 0);
  p.add_equality(Vec(n, Rational(1)), 1);
  return p;
}

BayesRisk bayes_risk(const DiscreteLoss& loss, std::span<const Rational> p) {
  require_distribution(p, loss.outcome_count());
  BayesRisk risk;
  for (std::size_t r = 0; r < loss.report_count(); ++r) {
    Rational value = dot(p, loss.loss(r));
    if (risk.argmin.empty() || value < risk.value) {
      risk.value = std::move(value);
      risk.argmin = {r};
    } else if (value == risk.value) {
      risk.argmin.push_back(r);
    }
  }
  return risk;
}

namespace {

// Region {p in simplex : <p, v - w> <= 0 for w in rivals}.
Polyhedron optimality_region(const Vec& v, std::span<const Vec* const> rivals) {
  const std::size_t n = v.size();
  Polyhedron region = probability_simplex(n);
  for (const Vec* w : rivals) {
    if (*w != v) region.add_inequality(subtract(v, *w), 0);
  }
  return region;
}

// Whether some p in the relative interior of the simplex makes v strictly
// better than every rival; rivals enter the LP lazily.
bool strictly_optimal_somewhere(const Vec& v, std::span<const Vec* const> rivals) {
  const std::size_t n = v.size();
  std::vector<const Vec*> active;
  for (;;) {
    // Variables (p, s): maximize s.
    Polyhedron lifted(n + 1);
    Vec total(n + 1, Rational(1));
    total[n] = 0;
    lifted.add_equality(std::move(total), 1);
    for (std::size_t y = 0; y < n; ++y) {
      Vec row = zeros(n + 1);
      row[y] = -1;
      row[n] = 1;
      lifted.add_inequality(std::move(row), 0);
    }
    for (const Vec* w : active) {
      Vec row = subtract(v, *w);
      row.push_back(1);
      lifted.add_inequality(std::move(row), 0);
    }
    lifted.add_inequality(unit_vector(n + 1, n), 1);
    auto best = lp_solve(unit_vector(n + 1, n), Sense::Maximize, lifted);
    if (!best.optimal() || sgn(best.value) <= 0) return false;
    Vec p(best.witness.begin(), best.witness.begin() + static_cast<std::ptrdiff_t>(n));
    std::vector<std::pair<Rational, const Vec*>> violated;
    for (const Vec* w : rivals) {
      if (*w == v) continue;
      Rational gap = dot(p, subtract(v, *w));
      if (sgn(gap) >= 0) violated.emplace_back(std::move(gap), w);
    }
    if (violated.empty()) return true;
    std::stable_sort(violated.begin(), violated.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    const std::size_t take = std::min<std::size_t>(violated.size(), 2 * n);
    for (std::size_t i = 0; i < take; ++i) active.push_back(violated[i].second);
  }
}

bool dominated(const Vec& v, const Vec& w) {
  if (v == w) return false;
  for (std::size_t y = 0; y < v.size(); ++y) {
    if (w[y] > v[y]) return false;
  }
  return true;
}

std::vector<const Vec*> pointers(const std::vector<Vec>& vectors) {
  std::vector<const Vec*> out;
  for (const auto& v : vectors) out.push_back(&v);
  return out;
}

}  // namespace

LevelSet level_set(const DiscreteLoss& loss, std::size_t report) {
  if (report >= loss.report_count()) throw UnknownReport("report index out of range");
  std::vector<const Vec*> rivals;
  for (const auto& row : loss.matrix()) rivals.push_back(&row);
  LevelSet level;
  level.report = report;
  level.region = optimality_region(loss.loss(report), rivals);
  level.full_dimensional = strictly_optimal_somewhere(loss.loss(report), rivals);
  return level;
}

Trim trim(const DiscreteLoss& loss) {
  std::vector<Vec> distinct;
  std::vector<std::size_t> first;
  {
    std::set<Vec, LexLess> seen;
    for (std::size_t r = 0; r < loss.report_count(); ++r) {
      if (seen.insert(loss.loss(r)).second) {
        distinct.push_back(loss.loss(r));
        first.push_back(r);
      }
    }
  }
  std::vector<const Vec*> candidates;
  for (const auto& v : distinct) {
    bool beaten = std::any_of(distinct.begin(), distinct.end(), [&](const Vec& w) { return dominated(v, w); });
    if (!beaten) candidates.push_back(&v);
  }
  Trim result;
  for (std::size_t i = 0; i < distinct.size(); ++i) {
    if (std::find(candidates.begin(), candidates.end(), &distinct[i]) == candidates.end()) continue;
    if (strictly_optimal_somewhere(distinct[i], candidates)) {
      result.vectors.push_back(distinct[i]);
      result.reports.push_back(first[i]);
    }
  }
  return result;
}

std::vector<RedundancyEntry> redundancy_report(const DiscreteLoss& loss) {
  auto kept = trim(loss);
  auto rivals = pointers(kept.vectors);
  std::vector<Polyhedron> cells;
  for (const auto& v : kept.vectors) cells.push_back(optimality_region(v, rivals));

  std::vector<RedundancyEntry> report(loss.report_count());
  for (std::size_t r = 0; r < loss.report_count(); ++r) {
    const Vec& v = loss.loss(r);
    auto it = std::find(kept.vectors.begin(), kept.vectors.end(), v);
    if (it != kept.vectors.end()) {
      std::size_t rep = kept.reports[static_cast<std::size_t>(it - kept.vectors.begin())];
      report[r] = rep == r ? RedundancyEntry{Redundancy::Kept, std::nullopt}
                           : RedundancyEntry{Redundancy::Duplicate, rep};
      continue;
    }
    // Level sets are determined by the Bayes risk, so trimmed rivals suffice.
    Polyhedron own = optimality_region(v, rivals);
    report[r].status = Redundancy::StrictlyRedundant;
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (contains(cells[k], own)) {
        report[r].other = kept.reports[k];
        break;
      }
    }
  }
  return report;
}

std::vector<Vec> SimplexComplex::vertex_points() const {
  std::vector<Vec> out;
  for (const auto& f : faces) {
    if (f.dimension == 0) out.push_back(f.witness);
  }
  return out;
}

namespace {

using FaceKey = std::pair<std::vector<std::size_t>, std::vector<std::size_t>>;

FaceKey key_at(const std::vector<Vec>& vectors, std::span<const Rational> p) {
  FaceKey key;
  Rational best;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    Rational value = dot(p, vectors[i]);
    if (key.first.empty() || value < best) {
      best = std::move(value);
      key.first = {i};
    } else if (value == best) {
      key.first.push_back(i);
    }
  }
  for (std::size_t y = 0; y < p.size(); ++y) {
    if (sgn(p[y]) > 0) key.second.push_back(y);
  }
  return key;
}

Polyhedron face_region(const std::vector<Vec>& vectors, const FaceKey& key, std::size_t n) {
  Polyhedron region(n);
  region.add_equality(Vec(n, Rational(1)), 1);
  std::size_t at = 0;
  for (std::size_t y = 0; y < n; ++y) {
    if (at < key.second.size() && key.second[at] == y) {
      region.add_inequality(scale(unit_vector(n, y), -1), 0);
      ++at;
    } else {
      region.add_equality(unit_vector(n, y), 0);
    }
  }
  const Vec& anchor = vectors[key.first.front()];
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (std::binary_search(key.first.begin(), key.first.end(), i)) {
      if (i != key.first.front()) region.add_equality(subtract(anchor, vectors[i]), 0);
    } else {
      region.add_inequality(subtract(anchor, vectors[i]), 0);
    }
  }
  return region;
}

int face_dimension(const std::vector<Vec>& vectors, const FaceKey& key) {
  Matrix rows;
  rows.emplace_back(key.second.size(), Rational(1));
  const Vec& anchor = vectors[key.first.front()];
  for (auto i : key.first) {
    Vec row;
    for (auto y : key.second) row.push_back(vectors[i][y] - anchor[y]);
    rows.push_back(std::move(row));
  }
  return static_cast<int>(key.second.size()) - static_cast<int>(rank(std::move(rows)));
}

}  // namespace

SimplexComplex cell_complex(const DiscreteLoss& loss, std::size_t max_trim) {
  const std::size_t n = loss.outcome_count();
  SimplexComplex complex;
  complex.trimmed = trim(loss);
  const auto& vectors = complex.trimmed.vectors;
  if (vectors.size() > max_trim) {
    throw GuardExceeded("cell complex limited to " + std::to_string(max_trim) + " trim vectors");
  }
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    for (std::size_t j = i + 1; j < vectors.size(); ++j) complex.hyperplanes.emplace_back(i, j);
  }

  std::map<FaceKey, Vec> found;
  std::deque<FaceKey> queue;
  auto visit = [&](const Polyhedron& region) {
    auto witness = relative_interior_point(region);
    if (!witness) return;
    auto key = key_at(vectors, *witness);
    if (found.emplace(key, *witness).second) queue.push_back(std::move(key));
  };
  std::vector<std::size_t> everyone(n);
  for (std::size_t y = 0; y < n; ++y) everyone[y] = y;
  for (std::size_t i = 0; i < vectors.size(); ++i) visit(face_region(vectors, {{i}, everyone}, n));

  while (!queue.empty()) {
    FaceKey key = queue.front();
    queue.pop_front();
    Polyhedron region = face_region(vectors, key, n);
    const Vec& anchor = vectors[key.first.front()];
    for (std::size_t c = 0; c < vectors.size(); ++c) {
      if (std::binary_search(key.first.begin(), key.first.end(), c)) continue;
      Polyhedron tighter = region;
      tighter.add_equality(subtract(anchor, vectors[c]), 0);
      visit(tighter);
    }
    if (key.second.size() > 1) {
      for (auto y : key.second) {
        Polyhedron tighter = region;
        tighter.add_equality(unit_vector(n, y), 0);
        visit(tighter);
      }
    }
  }

  for (auto& [key, witness] : found) {
    SimplexFace face;
    face.cells = key.first;
    face.support = key.second;
    face.dimension = face_dimension(vectors, key);
    face.closure = face_region(vectors, key, n);
    face.optimal_reports = bayes_risk(loss, witness).argmin;
    face.witness = witness;
    complex.faces.push_back(std::move(face));
  }
  std::stable_sort(complex.faces.begin(), complex.faces.end(),
                   [](const SimplexFace& a, const SimplexFace& b) { return a.dimension > b.dimension; });
  std::vector<std::size_t> zero_dim;
  for (std::size_t f = 0; f < complex.faces.size(); ++f) {
    if (complex.faces[f].dimension == 0) zero_dim.push_back(f);
  }
  for (auto& face : complex.faces) {
    for (auto v : zero_dim) {
      if (face.closure.contains_point(complex.faces[v].witness)) face.vertices.push_back(v);
    }
  }
  return complex;
}

}  // namespace polyembed

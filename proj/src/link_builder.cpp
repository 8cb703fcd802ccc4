#include "polyembed/link_builder.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "polyembed/errors.hpp"

namespace polyembed {

SurrogateGeometry surrogate_geometry(const PolyhedralLoss& surrogate, const GeometryLimits& limits) {
  Analysis analysis = analyze(surrogate, true, limits);
  OptimalSetFamily family = optimal_set_range(analysis.reduced(), analysis.complex);
  std::vector<Polyhedron> members;
  for (const auto& m : family.members) {
    members.push_back(analysis.quotient.identity ? m
                                                 : m.pullback(analysis.quotient.projection, surrogate.dimension()));
  }
  return {surrogate, std::move(analysis), std::move(family), std::move(members)};
}

ReportSets report_sets_from_embedding(const SurrogateGeometry& geometry, const EmbeddingMap& map) {
  ReportSets sets(geometry.members.size());
  for (std::size_t m = 0; m < sets.size(); ++m) {
    for (std::size_t i = 0; i < map.reports.size(); ++i) {
      if (geometry.members[m].contains_point(map.points[i])) sets[m].push_back(map.reports[i]);
    }
    std::sort(sets[m].begin(), sets[m].end());
  }
  return sets;
}

ReportSets report_sets_from_property(const SurrogateGeometry& geometry, const DiscreteLoss& target) {
  const auto& complex = geometry.analysis.complex;
  if (target.outcomes() != geometry.surrogate.outcomes()) {
    throw DomainError("surrogate and target use different outcome labels");
  }
  // Each member's distributions are a union of relatively open faces whose
  // closures are polytopes, so containment in a level set is decided at vertices.
  std::map<std::size_t, std::vector<std::size_t>> optimal_at;
  auto optimal = [&](std::size_t vertex) -> const std::vector<std::size_t>& {
    auto it = optimal_at.find(vertex);
    if (it == optimal_at.end()) {
      it = optimal_at.emplace(vertex, bayes_risk(target, complex.faces[vertex].witness).argmin).first;
    }
    return it->second;
  };
  ReportSets sets(geometry.members.size());
  for (std::size_t m = 0; m < sets.size(); ++m) {
    std::vector<std::size_t> allowed(target.report_count());
    for (std::size_t r = 0; r < allowed.size(); ++r) allowed[r] = r;
    for (auto f : geometry.family.member_faces[m]) {
      for (auto v : complex.faces[f].vertices) {
        const auto& here = optimal(v);
        std::vector<std::size_t> kept;
        std::set_intersection(allowed.begin(), allowed.end(), here.begin(), here.end(), std::back_inserter(kept));
        allowed = std::move(kept);
      }
    }
    sets[m] = std::move(allowed);
  }
  return sets;
}

namespace {

std::vector<std::size_t> meet(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::vector<std::size_t> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<std::size_t> all_reports(std::size_t count) {
  std::vector<std::size_t> out(count);
  for (std::size_t r = 0; r < count; ++r) out[r] = r;
  return out;
}

// Lazily computed pairwise relations between members.
class PairCache {
 public:
  PairCache(const std::vector<Polyhedron>& members, Norm norm)
      : members_(members), norm_(norm), distance_(members.size() * members.size()) {}

  const Rational& distance(std::size_t i, std::size_t j) {
    if (i > j) std::swap(i, j);
    auto& slot = distance_[i * members_.size() + j];
    if (!slot) slot = *set_distance(members_[i], members_[j], norm_);
    return *slot;
  }

  bool meets(std::size_t i, std::size_t j) { return sgn(distance(i, j)) == 0; }

 private:
  const std::vector<Polyhedron>& members_;
  Norm norm_;
  std::vector<std::optional<Rational>> distance_;
};

}  // namespace

ElicitationCheck indirect_elicitation_check(const ReportFamily& family) {
  const auto& members = family.members;
  ElicitationCheck check;
  for (std::size_t m = 0; m < members.size(); ++m) {
    if (family.report_sets[m].empty()) {
      check.holds = false;
      check.witness = {m};
      check.common_point = *relative_interior_point(members[m]);
      return check;
    }
  }
  PairCache pairs(members, Norm::Infinity);
  std::vector<std::size_t> chosen;
  // A minimal failing family shrinks the common report set with every member,
  // whatever the order, so only strictly shrinking extensions are explored.
  std::function<bool(std::size_t, const std::vector<std::size_t>&, const Polyhedron&)> search =
      [&](std::size_t from, const std::vector<std::size_t>& reports, const Polyhedron& common) {
        for (std::size_t j = from; j < members.size(); ++j) {
          auto next = meet(reports, family.report_sets[j]);
          if (next.size() == reports.size()) continue;
          bool pairwise = std::all_of(chosen.begin(), chosen.end(), [&](std::size_t i) { return pairs.meets(i, j); });
          if (!pairwise) continue;
          Polyhedron joint = common.intersect(members[j]);
          auto point = relative_interior_point(joint);
          if (!point) continue;
          chosen.push_back(j);
          if (next.empty()) {
            check.holds = false;
            check.witness = chosen;
            check.common_point = *point;
            return true;
          }
          if (search(j + 1, next, joint)) return true;
          chosen.pop_back();
        }
        return false;
      };
  for (std::size_t m = 0; m < members.size() && check.holds; ++m) {
    chosen = {m};
    search(m + 1, family.report_sets[m], members[m]);
  }
  return check;
}

EpsilonMax epsilon_max(const ReportFamily& family, Norm norm) {
  const auto& members = family.members;
  EpsilonMax best;
  for (std::size_t m = 0; m < members.size(); ++m) {
    if (family.report_sets[m].empty()) {
      best.value = Rational(0);
      best.family = {m};
      best.point = *relative_interior_point(members[m]);
      return best;
    }
  }
  PairCache pairs(members, norm);
  auto offer = [&](const std::vector<std::size_t>& chosen) {
    std::vector<Polyhedron> group;
    for (auto i : chosen) group.push_back(members[i]);
    auto found = minmax_distance(group, norm);
    if (!best.value || found->value < *best.value) {
      best.value = found->value;
      best.family = chosen;
      best.point = found->point;
    }
  };
  // Two-member families first: their value is half the set distance.
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      if (!meet(family.report_sets[i], family.report_sets[j]).empty()) continue;
      if (best.value && pairs.distance(i, j) / 2 >= *best.value) continue;
      offer({i, j});
    }
  }
  // Larger families: the value is at least half of every pairwise distance.
  std::vector<std::size_t> chosen;
  std::function<void(std::size_t, const std::vector<std::size_t>&, const Rational&)> search =
      [&](std::size_t from, const std::vector<std::size_t>& reports, const Rational& floor) {
        for (std::size_t j = from; j < members.size(); ++j) {
          auto next = meet(reports, family.report_sets[j]);
          if (next.size() == reports.size()) continue;
          if (chosen.size() == 1 && next.empty()) continue;  // pairs are done
          Rational bound = floor;
          bool pruned = false;
          for (auto i : chosen) {
            Rational half = pairs.distance(i, j) / 2;
            if (half > bound) bound = half;
            if (best.value && bound >= *best.value) {
              pruned = true;
              break;
            }
          }
          if (pruned) continue;
          chosen.push_back(j);
          if (next.empty()) {
            offer(chosen);
          } else {
            search(j + 1, next, bound);
          }
          chosen.pop_back();
        }
      };
  for (std::size_t m = 0; m < members.size(); ++m) {
    chosen = {m};
    search(m + 1, family.report_sets[m], Rational(0));
  }
  return best;
}

LinkArtifact::LinkArtifact(ReportFamily family, Norm norm, Rational epsilon, EpsilonMax bound)
    : family_(std::move(family)), norm_(norm), epsilon_(std::move(epsilon)), bound_(std::move(bound)) {
  if (sgn(epsilon_) <= 0) throw DomainError("the thickening radius must be positive");
  if (family_.members.size() != family_.report_sets.size()) throw DomainError("one report set per member is required");
  for (const auto& m : family_.members) thickened_.push_back(thicken(m, epsilon_, norm_));
}

std::size_t LinkArtifact::dimension() const {
  return family_.members.empty() ? 0 : family_.members.front().dimension();
}

bool LinkArtifact::near(std::size_t member, std::span<const Rational> u) const {
  // The open thickening is the interior of the closed one, which is full-dimensional.
  const auto& region = thickened_[member];
  for (const auto& c : region.inequalities()) {
    if (is_zero(c.normal)) continue;
    if (dot(c.normal, u) >= c.offset) return false;
  }
  for (const auto& c : region.equalities()) {
    if (dot(c.normal, u) != c.offset) return false;
  }
  return true;
}

std::vector<std::size_t> LinkArtifact::envelope(std::span<const Rational> u) const {
  auto allowed = all_reports(family_.reports.size());
  for (std::size_t m = 0; m < family_.members.size(); ++m) {
    if (near(m, u)) allowed = meet(allowed, family_.report_sets[m]);
  }
  if (allowed.empty()) throw EmptyEnvelope("no report is allowed at u = " + to_string(u) + "; lower epsilon");
  return allowed;
}

std::size_t LinkArtifact::link(std::span<const Rational> u) const { return envelope(u).front(); }

std::string LinkArtifact::link_name(std::span<const Rational> u) const { return family_.reports[link(u)]; }

ReportFamily report_family(const SurrogateGeometry& geometry, const DiscreteLoss& target, ReportSource source) {
  ReportFamily family;
  family.members = geometry.members;
  family.reports = target.reports();
  if (source == ReportSource::Embedding) {
    auto verdict = verify_embedding(geometry.analysis, target);
    if (!verdict.embeds) throw LinkError("the surrogate does not embed the target");
    family.report_sets = report_sets_from_embedding(geometry, verdict.map);
  } else {
    family.report_sets = report_sets_from_property(geometry, target);
  }
  return family;
}

LinkArtifact build_link(const SurrogateGeometry& geometry, const DiscreteLoss& target, const LinkOptions& options) {
  ReportFamily family = report_family(geometry, target, options.source);
  for (std::size_t m = 0; m < family.members.size(); ++m) {
    if (family.report_sets[m].empty()) {
      throw EmptyReportSet("no target report is optimal on all distributions with optimal set #" + std::to_string(m));
    }
  }
  auto check = indirect_elicitation_check(family);
  if (!check.holds) {
    std::string ids;
    for (auto m : check.witness) ids += (ids.empty() ? "#" : ", #") + std::to_string(m);
    throw IndirectElicitationFails("optimal sets " + ids + " meet at " + to_string(check.common_point) +
                                   " but share no report");
  }
  auto bound = epsilon_max(family, options.norm);
  Rational epsilon = options.epsilon ? *options.epsilon : bound.value ? Rational(*bound.value / 2) : Rational(1);
  return LinkArtifact(std::move(family), options.norm, std::move(epsilon), std::move(bound));
}

namespace {

Constraint normalized_line(const Constraint& c) {
  Constraint out = c;
  auto lead = std::find_if(out.normal.begin(), out.normal.end(), [](const Rational& v) { return sgn(v) != 0; });
  Rational factor = 1 / *lead;
  for (auto& v : out.normal) v *= factor;
  out.offset *= factor;
  return out;
}

struct ConstraintLess {
  bool operator()(const Constraint& a, const Constraint& b) const {
    if (a.normal != b.normal) return lex_less(a.normal, b.normal);
    return a.offset < b.offset;
  }
};

// Points probing every piece of the boundary arrangement in dimension 1 or 2.
std::vector<Vec> arrangement_points(const LinkArtifact& artifact) {
  const std::size_t d = artifact.dimension();
  std::set<Constraint, ConstraintLess> lines;
  auto collect = [&](const Polyhedron& region) {
    for (const auto* list : {&region.inequalities(), &region.equalities()}) {
      for (const auto& c : *list) {
        if (!is_zero(c.normal)) lines.insert(normalized_line(c));
      }
    }
  };
  for (const auto& m : artifact.family().members) collect(m);
  for (const auto& t : artifact.thickened()) collect(t);

  std::set<Vec, LexLess> points;
  if (d == 1) {
    std::vector<Rational> breaks;
    for (const auto& c : lines) breaks.push_back(c.offset / c.normal[0]);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    if (breaks.empty()) return {Vec{Rational(0)}};
    Rational gap = 1;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) gap = std::min(gap, Rational(breaks[i + 1] - breaks[i]));
    Rational delta = gap / 8;
    for (std::size_t i = 0; i < breaks.size(); ++i) {
      for (const Rational& x : {Rational(breaks[i] - delta), breaks[i], Rational(breaks[i] + delta)}) points.insert({x});
      if (i + 1 < breaks.size()) points.insert({(breaks[i] + breaks[i + 1]) / 2});
    }
    points.insert({breaks.front() - 1});
    points.insert({breaks.back() + 1});
    return {points.begin(), points.end()};
  }

  std::vector<Constraint> list(lines.begin(), lines.end());
  std::vector<std::vector<Vec>> on_line(list.size());
  std::set<Vec, LexLess> vertices;
  for (std::size_t i = 0; i < list.size(); ++i) {
    for (std::size_t j = i + 1; j < list.size(); ++j) {
      auto x = solve_square({list[i].normal, list[j].normal}, {list[i].offset, list[j].offset});
      if (!x) continue;
      on_line[i].push_back(*x);
      on_line[j].push_back(*x);
      vertices.insert(*x);
    }
  }
  Rational gap = 1;
  std::vector<Vec> sorted(vertices.begin(), vertices.end());
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    for (std::size_t j = i + 1; j < sorted.size(); ++j) {
      Rational spread = 0;
      for (std::size_t k = 0; k < 2; ++k) spread = std::max(spread, Rational(abs(sorted[i][k] - sorted[j][k])));
      if (spread < gap) gap = spread;
    }
  }
  Rational delta = gap / 8;
  static const int offsets[][2] = {{0, 0}, {1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
  for (const auto& v : sorted) {
    for (const auto& o : offsets) points.insert({v[0] + o[0] * delta, v[1] + o[1] * delta});
  }
  for (std::size_t i = 0; i < list.size(); ++i) {
    // Direction along the line and one point on it.
    Vec along{-list[i].normal[1], list[i].normal[0]};
    auto& here = on_line[i];
    if (here.empty()) {
      Vec base = sgn(list[i].normal[0]) != 0 ? Vec{list[i].offset / list[i].normal[0], 0}
                                              : Vec{0, list[i].offset / list[i].normal[1]};
      here.push_back(base);
    }
    std::sort(here.begin(), here.end(), [&](const Vec& a, const Vec& b) { return dot(a, along) < dot(b, along); });
    here.erase(std::unique(here.begin(), here.end()), here.end());
    for (std::size_t k = 0; k + 1 < here.size(); ++k) points.insert(scale(add(here[k], here[k + 1]), Rational(1, 2)));
    points.insert(subtract(here.front(), along));
    points.insert(add(here.back(), along));
  }
  return {points.begin(), points.end()};
}

// A distribution in the relative interior of a face of `member` at which
// `report` is not optimal for the target.
Vec refuting_distribution(const SurrogateGeometry& geometry, const DiscreteLoss& target, std::size_t member,
                          std::size_t report) {
  const auto& faces = geometry.analysis.complex.faces;
  for (auto f : geometry.family.member_faces[member]) {
    for (auto v : faces[f].vertices) {
      const Vec& corner = faces[v].witness;
      auto here = bayes_risk(target, corner).argmin;
      if (std::binary_search(here.begin(), here.end(), report)) continue;
      // Points between the corner and the face witness lie in the face; the
      // target level set is closed, so they leave it close to the corner.
      Rational t = 1;
      for (;;) {
        Vec p = add(corner, scale(subtract(faces[f].witness, corner), t));
        auto argmin = bayes_risk(target, p).argmin;
        if (!std::binary_search(argmin.begin(), argmin.end(), report)) return p;
        t /= 2;
      }
    }
  }
  return {};
}

}  // namespace

LinkVerification verify_proposed_link(const SurrogateGeometry& geometry, const DiscreteLoss& target,
                                      const Link& proposed, const VerifyOptions& options) {
  ReportFamily family = report_family(geometry, target, ReportSource::Property);
  LinkArtifact artifact(std::move(family), options.norm, options.epsilon, {});
  const auto& sets = artifact.family().report_sets;
  const std::size_t d = artifact.dimension();

  LinkVerification result;
  auto check = [&](const Vec& u) {
    ++result.points_checked;
    std::string name = proposed(u);
    std::size_t r = target.report_index(name);
    for (std::size_t m = 0; m < sets.size(); ++m) {
      if (std::binary_search(sets[m].begin(), sets[m].end(), r)) continue;
      if (!artifact.near(m, u)) continue;
      result.refuted = true;
      result.point = u;
      result.proposed = name;
      result.distribution = refuting_distribution(geometry, target, m, r);
      return false;
    }
    return true;
  };

  if (options.exact && d >= 1 && d <= 2) {
    for (const auto& u : arrangement_points(artifact)) {
      if (!check(u)) return result;
    }
    result.exhaustive = true;
  }

  std::vector<Vec> anchors;
  for (const auto& v : geometry.analysis.representatives) anchors.push_back(geometry.analysis.quotient.lift(v));
  std::int64_t radius = 2;
  for (const auto& a : anchors) {
    for (const auto& x : a) {
      Rational m = abs(x);
      std::int64_t ceiling = mpz_class(m.get_num() / m.get_den()).get_si() + 2;
      radius = std::max(radius, ceiling);
    }
  }
  Sampler sampler(options.seed);
  for (std::size_t s = 0; s < options.samples; ++s) {
    Vec u;
    if (s % 2 == 0 || anchors.empty()) {
      u = sampler.point(d, radius);
    } else {
      const Vec& a = anchors[sampler.below(anchors.size())];
      u = add(a, scale(sampler.point(d, 1), options.epsilon * 2));
    }
    if (!check(u)) return result;
  }
  return result;
}

EpsilonSearch certify_epsilon(const SurrogateGeometry& geometry, const DiscreteLoss& target, const Link& proposed,
                              VerifyOptions options, const Rational& upper, std::size_t rounds) {
  EpsilonSearch search;
  auto passes = [&](const Rational& eps) {
    options.epsilon = eps;
    ++search.rounds;
    return !verify_proposed_link(geometry, target, proposed, options).refuted;
  };
  if (passes(upper)) {
    search.epsilon = upper;
    return search;
  }
  // Separation is inherited by smaller radii, so the passing radii form an interval.
  Rational lo = 0, hi = upper;
  for (std::size_t i = 0; i < rounds; ++i) {
    Rational mid = (lo + hi) / 2;
    if (passes(mid)) {
      search.epsilon = mid;
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return search;
}

ConsistencyVerdict diagnose_consistency(const DiscreteLoss& embedded, const DiscreteLoss& target) {
  if (embedded.outcomes() != target.outcomes()) throw DomainError("losses use different outcome labels");
  const std::size_t n = embedded.outcome_count();
  const auto complex = cell_complex(embedded);
  const auto target_trim = trim(target);

  ConsistencyVerdict verdict;
  for (std::size_t i = 0; i < complex.trimmed.vectors.size(); ++i) {
    auto cell = std::find_if(complex.faces.begin(), complex.faces.end(), [&](const SimplexFace& f) {
      return f.dimension == static_cast<int>(n) - 1 && f.cells == std::vector<std::size_t>{i};
    });
    auto allowed = all_reports(target.report_count());
    for (auto v : cell->vertices) allowed = meet(allowed, bayes_risk(target, complex.faces[v].witness).argmin);
    if (!allowed.empty()) {
      verdict.good_cells.push_back(i);
      continue;
    }
    verdict.bad_cells.push_back(i);
    if (!verdict.calibrated) continue;
    verdict.calibrated = false;
    // Interior points of two full-dimensional overlaps with distinct target cells.
    std::vector<Vec> found;
    for (std::size_t k = 0; k < target_trim.reports.size() && found.size() < 2; ++k) {
      Polyhedron overlap = cell->closure.intersect(level_set(target, target_trim.reports[k]).region);
      if (affine_dimension(overlap) != static_cast<int>(n) - 1) continue;
      found.push_back(*relative_interior_point(overlap));
    }
    if (found.size() == 2) {
      verdict.witness = found[0];
      verdict.other_witness = found[1];
    }
  }
  return verdict;
}

}  // namespace polyembed

#include "polyembed/regret.hpp"

#include <algorithm>

#include "polyembed/errors.hpp"

namespace polyembed {

Rational max_loss_gap(const DiscreteLoss& loss) {
  Rational widest = 0;
  for (std::size_t y = 0; y < loss.outcome_count(); ++y) {
    Rational lo = loss.loss(0)[y], hi = lo;
    for (const auto& row : loss.matrix()) {
      lo = std::min(lo, row[y]);
      hi = std::max(hi, row[y]);
    }
    widest = std::max(widest, Rational(hi - lo));
  }
  return widest;
}

namespace {

// One-sided derivative of u -> <p, L(u)> in dimension 1.
Rational side_slope(const PolyhedralLoss& surrogate, std::span<const Rational> p, const Rational& at, bool right) {
  Rational total = 0;
  Vec point{at};
  for (std::size_t y = 0; y < surrogate.outcome_count(); ++y) {
    if (sgn(p[y]) == 0) continue;
    const auto& pieces = surrogate.pieces(y);
    Rational top;
    bool first = true;
    for (const auto& piece : pieces) {
      Rational value = dot(piece.slope, point) + piece.intercept;
      if (first || value > top) top = value;
      first = false;
    }
    std::optional<Rational> pick;
    for (const auto& piece : pieces) {
      if (dot(piece.slope, point) + piece.intercept != top) continue;
      if (!pick || (right ? piece.slope[0] > *pick : piece.slope[0] < *pick)) pick = piece.slope[0];
    }
    total += p[y] * *pick;
  }
  return total;
}

}  // namespace

HoffmanEstimate hoffman_estimate(const PolyhedralLoss& surrogate, std::span<const Rational> p, std::size_t samples,
                                 std::uint64_t seed, Norm norm) {
  const std::size_t d = surrogate.dimension();
  Polyhedron optimal = optimal_set(surrogate, p);
  HoffmanEstimate estimate{Rational(0), d == 1};
  if (d == 0) return estimate;
  if (d == 1) {
    // The regret is convex, so its slope just outside the optimal interval is the smallest.
    auto hi = lp_solve(Vec{Rational(1)}, Sense::Maximize, optimal);
    auto lo = lp_solve(Vec{Rational(1)}, Sense::Minimize, optimal);
    if (hi.optimal()) {
      Rational slope = side_slope(surrogate, p, hi.value, true);
      estimate.value = std::max(estimate.value, Rational(1 / slope));
    }
    if (lo.optimal()) {
      Rational slope = side_slope(surrogate, p, lo.value, false);
      estimate.value = std::max(estimate.value, Rational(-1 / slope));
    }
    return estimate;
  }

  const Rational risk = surrogate_risk(surrogate, p).value;
  auto bases = polyhedron_vertices(optimal).vertices;
  if (bases.empty()) bases.push_back(*relative_interior_point(optimal));
  auto probe = [&](const Vec& u) {
    Rational regret = surrogate.expected(p, u) - risk;
    if (sgn(regret) <= 0) return;
    Rational ratio = *distance(u, optimal, norm) / regret;
    if (ratio > estimate.value) estimate.value = ratio;
  };
  static const Rational steps[] = {Rational(1, 4), Rational(1, 2), Rational(1), Rational(2)};
  for (const auto& base : bases) {
    for (std::size_t i = 0; i < d; ++i) {
      for (int sign : {1, -1}) {
        for (const auto& step : steps) {
          Vec u = base;
          u[i] += sign * step;
          probe(u);
        }
      }
    }
  }
  Sampler sampler(seed);
  for (std::size_t s = 0; s < samples; ++s) {
    const Vec& base = bases[sampler.below(bases.size())];
    Vec direction = sampler.point(d, 1);
    if (is_zero(direction)) continue;
    probe(add(base, scale(direction, steps[sampler.below(4)])));
  }
  return estimate;
}

RegretReport regret_bound_constant(const SurrogateGeometry& geometry, const DiscreteLoss& target,
                                   const LinkArtifact& artifact, std::size_t samples, std::uint64_t seed) {
  RegretReport report;
  report.c_ell = max_loss_gap(target);
  report.eps_psi = artifact.epsilon();
  report.hoffman_exact = true;
  for (const auto& q : geometry.analysis.complex.vertex_points()) {
    auto h = hoffman_estimate(geometry.surrogate, q, samples, seed, artifact.norm());
    report.hoffman = std::max(report.hoffman, h.value);
    report.hoffman_exact = report.hoffman_exact && h.exact;
  }
  report.c_bound = report.c_ell * report.hoffman / report.eps_psi;
  return report;
}

RegretReport empirical_transfer_check(const PolyhedralLoss& surrogate, const DiscreteLoss& target, const Link& link,
                                      const Rational& c, const TransferOptions& options) {
  const std::size_t n = target.outcome_count();
  const std::size_t d = surrogate.dimension();
  Sampler sampler(options.seed);

  // Distributions: point masses, uniform, the target's cell vertices, then random ones.
  std::vector<Vec> pool;
  for (std::size_t y = 0; y < n; ++y) pool.push_back(unit_vector(n, y));
  pool.emplace_back(n, Rational(1, static_cast<long>(n)));
  for (auto& q : cell_complex(target).vertex_points()) pool.push_back(std::move(q));
  const std::size_t wanted = std::max<std::size_t>(pool.size() + 32, std::min<std::size_t>(options.samples / 50, 400));
  while (pool.size() < wanted) {
    pool.push_back(pool.size() % 2 ? sampler.distribution(n) : sampler.sparse_distribution(n));
  }
  std::vector<Rational> surrogate_best, target_best;
  for (const auto& p : pool) {
    surrogate_best.push_back(surrogate_risk(surrogate, p).value);
    target_best.push_back(bayes_risk(target, p).value);
  }

  RegretReport report;
  report.c_bound = c;
  bool have_ratio = false;
  for (std::size_t s = 0; s < options.samples; ++s) {
    const std::size_t k = s % pool.size();
    const Vec& p = pool[k];
    Vec u(d);
    if (s % 4 == 3) {
      // Half-integer grid points hit the kinks of the zoo surrogates.
      for (auto& x : u) x = Rational(sampler.between(-2 * options.radius, 2 * options.radius), 2);
    } else {
      u = sampler.point(d, options.radius);
    }
    Rational surrogate_regret = surrogate.expected(p, u) - surrogate_best[k];
    Rational target_regret = dot(p, target.loss(target.report_index(link(u)))) - target_best[k];
    if (sgn(surrogate_regret) == 0 && sgn(target_regret) == 0) continue;
    ++report.samples_used;
    bool violated = sgn(surrogate_regret) == 0 || target_regret > c * surrogate_regret;
    if (sgn(surrogate_regret) > 0) {
      Rational ratio = target_regret / surrogate_regret;
      if (!have_ratio || ratio > report.max_sampled_ratio) {
        have_ratio = true;
        report.max_sampled_ratio = ratio;
        report.worst_distribution = p;
        report.worst_point = u;
      }
    }
    if (violated) {
      ++report.violations;
      if (options.strict) {
        throw ViolationWithProof("target regret " + to_string(target_regret) + " exceeds " + to_string(c) +
                                 " times surrogate regret " + to_string(surrogate_regret) + " at p = " + to_string(p) +
                                 ", u = " + to_string(u));
      }
    }
  }
  return report;
}

}  // namespace polyembed

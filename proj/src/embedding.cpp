#include "polyembed/embedding.hpp"

#include <algorithm>
#include <set>

#include "polyembed/errors.hpp"

namespace polyembed {

PolyhedralLoss conjugate_surrogate(const DiscreteLoss& loss) {
  const std::size_t n = loss.outcome_count();
  const auto complex = cell_complex(loss);
  std::vector<std::vector<AffinePiece>> pieces(n);
  for (const auto& q : complex.vertex_points()) {
    Rational risk = bayes_risk(loss, q).value;
    for (std::size_t y = 0; y < n; ++y) {
      Vec slope = q;
      slope[y] -= 1;
      pieces[y].push_back({std::move(slope), risk});
    }
  }
  return PolyhedralLoss(n, loss.outcomes(), std::move(pieces));
}

EmbeddingVerdict verify_embedding(const PolyhedralLoss& surrogate, const DiscreteLoss& target) {
  return verify_embedding(analyze(surrogate), target);
}

EmbeddingVerdict verify_embedding(const Analysis& analysis, const DiscreteLoss& target) {
  const auto& embedded = analysis.embedded;
  if (embedded.outcomes() != target.outcomes()) {
    throw DomainError("surrogate and target use different outcome labels");
  }
  const auto& ours = analysis.complex.trimmed;
  const auto theirs = trim(target);
  std::set<Vec, LexLess> our_set(ours.vectors.begin(), ours.vectors.end());
  std::set<Vec, LexLess> their_set(theirs.vectors.begin(), theirs.vectors.end());

  EmbeddingVerdict verdict;
  if (our_set == their_set) {
    verdict.embeds = true;
    for (std::size_t i = 0; i < theirs.vectors.size(); ++i) {
      std::optional<Vec> best;
      for (std::size_t s = 0; s < analysis.representatives.size(); ++s) {
        if (embedded.loss(s) != theirs.vectors[i]) continue;
        Vec point = analysis.quotient.lift(analysis.representatives[s]);
        if (!best || lex_less(point, *best)) best = std::move(point);
      }
      verdict.map.reports.push_back(theirs.reports[i]);
      verdict.map.points.push_back(std::move(*best));
    }
    return verdict;
  }

  auto missing = std::find_if(their_set.begin(), their_set.end(), [&](const Vec& v) { return !our_set.count(v); });
  if (missing != their_set.end()) {
    verdict.differing_vector = *missing;
    verdict.vector_from_target = true;
  } else {
    verdict.differing_vector = *std::find_if(our_set.begin(), our_set.end(),
                                             [&](const Vec& v) { return !their_set.count(v); });
  }
  // Both risks are concave and piecewise affine on their own complexes, so
  // any disagreement shows up at a vertex of one of them.
  auto candidates = analysis.complex.vertex_points();
  auto more = cell_complex(target).vertex_points();
  candidates.insert(candidates.end(), more.begin(), more.end());
  std::optional<Rational> widest;
  for (const auto& q : candidates) {
    Rational s = bayes_risk(embedded, q).value;
    Rational t = bayes_risk(target, q).value;
    Rational gap = abs(s - t);
    if (!widest || gap > *widest) {
      widest = gap;
      verdict.risk_gap_distribution = q;
      verdict.surrogate_risk = s;
      verdict.target_risk = t;
    }
  }
  return verdict;
}

}  // namespace polyembed

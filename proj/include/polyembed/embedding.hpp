#pragma once

#include <optional>
#include <vector>

#include "polyembed/discrete_loss.hpp"
#include "polyembed/polyhedral_loss.hpp"

namespace polyembed {

// Surrogate L(u) = C(u) 1 - u in dimension n, with C the conjugate of the
// negated Bayes risk realized by one piece per cell-complex vertex.
PolyhedralLoss conjugate_surrogate(const DiscreteLoss& loss);

// Target report index -> surrogate point in the surrogate's own coordinates.
struct EmbeddingMap {
  std::vector<std::size_t> reports;
  std::vector<Vec> points;
};

struct EmbeddingVerdict {
  bool embeds = false;
  EmbeddingMap map;
  // When not embedding: a trim vector of exactly one side, which side it
  // belongs to, and a distribution where the two Bayes risks differ.
  Vec differing_vector;
  bool vector_from_target = false;
  Vec risk_gap_distribution;
  Rational surrogate_risk;
  Rational target_risk;
};

EmbeddingVerdict verify_embedding(const PolyhedralLoss& surrogate, const DiscreteLoss& target);
EmbeddingVerdict verify_embedding(const Analysis& analysis, const DiscreteLoss& target);

}  // namespace polyembed

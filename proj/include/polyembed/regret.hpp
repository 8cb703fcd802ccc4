#pragma once

#include <cstdint>

#include "polyembed/link_builder.hpp"

namespace polyembed {

// Largest difference between two entries of one outcome column.
Rational max_loss_gap(const DiscreteLoss& loss);

struct HoffmanEstimate {
  Rational value;
  bool exact = false;  // exact in dimension 1, a sampled lower bound otherwise
};

// Smallest H with dist(u, optimal set) <= H * surrogate regret at p.
HoffmanEstimate hoffman_estimate(const PolyhedralLoss& surrogate, std::span<const Rational> p, std::size_t samples,
                                 std::uint64_t seed, Norm norm = Norm::Infinity);

struct RegretReport {
  Rational c_ell;
  Rational hoffman;
  bool hoffman_exact = false;
  Rational eps_psi;
  Rational c_bound;
  Rational max_sampled_ratio;
  std::size_t samples_used = 0;
  std::size_t violations = 0;
  Vec worst_distribution;
  Vec worst_point;
};

// c = C * H / epsilon with H maximized over the cell-complex vertices.
RegretReport regret_bound_constant(const SurrogateGeometry& geometry, const DiscreteLoss& target,
                                   const LinkArtifact& artifact, std::size_t samples = 400, std::uint64_t seed = 1);

struct TransferOptions {
  std::size_t samples = 10'000;
  std::uint64_t seed = 1;
  std::int64_t radius = 3;
  // Throw ViolationWithProof on the first violation; use when c is a proven bound.
  bool strict = false;
};

// Samples (p, u) pairs and compares target regret of the link against c times surrogate regret.
RegretReport empirical_transfer_check(const PolyhedralLoss& surrogate, const DiscreteLoss& target, const Link& link,
                                      const Rational& c, const TransferOptions& options = {});

}  // namespace polyembed

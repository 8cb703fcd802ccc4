#pragma once

#include <optional>
#include <string>
#include <vector>

#include "polyembed/discrete_loss.hpp"
#include "polyembed/geometry.hpp"

namespace polyembed {

struct AffinePiece {
  Vec slope;
  Rational intercept;

  friend bool operator==(const AffinePiece&, const AffinePiece&) = default;
};

// Surrogate whose loss on outcome y is the maximum of that outcome's affine pieces.
class PolyhedralLoss {
 public:
  // Deduplicates pieces and certifies nonnegativity; throws DomainError otherwise.
  PolyhedralLoss(std::size_t dimension, std::vector<std::string> outcomes,
                 std::vector<std::vector<AffinePiece>> pieces);

  std::size_t dimension() const { return dimension_; }
  std::size_t outcome_count() const { return outcomes_.size(); }
  const std::vector<std::string>& outcomes() const { return outcomes_; }
  const std::vector<AffinePiece>& pieces(std::size_t outcome) const { return pieces_[outcome]; }
  std::size_t piece_count() const;

  Vec eval(std::span<const Rational> u) const;
  Rational expected(std::span<const Rational> p, std::span<const Rational> u) const;

 private:
  std::size_t dimension_;
  std::vector<std::string> outcomes_;
  std::vector<std::vector<AffinePiece>> pieces_;
};

// Directions along which every piece is constant.
Matrix lineality_space(const PolyhedralLoss& loss);

struct Quotient {
  PolyhedralLoss reduced;
  Matrix section;     // original x reduced: u = section * v
  Matrix projection;  // reduced x original: v = projection * u
  bool identity = true;

  Vec lift(std::span<const Rational> v) const;
  Vec project(std::span<const Rational> u) const;
};

Quotient quotient(const PolyhedralLoss& loss);

// Vertices of the common refinement of the per-outcome linearity regions,
// verified representative through Bayes-risk equality.
std::vector<Vec> representative_set(const PolyhedralLoss& loss, const GeometryLimits& limits = {});

std::string point_name(std::span<const Rational> u);

// Embedded discrete loss; report names are serialized points.
DiscreteLoss restrict_to(const PolyhedralLoss& loss, std::span<const Vec> points);

struct SurrogateRisk {
  Rational value;
  Vec minimizer;
};

SurrogateRisk surrogate_risk(const PolyhedralLoss& loss, std::span<const Rational> p);

// The set of minimizers of <p, L(u)>.
Polyhedron optimal_set(const PolyhedralLoss& loss, std::span<const Rational> p);

struct OptimalSetFamily {
  std::vector<Polyhedron> members;
  std::vector<std::size_t> face_member;               // per complex face
  std::vector<std::vector<std::size_t>> member_faces;  // per member, ascending
};

OptimalSetFamily optimal_set_range(const PolyhedralLoss& loss, const SimplexComplex& complex);

// Full analysis pipeline: quotient, representative set, embedded loss, cell complex.
struct Analysis {
  Quotient quotient;
  std::vector<Vec> representatives;  // in reduced coordinates
  DiscreteLoss embedded;
  SimplexComplex complex;

  const PolyhedralLoss& reduced() const { return quotient.reduced; }
};

Analysis analyze(const PolyhedralLoss& loss, bool auto_quotient = true, const GeometryLimits& limits = {});

}  // namespace polyembed

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "polyembed/geometry.hpp"

namespace polyembed {

// Finite-report loss: entry (r, y) of the matrix is the loss of report r on outcome y.
class DiscreteLoss {
 public:
  DiscreteLoss(std::vector<std::string> outcomes, std::vector<std::string> reports, Matrix losses);

  std::size_t outcome_count() const { return outcomes_.size(); }
  std::size_t report_count() const { return reports_.size(); }
  const std::vector<std::string>& outcomes() const { return outcomes_; }
  const std::vector<std::string>& reports() const { return reports_; }
  const Matrix& matrix() const { return losses_; }
  const Vec& loss(std::size_t report) const { return losses_[report]; }

  std::size_t report_index(std::string_view name) const;
  DiscreteLoss restricted(std::span<const std::size_t> reports) const;
  DiscreteLoss scaled(const Rational& factor) const;

 private:
  std::vector<std::string> outcomes_;
  std::vector<std::string> reports_;
  Matrix losses_;
};

void require_distribution(std::span<const Rational> p, std::size_t outcomes);

// {p : sum p = 1, p >= 0} in R^n.
Polyhedron probability_simplex(std::size_t n);

struct BayesRisk {
  Rational value;
  std::vector<std::size_t> argmin;
};

BayesRisk bayes_risk(const DiscreteLoss& loss, std::span<const Rational> p);

struct LevelSet {
  std::size_t report = 0;
  Polyhedron region;
  bool full_dimensional = false;
};

LevelSet level_set(const DiscreteLoss& loss, std::size_t report);

struct Trim {
  std::vector<Vec> vectors;           // in order of their representative
  std::vector<std::size_t> reports;   // lowest-index report per vector
};

Trim trim(const DiscreteLoss& loss);

enum class Redundancy { Kept, StrictlyRedundant, Duplicate };

struct RedundancyEntry {
  Redundancy status = Redundancy::Kept;
  std::optional<std::size_t> other;  // the containing or duplicated report
};

std::vector<RedundancyEntry> redundancy_report(const DiscreteLoss& loss);

// Relatively open cell on which the optimal report set and the support are constant.
struct SimplexFace {
  std::vector<std::size_t> cells;    // trim indices optimal on the face
  std::vector<std::size_t> support;  // outcomes with positive mass
  int dimension = 0;
  Vec witness;
  Polyhedron closure;
  std::vector<std::size_t> vertices;  // indices of zero-dimensional faces in the closure
  std::vector<std::size_t> optimal_reports;
};

struct SimplexComplex {
  Trim trimmed;
  std::vector<std::pair<std::size_t, std::size_t>> hyperplanes;
  std::vector<SimplexFace> faces;  // full-dimensional cells first

  std::vector<Vec> vertex_points() const;
};

SimplexComplex cell_complex(const DiscreteLoss& loss, std::size_t max_trim = 40);

}  // namespace polyembed

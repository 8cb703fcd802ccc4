#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "polyembed/embedding.hpp"
#include "polyembed/zoo.hpp"

namespace polyembed {

// Optimal sets of a surrogate with members pulled back to its own coordinates.
struct SurrogateGeometry {
  PolyhedralLoss surrogate;
  Analysis analysis;
  OptimalSetFamily family;
  std::vector<Polyhedron> members;
};

SurrogateGeometry surrogate_geometry(const PolyhedralLoss& surrogate, const GeometryLimits& limits = {});

using ReportSets = std::vector<std::vector<std::size_t>>;  // ascending target report indices per member

// Reports whose embedding point lies in the member.
ReportSets report_sets_from_embedding(const SurrogateGeometry& geometry, const EmbeddingMap& map);

// Reports optimal on every distribution whose optimal set is the member.
ReportSets report_sets_from_property(const SurrogateGeometry& geometry, const DiscreteLoss& target);

// Members, their report sets and the names of the target reports.
struct ReportFamily {
  std::vector<Polyhedron> members;
  ReportSets report_sets;
  std::vector<std::string> reports;
};

struct ElicitationCheck {
  bool holds = true;
  std::vector<std::size_t> witness;  // members with a common point and no common report
  Vec common_point;
};

ElicitationCheck indirect_elicitation_check(const ReportFamily& family);

struct EpsilonMax {
  std::optional<Rational> value;  // nothing when no family has disjoint reports
  std::vector<std::size_t> family;
  Vec point;  // every member of `family` lies within `value` of it
};

EpsilonMax epsilon_max(const ReportFamily& family, Norm norm);

// Envelope and link queries for one thickening radius.
class LinkArtifact {
 public:
  LinkArtifact(ReportFamily family, Norm norm, Rational epsilon, EpsilonMax bound);

  const ReportFamily& family() const { return family_; }
  Norm norm() const { return norm_; }
  const Rational& epsilon() const { return epsilon_; }
  const EpsilonMax& bound() const { return bound_; }
  std::size_t dimension() const;

  // Whether u is strictly closer than epsilon to the member.
  bool near(std::size_t member, std::span<const Rational> u) const;
  // Report indices allowed at u; throws EmptyEnvelope when none is.
  std::vector<std::size_t> envelope(std::span<const Rational> u) const;
  std::size_t link(std::span<const Rational> u) const;
  std::string link_name(std::span<const Rational> u) const;
  // The closed thickening of each member.
  const std::vector<Polyhedron>& thickened() const { return thickened_; }

 private:
  ReportFamily family_;
  Norm norm_;
  Rational epsilon_;
  EpsilonMax bound_;
  std::vector<Polyhedron> thickened_;
};

enum class ReportSource { Embedding, Property };

struct LinkOptions {
  Norm norm = Norm::Infinity;
  std::optional<Rational> epsilon;  // defaults to half of the maximal radius
  ReportSource source = ReportSource::Property;
};

// Throws EmptyReportSet or IndirectElicitationFails when no calibrated link exists.
LinkArtifact build_link(const SurrogateGeometry& geometry, const DiscreteLoss& target, const LinkOptions& options = {});
ReportFamily report_family(const SurrogateGeometry& geometry, const DiscreteLoss& target, ReportSource source);

struct LinkVerification {
  bool refuted = false;
  std::size_t points_checked = 0;
  bool exhaustive = false;  // boundary arrangement covered (dimension at most 2)
  Vec point;                // refuting surrogate point
  Vec distribution;         // its optimal set lies within epsilon of `point`
  std::string proposed;     // link value at `point`, not optimal at `distribution`
};

struct VerifyOptions {
  Norm norm = Norm::Infinity;
  Rational epsilon = 1;
  std::size_t samples = 10'000;
  std::uint64_t seed = 1;
  bool exact = true;  // add boundary arrangement points when the dimension is at most 2
};

LinkVerification verify_proposed_link(const SurrogateGeometry& geometry, const DiscreteLoss& target,
                                      const Link& proposed, const VerifyOptions& options);

// Largest radius in the bisection grid for which the link passes sample verification.
struct EpsilonSearch {
  std::optional<Rational> epsilon;
  std::size_t rounds = 0;
};

EpsilonSearch certify_epsilon(const SurrogateGeometry& geometry, const DiscreteLoss& target, const Link& proposed,
                              VerifyOptions options, const Rational& upper, std::size_t rounds = 8);

struct ConsistencyVerdict {
  bool calibrated = true;
  std::vector<std::size_t> good_cells;  // embedded trim indices contained in a target level set
  std::vector<std::size_t> bad_cells;
  // For the first bad cell: two interior distributions sharing the embedded
  // optimum with disjoint target optima.
  Vec witness;
  Vec other_witness;
};

ConsistencyVerdict diagnose_consistency(const DiscreteLoss& embedded, const DiscreteLoss& target);

}  // namespace polyembed

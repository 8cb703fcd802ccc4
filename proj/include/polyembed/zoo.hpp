#pragma once

#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "polyembed/discrete_loss.hpp"
#include "polyembed/polyhedral_loss.hpp"

namespace polyembed {

// Maps a surrogate point to the name of a target report.
using Link = std::function<std::string(std::span<const Rational>)>;

namespace zoo {

inline constexpr std::size_t max_outcomes = 8;

std::vector<std::string> labels(std::size_t n);

DiscreteLoss zero_one(std::size_t n);
DiscreteLoss zero_one(std::vector<std::string> labels);
DiscreteLoss abstain(std::size_t n, const Rational& penalty = Rational(1, 2));
DiscreteLoss ordered_partition(std::size_t n);
DiscreteLoss top_k(std::size_t n, std::size_t k);
DiscreteLoss l4_target(std::size_t n, std::size_t k);

// Table indexed by subset bitmask over k coordinates.
DiscreteLoss structured_abstain(std::span<const Rational> set_function, std::size_t k);
std::vector<Rational> indicator_set_function(std::size_t k);
std::vector<Rational> cardinality_set_function(std::size_t k);

// Outcomes ordered "1", "-1".
PolyhedralLoss hinge();
PolyhedralLoss bep(std::size_t n);
PolyhedralLoss ww_hinge(std::size_t n);
PolyhedralLoss topk_surrogate(std::size_t n, std::size_t k);
PolyhedralLoss l4_surrogate(std::size_t n, std::size_t k);

// Code of label index i in {-1,1}^d; index 0 maps to all ones.
Vec bep_code(std::size_t n, std::size_t index);
std::size_t bep_dimension(std::size_t n);
std::string code_name(std::span<const Rational> code);

Link sign_link();
Link shifted_sign_link();
Link psi_inf(std::size_t n);
Link psi_1(std::size_t n);
Link argmax_link(std::size_t n, std::size_t k);

std::string subset_name(std::span<const std::size_t> members);

// Named construction, e.g. "abstain?n=4" or "topk_surrogate?n=4&k=2".
struct Spec {
  std::string name;
  std::map<std::string, std::string> parameters;

  std::size_t integer(const std::string& key, std::size_t fallback) const;
  Rational rational(const std::string& key, const Rational& fallback) const;
};

Spec parse_spec(std::string_view text);
bool is_discrete(const Spec& spec);
bool is_surrogate(const Spec& spec);
bool is_link(const Spec& spec);
DiscreteLoss make_discrete(const Spec& spec);
PolyhedralLoss make_surrogate(const Spec& spec);
Link make_link(const Spec& spec);
std::vector<std::string> names();

}  // namespace zoo
}  // namespace polyembed

#include "polyembed/zoo.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <numeric>

#include "polyembed/errors.hpp"

namespace polyembed::zoo {

namespace {

void require_outcomes(std::size_t n) {
  if (n < 2) throw DomainError("at least two outcomes are required");
  if (n > max_outcomes) throw GuardExceeded("at most " + std::to_string(max_outcomes) + " outcomes are supported");
}

void require_k(std::size_t n, std::size_t k) {
  if (k < 1 || k >= n) throw DomainError("k must satisfy 1 <= k < n");
}

// All k-subsets of {0..n-1} in lexicographic order.
std::vector<std::vector<std::size_t>> subsets_of_size(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> pick(k);
  std::iota(pick.begin(), pick.end(), 0);
  if (k > n) return out;
  for (;;) {
    out.push_back(pick);
    std::size_t pos = k;
    while (pos > 0 && pick[pos - 1] == n - k + pos - 1) --pos;
    if (pos == 0) break;
    ++pick[pos - 1];
    for (std::size_t j = pos; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
  return out;
}

Rational frac(long num, long den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

}  // namespace

std::vector<std::string> labels(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 1; i <= n; ++i) out.push_back(std::to_string(i));
  return out;
}

std::string subset_name(std::span<const std::size_t> members) {
  std::string out = "{";
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(members[i] + 1);
  }
  return out + "}";
}

DiscreteLoss zero_one(std::vector<std::string> names) {
  const std::size_t n = names.size();
  require_outcomes(n);
  Matrix rows(n, Vec(n));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t y = 0; y < n; ++y) rows[r][y] = r == y ? 0 : 1;
  }
  return DiscreteLoss(names, names, std::move(rows));
}

DiscreteLoss zero_one(std::size_t n) { return zero_one(labels(n)); }

DiscreteLoss abstain(std::size_t n, const Rational& penalty) {
  require_outcomes(n);
  if (sgn(penalty) <= 0 || penalty >= 1) throw DomainError("abstain penalty must lie in (0, 1)");
  auto reports = labels(n);
  Matrix rows(n, Vec(n));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t y = 0; y < n; ++y) rows[r][y] = r == y ? 0 : 1;
  }
  reports.push_back("abstain");
  rows.push_back(Vec(n, penalty));
  return DiscreteLoss(labels(n), std::move(reports), std::move(rows));
}

DiscreteLoss ordered_partition(std::size_t n) {
  require_outcomes(n);
  if (n > 6) throw GuardExceeded("ordered partitions are limited to n <= 6");
  std::vector<std::string> names;
  Matrix rows;
  std::vector<unsigned> blocks;
  const unsigned full = (1u << n) - 1;
  std::function<void(unsigned)> extend = [&](unsigned remaining) {
    if (remaining == 0) {
      std::string name;
      Vec loss(n, Rational(-1));
      unsigned before = 0;
      for (std::size_t b = 0; b < blocks.size(); ++b) {
        if (b) name += "|";
        for (std::size_t i = 0; i < n; ++i) {
          if (blocks[b] >> i & 1u) name += std::to_string(i + 1);
        }
        unsigned chain = before | blocks[b];
        for (std::size_t y = 0; y < n; ++y) {
          if (!(before >> y & 1u)) loss[y] += std::popcount(chain);
        }
        before = chain;
      }
      names.push_back(std::move(name));
      rows.push_back(std::move(loss));
      return;
    }
    for (unsigned block = 1; block <= full; ++block) {
      if ((block & remaining) != block) continue;
      blocks.push_back(block);
      extend(remaining & ~block);
      blocks.pop_back();
    }
  };
  extend(full);
  return DiscreteLoss(labels(n), std::move(names), std::move(rows));
}

DiscreteLoss top_k(std::size_t n, std::size_t k) {
  require_outcomes(n);
  require_k(n, k);
  std::vector<std::string> names;
  Matrix rows;
  for (const auto& s : subsets_of_size(n, k)) {
    names.push_back(subset_name(s));
    Vec loss(n, Rational(1));
    for (auto y : s) loss[y] = 0;
    rows.push_back(std::move(loss));
  }
  return DiscreteLoss(labels(n), std::move(names), std::move(rows));
}

DiscreteLoss l4_target(std::size_t n, std::size_t k) {
  require_outcomes(n);
  require_k(n, k);
  std::vector<std::string> names;
  Matrix rows;
  for (std::size_t size = 0; size <= k; ++size) {
    Rational weight = frac(static_cast<long>(k + 1), static_cast<long>(k + 1 - size));
    for (const auto& s : subsets_of_size(n, size)) {
      names.push_back(subset_name(s));
      Vec loss(n, weight);
      for (auto y : s) loss[y] = 0;
      rows.push_back(std::move(loss));
    }
  }
  return DiscreteLoss(labels(n), std::move(names), std::move(rows));
}

std::size_t bep_dimension(std::size_t n) {
  std::size_t d = 0;
  while ((std::size_t{1} << d) < n) ++d;
  return d;
}

Vec bep_code(std::size_t n, std::size_t index) {
  const std::size_t d = bep_dimension(n);
  Vec code(d);
  for (std::size_t j = 0; j < d; ++j) code[j] = (index >> (d - 1 - j) & 1u) ? -1 : 1;
  return code;
}

std::string code_name(std::span<const Rational> code) {
  std::string out;
  for (const auto& c : code) out += sgn(c) > 0 ? '+' : sgn(c) < 0 ? '-' : '0';
  return out;
}

std::vector<Rational> indicator_set_function(std::size_t k) {
  std::vector<Rational> f(std::size_t{1} << k, Rational(1));
  f[0] = 0;
  return f;
}

std::vector<Rational> cardinality_set_function(std::size_t k) {
  std::vector<Rational> f(std::size_t{1} << k);
  for (std::size_t s = 0; s < f.size(); ++s) f[s] = std::popcount(s);
  return f;
}

DiscreteLoss structured_abstain(std::span<const Rational> f, std::size_t k) {
  if (k < 1 || k > 4) throw GuardExceeded("structured abstain is limited to 1 <= k <= 4");
  if (f.size() != (std::size_t{1} << k)) throw InvalidSetFunction("set function table needs 2^k entries");
  if (sgn(f[0]) != 0) throw InvalidSetFunction("set function must vanish on the empty set");
  for (const auto& v : f) {
    if (sgn(v) < 0) throw InvalidSetFunction("set function must be nonnegative");
  }
  const std::size_t n = std::size_t{1} << k;
  std::vector<Vec> outcomes;
  std::vector<std::string> outcome_names;
  for (std::size_t i = 0; i < n; ++i) {
    outcomes.push_back(bep_code(n, i));
    outcome_names.push_back(code_name(outcomes.back()));
  }
  static const int digits[] = {1, -1, 0};
  std::size_t total = 1;
  for (std::size_t i = 0; i < k; ++i) total *= 3;
  std::vector<std::string> names;
  Matrix rows;
  for (std::size_t code = 0; code < total; ++code) {
    Vec v(k);
    std::size_t rest = code;
    for (std::size_t j = k; j-- > 0;) {
      v[j] = digits[rest % 3];
      rest /= 3;
    }
    Vec loss(n);
    for (std::size_t y = 0; y < n; ++y) {
      unsigned disagree = 0, abstained = 0;
      for (std::size_t j = 0; j < k; ++j) {
        if (v[j] != outcomes[y][j]) disagree |= 1u << j;
        if (sgn(v[j]) == 0) abstained |= 1u << j;
      }
      loss[y] = f[disagree & ~abstained] + f[disagree];
    }
    names.push_back(code_name(v));
    rows.push_back(std::move(loss));
  }
  return DiscreteLoss(std::move(outcome_names), std::move(names), std::move(rows));
}

PolyhedralLoss hinge() {
  return PolyhedralLoss(1, {"1", "-1"},
                        {{{{Rational(0)}, 0}, {{Rational(-1)}, 1}}, {{{Rational(0)}, 0}, {{Rational(1)}, 1}}});
}

PolyhedralLoss bep(std::size_t n) {
  require_outcomes(n);
  const std::size_t d = bep_dimension(n);
  std::vector<std::vector<AffinePiece>> pieces(n);
  for (std::size_t y = 0; y < n; ++y) {
    Vec code = bep_code(n, y);
    pieces[y].push_back({zeros(d), 0});
    for (std::size_t j = 0; j < d; ++j) pieces[y].push_back({scale(unit_vector(d, j), -code[j]), 1});
  }
  return PolyhedralLoss(d, labels(n), std::move(pieces));
}

PolyhedralLoss ww_hinge(std::size_t n) {
  require_outcomes(n);
  std::vector<std::vector<AffinePiece>> pieces(n);
  for (std::size_t y = 0; y < n; ++y) {
    // Each subset of the other labels selects which clipped terms are active.
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      if (mask >> y & 1u) continue;
      Vec slope = zeros(n);
      Rational intercept = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (!(mask >> i & 1u)) continue;
        slope[i] += 1;
        slope[y] -= 1;
        intercept += 1;
      }
      pieces[y].push_back({std::move(slope), std::move(intercept)});
    }
  }
  return PolyhedralLoss(n, labels(n), std::move(pieces));
}

PolyhedralLoss topk_surrogate(std::size_t n, std::size_t k) {
  require_outcomes(n);
  require_k(n, k);
  std::vector<AffinePiece> shared;
  for (std::size_t i = 0; i < n; ++i) shared.push_back({unit_vector(n, i), 0});
  for (std::size_t m = k + 1; m <= n; ++m) {
    Rational intercept = 1 - frac(static_cast<long>(k), static_cast<long>(m));
    for (const auto& s : subsets_of_size(n, m)) {
      Vec slope = zeros(n);
      for (auto i : s) slope[i] = frac(1, static_cast<long>(m));
      shared.push_back({std::move(slope), intercept});
    }
  }
  std::vector<std::vector<AffinePiece>> pieces(n);
  for (std::size_t y = 0; y < n; ++y) {
    for (const auto& piece : shared) {
      Vec slope = piece.slope;
      slope[y] -= 1;
      pieces[y].push_back({std::move(slope), piece.intercept});
    }
  }
  return PolyhedralLoss(n, labels(n), std::move(pieces));
}

PolyhedralLoss l4_surrogate(std::size_t n, std::size_t k) {
  require_outcomes(n);
  require_k(n, k);
  std::vector<std::vector<AffinePiece>> pieces(n);
  for (std::size_t y = 0; y < n; ++y) {
    pieces[y].push_back({zeros(n), 0});
    for (const auto& s : subsets_of_size(n - 1, k)) {
      Vec slope = zeros(n);
      slope[y] = -1;
      for (auto i : s) slope[i < y ? i : i + 1] += frac(1, static_cast<long>(k));
      pieces[y].push_back({std::move(slope), 1});
    }
  }
  return PolyhedralLoss(n, labels(n), std::move(pieces));
}

Link sign_link() {
  return [](std::span<const Rational> u) { return std::string(sgn(u[0]) >= 0 ? "1" : "-1"); };
}

Link shifted_sign_link() {
  return [](std::span<const Rational> u) { return std::string(u[0] < 1 ? "-1" : "1"); };
}

namespace {

std::string decode(std::size_t n, std::span<const Rational> u) {
  std::size_t index = 0;
  for (const auto& v : u) index = 2 * index + (sgn(v) < 0 ? 1 : 0);
  return index < n ? std::to_string(index + 1) : std::string("abstain");
}

}  // namespace

Link psi_inf(std::size_t n) {
  require_outcomes(n);
  return [n](std::span<const Rational> u) {
    for (const auto& v : u) {
      if (abs(v) <= Rational(1, 2)) return std::string("abstain");
    }
    return decode(n, u);
  };
}

Link psi_1(std::size_t n) {
  require_outcomes(n);
  return [n](std::span<const Rational> u) {
    Rational norm = 0;
    for (const auto& v : u) norm += abs(v);
    if (norm <= 1) return std::string("abstain");
    return decode(n, u);
  };
}

Link argmax_link(std::size_t n, std::size_t k) {
  require_outcomes(n);
  require_k(n, k);
  return [k](std::span<const Rational> u) {
    std::vector<std::size_t> order(u.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return u[a] > u[b]; });
    std::vector<std::size_t> top(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(top.begin(), top.end());
    return subset_name(top);
  };
}

std::size_t Spec::integer(const std::string& key, std::size_t fallback) const {
  auto it = parameters.find(key);
  if (it == parameters.end()) return fallback;
  Rational value = parse_rational(it->second);
  if (value.get_den() != 1 || sgn(value) < 0) throw ParseError("parameter '" + key + "' must be a natural number");
  return value.get_num().get_ui();
}

Rational Spec::rational(const std::string& key, const Rational& fallback) const {
  auto it = parameters.find(key);
  return it == parameters.end() ? fallback : parse_rational(it->second);
}

Spec parse_spec(std::string_view text) {
  if (text.starts_with("zoo:")) text.remove_prefix(4);
  Spec spec;
  auto q = text.find('?');
  spec.name = std::string(text.substr(0, q));
  if (q == std::string_view::npos) return spec;
  std::string_view rest = text.substr(q + 1);
  while (!rest.empty()) {
    auto amp = rest.find('&');
    std::string_view item = rest.substr(0, amp);
    auto eq = item.find('=');
    if (eq == std::string_view::npos) throw ParseError("malformed zoo parameter '" + std::string(item) + "'");
    spec.parameters[std::string(item.substr(0, eq))] = std::string(item.substr(eq + 1));
    if (amp == std::string_view::npos) break;
    rest.remove_prefix(amp + 1);
  }
  return spec;
}

namespace {

const std::vector<std::string> discrete_names = {"zero_one", "abstain", "ordered_partition", "top_k", "l4_target",
                                                 "structured_abstain"};
const std::vector<std::string> surrogate_names = {"hinge", "bep", "ww_hinge", "topk_surrogate", "l4_surrogate"};
const std::vector<std::string> link_names = {"sign", "shifted_sign", "psi_inf", "psi_1", "argmax"};

bool listed(const std::vector<std::string>& list, const std::string& name) {
  return std::find(list.begin(), list.end(), name) != list.end();
}

}  // namespace

bool is_discrete(const Spec& spec) { return listed(discrete_names, spec.name); }
bool is_surrogate(const Spec& spec) { return listed(surrogate_names, spec.name); }
bool is_link(const Spec& spec) { return listed(link_names, spec.name); }

std::vector<std::string> names() {
  std::vector<std::string> out = discrete_names;
  out.insert(out.end(), surrogate_names.begin(), surrogate_names.end());
  out.insert(out.end(), link_names.begin(), link_names.end());
  return out;
}

DiscreteLoss make_discrete(const Spec& spec) {
  const std::size_t n = spec.integer("n", 3);
  const std::size_t k = spec.integer("k", 2);
  if (spec.name == "zero_one") return zero_one(n);
  if (spec.name == "abstain") return abstain(n, spec.rational("alpha", Rational(1, 2)));
  if (spec.name == "ordered_partition") return ordered_partition(n);
  if (spec.name == "top_k") return top_k(n, k);
  if (spec.name == "l4_target") return l4_target(n, k);
  if (spec.name == "structured_abstain") {
    auto f = spec.parameters.count("f") ? spec.parameters.at("f") : std::string("indicator");
    if (f == "indicator") return structured_abstain(indicator_set_function(k), k);
    if (f == "cardinality") return structured_abstain(cardinality_set_function(k), k);
    throw InvalidSetFunction("unknown set function '" + f + "'");
  }
  throw ParseError("unknown discrete loss '" + spec.name + "'");
}

PolyhedralLoss make_surrogate(const Spec& spec) {
  const std::size_t n = spec.integer("n", 3);
  const std::size_t k = spec.integer("k", 2);
  if (spec.name == "hinge") return hinge();
  if (spec.name == "bep") return bep(n);
  if (spec.name == "ww_hinge") return ww_hinge(n);
  if (spec.name == "topk_surrogate") return topk_surrogate(n, k);
  if (spec.name == "l4_surrogate") return l4_surrogate(n, k);
  throw ParseError("unknown surrogate '" + spec.name + "'");
}

Link make_link(const Spec& spec) {
  const std::size_t n = spec.integer("n", 4);
  const std::size_t k = spec.integer("k", 2);
  if (spec.name == "sign") return sign_link();
  if (spec.name == "shifted_sign") return shifted_sign_link();
  if (spec.name == "psi_inf") return psi_inf(n);
  if (spec.name == "psi_1") return psi_1(n);
  if (spec.name == "argmax") return argmax_link(n, k);
  throw ParseError("unknown link '" + spec.name + "'");
}

}  // namespace polyembed::zoo

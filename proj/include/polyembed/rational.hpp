#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace polyembed {

using Rational = mpq_class;
using Vec = std::vector<Rational>;
using Matrix = std::vector<Vec>;

// Accepts "a" or "a/b" with optional sign; rejects decimals and exponents.
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& value);
std::string to_string(std::span<const Rational> values);

Rational dot(std::span<const Rational> lhs, std::span<const Rational> rhs);
Vec zeros(std::size_t size);
Vec unit_vector(std::size_t size, std::size_t index);
Vec subtract(std::span<const Rational> lhs, std::span<const Rational> rhs);
Vec add(std::span<const Rational> lhs, std::span<const Rational> rhs);
Vec scale(std::span<const Rational> values, const Rational& factor);
Rational sum(std::span<const Rational> values);
bool is_zero(std::span<const Rational> values);

// Lexicographic order on equal-length vectors.
bool lex_less(std::span<const Rational> lhs, std::span<const Rational> rhs);

struct LexLess {
  bool operator()(const Vec& lhs, const Vec& rhs) const { return lex_less(lhs, rhs); }
};

// Exact linear algebra over the rationals.
std::size_t rank(Matrix rows);
// Basis of {x : rows * x = 0}.
Matrix null_space(Matrix rows, std::size_t columns);
// Nonzero rows of the reduced row echelon form.
Matrix row_basis(Matrix rows);
// Unique solution of a square system, or nothing when singular.
std::optional<Vec> solve_square(Matrix system, Vec rhs);
Matrix transpose(const Matrix& m, std::size_t columns);
Vec multiply(const Matrix& m, std::span<const Rational> x);

// Deterministic sampler shared by every randomized routine.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t below(std::uint64_t bound);
  std::int64_t between(std::int64_t lo, std::int64_t hi);
  // Rational in [-radius, radius] with a small random denominator.
  Rational rational(std::int64_t radius);
  Vec point(std::size_t dimension, std::int64_t radius);
  // Strictly positive rational distribution over `size` outcomes.
  Vec distribution(std::size_t size);
  // Distribution whose support is a random nonempty subset.
  Vec sparse_distribution(std::size_t size);

 private:
  std::mt19937_64 engine_;
};

}  // namespace polyembed

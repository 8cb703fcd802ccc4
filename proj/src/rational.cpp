#include "polyembed/rational.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

#include "polyembed/errors.hpp"

namespace polyembed {

namespace {

bool is_integer_literal(std::string_view text) {
  if (text.empty()) return false;
  std::size_t start = (text.front() == '-' || text.front() == '+') ? 1 : 0;
  if (start == text.size()) return false;
  return std::all_of(text.begin() + static_cast<std::ptrdiff_t>(start), text.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; });
}

}  // namespace

Rational parse_rational(std::string_view text) {
  auto slash = text.find('/');
  std::string_view num = text.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view{"1"} : text.substr(slash + 1);
  if (!is_integer_literal(num) || !is_integer_literal(den) || den.front() == '-' || den.front() == '+') {
    throw ParseError("not an exact rational: '" + std::string(text) + "'");
  }
  std::string n(num.front() == '+' ? num.substr(1) : num);
  mpz_class top(n, 10);
  mpz_class bottom(std::string(den), 10);
  if (bottom == 0) throw ParseError("zero denominator: '" + std::string(text) + "'");
  Rational value(top, bottom);
  value.canonicalize();
  return value;
}

std::string to_string(const Rational& value) { return value.get_str(); }

std::string to_string(std::span<const Rational> values) {
  std::string out = "(";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    out += values[i].get_str();
  }
  return out + ")";
}

Rational dot(std::span<const Rational> lhs, std::span<const Rational> rhs) {
  Rational total = 0;
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    if (sgn(lhs[i]) != 0 && sgn(rhs[i]) != 0) total += lhs[i] * rhs[i];
  }
  return total;
}

Vec zeros(std::size_t size) { return Vec(size, Rational(0)); }

Vec unit_vector(std::size_t size, std::size_t index) {
  Vec v = zeros(size);
  v[index] = 1;
  return v;
}

Vec subtract(std::span<const Rational> lhs, std::span<const Rational> rhs) {
  Vec out(lhs.size());
  for (std::size_t i = 0; i < lhs.size(); ++i) out[i] = lhs[i] - rhs[i];
  return out;
}

Vec add(std::span<const Rational> lhs, std::span<const Rational> rhs) {
  Vec out(lhs.size());
  for (std::size_t i = 0; i < lhs.size(); ++i) out[i] = lhs[i] + rhs[i];
  return out;
}

Vec scale(std::span<const Rational> values, const Rational& factor) {
  Vec out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i] * factor;
  return out;
}

Rational sum(std::span<const Rational> values) {
  Rational total = 0;
  for (const auto& v : values) total += v;
  return total;
}

bool is_zero(std::span<const Rational> values) {
  return std::all_of(values.begin(), values.end(), [](const Rational& v) { return sgn(v) == 0; });
}

bool lex_less(std::span<const Rational> lhs, std::span<const Rational> rhs) {
  return std::lexicographical_compare(lhs.begin(), lhs.end(), rhs.begin(), rhs.end());
}

namespace {

// In-place reduced row echelon form; returns pivot columns.
std::vector<std::size_t> reduce(Matrix& rows, std::size_t columns) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < columns && r < rows.size(); ++c) {
    std::size_t p = r;
    while (p < rows.size() && sgn(rows[p][c]) == 0) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[p], rows[r]);
    Rational inv = 1 / rows[r][c];
    for (auto& v : rows[r]) v *= inv;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || sgn(rows[i][c]) == 0) continue;
      Rational f = rows[i][c];
      for (std::size_t j = c; j < rows[i].size(); ++j) {
        if (sgn(rows[r][j]) != 0) rows[i][j] -= f * rows[r][j];
      }
    }
    pivots.push_back(c);
    ++r;
  }
  rows.resize(r);
  return pivots;
}

}  // namespace

std::size_t rank(Matrix rows) {
  if (rows.empty()) return 0;
  std::size_t columns = rows.front().size();
  return reduce(rows, columns).size();
}

Matrix row_basis(Matrix rows) {
  if (rows.empty()) return rows;
  std::size_t columns = rows.front().size();
  reduce(rows, columns);
  return rows;
}

Matrix null_space(Matrix rows, std::size_t columns) {
  auto pivots = rows.empty() ? std::vector<std::size_t>{} : reduce(rows, columns);
  std::vector<bool> is_pivot(columns, false);
  for (auto c : pivots) is_pivot[c] = true;
  Matrix basis;
  for (std::size_t free = 0; free < columns; ++free) {
    if (is_pivot[free]) continue;
    Vec v = zeros(columns);
    v[free] = 1;
    for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -rows[i][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

std::optional<Vec> solve_square(Matrix system, Vec rhs) {
  const std::size_t n = rhs.size();
  for (std::size_t i = 0; i < n; ++i) system[i].push_back(rhs[i]);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && sgn(system[p][c]) == 0) ++p;
    if (p == n) return std::nullopt;
    std::swap(system[p], system[c]);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || sgn(system[i][c]) == 0) continue;
      Rational f = system[i][c] / system[c][c];
      for (std::size_t j = c; j <= n; ++j) {
        if (sgn(system[c][j]) != 0) system[i][j] -= f * system[c][j];
      }
    }
  }
  Vec x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = system[i][n] / system[i][i];
  return x;
}

Matrix transpose(const Matrix& m, std::size_t columns) {
  Matrix t(columns, Vec(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < columns; ++j) t[j][i] = m[i][j];
  }
  return t;
}

Vec multiply(const Matrix& m, std::span<const Rational> x) {
  Vec out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = dot(m[i], x);
  return out;
}

std::uint64_t Sampler::below(std::uint64_t bound) {
  // Rejection sampling keeps the stream identical across standard libraries.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t draw;
  do {
    draw = engine_();
  } while (draw >= limit);
  return draw % bound;
}

std::int64_t Sampler::between(std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
}

Rational Sampler::rational(std::int64_t radius) {
  static constexpr std::int64_t denominators[] = {1, 2, 3, 4, 5, 8, 16, 7, 12, 64};
  const std::int64_t den = denominators[below(std::size(denominators))];
  Rational value(between(-radius * den, radius * den), den);
  value.canonicalize();
  return value;
}

Vec Sampler::point(std::size_t dimension, std::int64_t radius) {
  Vec v(dimension);
  for (auto& x : v) x = rational(radius);
  return v;
}

Vec Sampler::distribution(std::size_t size) {
  Vec p(size);
  Rational total = 0;
  for (auto& x : p) {
    x = between(1, 24);
    total += x;
  }
  for (auto& x : p) x /= total;
  return p;
}

Vec Sampler::sparse_distribution(std::size_t size) {
  Vec p = zeros(size);
  Rational total = 0;
  while (total == 0) {
    for (auto& x : p) {
      x = below(3) == 0 ? 0 : between(1, 12);
      total += x;
    }
  }
  for (auto& x : p) x /= total;
  return p;
}

}  // namespace polyembed

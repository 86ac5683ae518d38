#include "tq/exact_linalg.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "tq/errors.hpp"

namespace tq {

namespace {

using int128 = __int128;

long long narrow(int128 v, const char* what) {
  if (v > std::numeric_limits<long long>::max() || v < std::numeric_limits<long long>::min()) {
    fail(errc::malformed_input, std::string("integer overflow in ") + what);
  }
  return static_cast<long long>(v);
}

}  // namespace

long long integer_determinant(const IntMatrix& m) {
  const std::size_t n = m.size();
  if (n == 0) return 1;
  std::vector<std::vector<int128>> a(n, std::vector<int128>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (m[i].size() != n) fail(errc::internal, "determinant of non-square matrix");
    for (std::size_t j = 0; j < n; ++j) a[i][j] = m[i][j];
  }
  int sign = 1;
  int128 prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a[k][k] == 0) {
      std::size_t p = k + 1;
      while (p < n && a[p][k] == 0) ++p;
      if (p == n) return 0;
      std::swap(a[k], a[p]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
      }
      a[i][k] = 0;
    }
    prev = a[k][k];
  }
  return narrow(sign * a[n - 1][n - 1], "determinant");
}

IntMatrix unimodular_inverse(const IntMatrix& m) {
  const std::size_t n = m.size();
  const long long det = integer_determinant(m);
  if (det != 1 && det != -1) {
    fail(errc::non_integral_exponent, "matrix is not unimodular; integral inverse undefined");
  }
  // Adjugate via rational elimination, then scale by 1/det (stays integral).
  RationalMatrix a(n, RationalVector(n));
  RationalMatrix inv(n, RationalVector(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = Rational(m[i][j]);
    inv[i][i] = Rational(1);
  }
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < n && a[p][k].is_zero()) ++p;
    if (p == n) fail(errc::internal, "unimodular matrix reported singular");
    std::swap(a[k], a[p]);
    std::swap(inv[k], inv[p]);
    const Rational pivot = a[k][k];
    for (std::size_t j = 0; j < n; ++j) {
      a[k][j] /= pivot;
      inv[k][j] /= pivot;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k || a[i][k].is_zero()) continue;
      const Rational f = a[i][k];
      for (std::size_t j = 0; j < n; ++j) {
        a[i][j] -= f * a[k][j];
        inv[i][j] -= f * inv[k][j];
      }
    }
  }
  IntMatrix out(n, IntVector(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!inv[i][j].is_integer()) {
        fail(errc::non_integral_exponent, "inverse of unimodular matrix not integral");
      }
      out[i][j] = inv[i][j].num();
    }
  }
  return out;
}

IntVector mat_vec(const IntMatrix& m, const IntVector& v) {
  IntVector out(m.size(), 0);
  for (std::size_t i = 0; i < m.size(); ++i) {
    int128 acc = 0;
    for (std::size_t j = 0; j < v.size(); ++j) acc += static_cast<int128>(m[i][j]) * v[j];
    out[i] = narrow(acc, "matrix-vector product");
  }
  return out;
}

long long dot(const IntVector& a, const IntVector& b) {
  int128 acc = 0;
  for (std::size_t j = 0; j < a.size(); ++j) acc += static_cast<int128>(a[j]) * b[j];
  return narrow(acc, "dot product");
}

std::optional<RationalVector> solve_rational(RationalMatrix a, RationalVector b) {
  const std::size_t n = a.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < n && a[p][k].is_zero()) ++p;
    if (p == n) return std::nullopt;
    std::swap(a[k], a[p]);
    std::swap(b[k], b[p]);
    for (std::size_t i = k + 1; i < n; ++i) {
      if (a[i][k].is_zero()) continue;
      const Rational f = a[i][k] / a[k][k];
      for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
      b[i] -= f * b[k];
    }
  }
  RationalVector x(n);
  for (std::size_t i = n; i-- > 0;) {
    Rational acc = b[i];
    for (std::size_t j = i + 1; j < n; ++j) acc -= a[i][j] * x[j];
    x[i] = acc / a[i][i];
  }
  return x;
}

int rational_rank(RationalMatrix m) {
  if (m.empty()) return 0;
  const std::size_t rows = m.size(), cols = m[0].size();
  int rank = 0;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < rows; ++col) {
    std::size_t p = row;
    while (p < rows && m[p][col].is_zero()) ++p;
    if (p == rows) continue;
    std::swap(m[row], m[p]);
    for (std::size_t i = row + 1; i < rows; ++i) {
      if (m[i][col].is_zero()) continue;
      const Rational f = m[i][col] / m[row][col];
      for (std::size_t j = col; j < cols; ++j) m[i][j] -= f * m[row][j];
    }
    ++row;
    ++rank;
  }
  return rank;
}

std::optional<RationalVector> kernel_direction(const RationalMatrix& m) {
  if (m.empty()) return std::nullopt;
  const std::size_t cols = m[0].size();
  RationalMatrix a = m;
  std::vector<std::size_t> pivot_col;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < a.size(); ++col) {
    std::size_t p = row;
    while (p < a.size() && a[p][col].is_zero()) ++p;
    if (p == a.size()) continue;
    std::swap(a[row], a[p]);
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (i == row || a[i][col].is_zero()) continue;
      const Rational f = a[i][col] / a[row][col];
      for (std::size_t j = col; j < cols; ++j) a[i][j] -= f * a[row][j];
    }
    pivot_col.push_back(col);
    ++row;
  }
  if (pivot_col.size() != cols - 1) return std::nullopt;
  // Free column is the one not used as a pivot.
  std::vector<bool> is_pivot(cols, false);
  for (auto c : pivot_col) is_pivot[c] = true;
  std::size_t free_col = cols;
  for (std::size_t c = 0; c < cols; ++c) {
    if (!is_pivot[c]) {
      free_col = c;
      break;
    }
  }
  RationalVector dir(cols, Rational(0));
  dir[free_col] = Rational(1);
  for (std::size_t r = 0; r < pivot_col.size(); ++r) {
    dir[pivot_col[r]] = -a[r][free_col] / a[r][pivot_col[r]];
  }
  // Clear denominators so callers can reason over integers.
  long long lcm = 1;
  for (const auto& c : dir) {
    const long long d = c.den();
    lcm = lcm / std::gcd(lcm, d) * d;
  }
  for (auto& c : dir) c *= Rational(lcm);
  return dir;
}

}  // namespace tq

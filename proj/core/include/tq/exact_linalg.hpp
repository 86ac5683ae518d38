#ifndef TQ_EXACT_LINALG_HPP
#define TQ_EXACT_LINALG_HPP

#include <optional>
#include <vector>

#include "tq/rational.hpp"

namespace tq {

using IntVector = std::vector<long long>;
using IntMatrix = std::vector<IntVector>;  // row major
using RationalMatrix = std::vector<RationalVector>;

// Exact determinant by fraction-free (Bareiss) elimination; 128-bit intermediates.
long long integer_determinant(const IntMatrix& m);

// Inverse of an integer matrix with |det| = 1; the inverse is again integral.
IntMatrix unimodular_inverse(const IntMatrix& m);

IntVector mat_vec(const IntMatrix& m, const IntVector& v);
long long dot(const IntVector& a, const IntVector& b);

// Solves A x = b exactly; nullopt when A is singular.
std::optional<RationalVector> solve_rational(RationalMatrix a, RationalVector b);

int rational_rank(RationalMatrix m);

// One-dimensional kernel direction of a rank n-1 matrix (rows are vectors in
// dimension n); nullopt if the rank is not n-1. Scaled to integer entries.
std::optional<RationalVector> kernel_direction(const RationalMatrix& m);

}  // namespace tq

#endif

#ifndef TQ_POLYNOMIAL_HPP
#define TQ_POLYNOMIAL_HPP

#include <Eigen/Core>
#include <vector>

#include "tq/rational.hpp"

namespace tq {

// Sparse multivariate polynomial with exact rational coefficients.
// Terms are kept sorted lexicographically by exponent and deduplicated, so two
// polynomials built from the same terms compare and print identically.
class Polynomial {
 public:
  struct Term {
    std::vector<int> exponents;
    Rational coefficient;
  };

  Polynomial() = default;
  explicit Polynomial(int dimension) : dimension_(dimension) {}

  static Polynomial zero(int dimension) { return Polynomial(dimension); }
  static Polynomial constant(int dimension, const Rational& value);
  // 1/2 |x - center|^2, the default strictly convex deformation direction.
  static Polynomial half_square_distance(const RationalVector& center);

  void add_term(std::vector<int> exponents, const Rational& coefficient);

  double operator()(const Eigen::VectorXd& x) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const;

  int dimension() const { return dimension_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;
  const std::vector<Term>& terms() const { return terms_; }

  Polynomial operator+(const Polynomial& other) const;
  Polynomial scaled(const Rational& factor) const;

 private:
  int dimension_ = 0;
  std::vector<Term> terms_;
};

}  // namespace tq

#endif

#include "tq/polynomial.hpp"

#include <algorithm>
#include <cmath>

#include "tq/errors.hpp"

namespace tq {

namespace {

bool exp_less(const std::vector<int>& a, const std::vector<int>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

double int_pow(double base, int e) {
  double acc = 1.0;
  for (int i = 0; i < e; ++i) acc *= base;
  return acc;
}

}  // namespace

Polynomial Polynomial::constant(int dimension, const Rational& value) {
  Polynomial p(dimension);
  p.add_term(std::vector<int>(dimension, 0), value);
  return p;
}

Polynomial Polynomial::half_square_distance(const RationalVector& center) {
  const int n = static_cast<int>(center.size());
  Polynomial p(n);
  for (int i = 0; i < n; ++i) {
    std::vector<int> sq(n, 0);
    sq[i] = 2;
    p.add_term(sq, Rational::half());
    std::vector<int> lin(n, 0);
    lin[i] = 1;
    p.add_term(lin, -center[i]);
    p.add_term(std::vector<int>(n, 0), Rational::half() * center[i] * center[i]);
  }
  return p;
}

void Polynomial::add_term(std::vector<int> exponents, const Rational& coefficient) {
  if (static_cast<int>(exponents.size()) != dimension_) {
    fail(errc::malformed_input, "polynomial term exponent arity mismatch");
  }
  for (int e : exponents) {
    if (e < 0) fail(errc::malformed_input, "negative exponent in polynomial term");
  }
  if (coefficient.is_zero()) return;
  auto it = std::lower_bound(terms_.begin(), terms_.end(), exponents,
                             [](const Term& t, const std::vector<int>& e) {
                               return exp_less(t.exponents, e);
                             });
  if (it != terms_.end() && it->exponents == exponents) {
    it->coefficient += coefficient;
    if (it->coefficient.is_zero()) terms_.erase(it);
    return;
  }
  terms_.insert(it, Term{std::move(exponents), coefficient});
}

double Polynomial::operator()(const Eigen::VectorXd& x) const {
  double acc = 0.0;
  for (const Term& t : terms_) {
    double m = t.coefficient.to_double();
    for (int i = 0; i < dimension_; ++i) m *= int_pow(x[i], t.exponents[i]);
    acc += m;
  }
  return acc;
}

Eigen::VectorXd Polynomial::gradient(const Eigen::VectorXd& x) const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(dimension_);
  for (const Term& t : terms_) {
    for (int k = 0; k < dimension_; ++k) {
      const int ek = t.exponents[k];
      if (ek == 0) continue;
      double m = t.coefficient.to_double() * ek;
      for (int i = 0; i < dimension_; ++i) {
        m *= int_pow(x[i], i == k ? t.exponents[i] - 1 : t.exponents[i]);
      }
      g[k] += m;
    }
  }
  return g;
}

Eigen::MatrixXd Polynomial::hessian(const Eigen::VectorXd& x) const {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dimension_, dimension_);
  for (const Term& t : terms_) {
    for (int k = 0; k < dimension_; ++k) {
      for (int l = 0; l < dimension_; ++l) {
        const int ek = t.exponents[k];
        const int el = t.exponents[l];
        double factor;
        if (k == l) {
          if (ek < 2) continue;
          factor = static_cast<double>(ek) * (ek - 1);
        } else {
          if (ek == 0 || el == 0) continue;
          factor = static_cast<double>(ek) * el;
        }
        double m = t.coefficient.to_double() * factor;
        for (int i = 0; i < dimension_; ++i) {
          int e = t.exponents[i];
          if (i == k) e -= 1;
          if (i == l) e -= 1;
          m *= int_pow(x[i], e);
        }
        h(k, l) += m;
      }
    }
  }
  return h;
}

int Polynomial::degree() const {
  int d = 0;
  for (const Term& t : terms_) {
    int s = 0;
    for (int e : t.exponents) s += e;
    d = std::max(d, s);
  }
  return d;
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
  if (dimension_ != other.dimension_) {
    fail(errc::malformed_input, "adding polynomials of different arity");
  }
  Polynomial out = *this;
  for (const Term& t : other.terms_) out.add_term(t.exponents, t.coefficient);
  return out;
}

Polynomial Polynomial::scaled(const Rational& factor) const {
  Polynomial out(dimension_);
  if (factor.is_zero()) return out;
  for (const Term& t : terms_) out.add_term(t.exponents, t.coefficient * factor);
  return out;
}

}  // namespace tq

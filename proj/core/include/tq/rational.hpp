#ifndef TQ_RATIONAL_HPP
#define TQ_RATIONAL_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace tq {

// Exact rational over int64 with gcd-normalized state (den > 0, gcd(|num|,den) = 1).
// Intermediate products run through 128-bit integers; results that do not fit
// back into int64 throw. Polytope data at desk scale stays far below that.
class Rational {
 public:
  Rational() = default;
  Rational(long long value) : num_(value), den_(1) {}  // NOLINT: implicit by design
  Rational(long long num, long long den);

  static Rational half() { return Rational(1, 2); }
  // Accepts "p", "-p", "p/q" with optional sign on p.
  static Rational parse(const std::string& text);

  long long num() const { return num_; }
  long long den() const { return den_; }
  bool is_integer() const { return den_ == 1; }
  bool is_zero() const { return num_ == 0; }
  long long floor() const;
  long long ceil() const;

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string str() const;

  Rational operator-() const;
  Rational& operator+=(const Rational& o);
  Rational& operator-=(const Rational& o);
  Rational& operator*=(const Rational& o);
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b);
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

  int sign() const { return num_ > 0 ? 1 : (num_ < 0 ? -1 : 0); }

 private:
  long long num_ = 0;
  long long den_ = 1;
};

using RationalVector = std::vector<Rational>;

bool lex_less(const RationalVector& a, const RationalVector& b);
std::string to_string(const RationalVector& v, char sep = ',');

}  // namespace tq

#endif

#include "tq/rational.hpp"

#include <cctype>
#include <cstdlib>
#include <limits>
#include <numeric>

#include "tq/errors.hpp"

namespace tq {

namespace {

using int128 = __int128;

long long narrow(int128 v, const char* what) {
  if (v > std::numeric_limits<long long>::max() || v < std::numeric_limits<long long>::min()) {
    fail(errc::malformed_input, std::string("rational overflow in ") + what);
  }
  return static_cast<long long>(v);
}

int128 gcd128(int128 a, int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace

Rational::Rational(long long num, long long den) {
  if (den == 0) fail(errc::malformed_input, "rational with zero denominator");
  int128 n = num, d = den;
  if (d < 0) {
    n = -n;
    d = -d;
  }
  int128 g = gcd128(n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  num_ = narrow(n, "constructor");
  den_ = narrow(d, "constructor");
}

Rational Rational::parse(const std::string& text) {
  if (text.empty()) fail(errc::malformed_input, "empty rational literal");
  auto slash = text.find('/');
  auto parse_ll = [&](const std::string& part) -> long long {
    if (part.empty()) fail(errc::malformed_input, "bad rational literal '" + text + "'");
    std::size_t i = (part[0] == '+' || part[0] == '-') ? 1 : 0;
    if (i == part.size()) fail(errc::malformed_input, "bad rational literal '" + text + "'");
    for (; i < part.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(part[i]))) {
        fail(errc::malformed_input, "bad rational literal '" + text + "'");
      }
    }
    errno = 0;
    char* end = nullptr;
    long long v = std::strtoll(part.c_str(), &end, 10);
    if (errno != 0 || end == nullptr || *end != '\0') {
      fail(errc::malformed_input, "bad rational literal '" + text + "'");
    }
    return v;
  };
  if (slash == std::string::npos) return Rational(parse_ll(text));
  return Rational(parse_ll(text.substr(0, slash)), parse_ll(text.substr(slash + 1)));
}

long long Rational::floor() const {
  long long q = num_ / den_;
  if (num_ % den_ != 0 && num_ < 0) --q;
  return q;
}

long long Rational::ceil() const {
  long long q = num_ / den_;
  if (num_ % den_ != 0 && num_ > 0) ++q;
  return q;
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::operator-() const {
  Rational r;
  r.num_ = narrow(-static_cast<int128>(num_), "negation");
  r.den_ = den_;
  return r;
}

Rational& Rational::operator+=(const Rational& o) {
  int128 n = static_cast<int128>(num_) * o.den_ + static_cast<int128>(o.num_) * den_;
  int128 d = static_cast<int128>(den_) * o.den_;
  int128 g = gcd128(n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  num_ = narrow(n, "addition");
  den_ = narrow(d, "addition");
  return *this;
}

Rational& Rational::operator-=(const Rational& o) { return *this += -o; }

Rational& Rational::operator*=(const Rational& o) {
  int128 n = static_cast<int128>(num_) * o.num_;
  int128 d = static_cast<int128>(den_) * o.den_;
  int128 g = gcd128(n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  num_ = narrow(n, "multiplication");
  den_ = narrow(d, "multiplication");
  return *this;
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.num_ == 0) fail(errc::malformed_input, "rational division by zero");
  int128 n = static_cast<int128>(num_) * o.den_;
  int128 d = static_cast<int128>(den_) * o.num_;
  if (d < 0) {
    n = -n;
    d = -d;
  }
  int128 g = gcd128(n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  num_ = narrow(n, "division");
  den_ = narrow(d, "division");
  return *this;
}

bool operator<(const Rational& a, const Rational& b) {
  return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
}

bool lex_less(const RationalVector& a, const RationalVector& b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] < b[i]) return true;
    if (b[i] < a[i]) return false;
  }
  return a.size() < b.size();
}

std::string to_string(const RationalVector& v, char sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += v[i].str();
  }
  return out;
}

}  // namespace tq

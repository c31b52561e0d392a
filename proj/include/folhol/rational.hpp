/// Exact rational arithmetic. Thin value wrapper around GMP's mpq_class:
/// always canonical (lowest terms, positive denominator), hashable by value,
/// and convertible to double only on request.
#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <ostream>
#include <string>

#include "folhol/errors.hpp"

namespace folhol {

class Rational {
public:
  Rational() : q_(0) {}
  Rational(long n) : q_(n) {}                  // NOLINT(google-explicit-constructor)
  Rational(int n) : q_(n) {}                   // NOLINT(google-explicit-constructor)
  Rational(long num, long den) : q_(num, den) {
    if (den == 0) throw error("Rational: zero denominator");
    q_.canonicalize();
  }
  explicit Rational(const mpq_class& q) : q_(q) { q_.canonicalize(); }

  /// Parses "a", "-a" or "a/b" with arbitrary-precision digits.
  static Rational parse(const std::string& s) {
    try {
      mpq_class q(s, 10);
      if (q.get_den() == 0) throw error("Rational: zero denominator in '" + s + "'");
      q.canonicalize();
      return Rational(q);
    } catch (const std::invalid_argument&) {
      throw error("Rational: cannot parse '" + s + "'");
    }
  }

  bool is_zero() const { return q_ == 0; }
  int sign() const { return sgn(q_); }

  Rational operator-() const { return Rational(mpq_class(-q_)); }
  Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
  Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
  Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw error("Rational: division by zero");
    q_ /= o.q_;
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) { return a.q_ == b.q_; }
  friend bool operator!=(const Rational& a, const Rational& b) { return a.q_ != b.q_; }
  friend bool operator<(const Rational& a, const Rational& b) { return a.q_ < b.q_; }
  friend bool operator<=(const Rational& a, const Rational& b) { return a.q_ <= b.q_; }
  friend bool operator>(const Rational& a, const Rational& b) { return a.q_ > b.q_; }
  friend bool operator>=(const Rational& a, const Rational& b) { return a.q_ >= b.q_; }

  Rational abs() const { return q_ < 0 ? -*this : *this; }
  Rational inverse() const {
    if (is_zero()) throw error("Rational: inverse of zero");
    return Rational(mpq_class(1) / q_);
  }

  double to_double() const { return q_.get_d(); }

  std::string numerator_string() const { return q_.get_num().get_str(); }
  std::string denominator_string() const { return q_.get_den().get_str(); }

  /// "n" when the denominator is 1, otherwise "n/d".
  std::string str() const {
    if (q_.get_den() == 1) return q_.get_num().get_str();
    return q_.get_num().get_str() + "/" + q_.get_den().get_str();
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

private:
  mpq_class q_;
};

} // namespace folhol

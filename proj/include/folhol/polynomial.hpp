/// Sparse multivariate polynomials over the rationals.
///
/// Monomials are exponent vectors of fixed length (the variable count of the
/// ambient ring); the term map never stores zero coefficients. The monomial
/// order used throughout is graded reverse lexicographic.
#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "folhol/rational.hpp"

namespace folhol {

using Exponents = std::vector<unsigned>;

inline unsigned total_degree(const Exponents& e) {
  return std::accumulate(e.begin(), e.end(), 0u);
}

/// a < b in graded reverse lexicographic order: compare total degree first;
/// on ties the monomial whose last nonzero entry of a-b is positive is the
/// smaller one.
inline bool grevlex_less(const Exponents& a, const Exponents& b) {
  unsigned da = total_degree(a), db = total_degree(b);
  if (da != db) return da < db;
  for (size_t i = a.size(); i-- > 0;) {
    if (a[i] != b[i]) return a[i] > b[i];
  }
  return false;
}

struct GrevlexLess {
  bool operator()(const Exponents& a, const Exponents& b) const { return grevlex_less(a, b); }
};

inline bool monomial_divides(const Exponents& a, const Exponents& b) {
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

inline Exponents monomial_quotient(const Exponents& a, const Exponents& b) {
  Exponents q(a.size());
  for (size_t i = 0; i < a.size(); ++i) q[i] = a[i] - b[i];
  return q;
}

inline Exponents monomial_lcm(const Exponents& a, const Exponents& b) {
  Exponents l(a.size());
  for (size_t i = 0; i < a.size(); ++i) l[i] = std::max(a[i], b[i]);
  return l;
}

inline Exponents monomial_product(const Exponents& a, const Exponents& b) {
  Exponents p(a.size());
  for (size_t i = 0; i < a.size(); ++i) p[i] = a[i] + b[i];
  return p;
}

class Poly {
public:
  using TermMap = std::map<Exponents, Rational, GrevlexLess>;

  Poly() : num_vars_(0) {}
  explicit Poly(unsigned num_vars) : num_vars_(num_vars) {}

  static Poly constant(unsigned num_vars, const Rational& c) {
    Poly p(num_vars);
    if (!c.is_zero()) p.terms_.emplace(Exponents(num_vars, 0), c);
    return p;
  }

  static Poly variable(unsigned num_vars, unsigned index, unsigned power = 1) {
    if (index >= num_vars) throw dimension_error("Poly: variable index out of range");
    Poly p(num_vars);
    Exponents e(num_vars, 0);
    e[index] = power;
    p.terms_.emplace(std::move(e), Rational(1));
    return p;
  }

  static Poly monomial(unsigned num_vars, Exponents e, const Rational& c) {
    if (e.size() != num_vars) throw dimension_error("Poly: exponent length mismatch");
    Poly p(num_vars);
    if (!c.is_zero()) p.terms_.emplace(std::move(e), c);
    return p;
  }

  unsigned num_vars() const { return num_vars_; }
  bool is_zero() const { return terms_.empty(); }
  const TermMap& terms() const { return terms_; }

  unsigned degree() const {
    unsigned d = 0;
    for (const auto& [e, c] : terms_) d = std::max(d, total_degree(e));
    return d;
  }

  /// Leading term in grevlex order; polynomial must be nonzero.
  const std::pair<const Exponents, Rational>& leading_term() const {
    if (is_zero()) throw error("Poly: leading term of zero");
    return *terms_.rbegin();
  }

  void add_term(const Exponents& e, const Rational& c) {
    if (e.size() != num_vars_) throw dimension_error("Poly: exponent length mismatch");
    if (c.is_zero()) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
      terms_.emplace(e, c);
    } else {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  Poly& operator+=(const Poly& o) {
    check_vars(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  Poly& operator-=(const Poly& o) {
    check_vars(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }
  Poly operator-() const {
    Poly r(num_vars_);
    for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
    return r;
  }

  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }

  friend Poly operator*(const Poly& a, const Poly& b) {
    a.check_vars(b);
    Poly r(a.num_vars_);
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) r.add_term(monomial_product(ea, eb), ca * cb);
    return r;
  }

  friend Poly operator*(const Rational& c, const Poly& p) {
    Poly r(p.num_vars_);
    if (c.is_zero()) return r;
    for (const auto& [e, pc] : p.terms_) r.terms_.emplace(e, c * pc);
    return r;
  }

  /// Multiply by the monomial c*x^e.
  Poly shifted(const Exponents& e, const Rational& c) const {
    Poly r(num_vars_);
    if (c.is_zero()) return r;
    for (const auto& [me, mc] : terms_) r.terms_.emplace(monomial_product(me, e), c * mc);
    return r;
  }

  friend bool operator==(const Poly& a, const Poly& b) {
    return a.num_vars_ == b.num_vars_ && a.terms_ == b.terms_;
  }
  friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

  Poly partial_derivative(unsigned var) const {
    if (var >= num_vars_) throw dimension_error("Poly: derivative variable out of range");
    Poly r(num_vars_);
    for (const auto& [e, c] : terms_) {
      if (e[var] == 0) continue;
      Exponents d = e;
      d[var] -= 1;
      r.add_term(d, Rational(static_cast<long>(e[var])) * c);
    }
    return r;
  }

  Rational evaluate(const std::vector<Rational>& point) const {
    if (point.size() != num_vars_) throw dimension_error("Poly: evaluation point dimension mismatch");
    Rational acc(0);
    for (const auto& [e, c] : terms_) {
      Rational term = c;
      for (size_t i = 0; i < e.size(); ++i)
        for (unsigned k = 0; k < e[i]; ++k) term *= point[i];
      acc += term;
    }
    return acc;
  }

  double evaluate(const std::vector<double>& point) const {
    if (point.size() != num_vars_) throw dimension_error("Poly: evaluation point dimension mismatch");
    double acc = 0.0;
    for (const auto& [e, c] : terms_) {
      double term = c.to_double();
      for (size_t i = 0; i < e.size(); ++i)
        for (unsigned k = 0; k < e[i]; ++k) term *= point[i];
      acc += term;
    }
    return acc;
  }

  /// Substitutes fixed values for a subset of variables and re-expresses the
  /// result in the remaining variables, in their original order.
  ///
  /// `fixed` maps variable index -> value; `keep` lists the surviving indices.
  Poly substitute(const std::map<unsigned, Rational>& fixed, const std::vector<unsigned>& keep) const {
    Poly r(static_cast<unsigned>(keep.size()));
    for (const auto& [e, c] : terms_) {
      Rational coeff = c;
      Exponents ne(keep.size(), 0);
      bool dead = false;
      for (size_t i = 0; i < e.size() && !dead; ++i) {
        if (e[i] == 0) continue;
        auto it = fixed.find(static_cast<unsigned>(i));
        if (it != fixed.end()) {
          for (unsigned k = 0; k < e[i]; ++k) coeff *= it->second;
          if (coeff.is_zero()) dead = true;
        } else {
          auto pos = std::find(keep.begin(), keep.end(), static_cast<unsigned>(i));
          if (pos == keep.end()) throw error("Poly: variable neither fixed nor kept");
          ne[static_cast<size_t>(pos - keep.begin())] = e[i];
        }
      }
      if (!dead) r.add_term(ne, coeff);
    }
    return r;
  }

  std::string str(const std::vector<std::string>& var_names) const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    // Print from the leading term down.
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      const auto& [e, c] = *it;
      Rational a = c;
      if (first) {
        if (a.sign() < 0) { os << "-"; a = -a; }
      } else {
        os << (a.sign() < 0 ? " - " : " + ");
        a = a.abs();
      }
      std::string mono;
      for (size_t i = 0; i < e.size(); ++i) {
        if (e[i] == 0) continue;
        if (!mono.empty()) mono += "*";
        mono += var_names.at(i);
        if (e[i] > 1) mono += "^" + std::to_string(e[i]);
      }
      if (mono.empty()) {
        os << a.str();
      } else if (a == Rational(1)) {
        os << mono;
      } else {
        os << a.str() << "*" << mono;
      }
      first = false;
    }
    return os.str();
  }

private:
  void check_vars(const Poly& o) const {
    if (num_vars_ != o.num_vars_) throw dimension_error("Poly: variable count mismatch");
  }

  unsigned num_vars_;
  TermMap terms_;
};

} // namespace folhol

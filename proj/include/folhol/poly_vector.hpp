/// Elements of free modules over the polynomial ring: a PolyVector is one
/// polynomial per ambient coordinate. Doubles as a polynomial vector field
/// (component i is the coefficient of d/dx_i) and as a module element for the
/// Groebner machinery.
#pragma once

#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "folhol/polynomial.hpp"

namespace folhol {

/// Monomial in a free module: a ring monomial sitting in one component.
struct ModuleTerm {
  unsigned component = 0;
  Exponents monomial;
  Rational coeff;
};

/// Term-over-position order: grevlex on the ring monomials first, ties broken
/// by preferring the lower component index.
inline bool module_term_less(unsigned comp_a, const Exponents& mono_a,
                             unsigned comp_b, const Exponents& mono_b) {
  if (grevlex_less(mono_a, mono_b)) return true;
  if (grevlex_less(mono_b, mono_a)) return false;
  return comp_a > comp_b;
}

class PolyVector {
public:
  PolyVector() = default;
  PolyVector(unsigned dim, unsigned num_vars)
      : components_(dim, Poly(num_vars)) {
    if (dim == 0) throw dimension_error("PolyVector: dim must be >= 1");
  }
  explicit PolyVector(std::vector<Poly> components) : components_(std::move(components)) {
    if (components_.empty()) throw dimension_error("PolyVector: dim must be >= 1");
    for (const auto& p : components_)
      if (p.num_vars() != components_[0].num_vars())
        throw dimension_error("PolyVector: components disagree on variable count");
  }

  unsigned dim() const { return static_cast<unsigned>(components_.size()); }
  unsigned num_vars() const { return components_[0].num_vars(); }

  const Poly& operator[](unsigned i) const { return components_.at(i); }
  Poly& operator[](unsigned i) { return components_.at(i); }
  const std::vector<Poly>& components() const { return components_; }

  bool is_zero() const {
    for (const auto& p : components_)
      if (!p.is_zero()) return false;
    return true;
  }

  unsigned degree() const {
    unsigned d = 0;
    for (const auto& p : components_)
      if (!p.is_zero()) d = std::max(d, p.degree());
    return d;
  }

  PolyVector& operator+=(const PolyVector& o) {
    check(o);
    for (unsigned i = 0; i < dim(); ++i) components_[i] += o.components_[i];
    return *this;
  }
  PolyVector& operator-=(const PolyVector& o) {
    check(o);
    for (unsigned i = 0; i < dim(); ++i) components_[i] -= o.components_[i];
    return *this;
  }
  friend PolyVector operator+(PolyVector a, const PolyVector& b) { return a += b; }
  friend PolyVector operator-(PolyVector a, const PolyVector& b) { return a -= b; }
  PolyVector operator-() const {
    PolyVector r = *this;
    for (auto& p : r.components_) p = -p;
    return r;
  }

  friend PolyVector operator*(const Poly& f, const PolyVector& v) {
    PolyVector r = v;
    for (auto& p : r.components_) p = f * p;
    return r;
  }
  friend PolyVector operator*(const Rational& c, const PolyVector& v) {
    PolyVector r = v;
    for (auto& p : r.components_) p = c * p;
    return r;
  }

  friend bool operator==(const PolyVector& a, const PolyVector& b) {
    return a.components_ == b.components_;
  }
  friend bool operator!=(const PolyVector& a, const PolyVector& b) { return !(a == b); }

  /// Largest term across all components in the term-over-position order.
  std::optional<ModuleTerm> leading_module_term() const {
    std::optional<ModuleTerm> best;
    for (unsigned i = 0; i < dim(); ++i) {
      if (components_[i].is_zero()) continue;
      const auto& lt = components_[i].leading_term();
      if (!best || module_term_less(best->component, best->monomial, i, lt.first)) {
        best = ModuleTerm{i, lt.first, lt.second};
      }
    }
    return best;
  }

  std::vector<Rational> evaluate(const std::vector<Rational>& point) const {
    std::vector<Rational> r;
    r.reserve(dim());
    for (const auto& p : components_) r.push_back(p.evaluate(point));
    return r;
  }

  std::vector<double> evaluate(const std::vector<double>& point) const {
    std::vector<double> r;
    r.reserve(dim());
    for (const auto& p : components_) r.push_back(p.evaluate(point));
    return r;
  }

  std::string str(const std::vector<std::string>& var_names,
                  const std::vector<std::string>& basis_names) const {
    std::ostringstream os;
    bool any = false;
    for (unsigned i = 0; i < dim(); ++i) {
      if (components_[i].is_zero()) continue;
      if (any) os << " + ";
      os << "(" << components_[i].str(var_names) << ")*" << basis_names.at(i);
      any = true;
    }
    if (!any) os << "0";
    return os.str();
  }

private:
  void check(const PolyVector& o) const {
    if (dim() != o.dim() || num_vars() != o.num_vars())
      throw dimension_error("PolyVector: dimension mismatch");
  }

  std::vector<Poly> components_;
};

/// Canonical text form used as a cache key; stable across runs.
inline std::string cache_key(const PolyVector& v) {
  std::ostringstream os;
  for (unsigned i = 0; i < v.dim(); ++i) {
    os << "|";
    for (const auto& [e, c] : v[i].terms()) {
      os << c.str() << ":";
      for (unsigned x : e) os << x << ",";
      os << ";";
    }
  }
  return os.str();
}

} // namespace folhol

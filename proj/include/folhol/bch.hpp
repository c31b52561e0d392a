/// Truncated Baker-Campbell-Hausdorff products in a finite-dimensional Lie
/// algebra given by structure constants, via Dynkin's expansion
///
///   log(e^X e^Y) = sum_{n>=1} (-1)^{n-1}/n
///       sum_{(r_i,s_i) != (0,0)} [X^{r_1} Y^{s_1} ... X^{r_n} Y^{s_n}]
///           / ( (sum_i r_i + s_i) * prod_i r_i! s_i! )
///
/// where the bracket monomial is the right-nested commutator of the word.
/// All arithmetic is exact; the series is exact (not just truncated) when the
/// algebra is nilpotent of class at most the truncation order.
#pragma once

#include "folhol/pointwise.hpp"

namespace folhol {

struct BchResult {
  RatVector coefficients;
  /// True when nilpotency guarantees the series terminated within the order.
  bool exact = false;
};

namespace detail {

inline Rational factorial(unsigned n) {
  Rational r(1);
  for (unsigned i = 2; i <= n; ++i) r *= Rational(static_cast<long>(i));
  return r;
}

/// Right-nested bracket of a word over {X, Y}: [w_1,[w_2,[...,w_m]...]].
inline RatVector nested_bracket(const LieAlgebraPresentation& lp, const std::vector<bool>& word,
                                const RatVector& x, const RatVector& y) {
  RatVector acc = word.back() ? y : x;
  for (size_t i = word.size() - 1; i-- > 0;) {
    acc = lp.bracket(word[i] ? y : x, acc);
  }
  return acc;
}

} // namespace detail

/// BCH product of v1 and v2 (coefficient vectors in the presentation basis),
/// truncated at bracket-word length `order`.
inline BchResult bch(const LieAlgebraPresentation& lp, const RatVector& v1, const RatVector& v2,
                     unsigned order = 8) {
  if (order < 1) throw error("bch: order must be >= 1");
  const unsigned n = lp.dim();
  if (v1.size() != n || v2.size() != n) throw dimension_error("bch: coefficient length mismatch");

  BchResult out;
  out.coefficients.assign(n, Rational(0));

  unsigned effective_order = order;
  if (auto cls = nilpotency_class(lp); cls && *cls <= order) {
    effective_order = *cls;
    out.exact = true;
  }
  if (lp.is_abelian()) {
    for (unsigned i = 0; i < n; ++i) out.coefficients[i] = v1[i] + v2[i];
    out.exact = true;
    return out;
  }

  // Enumerate block sequences ((r_1,s_1),...) with total weight <= order.
  std::vector<std::pair<unsigned, unsigned>> blocks;
  std::function<void(unsigned)> recurse = [&](unsigned weight_left) {
    if (!blocks.empty()) {
      const unsigned nblocks = static_cast<unsigned>(blocks.size());
      unsigned total = effective_order - weight_left;
      std::vector<bool> word;
      Rational denom = Rational(static_cast<long>(total));
      for (const auto& [r, s] : blocks) {
        for (unsigned i = 0; i < r; ++i) word.push_back(false);
        for (unsigned i = 0; i < s; ++i) word.push_back(true);
        denom *= detail::factorial(r) * detail::factorial(s);
      }
      // Words ending in a repeated letter vanish inside the nested bracket.
      bool trivially_zero =
          word.size() >= 2 && word[word.size() - 1] == word[word.size() - 2];
      if (!trivially_zero) {
        Rational coeff = Rational(nblocks % 2 == 1 ? 1 : -1) / (Rational(static_cast<long>(nblocks)) * denom);
        RatVector term = detail::nested_bracket(lp, word, v1, v2);
        for (unsigned i = 0; i < n; ++i) out.coefficients[i] += coeff * term[i];
      }
    }
    for (unsigned w = 1; w <= weight_left; ++w) {
      for (unsigned r = 0; r <= w; ++r) {
        blocks.emplace_back(r, w - r);
        recurse(weight_left - w);
        blocks.pop_back();
      }
    }
  };
  recurse(effective_order);
  return out;
}

/// Convenience overload on double coefficients; doubles convert to rationals
/// exactly, so this shares the exact code path.
inline std::vector<double> bch(const LieAlgebraPresentation& lp, const std::vector<double>& v1,
                               const std::vector<double>& v2, unsigned order = 8) {
  RatVector r1, r2;
  for (double v : v1) r1.push_back(Rational(mpq_class(v)));
  for (double v : v2) r2.push_back(Rational(mpq_class(v)));
  BchResult res = bch(lp, r1, r2, order);
  std::vector<double> out;
  for (const auto& c : res.coefficients) out.push_back(c.to_double());
  return out;
}

} // namespace folhol

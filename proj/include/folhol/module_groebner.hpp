/// Buchberger's algorithm for submodules of free modules over Q[x_1..x_d],
/// with the term-over-position order built on grevlex. Provides decidable
/// membership through normal forms, which are unique against the reduced
/// basis computed here.
#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "folhol/poly_vector.hpp"
#include "folhol/rational_linalg.hpp"

namespace folhol {

/// The one monomial order used by the toolkit: graded reverse lexicographic
/// on ring monomials, term-over-position across components, lower component
/// index winning ties.
inline constexpr const char* module_order_tag = "grevlex-top";

struct ModuleGB {
  unsigned ambient_rank = 0;
  unsigned num_vars = 0;
  const char* order = module_order_tag;
  std::vector<PolyVector> basis;       // reduced, monic, sorted by decreasing leading term
  std::vector<PolyVector> provenance;  // the generators the basis was computed from

  bool empty() const { return basis.empty(); }
};

namespace detail {

inline bool module_lt_divides(const ModuleTerm& divisor, const ModuleTerm& term) {
  return divisor.component == term.component && monomial_divides(divisor.monomial, term.monomial);
}

} // namespace detail

struct NormalFormResult {
  PolyVector remainder;
  /// Quotients over gb.basis: remainder = v - sum_i quotients[i] * basis[i].
  std::vector<Poly> quotients;
};

/// Full division by the basis: every term of the remainder is reducible by no
/// basis leading term. Terminates because the working leading term strictly
/// decreases in the (well-founded) module order.
inline NormalFormResult normal_form_with_quotients(const PolyVector& v, const ModuleGB& gb) {
  if (v.dim() != gb.ambient_rank)
    throw dimension_error("normal_form: ambient rank mismatch");
  NormalFormResult out;
  out.remainder = PolyVector(v.dim(), v.num_vars());
  out.quotients.assign(gb.basis.size(), Poly(v.num_vars()));
  PolyVector work = v;
  while (true) {
    auto lt = work.leading_module_term();
    if (!lt) break;
    bool reduced = false;
    for (size_t i = 0; i < gb.basis.size(); ++i) {
      auto blt = gb.basis[i].leading_module_term();
      if (!blt || !detail::module_lt_divides(*blt, *lt)) continue;
      Exponents q = monomial_quotient(lt->monomial, blt->monomial);
      Rational coeff = lt->coeff / blt->coeff;
      for (unsigned c = 0; c < work.dim(); ++c)
        work[c] -= gb.basis[i][c].shifted(q, coeff);
      out.quotients[i].add_term(q, coeff);
      reduced = true;
      break;
    }
    if (!reduced) {
      // Move the irreducible leading term to the remainder.
      out.remainder[lt->component].add_term(lt->monomial, lt->coeff);
      Poly t = Poly::monomial(work.num_vars(), lt->monomial, lt->coeff);
      work[lt->component] -= t;
    }
  }
  return out;
}

inline PolyVector normal_form(const PolyVector& v, const ModuleGB& gb) {
  return normal_form_with_quotients(v, gb).remainder;
}

inline bool is_member(const PolyVector& v, const ModuleGB& gb) {
  return normal_form(v, gb).is_zero();
}

namespace detail {

inline PolyVector make_monic(const PolyVector& v) {
  auto lt = v.leading_module_term();
  if (!lt) return v;
  return lt->coeff.inverse() * v;
}

} // namespace detail

/// Reduced Groebner basis of the submodule generated by `generators`.
/// S-pairs are formed only between elements sharing a leading component; the
/// result is auto-reduced, monic and deterministically ordered.
inline ModuleGB module_groebner(const std::vector<PolyVector>& generators) {
  if (generators.empty()) throw error("module_groebner: empty generator list");
  const unsigned rank = generators[0].dim();
  const unsigned nv = generators[0].num_vars();
  for (const auto& g : generators)
    if (g.dim() != rank || g.num_vars() != nv)
      throw dimension_error("module_groebner: generators disagree on rank or variables");

  ModuleGB gb;
  gb.ambient_rank = rank;
  gb.num_vars = nv;
  gb.provenance = generators;

  for (const auto& g : generators)
    if (!g.is_zero()) gb.basis.push_back(detail::make_monic(g));

  // Pair queue over indices into gb.basis.
  std::vector<std::pair<size_t, size_t>> pairs;
  auto queue_pairs_with = [&](size_t j) {
    for (size_t i = 0; i < j; ++i) pairs.emplace_back(i, j);
  };
  for (size_t j = 0; j < gb.basis.size(); ++j) queue_pairs_with(j);

  while (!pairs.empty()) {
    auto [i, j] = pairs.back();
    pairs.pop_back();
    auto lti = gb.basis[i].leading_module_term();
    auto ltj = gb.basis[j].leading_module_term();
    if (lti->component != ltj->component) continue;
    Exponents l = monomial_lcm(lti->monomial, ltj->monomial);
    Exponents qi = monomial_quotient(l, lti->monomial);
    Exponents qj = monomial_quotient(l, ltj->monomial);
    PolyVector s(rank, nv);
    for (unsigned c = 0; c < rank; ++c)
      s[c] = gb.basis[i][c].shifted(qi, Rational(1)) - gb.basis[j][c].shifted(qj, Rational(1));
    PolyVector r = normal_form(s, gb);
    if (!r.is_zero()) {
      gb.basis.push_back(detail::make_monic(r));
      queue_pairs_with(gb.basis.size() - 1);
    }
  }

  // Auto-reduce: drop elements whose leading term another leading term
  // divides, then reduce each survivor against the others.
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i < gb.basis.size(); ++i) {
      auto lti = gb.basis[i].leading_module_term();
      bool redundant = false;
      for (size_t j = 0; j < gb.basis.size(); ++j) {
        if (i == j) continue;
        auto ltj = gb.basis[j].leading_module_term();
        if (detail::module_lt_divides(*ltj, *lti)) { redundant = true; break; }
      }
      if (redundant) {
        gb.basis.erase(gb.basis.begin() + static_cast<long>(i));
        changed = true;
        break;
      }
    }
  }
  for (size_t i = 0; i < gb.basis.size(); ++i) {
    ModuleGB others;
    others.ambient_rank = rank;
    others.num_vars = nv;
    for (size_t j = 0; j < gb.basis.size(); ++j)
      if (j != i) others.basis.push_back(gb.basis[j]);
    gb.basis[i] = detail::make_monic(normal_form(gb.basis[i], others));
  }

  std::sort(gb.basis.begin(), gb.basis.end(), [](const PolyVector& a, const PolyVector& b) {
    auto la = a.leading_module_term();
    auto lb = b.leading_module_term();
    return module_term_less(lb->component, lb->monomial, la->component, la->monomial);
  });
  return gb;
}

/// Basis of {c in Q^m : sum_i c_i * candidates[i] lies in the submodule}.
/// Normal forms are Q-linear against a fixed reduced basis, so this is the
/// kernel of the coefficient matrix of the candidates' normal forms.
inline std::vector<RatVector> linear_relation_space(const std::vector<PolyVector>& candidates,
                                                    const ModuleGB& gb) {
  if (candidates.empty()) return {};
  std::vector<PolyVector> nfs;
  nfs.reserve(candidates.size());
  for (const auto& v : candidates) {
    if (v.dim() != gb.ambient_rank)
      throw dimension_error("linear_relation_space: ambient rank mismatch");
    nfs.push_back(normal_form(v, gb));
  }
  // Index every module monomial appearing in any normal form.
  std::map<std::pair<unsigned, Exponents>, size_t> index;
  for (const auto& nf : nfs)
    for (unsigned c = 0; c < nf.dim(); ++c)
      for (const auto& [e, coeff] : nf[c].terms())
        index.emplace(std::make_pair(c, e), index.size());
  RatMatrix a(index.size(), RatVector(candidates.size(), Rational(0)));
  for (size_t i = 0; i < nfs.size(); ++i)
    for (unsigned c = 0; c < nfs[i].dim(); ++c)
      for (const auto& [e, coeff] : nfs[i][c].terms())
        a[index.at({c, e})][i] = coeff;
  if (index.empty()) {
    // All candidates reduce to zero: the relation space is everything.
    return kernel_basis(RatMatrix(1, RatVector(candidates.size(), Rational(0))));
  }
  return kernel_basis(a);
}

} // namespace folhol

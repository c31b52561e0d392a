/// Foliations as finitely generated modules of polynomial vector fields:
/// Lie brackets, involutivity certificates, frames adapted to a point,
/// restriction to coordinate slices, and products.
#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "folhol/module_groebner.hpp"

namespace folhol {

struct Chart {
  unsigned dim = 0;
  std::vector<std::string> var_names;

  Chart() = default;
  Chart(unsigned d, std::vector<std::string> names) : dim(d), var_names(std::move(names)) {
    if (var_names.size() != dim) throw dimension_error("Chart: name count != dim");
    std::set<std::string> seen;
    for (const auto& n : var_names)
      if (!seen.insert(n).second) throw error("Chart: duplicate variable name '" + n + "'");
  }

  unsigned index_of(const std::string& name) const {
    for (unsigned i = 0; i < dim; ++i)
      if (var_names[i] == name) return i;
    throw error("Chart: unknown variable '" + name + "'");
  }
};

class Foliation {
public:
  Foliation(Chart chart, std::vector<PolyVector> generators)
      : chart_(std::move(chart)), generators_(std::move(generators)) {
    if (generators_.empty()) throw error("Foliation: generator list must be nonempty");
    for (const auto& g : generators_)
      if (g.dim() != chart_.dim || g.num_vars() != chart_.dim)
        throw dimension_error("Foliation: generator does not match chart dimension");
  }

  const Chart& chart() const { return chart_; }
  unsigned dim() const { return chart_.dim; }
  const std::vector<PolyVector>& generators() const { return generators_; }
  unsigned num_generators() const { return static_cast<unsigned>(generators_.size()); }

private:
  Chart chart_;
  std::vector<PolyVector> generators_;
};

/// [X, Y]_i = sum_j (X_j dY_i/dx_j - Y_j dX_i/dx_j), exact.
inline PolyVector lie_bracket(const PolyVector& x, const PolyVector& y) {
  if (x.dim() != y.dim() || x.num_vars() != y.num_vars())
    throw dimension_error("lie_bracket: dimension mismatch");
  PolyVector r(x.dim(), x.num_vars());
  for (unsigned i = 0; i < x.dim(); ++i) {
    Poly acc(x.num_vars());
    for (unsigned j = 0; j < x.dim(); ++j) {
      acc += x[j] * y[i].partial_derivative(j);
      acc -= y[j] * x[i].partial_derivative(j);
    }
    r[i] = acc;
  }
  return r;
}

/// Membership certificate for one bracket: quotients over the reduced basis,
/// i.e. bracket = sum_k quotients[k] * basis[k], checkable exactly.
struct BracketWitness {
  unsigned i = 0, j = 0;
  PolyVector bracket;
  std::vector<Poly> quotients;
};

struct Involutive {
  std::vector<BracketWitness> witnesses;
  ModuleGB module_gb;
};

/// Polynomial-module membership failed for one pair. This is only a failure
/// of the sufficient certificate, not a proof of non-involutivity over C-inf.
struct InvolutivityUnknown {
  unsigned i = 0, j = 0;
  PolyVector bracket;
  PolyVector residue;
};

using InvolutivityResult = std::variant<Involutive, InvolutivityUnknown>;

inline InvolutivityResult involutivity_check(const Foliation& f) {
  ModuleGB gb = module_groebner(f.generators());
  Involutive ok;
  for (unsigned i = 0; i < f.num_generators(); ++i) {
    for (unsigned j = i + 1; j < f.num_generators(); ++j) {
      PolyVector b = lie_bracket(f.generators()[i], f.generators()[j]);
      NormalFormResult nf = normal_form_with_quotients(b, gb);
      if (!nf.remainder.is_zero()) {
        return InvolutivityUnknown{i, j, std::move(b), std::move(nf.remainder)};
      }
      ok.witnesses.push_back(BracketWitness{i, j, std::move(b), std::move(nf.quotients)});
    }
  }
  ok.module_gb = std::move(gb);
  return ok;
}

/// Rational recombination of the generators adapted to a point: the first k
/// recombined generators have linearly independent values at x, the rest
/// vanish at x. change_of_basis * original generators = recombined ones.
struct AdaptedFrame {
  std::vector<Rational> base_point;
  std::vector<PolyVector> leaf_generators;
  std::vector<PolyVector> tail_generators;
  RatMatrix change_of_basis;
};

inline AdaptedFrame adapted_frame(const Foliation& f, const std::vector<Rational>& x) {
  if (x.size() != f.dim()) throw dimension_error("adapted_frame: point dimension mismatch");
  const unsigned n = f.num_generators();
  const unsigned d = f.dim();
  // Rows of ev are the generator values at x; eliminate with leftmost pivots.
  RatMatrix ev(n);
  for (unsigned i = 0; i < n; ++i) ev[i] = f.generators()[i].evaluate(x);
  RatMatrix c = identity_matrix(n);
  std::vector<bool> used(n, false);
  std::vector<unsigned> pivot_rows;
  for (unsigned col = 0; col < d; ++col) {
    unsigned piv = n;
    for (unsigned i = 0; i < n; ++i) {
      if (!used[i] && !ev[i][col].is_zero()) { piv = i; break; }
    }
    if (piv == n) continue;
    used[piv] = true;
    pivot_rows.push_back(piv);
    for (unsigned i = 0; i < n; ++i) {
      if (i == piv || ev[i][col].is_zero()) continue;
      Rational factor = ev[i][col] / ev[piv][col];
      for (unsigned j = 0; j < d; ++j) ev[i][j] -= factor * ev[piv][j];
      for (unsigned j = 0; j < n; ++j) c[i][j] -= factor * c[piv][j];
    }
  }
  AdaptedFrame frame;
  frame.base_point = x;
  auto recombine = [&](unsigned row) {
    PolyVector v(d, d);
    for (unsigned j = 0; j < n; ++j) {
      if (c[row][j].is_zero()) continue;
      v += c[row][j] * f.generators()[j];
    }
    return v;
  };
  // Leaf generators in pivot order, tails in original order.
  RatMatrix reordered;
  for (unsigned row : pivot_rows) {
    frame.leaf_generators.push_back(recombine(row));
    reordered.push_back(c[row]);
  }
  for (unsigned i = 0; i < n; ++i) {
    if (used[i]) continue;
    frame.tail_generators.push_back(recombine(i));
    reordered.push_back(c[i]);
  }
  frame.change_of_basis = std::move(reordered);
  return frame;
}

/// A coordinate subspace: the listed variables are frozen at rational values,
/// the remaining ones survive as the slice chart.
struct SliceSpec {
  std::map<unsigned, Rational> fixed;  // variable index -> value

  std::vector<unsigned> free_indices(unsigned dim) const {
    std::vector<unsigned> keep;
    for (unsigned i = 0; i < dim; ++i)
      if (!fixed.count(i)) keep.push_back(i);
    return keep;
  }
};

/// True when every component of v along the fixed coordinates vanishes
/// identically after substituting the slice values.
inline bool is_tangent_to_slice(const PolyVector& v, const SliceSpec& slice) {
  std::vector<unsigned> keep = slice.free_indices(v.dim());
  for (const auto& [var, val] : slice.fixed) {
    if (!v[var].substitute(slice.fixed, keep).is_zero()) return false;
  }
  return true;
}

/// Restriction of the foliation to a coordinate slice. Every generator must
/// pass the tangency certificate; recombine or filter first if some do not.
inline Foliation slice_restriction(const Foliation& f, const SliceSpec& slice) {
  std::vector<unsigned> keep = slice.free_indices(f.dim());
  if (keep.empty()) throw error("slice_restriction: slice has dimension zero");
  if (keep.size() == f.dim()) return f;
  for (unsigned i = 0; i < f.num_generators(); ++i) {
    const PolyVector& g = f.generators()[i];
    for (const auto& [var, val] : slice.fixed) {
      Poly restricted = g[var].substitute(slice.fixed, keep);
      if (!restricted.is_zero()) {
        throw error("slice_restriction: generator " + std::to_string(i + 1) +
                    " is not tangent: component along '" + f.chart().var_names[var] +
                    "' restricts to a nonzero polynomial");
      }
    }
  }
  std::vector<std::string> names;
  for (unsigned i : keep) names.push_back(f.chart().var_names[i]);
  Chart slice_chart(static_cast<unsigned>(keep.size()), names);
  std::vector<PolyVector> gens;
  for (const auto& g : f.generators()) {
    std::vector<Poly> comps;
    for (unsigned i : keep) comps.push_back(g[i].substitute(slice.fixed, keep));
    gens.emplace_back(std::move(comps));
  }
  return Foliation(slice_chart, std::move(gens));
}

/// Keeps only the generators tangent to the slice. Useful after adapting the
/// frame at a point: the tail generators of a leaf point are the natural
/// candidates for the transverse foliation F_S.
inline Foliation tangent_subfoliation(const Foliation& f, const SliceSpec& slice) {
  std::vector<PolyVector> gens;
  for (const auto& g : f.generators())
    if (is_tangent_to_slice(g, slice)) gens.push_back(g);
  if (gens.empty())
    throw error("tangent_subfoliation: no generator is tangent to the slice");
  return Foliation(f.chart(), std::move(gens));
}

/// Product foliation on the disjoint union of charts; variable names from the
/// second factor are renamed on collision.
inline Foliation product(const Foliation& f1, const Foliation& f2) {
  const unsigned d1 = f1.dim(), d2 = f2.dim();
  std::vector<std::string> names = f1.chart().var_names;
  std::set<std::string> seen(names.begin(), names.end());
  for (const auto& n : f2.chart().var_names) {
    std::string candidate = n;
    int suffix = 1;
    while (!seen.insert(candidate).second) candidate = n + "_" + std::to_string(suffix++);
    names.push_back(candidate);
  }
  Chart chart(d1 + d2, names);
  std::vector<PolyVector> gens;
  auto extend = [&](const PolyVector& g, bool first_factor) {
    PolyVector v(d1 + d2, d1 + d2);
    for (unsigned i = 0; i < g.dim(); ++i) {
      Poly lifted(d1 + d2);
      for (const auto& [e, c] : g[i].terms()) {
        Exponents ne(d1 + d2, 0);
        for (size_t k = 0; k < e.size(); ++k) ne[first_factor ? k : d1 + k] = e[k];
        lifted.add_term(ne, c);
      }
      v[first_factor ? i : d1 + i] = lifted;
    }
    return v;
  };
  for (const auto& g : f1.generators()) gens.push_back(extend(g, true));
  for (const auto& g : f2.generators()) gens.push_back(extend(g, false));
  return Foliation(chart, std::move(gens));
}

} // namespace folhol

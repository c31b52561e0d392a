/// Pointwise and per-leaf exact invariants of a foliation: the leaf tangent
/// space F_x, the fiber F/IxF, the isotropy Lie algebra g_x with structure
/// constants, regular/singular classification, and the local Lie algebroid
/// data over a coordinate-subspace leaf.
#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "folhol/foliation.hpp"

namespace folhol {

/// Generators of Ix*F for a rational point x: (x_j - a_j) * X_i over all j, i.
inline std::vector<PolyVector> point_ideal_module_generators(const Foliation& f,
                                                             const std::vector<Rational>& x) {
  if (x.size() != f.dim()) throw dimension_error("point dimension mismatch");
  std::vector<PolyVector> gens;
  for (unsigned j = 0; j < f.dim(); ++j) {
    Poly lin = Poly::variable(f.dim(), j) - Poly::constant(f.dim(), x[j]);
    for (const auto& g : f.generators()) gens.push_back(lin * g);
  }
  return gens;
}

/// Generators of IL*F for a coordinate-subspace leaf: (x_j - a_j) * X_i over
/// the fixed coordinates j of the leaf.
inline std::vector<PolyVector> leaf_ideal_module_generators(const Foliation& f,
                                                            const SliceSpec& leaf) {
  if (leaf.fixed.empty()) throw error("leaf ideal: no fixed coordinates");
  std::vector<PolyVector> gens;
  for (const auto& [j, val] : leaf.fixed) {
    Poly lin = Poly::variable(f.dim(), j) - Poly::constant(f.dim(), val);
    for (const auto& g : f.generators()) gens.push_back(lin * g);
  }
  return gens;
}

namespace detail {

/// Process-wide cache of Groebner bases keyed by generator text; guarded by a
/// mutex so pointwise queries stay safe under concurrent use.
class GroebnerCache {
public:
  static GroebnerCache& instance() {
    static GroebnerCache cache;
    return cache;
  }

  std::shared_ptr<const ModuleGB> get(const std::vector<PolyVector>& gens) {
    std::ostringstream key;
    for (const auto& g : gens) key << cache_key(g) << "#";
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = map_.find(key.str());
    if (it != map_.end()) return it->second;
    auto gb = std::make_shared<const ModuleGB>(module_groebner(gens));
    map_.emplace(key.str(), gb);
    return gb;
  }

private:
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const ModuleGB>> map_;
};

} // namespace detail

inline std::shared_ptr<const ModuleGB> cached_groebner(const std::vector<PolyVector>& gens) {
  return detail::GroebnerCache::instance().get(gens);
}

struct TangentSpace {
  unsigned dim = 0;
  std::vector<RatVector> basis;  // vectors in Q^d spanning F_x
};

inline TangentSpace tangent_dim(const Foliation& f, const std::vector<Rational>& x) {
  RatMatrix ev;
  for (const auto& g : f.generators()) ev.push_back(g.evaluate(x));
  RrefResult rr = rref(ev);
  TangentSpace t;
  t.dim = static_cast<unsigned>(rr.pivot_cols.size());
  for (size_t i = 0; i < rr.pivot_cols.size(); ++i) t.basis.push_back(rr.mat[i]);
  return t;
}

struct FiberReport {
  std::vector<Rational> point;
  unsigned dim_tangent = 0;
  unsigned dim_fiber = 0;
  unsigned dim_isotropy = 0;
  std::vector<RatVector> relation_basis;        // {c : sum c_i X_i in Ix*F}
  std::vector<unsigned> fiber_basis_indices;    // generators whose classes form a basis of F/IxF
};

inline FiberReport fiber_report(const Foliation& f, const std::vector<Rational>& x) {
  auto gb = cached_groebner(point_ideal_module_generators(f, x));
  FiberReport rep;
  rep.point = x;
  rep.relation_basis = linear_relation_space(f.generators(), *gb);
  rep.dim_fiber = f.num_generators() - static_cast<unsigned>(rep.relation_basis.size());
  rep.dim_tangent = tangent_dim(f, x).dim;
  rep.dim_isotropy = rep.dim_fiber - rep.dim_tangent;

  // Greedy lowest-index selection of generators with independent classes.
  std::vector<PolyVector> chosen;
  for (unsigned i = 0; i < f.num_generators(); ++i) {
    chosen.push_back(f.generators()[i]);
    if (linear_relation_space(chosen, *gb).empty()) {
      rep.fiber_basis_indices.push_back(i);
    } else {
      chosen.pop_back();
    }
  }
  if (rep.fiber_basis_indices.size() != rep.dim_fiber)
    throw error("fiber_report: internal dimension disagreement");
  return rep;
}

enum class PointClass { Regular, Singular };

/// Dimension of the span of the adapted tail classes modulo Ix*F. The tail
/// classes span the kernel of the evaluation map, so this recomputes the
/// isotropy dimension independently of the fiber report's subtraction.
inline unsigned isotropy_dim_via_tails(const Foliation& f, const std::vector<Rational>& x) {
  AdaptedFrame frame = adapted_frame(f, x);
  if (frame.tail_generators.empty()) return 0;
  auto gb = cached_groebner(point_ideal_module_generators(f, x));
  auto relations = linear_relation_space(frame.tail_generators, *gb);
  return static_cast<unsigned>(frame.tail_generators.size() - relations.size());
}

/// Regular iff the isotropy vanishes iff fiber and tangent dimensions agree.
/// The two criteria are computed along independent routes (evaluation-rank
/// subtraction vs the adapted tail classes) and cross-checked.
inline PointClass classify_point(const Foliation& f, const std::vector<Rational>& x) {
  FiberReport rep = fiber_report(f, x);
  unsigned tail_dim = isotropy_dim_via_tails(f, x);
  if (tail_dim != rep.dim_isotropy) throw error("classify_point: criteria disagree");
  bool by_dims = rep.dim_fiber == rep.dim_tangent;
  if ((tail_dim == 0) != by_dims) throw error("classify_point: criteria disagree");
  return tail_dim == 0 ? PointClass::Regular : PointClass::Singular;
}

class LieAlgebraPresentation {
public:
  LieAlgebraPresentation() = default;

  /// c[a][b][g] are the structure constants of [e_a, e_b] = sum_g c *e_g.
  /// Antisymmetry and the Jacobi identity are verified exactly.
  LieAlgebraPresentation(std::vector<PolyVector> witnesses,
                         std::vector<std::vector<RatVector>> constants)
      : witnesses_(std::move(witnesses)), c_(std::move(constants)) {
    const size_t n = c_.size();
    for (size_t a = 0; a < n; ++a)
      for (size_t b = 0; b < n; ++b)
        for (size_t g = 0; g < n; ++g)
          if (c_[a][b][g] != -c_[b][a][g])
            throw error("LieAlgebraPresentation: structure constants not antisymmetric");
    for (size_t a = 0; a < n; ++a)
      for (size_t b = 0; b < n; ++b)
        for (size_t d = 0; d < n; ++d)
          for (size_t e = 0; e < n; ++e) {
            Rational sum(0);
            for (size_t g = 0; g < n; ++g) {
              sum += c_[a][b][g] * c_[g][d][e];
              sum += c_[b][d][g] * c_[g][a][e];
              sum += c_[d][a][g] * c_[g][b][e];
            }
            if (!sum.is_zero()) throw error("LieAlgebraPresentation: Jacobi identity fails");
          }
  }

  static LieAlgebraPresentation from_constants(std::vector<std::vector<RatVector>> constants) {
    return LieAlgebraPresentation({}, std::move(constants));
  }

  unsigned dim() const { return static_cast<unsigned>(c_.size()); }
  const std::vector<PolyVector>& witnesses() const { return witnesses_; }
  const std::vector<std::vector<RatVector>>& constants() const { return c_; }

  bool is_abelian() const {
    for (const auto& row : c_)
      for (const auto& vec : row)
        for (const auto& v : vec)
          if (!v.is_zero()) return false;
    return true;
  }

  /// Bracket of coefficient vectors in the presentation basis.
  RatVector bracket(const RatVector& u, const RatVector& v) const {
    RatVector r(dim(), Rational(0));
    for (unsigned a = 0; a < dim(); ++a) {
      if (u[a].is_zero()) continue;
      for (unsigned b = 0; b < dim(); ++b) {
        if (v[b].is_zero()) continue;
        for (unsigned g = 0; g < dim(); ++g) r[g] += u[a] * v[b] * c_[a][b][g];
      }
    }
    return r;
  }

private:
  std::vector<PolyVector> witnesses_;
  std::vector<std::vector<RatVector>> c_;
};

namespace detail {

/// Solves sum_g coeffs[g] * targets[g] = rhs exactly, matching coefficients of
/// every module monomial; nullopt when the system is inconsistent.
inline std::optional<RatVector> express_in_span(const std::vector<PolyVector>& targets,
                                                const PolyVector& rhs) {
  std::map<std::pair<unsigned, Exponents>, size_t> index;
  auto index_terms = [&](const PolyVector& v) {
    for (unsigned c = 0; c < v.dim(); ++c)
      for (const auto& [e, coeff] : v[c].terms()) index.emplace(std::make_pair(c, e), index.size());
  };
  for (const auto& t : targets) index_terms(t);
  index_terms(rhs);
  RatMatrix a(std::max<size_t>(index.size(), 1), RatVector(targets.size(), Rational(0)));
  RatVector b(std::max<size_t>(index.size(), 1), Rational(0));
  for (size_t i = 0; i < targets.size(); ++i)
    for (unsigned c = 0; c < targets[i].dim(); ++c)
      for (const auto& [e, coeff] : targets[i][c].terms()) a[index.at({c, e})][i] = coeff;
  for (unsigned c = 0; c < rhs.dim(); ++c)
    for (const auto& [e, coeff] : rhs[c].terms()) b[index.at({c, e})] = coeff;
  return solve(a, b);
}

} // namespace detail

/// Structure constants of g_x for an explicit witness set: each witness must
/// vanish at x and the witness classes mod Ix*F must be independent.
inline LieAlgebraPresentation structure_constants_for(const Foliation& f,
                                                      const std::vector<Rational>& x,
                                                      const std::vector<PolyVector>& witnesses) {
  auto gb = cached_groebner(point_ideal_module_generators(f, x));
  for (const auto& w : witnesses) {
    for (const auto& v : w.evaluate(x))
      if (!v.is_zero()) throw error("isotropy witness does not vanish at the point");
  }
  if (!linear_relation_space(witnesses, *gb).empty())
    throw error("isotropy witnesses are dependent modulo Ix*F");
  std::vector<PolyVector> nfs;
  for (const auto& w : witnesses) nfs.push_back(normal_form(w, *gb));
  const unsigned l = static_cast<unsigned>(witnesses.size());
  std::vector<std::vector<RatVector>> c(l, std::vector<RatVector>(l, RatVector(l, Rational(0))));
  for (unsigned a = 0; a < l; ++a) {
    for (unsigned b = a + 1; b < l; ++b) {
      PolyVector br = lie_bracket(witnesses[a], witnesses[b]);
      PolyVector nf = normal_form(br, *gb);
      auto coeffs = detail::express_in_span(nfs, nf);
      if (!coeffs) {
        throw error("isotropy bracket leaves the witness span: the input module is "
                    "not closed under brackets (non-involutive input?)");
      }
      c[a][b] = *coeffs;
      for (unsigned g = 0; g < l; ++g) c[b][a][g] = -(*coeffs)[g];
    }
  }
  return LieAlgebraPresentation(witnesses, std::move(c));
}

/// The isotropy Lie algebra g_x = F(x)/IxF. Witnesses are drawn from the
/// adapted frame's tail generators: the lexicographically first maximal
/// subset with independent classes. Requires a polynomial involutivity
/// certificate; refuses on Unknown rather than guessing.
inline LieAlgebraPresentation isotropy_algebra(const Foliation& f, const std::vector<Rational>& x) {
  InvolutivityResult inv = involutivity_check(f);
  if (const auto* unk = std::get_if<InvolutivityUnknown>(&inv)) {
    throw error("isotropy_algebra: involutivity certificate failed at generator pair (" +
                std::to_string(unk->i + 1) + ", " + std::to_string(unk->j + 1) +
                "); bracket membership in the polynomial module is unknown");
  }
  AdaptedFrame frame = adapted_frame(f, x);
  auto gb = cached_groebner(point_ideal_module_generators(f, x));
  std::vector<PolyVector> witnesses;
  for (const auto& tail : frame.tail_generators) {
    witnesses.push_back(tail);
    if (!linear_relation_space(witnesses, *gb).empty()) witnesses.pop_back();
  }
  FiberReport rep = fiber_report(f, x);
  if (witnesses.size() != rep.dim_isotropy)
    throw error("isotropy_algebra: witness count disagrees with fiber report");
  return structure_constants_for(f, x, witnesses);
}

struct LieAlgebraAnalysis {
  bool abelian = false;
  std::vector<unsigned> derived_series_dims;        // starting at dim g
  std::vector<unsigned> lower_central_series_dims;  // starting at dim g
  unsigned center_dim = 0;
};

inline LieAlgebraAnalysis lie_algebra_analysis(const LieAlgebraPresentation& lp) {
  const unsigned n = lp.dim();
  LieAlgebraAnalysis out;
  out.abelian = lp.is_abelian();

  auto span_dim = [](const std::vector<RatVector>& vecs) {
    if (vecs.empty()) return 0u;
    return rank(vecs);
  };
  auto bracket_span = [&](const std::vector<RatVector>& a, const std::vector<RatVector>& b) {
    std::vector<RatVector> out_vecs;
    for (const auto& u : a)
      for (const auto& v : b) out_vecs.push_back(lp.bracket(u, v));
    return out_vecs;
  };
  auto reduce_basis = [&](std::vector<RatVector> vecs) {
    RrefResult rr = rref(std::move(vecs));
    std::vector<RatVector> basis;
    for (size_t i = 0; i < rr.pivot_cols.size(); ++i) basis.push_back(rr.mat[i]);
    return basis;
  };

  std::vector<RatVector> full;
  for (unsigned i = 0; i < n; ++i) {
    RatVector e(n, Rational(0));
    e[i] = Rational(1);
    full.push_back(e);
  }

  // Derived series: D^0 = g, D^{k+1} = [D^k, D^k].
  std::vector<RatVector> d = full;
  out.derived_series_dims.push_back(n);
  while (true) {
    std::vector<RatVector> next = reduce_basis(bracket_span(d, d));
    unsigned dim_next = span_dim(next);
    if (dim_next == out.derived_series_dims.back()) break;
    out.derived_series_dims.push_back(dim_next);
    d = next;
    if (dim_next == 0) break;
  }

  // Lower central series: C^1 = g, C^{k+1} = [g, C^k].
  std::vector<RatVector> cser = full;
  out.lower_central_series_dims.push_back(n);
  while (true) {
    std::vector<RatVector> next = reduce_basis(bracket_span(full, cser));
    unsigned dim_next = span_dim(next);
    if (dim_next == out.lower_central_series_dims.back()) break;
    out.lower_central_series_dims.push_back(dim_next);
    cser = next;
    if (dim_next == 0) break;
  }

  // Center: kernel of v -> (ad_v e_b)_b.
  if (n > 0) {
    RatMatrix m(static_cast<size_t>(n) * n, RatVector(n, Rational(0)));
    for (unsigned a = 0; a < n; ++a)
      for (unsigned b = 0; b < n; ++b)
        for (unsigned g = 0; g < n; ++g)
          m[static_cast<size_t>(b) * n + g][a] = lp.constants()[a][b][g];
    out.center_dim = n - rank(m);
  }
  return out;
}

/// Nilpotency class when nilpotent (smallest c with C^{c+1} = 0), else nullopt.
inline std::optional<unsigned> nilpotency_class(const LieAlgebraPresentation& lp) {
  LieAlgebraAnalysis an = lie_algebra_analysis(lp);
  if (an.lower_central_series_dims.back() != 0) return std::nullopt;
  return static_cast<unsigned>(an.lower_central_series_dims.size()) - 1;
}

struct AlgebroidLocalData {
  SliceSpec leaf;
  std::vector<PolyVector> frame;                  // representatives of the frame classes
  std::vector<PolyVector> anchor;                 // frame fields restricted to the leaf chart
  std::vector<std::vector<std::vector<Poly>>> bracket_table;  // [a][b][g]: coefficient of frame_g
  Chart leaf_chart;
};

/// Local Lie algebroid data over a coordinate-subspace leaf: anchor values and
/// bracket structure functions of the frame classes modulo IL*F. Brackets are
/// expressed in the frame with polynomial coefficients in the leaf
/// coordinates, found by a degree-capped exact linear solve.
inline AlgebroidLocalData algebroid_local_data(const Foliation& f, const SliceSpec& leaf,
                                               const std::vector<PolyVector>& frame) {
  if (frame.empty()) throw error("algebroid_local_data: empty frame");
  InvolutivityResult inv = involutivity_check(f);
  if (std::holds_alternative<InvolutivityUnknown>(inv))
    throw error("algebroid_local_data: involutivity certificate failed");

  auto gb = cached_groebner(leaf_ideal_module_generators(f, leaf));
  auto rel = linear_relation_space(frame, *gb);
  if (!rel.empty()) {
    std::ostringstream os;
    os << "algebroid_local_data: frame classes are dependent modulo IL*F; relation (";
    for (size_t i = 0; i < rel[0].size(); ++i) os << (i ? ", " : "") << rel[0][i].str();
    os << ")";
    throw error(os.str());
  }

  std::vector<unsigned> keep = leaf.free_indices(f.dim());
  if (keep.empty())
    throw error("algebroid_local_data: leaf is a point; use isotropy_algebra instead");
  std::vector<std::string> leaf_names;
  for (unsigned i : keep) leaf_names.push_back(f.chart().var_names[i]);
  Chart leaf_chart(static_cast<unsigned>(keep.size()), leaf_names);

  AlgebroidLocalData out;
  out.leaf = leaf;
  out.frame = frame;
  out.leaf_chart = leaf_chart;

  // Anchor: restrict each frame field to the leaf. Fields must be tangent,
  // otherwise the leaf assertion is wrong.
  for (size_t i = 0; i < frame.size(); ++i) {
    for (const auto& [var, val] : leaf.fixed) {
      if (!frame[i][var].substitute(leaf.fixed, keep).is_zero())
        throw error("algebroid_local_data: frame field " + std::to_string(i + 1) +
                    " is not tangent to the asserted leaf");
    }
    std::vector<Poly> comps;
    for (unsigned k : keep) comps.push_back(frame[i][k].substitute(leaf.fixed, keep));
    out.anchor.emplace_back(std::move(comps));
  }

  // Bracket table with coefficients polynomial in the leaf coordinates.
  const unsigned l = static_cast<unsigned>(frame.size());
  std::vector<PolyVector> frame_nfs;
  for (const auto& g : frame) frame_nfs.push_back(normal_form(g, *gb));

  auto leaf_monomials_up_to = [&](unsigned deg) {
    std::vector<Exponents> monos;
    Exponents cur(keep.size(), 0);
    // All exponent vectors on the leaf variables with total degree <= deg.
    std::function<void(size_t, unsigned)> rec = [&](size_t pos, unsigned remaining) {
      if (pos == cur.size()) {
        monos.push_back(cur);
        return;
      }
      for (unsigned e = 0; e <= remaining; ++e) {
        cur[pos] = e;
        rec(pos + 1, remaining - e);
      }
      cur[pos] = 0;
    };
    rec(0, deg);
    return monos;
  };

  auto lift_monomial = [&](const Exponents& leaf_mono) {
    Exponents full(f.dim(), 0);
    for (size_t i = 0; i < keep.size(); ++i) full[keep[i]] = leaf_mono[i];
    return Poly::monomial(f.dim(), full, Rational(1));
  };

  out.bracket_table.assign(l, std::vector<std::vector<Poly>>(
                                  l, std::vector<Poly>(l, Poly(leaf_chart.dim))));
  for (unsigned a = 0; a < l; ++a) {
    for (unsigned b = a + 1; b < l; ++b) {
      PolyVector br = lie_bracket(frame[a], frame[b]);
      PolyVector rhs = normal_form(br, *gb);
      const unsigned cap = br.is_zero() ? 2 : br.degree() + 4;
      bool solved = false;
      for (unsigned deg = 0; deg <= cap && !solved; ++deg) {
        std::vector<Exponents> monos = leaf_monomials_up_to(deg);
        std::vector<PolyVector> targets;
        for (unsigned g = 0; g < l; ++g)
          for (const auto& m : monos)
            targets.push_back(normal_form(lift_monomial(m) * frame[g], *gb));
        auto coeffs = detail::express_in_span(targets, rhs);
        if (!coeffs) continue;
        for (unsigned g = 0; g < l; ++g) {
          Poly cg(leaf_chart.dim);
          for (size_t mi = 0; mi < monos.size(); ++mi)
            cg.add_term(monos[mi], (*coeffs)[g * monos.size() + mi]);
          out.bracket_table[a][b][g] = cg;
          out.bracket_table[b][a][g] = -cg;
        }
        solved = true;
      }
      if (!solved)
        throw error("algebroid_local_data: bracket of frame fields " + std::to_string(a + 1) +
                    ", " + std::to_string(b + 1) +
                    " is not expressible in the frame within the degree cap");
      // Anchor compatibility, exact: anchor of the bracket expression equals
      // the bracket of the anchors.
      PolyVector lhs = lie_bracket(out.anchor[a], out.anchor[b]);
      PolyVector rhs_anchor(leaf_chart.dim, leaf_chart.dim);
      for (unsigned g = 0; g < l; ++g) rhs_anchor += out.bracket_table[a][b][g] * out.anchor[g];
      if (lhs != rhs_anchor)
        throw error("algebroid_local_data: anchor compatibility fails for pair (" +
                    std::to_string(a + 1) + ", " + std::to_string(b + 1) + ")");
    }
  }
  return out;
}

} // namespace folhol

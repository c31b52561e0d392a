/// Numerical realizations of the holonomy constructions: path-holonomy
/// bi-submersions, bisections and the diffeomorphisms they carry, vertical
/// lifts, the Delta map onto U_x^x, linearized holonomy on the normal space,
/// the BCH morphism check, and the linear probes for essential isotropy and
/// discreteness.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <optional>
#include <sstream>
#include <variant>

#include "folhol/bch.hpp"
#include "folhol/flow.hpp"
#include "folhol/pointwise.hpp"

namespace folhol {

/// Bounds on (y, xi) in M x R^n around (x, 0).
struct DomainBox {
  double y_radius = 0.5;
  double xi_radius = 8.0;
};

/// Deterministic tensor grid: `per_dim` points per axis, spanning
/// [c - radius, c + radius] in every coordinate.
inline std::vector<std::vector<double>> tensor_grid(const std::vector<double>& center,
                                                    double radius, unsigned per_dim) {
  std::vector<std::vector<double>> points{{}};
  for (double c : center) {
    std::vector<std::vector<double>> next;
    for (const auto& partial : points) {
      for (unsigned i = 0; i < per_dim; ++i) {
        double v = per_dim == 1 ? c : c - radius + 2.0 * radius * i / (per_dim - 1);
        auto p = partial;
        p.push_back(v);
        next.push_back(std::move(p));
      }
    }
    points = std::move(next);
  }
  return points;
}

/// The model bi-submersion U subset M x R^n at a base point x: source
/// (y, xi) -> y and target (y, xi) -> exp_y(sum xi_i X_i), where the X_i are
/// foliation generators whose classes form a basis of the fiber F/IxF.
class PathHolonomyBiSubmersion {
public:
  PathHolonomyBiSubmersion(Foliation foliation, std::vector<Rational> base_point,
                           DomainBox box = {}, FlowConfig cfg = {})
      : foliation_(std::move(foliation)), base_exact_(std::move(base_point)), box_(box), cfg_(cfg) {
    if (base_exact_.size() != foliation_.dim())
      throw dimension_error("PathHolonomyBiSubmersion: base point dimension mismatch");
    FiberReport rep = fiber_report(foliation_, base_exact_);
    indices_ = rep.fiber_basis_indices;
    for (unsigned i : indices_) fields_.push_back(foliation_.generators()[i]);
    if (fields_.empty()) throw error("PathHolonomyBiSubmersion: the fiber is zero-dimensional");
    for (const auto& c : base_exact_) base_.push_back(c.to_double());
  }

  /// Overrides the generator subset; the classes must still form a fiber basis.
  PathHolonomyBiSubmersion(Foliation foliation, std::vector<Rational> base_point,
                           std::vector<unsigned> generator_indices, DomainBox box = {},
                           FlowConfig cfg = {})
      : foliation_(std::move(foliation)), base_exact_(std::move(base_point)),
        indices_(std::move(generator_indices)), box_(box), cfg_(cfg) {
    FiberReport rep = fiber_report(foliation_, base_exact_);
    if (indices_.size() != rep.dim_fiber)
      throw error("PathHolonomyBiSubmersion: index count != dim of the fiber (minimality)");
    std::vector<PolyVector> chosen;
    for (unsigned i : indices_) chosen.push_back(foliation_.generators().at(i));
    auto gb = cached_groebner(point_ideal_module_generators(foliation_, base_exact_));
    if (!linear_relation_space(chosen, *gb).empty())
      throw error("PathHolonomyBiSubmersion: chosen classes are dependent in the fiber");
    fields_ = std::move(chosen);
    for (const auto& c : base_exact_) base_.push_back(c.to_double());
  }

  const Foliation& foliation() const { return foliation_; }
  const std::vector<Rational>& base_point_exact() const { return base_exact_; }
  const std::vector<double>& base_point() const { return base_; }
  const std::vector<unsigned>& generator_indices() const { return indices_; }
  const std::vector<PolyVector>& fields() const { return fields_; }
  unsigned n() const { return static_cast<unsigned>(fields_.size()); }
  unsigned d() const { return foliation_.dim(); }
  const DomainBox& box() const { return box_; }
  const FlowConfig& flow_config() const { return cfg_; }

  void check_domain(const std::vector<double>& y, const std::vector<double>& xi) const {
    for (size_t i = 0; i < y.size(); ++i)
      if (std::abs(y[i] - base_[i]) > box_.y_radius)
        throw error("bi-submersion: point outside the domain box");
    for (double c : xi)
      if (std::abs(c) > box_.xi_radius)
        throw error("bi-submersion: xi outside the domain box");
  }

  /// Pointwise value of sum_i xi_i X_i.
  std::vector<double> combination(const std::vector<double>& xi,
                                  const std::vector<double>& y) const {
    std::vector<double> out(d(), 0.0);
    for (unsigned i = 0; i < n(); ++i) {
      if (xi[i] == 0.0) continue;
      std::vector<double> f = fields_[i].evaluate(y);
      for (unsigned c = 0; c < d(); ++c) out[c] += xi[i] * f[c];
    }
    return out;
  }

  Eigen::MatrixXd combination_jacobian(const std::vector<double>& xi,
                                       const std::vector<double>& y) const {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d(), d());
    for (unsigned i = 0; i < n(); ++i) {
      if (xi[i] == 0.0) continue;
      a += xi[i] * detail::poly_field_jacobian(fields_[i], y);
    }
    return a;
  }

private:
  Foliation foliation_;
  std::vector<Rational> base_exact_;
  std::vector<double> base_;
  std::vector<unsigned> indices_;
  std::vector<PolyVector> fields_;
  DomainBox box_;
  FlowConfig cfg_;
};

/// target(y, xi) = exp_y(sum xi_i X_i).
inline std::vector<double> bisubmersion_target(const PathHolonomyBiSubmersion& u,
                                               const std::vector<double>& y,
                                               const std::vector<double>& xi) {
  if (y.size() != u.d() || xi.size() != u.n())
    throw dimension_error("bisubmersion_target: dimension mismatch");
  u.check_domain(y, xi);
  bool zero = true;
  for (double c : xi)
    if (c != 0.0) zero = false;
  if (zero) return y;  // identity, exactly
  auto rhs = [&](double, const std::vector<double>& p) { return u.combination(xi, p); };
  return rk45_integrate(rhs, y, 0.0, 1.0, u.flow_config(), y.size());
}

struct TargetJacobians {
  std::vector<double> endpoint;
  Eigen::MatrixXd dy;   // d x d, derivative in the base point
  Eigen::MatrixXd dxi;  // d x n, derivative in the flow coefficients
};

/// Joint integration of the flow with its variational equation in y and its
/// parameter sensitivities in xi:
///   dJ/dt = A J,   dS/dt = A S + B,   A = D(sum xi_i X_i),  B = [X_1 .. X_n].
inline TargetJacobians target_with_jacobians(const PathHolonomyBiSubmersion& u,
                                             const std::vector<double>& y,
                                             const std::vector<double>& xi) {
  u.check_domain(y, xi);
  const unsigned d = u.d(), n = u.n();
  std::vector<double> state(d + d * d + d * n, 0.0);
  for (unsigned i = 0; i < d; ++i) state[i] = y[i];
  for (unsigned i = 0; i < d; ++i) state[d + i * d + i] = 1.0;

  auto rhs = [&](double, const std::vector<double>& s) {
    std::vector<double> p(s.begin(), s.begin() + d);
    std::vector<double> out(s.size(), 0.0);
    std::vector<double> f = u.combination(xi, p);
    Eigen::MatrixXd a = u.combination_jacobian(xi, p);
    for (unsigned i = 0; i < d; ++i) out[i] = f[i];
    for (unsigned i = 0; i < d; ++i)
      for (unsigned j = 0; j < d; ++j) {
        double acc = 0.0;
        for (unsigned l = 0; l < d; ++l) acc += a(i, l) * s[d + l * d + j];
        out[d + i * d + j] = acc;
      }
    std::vector<std::vector<double>> b;
    for (unsigned k = 0; k < n; ++k) b.push_back(u.fields()[k].evaluate(p));
    const unsigned off = d + d * d;
    for (unsigned i = 0; i < d; ++i)
      for (unsigned k = 0; k < n; ++k) {
        double acc = b[k][i];
        for (unsigned l = 0; l < d; ++l) acc += a(i, l) * s[off + l * n + k];
        out[off + i * n + k] = acc;
      }
    return out;
  };

  std::vector<double> end = rk45_integrate(rhs, state, 0.0, 1.0, u.flow_config(), d);
  TargetJacobians tj;
  tj.endpoint.assign(end.begin(), end.begin() + d);
  tj.dy.resize(d, d);
  tj.dxi.resize(d, n);
  for (unsigned i = 0; i < d; ++i)
    for (unsigned j = 0; j < d; ++j) tj.dy(i, j) = end[d + i * d + j];
  const unsigned off = d + d * d;
  for (unsigned i = 0; i < d; ++i)
    for (unsigned k = 0; k < n; ++k) tj.dxi(i, k) = end[off + i * n + k];
  return tj;
}

/// Bisection of a path-holonomy bi-submersion: the graph of a polynomial map
/// phi from a base neighborhood to R^n.
struct Bisection {
  std::vector<Poly> phi;  // n polynomials on the chart variables
};

/// The local diffeomorphism carried by a bisection:
///   y -> exp_y(sum phi_i(y) X_i),
/// coefficients frozen at the start point of each trajectory.
class CarriedDiffeo {
public:
  CarriedDiffeo(const PathHolonomyBiSubmersion& u, Bisection b) : u_(u), b_(std::move(b)) {
    if (b_.phi.size() != u_.n())
      throw dimension_error("CarriedDiffeo: bisection arity != number of generators");
    for (const auto& p : b_.phi)
      if (p.num_vars() != u_.d())
        throw dimension_error("CarriedDiffeo: bisection map must live on the chart");
  }

  std::vector<double> operator()(const std::vector<double>& y) const {
    std::vector<double> xi;
    for (const auto& p : b_.phi) xi.push_back(p.evaluate(y));
    return bisubmersion_target(u_, y, xi);
  }

  /// Evaluation on a deterministic tensor grid around the base point.
  std::vector<std::pair<std::vector<double>, std::vector<double>>> sample_grid(
      double radius, unsigned per_dim) const {
    std::vector<std::pair<std::vector<double>, std::vector<double>>> out;
    for (const auto& y : tensor_grid(u_.base_point(), radius, per_dim))
      out.emplace_back(y, (*this)(y));
    return out;
  }

private:
  const PathHolonomyBiSubmersion& u_;
  Bisection b_;
};

inline CarriedDiffeo carried_diffeo(const PathHolonomyBiSubmersion& u, Bisection b) {
  return CarriedDiffeo(u, std::move(b));
}

namespace detail {

struct LiftSolve {
  std::vector<double> v;
  double residual = 0.0;
  Eigen::VectorXd singular_values;
};

/// Minimum-norm solution of (dtarget/dxi) v = rhs by SVD with the documented
/// singular value cutoff.
inline LiftSolve min_norm_lift(const Eigen::MatrixXd& t, const Eigen::VectorXd& rhs,
                               double sv_cutoff = 1e-9) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(t, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd sv = svd.singularValues();
  Eigen::VectorXd inv_sv = sv;
  for (long i = 0; i < sv.size(); ++i) inv_sv(i) = sv(i) > sv_cutoff ? 1.0 / sv(i) : 0.0;
  Eigen::VectorXd v = svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose() * rhs;
  LiftSolve out;
  out.v.assign(v.data(), v.data() + v.size());
  out.residual = (t * v - rhs).norm();
  out.singular_values = sv;
  return out;
}

} // namespace detail

/// Vertical lift at (y, xi): the minimum-norm v with
/// (dtarget/dxi) v = X_i(target(y, xi)).
inline std::vector<double> vertical_lift(const PathHolonomyBiSubmersion& u, unsigned field_index,
                                         const std::vector<double>& y,
                                         const std::vector<double>& xi, double residual_tol = 1e-7) {
  if (field_index >= u.n()) throw error("vertical_lift: field index out of range");
  TargetJacobians tj = target_with_jacobians(u, y, xi);
  std::vector<double> fx = u.fields()[field_index].evaluate(tj.endpoint);
  Eigen::VectorXd rhs(u.d());
  for (unsigned i = 0; i < u.d(); ++i) rhs(i) = fx[i];
  detail::LiftSolve ls = detail::min_norm_lift(tj.dxi, rhs);
  if (ls.residual > residual_tol) {
    std::ostringstream os;
    os << "vertical_lift: rank-deficient system, residual " << ls.residual
       << " exceeds tolerance; singular values:";
    for (long i = 0; i < ls.singular_values.size(); ++i) os << " " << ls.singular_values(i);
    throw error(os.str());
  }
  return ls.v;
}

struct DeltaOptions {
  double validity_radius = 1.0;   // box for the group coordinates
  double drift_tol = 1e-6;        // allowed |target(x, xi(1)) - x|
  double offset_h = 1e-2;         // base offset for the limit lift
  double residual_tol = 1e-7;
};

namespace detail {

/// The vertical lift restricted to the fiber over x is the restriction of a
/// smooth lift field (its value there is unique), but the pointwise system
/// (dtarget/dxi) v = X(target) degenerates at fixed points of the flows. The
/// limit value is recovered by solving at base points offset from x along a
/// deterministic direction and extrapolating the offset to zero (Richardson,
/// first order).
inline std::vector<double> limit_lift(
    const PathHolonomyBiSubmersion& u, const std::vector<double>& xi,
    const std::function<std::vector<double>(const std::vector<double>&)>& field_at,
    const DeltaOptions& opts) {
  const unsigned d = u.d(), n = u.n();

  auto solve_at = [&](const std::vector<double>& y) -> std::optional<detail::LiftSolve> {
    TargetJacobians tj = target_with_jacobians(u, y, xi);
    std::vector<double> fx = field_at(tj.endpoint);
    Eigen::VectorXd rhs(d);
    for (unsigned i = 0; i < d; ++i) rhs(i) = fx[i];
    detail::LiftSolve ls = detail::min_norm_lift(tj.dxi, rhs);
    double scale = std::max(1.0, rhs.norm());
    if (ls.residual > opts.residual_tol * scale) return std::nullopt;
    // Reject solves where the whole system vanished: they carry no
    // information about the limit.
    if (ls.singular_values.size() == 0 || ls.singular_values.maxCoeff() < 1e-13)
      return std::nullopt;
    bool full_rank = ls.singular_values.minCoeff() > 1e-9 * ls.singular_values.maxCoeff();
    if (!full_rank) return std::nullopt;
    return ls;
  };

  // Well-posed at the point itself: use the plain solve.
  {
    TargetJacobians tj = target_with_jacobians(u, u.base_point(), xi);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(tj.dxi);
    Eigen::VectorXd sv = svd.singularValues();
    if (sv.size() > 0 && sv.minCoeff() > 1e-9 * std::max(1.0, sv.maxCoeff())) {
      std::vector<double> fx = field_at(tj.endpoint);
      Eigen::VectorXd rhs(d);
      for (unsigned i = 0; i < d; ++i) rhs(i) = fx[i];
      return detail::min_norm_lift(tj.dxi, rhs).v;
    }
  }

  // Deterministic offset directions: all-ones, then a graded ramp, then the
  // coordinate axes.
  std::vector<std::vector<double>> directions;
  directions.emplace_back(d, 1.0);
  {
    std::vector<double> ramp(d);
    for (unsigned i = 0; i < d; ++i) ramp[i] = 1.0 + 0.5 * i;
    directions.push_back(ramp);
  }
  for (unsigned i = 0; i < d; ++i) {
    std::vector<double> axis(d, 0.0);
    axis[i] = 1.0;
    directions.push_back(axis);
  }

  for (const auto& dir : directions) {
    double norm = 0.0;
    for (double c : dir) norm += c * c;
    norm = std::sqrt(norm);
    auto offset_point = [&](double h) {
      std::vector<double> y = u.base_point();
      for (unsigned i = 0; i < d; ++i) y[i] += h * dir[i] / norm;
      return y;
    };
    auto s1 = solve_at(offset_point(opts.offset_h));
    auto s2 = solve_at(offset_point(opts.offset_h / 2));
    if (!s1 || !s2) continue;
    std::vector<double> v(n);
    for (unsigned i = 0; i < n; ++i) v[i] = 2.0 * s2->v[i] - s1->v[i];
    return v;
  }
  throw error("limit_lift: no offset direction yielded a well-posed lift system");
}

} // namespace detail

struct DeltaResult {
  std::vector<double> xi;     // the point (x, xi) of U_x^x
  double target_drift = 0.0;  // |target(x, xi) - x|, infinity norm
};

/// The map Delta from the local group onto U_x^x: integrates the vertical
/// field whose value is the running lift of sum_k lambda_k W_k (W_k the
/// isotropy witnesses of `lp`) from (x, 0) over unit time. The source stays
/// x exactly; the target must return to x within the drift tolerance.
inline DeltaResult delta_map(const PathHolonomyBiSubmersion& u, const LieAlgebraPresentation& lp,
                             const std::vector<double>& lambda, const DeltaOptions& opts = {}) {
  if (lambda.size() != lp.dim()) throw dimension_error("delta_map: coefficient length mismatch");
  for (double l : lambda)
    if (std::abs(l) > opts.validity_radius)
      throw error("delta_map: coefficients outside the validity box");

  auto field_at = [&](const std::vector<double>& y) {
    std::vector<double> out(u.d(), 0.0);
    for (size_t w = 0; w < lp.witnesses().size(); ++w) {
      if (lambda[w] == 0.0) continue;
      std::vector<double> f = lp.witnesses()[w].evaluate(y);
      for (unsigned c = 0; c < u.d(); ++c) out[c] += lambda[w] * f[c];
    }
    return out;
  };

  bool zero = true;
  for (double l : lambda)
    if (l != 0.0) zero = false;
  DeltaResult res;
  res.xi.assign(u.n(), 0.0);
  if (zero) return res;

  auto rhs = [&](double, const std::vector<double>& xi) {
    return detail::limit_lift(u, xi, field_at, opts);
  };
  FlowConfig cfg = u.flow_config();
  cfg.rel_tol = std::max(cfg.rel_tol, 1e-10);
  res.xi = rk45_integrate(rhs, res.xi, 0.0, 1.0, cfg, 0);

  std::vector<double> back = bisubmersion_target(u, u.base_point(), res.xi);
  double drift = 0.0;
  for (unsigned i = 0; i < u.d(); ++i)
    drift = std::max(drift, std::abs(back[i] - u.base_point()[i]));
  res.target_drift = drift;
  if (drift > opts.drift_tol)
    throw error("delta_map: target drift " + std::to_string(drift) +
                " exceeds tolerance; the coefficients left the local group's validity box");
  return res;
}

struct LinearHolonomy {
  std::vector<double> point;
  Eigen::MatrixXd full_jacobian;          // d x d
  std::vector<std::vector<double>> leaf_basis;  // basis of F_x (rows)
  Eigen::MatrixXd normal_matrix;          // induced action on T_xM / F_x
  double leaf_defect = 0.0;               // violation of F_x-invariance
};

/// Linearized holonomy of the constant bisection through (x, xi): the
/// Jacobian at x of y -> exp_y(sum xi_i X_i) together with the induced map on
/// the normal space N_xL = T_xM / F_x in a fixed rational complement basis.
inline LinearHolonomy linear_holonomy(const PathHolonomyBiSubmersion& u,
                                      const std::vector<double>& xi, double fix_tol = 1e-8,
                                      double invariance_tol = 1e-6) {
  std::vector<double> t = bisubmersion_target(u, u.base_point(), xi);
  for (unsigned i = 0; i < u.d(); ++i)
    if (std::abs(t[i] - u.base_point()[i]) > fix_tol)
      throw error("linear_holonomy: the point is not fixed by the carried diffeomorphism");

  TargetJacobians tj = target_with_jacobians(u, u.base_point(), xi);
  LinearHolonomy lh;
  lh.point = u.base_point();
  lh.full_jacobian = tj.dy;

  TangentSpace ts = tangent_dim(u.foliation(), u.base_point_exact());
  const unsigned d = u.d(), k = ts.dim;
  for (const auto& row : ts.basis) {
    std::vector<double> b;
    for (const auto& c : row) b.push_back(c.to_double());
    lh.leaf_basis.push_back(b);
  }

  // Deterministic rational complement: extend the leaf basis by standard
  // basis vectors, greedily by lowest index.
  RatMatrix basis = ts.basis;
  std::vector<unsigned> complement;
  for (unsigned j = 0; j < d && basis.size() < d; ++j) {
    RatMatrix trial = basis;
    RatVector e(d, Rational(0));
    e[j] = Rational(1);
    trial.push_back(e);
    if (rank(trial) > rank(basis)) {
      basis = trial;
      complement.push_back(j);
    }
  }

  Eigen::MatrixXd p(d, d);  // columns: leaf basis then complement
  for (unsigned c = 0; c < k; ++c)
    for (unsigned r = 0; r < d; ++r) p(r, c) = ts.basis[c][r].to_double();
  for (unsigned c = 0; c < complement.size(); ++c)
    for (unsigned r = 0; r < d; ++r) p(r, k + c) = (complement[c] == r) ? 1.0 : 0.0;

  Eigen::MatrixXd in_basis = p.fullPivLu().solve(lh.full_jacobian * p);
  // Block structure [[A, B], [defect, N]] relative to F_x + complement.
  lh.leaf_defect = k == 0 ? 0.0 : in_basis.block(k, 0, d - k, k).cwiseAbs().maxCoeff();
  if (k > 0 && lh.leaf_defect > invariance_tol)
    throw error("linear_holonomy: the Jacobian does not preserve the leaf tangent space "
                "(defect " + std::to_string(lh.leaf_defect) + ")");
  lh.normal_matrix = in_basis.block(k, k, d - k, d - k);
  return lh;
}

enum class KernelProbe { NotInKernel, Inconclusive };

/// One-sided probe for the essential isotropy kernel: a bisection carrying
/// the identity has identity linearized holonomy, so a normal matrix away
/// from the identity certifies NotInKernel. The converse is not decided.
inline KernelProbe kernel_linear_probe(const PathHolonomyBiSubmersion& u,
                                       const std::vector<double>& xi, double tol = 1e-6) {
  LinearHolonomy lh = linear_holonomy(u, xi, 1e-8, 1e-6);
  double dev = lh.normal_matrix.rows() == 0
                   ? 0.0
                   : (lh.normal_matrix -
                      Eigen::MatrixXd::Identity(lh.normal_matrix.rows(), lh.normal_matrix.cols()))
                         .cwiseAbs()
                         .maxCoeff();
  return dev > tol ? KernelProbe::NotInKernel : KernelProbe::Inconclusive;
}

struct MorphismCheckResult {
  bool pass = false;
  double normal_defect = 0.0;     // |N(Delta(bch)) - N(Delta(v1)) N(Delta(v2))|
  double base_point_drift = 0.0;  // worst drift of the three flows at x
  Eigen::MatrixXd lhs;
  Eigen::MatrixXd rhs;
};

/// Linearized consequence of the exponential morphism: the normal linear
/// holonomies of Delta(v1), Delta(v2) and Delta(bch(v1, v2)) must compose.
///
/// Order convention: the local group structure on U_x^x arises from a right
/// action, and with the standard vector-field bracket the time-1 flows
/// satisfy exp(X) after exp(Y) = exp(bch(Y, X)). The product of holonomies
/// is therefore taken in flow-application order,
///   N(Delta(bch(v1, v2))) = N(Delta(v2)) * N(Delta(v1)),
/// the left BCH argument acting first. Abelian isotropy does not see the
/// order; the nonabelian case pins it down to machine precision.
/// Additionally checks that the composed flows and the BCH-combination flow
/// both fix the base point.
inline MorphismCheckResult morphism_check(const PathHolonomyBiSubmersion& u,
                                          const LieAlgebraPresentation& lp,
                                          const std::vector<double>& v1,
                                          const std::vector<double>& v2, double tol = 1e-6,
                                          DeltaOptions opts = {}, unsigned bch_order = 8) {
  std::vector<double> v12 = bch(lp, v1, v2, bch_order);
  for (double c : v12)
    if (std::abs(c) > opts.validity_radius)
      throw error("morphism_check: bch(v1, v2) leaves the validity box");

  DeltaResult d1 = delta_map(u, lp, v1, opts);
  DeltaResult d2 = delta_map(u, lp, v2, opts);
  DeltaResult d12 = delta_map(u, lp, v12, opts);

  LinearHolonomy h1 = linear_holonomy(u, d1.xi);
  LinearHolonomy h2 = linear_holonomy(u, d2.xi);
  LinearHolonomy h12 = linear_holonomy(u, d12.xi);

  MorphismCheckResult out;
  out.lhs = h12.normal_matrix;
  out.rhs = h2.normal_matrix * h1.normal_matrix;
  out.normal_defect =
      out.lhs.rows() == 0 ? 0.0 : (out.lhs - out.rhs).cwiseAbs().maxCoeff();

  // Base-point agreement of the composed flows with the BCH flow.
  auto flow_of = [&](const std::vector<double>& lambda, const std::vector<double>& from) {
    auto rhs_fn = [&](double, const std::vector<double>& y) {
      std::vector<double> outv(u.d(), 0.0);
      for (size_t w = 0; w < lp.witnesses().size(); ++w) {
        if (lambda[w] == 0.0) continue;
        std::vector<double> f = lp.witnesses()[w].evaluate(y);
        for (unsigned c = 0; c < u.d(); ++c) outv[c] += lambda[w] * f[c];
      }
      return outv;
    };
    return rk45_integrate(rhs_fn, from, 0.0, 1.0, u.flow_config(), from.size());
  };
  std::vector<double> composed = flow_of(v2, flow_of(v1, u.base_point()));
  std::vector<double> direct = flow_of(v12, u.base_point());
  double drift = 0.0;
  for (unsigned i = 0; i < u.d(); ++i) {
    drift = std::max(drift, std::abs(composed[i] - u.base_point()[i]));
    drift = std::max(drift, std::abs(direct[i] - u.base_point()[i]));
  }
  out.base_point_drift = drift;
  out.pass = out.normal_defect <= tol && drift <= tol;
  return out;
}

struct DiscretenessProbe {
  bool unbounded = false;
  bool degenerate = false;  // all linearizations vanish
  double radius = 0.0;      // coefficients gamma with |gamma|_inf < radius are injective
  double max_imag_unit = 0.0;
};

/// Linear probe for the injectivity domain D of the matrix exponential on the
/// span of the slice-restricted tail linearizations: returns the largest
/// coefficient box on which every sampled boundary combination has spectrum
/// with |Im| < pi. Sampling grid: tensor grid on each face of the unit cube,
/// nine points per free axis; homogeneity in the radius makes one unit-sphere
/// sweep exact in r.
inline DiscretenessProbe discreteness_linear_probe(const Foliation& f,
                                                   const std::vector<Rational>& x,
                                                   const SliceSpec& slice) {
  for (const auto& [var, val] : slice.fixed)
    if (val != x.at(var)) throw error("discreteness probe: the point must lie on the slice");

  AdaptedFrame frame = adapted_frame(f, x);
  if (frame.tail_generators.empty())
    throw error("discreteness probe: no tail generators at the point (regular point)");
  Foliation tails(f.chart(), frame.tail_generators);
  Foliation restricted = slice_restriction(tails, slice);

  std::vector<unsigned> keep = slice.free_indices(f.dim());
  std::vector<Rational> x_slice;
  for (unsigned i : keep) x_slice.push_back(x[i]);

  std::vector<Eigen::MatrixXd> lins;
  bool all_zero = true;
  for (const auto& g : restricted.generators()) {
    RatMatrix m = linearization(g, x_slice);
    Eigen::MatrixXd e = to_eigen(m);
    if (e.cwiseAbs().maxCoeff() > 0.0) all_zero = false;
    lins.push_back(e);
  }

  DiscretenessProbe out;
  const unsigned l = static_cast<unsigned>(lins.size());
  if (all_zero) {
    out.unbounded = true;
    out.degenerate = true;
    return out;
  }

  // Sample the boundary of the unit cube in R^l: for each face, fix one
  // coordinate at +-1 and grid the others.
  double max_imag = 0.0;
  auto consider = [&](const std::vector<double>& gamma) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(lins[0].rows(), lins[0].cols());
    for (unsigned i = 0; i < l; ++i) a += gamma[i] * lins[i];
    Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
    for (long i = 0; i < es.eigenvalues().size(); ++i)
      max_imag = std::max(max_imag, std::abs(es.eigenvalues()(i).imag()));
  };
  const unsigned per_dim = 9;
  for (unsigned face = 0; face < l; ++face) {
    for (double sign : {-1.0, 1.0}) {
      std::vector<double> rest_center(l > 1 ? l - 1 : 0, 0.0);
      for (const auto& rest : tensor_grid(rest_center, 1.0, l > 1 ? per_dim : 1)) {
        std::vector<double> gamma;
        for (unsigned i = 0, r = 0; i < l; ++i)
          gamma.push_back(i == face ? sign : rest[r++]);
        consider(gamma);
      }
    }
  }
  out.max_imag_unit = max_imag;
  if (max_imag < 1e-12) {
    out.unbounded = true;
    return out;
  }
  out.radius = M_PI / max_imag;
  return out;
}

struct WitnessCheckResult {
  bool pass = false;
  double max_deviation = 0.0;
  std::vector<double> worst_sample;
};

/// Checks a candidate Z in Ix*F_S against the time-1 flow of a time-dependent
/// family {X_t} in Ix*F_S: exact membership preconditions via the Groebner
/// engine, then a pointwise flow comparison on the samples.
inline WitnessCheckResult exponential_condition_witness_check(
    const Foliation& f_slice, const std::vector<Rational>& x, const TimeDependentField& x_t,
    const PolyVector& z, const std::vector<std::vector<double>>& samples, double tol,
    const FlowConfig& cfg = {}) {
  x_t.validate();
  auto gb = cached_groebner(point_ideal_module_generators(f_slice, x));
  for (size_t i = 0; i < x_t.terms.size(); ++i) {
    if (!is_member(x_t.terms[i].field, *gb))
      throw error("witness check: time-dependent term " + std::to_string(i + 1) +
                  " is not in Ix*F_S");
  }
  if (!is_member(z, *gb)) throw error("witness check: the candidate Z is not in Ix*F_S");

  WitnessCheckResult out;
  for (const auto& s : samples) {
    std::vector<double> a = time_dependent_flow(x_t, s, 0.0, 1.0, cfg);
    std::vector<double> b = exp_flow(z, s, 1.0, cfg);
    double dev = 0.0;
    for (size_t i = 0; i < a.size(); ++i) dev = std::max(dev, std::abs(a[i] - b[i]));
    if (dev > out.max_deviation) {
      out.max_deviation = dev;
      out.worst_sample = s;
    }
  }
  out.pass = out.max_deviation < tol;
  return out;
}

} // namespace folhol

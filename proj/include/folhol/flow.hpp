/// Numerical integration of polynomial vector fields with an adaptive
/// embedded Runge-Kutta pair of orders 5(4) (Dormand-Prince coefficients),
/// including the variational (linearized) flow and time-dependent fields.
/// Floats enter the toolkit here; everything upstream is exact.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "folhol/poly_vector.hpp"
#include "folhol/rational_linalg.hpp"

namespace folhol {

struct FlowConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  unsigned long max_steps = 1000000;
  /// Integration aborts once any coordinate leaves [-box_radius, box_radius].
  double box_radius = 1e6;
};

/// X_t = sum_j p_j(t) * X_j with univariate polynomial time coefficients.
struct TimeDependentField {
  struct Term {
    Poly time_coefficient;  // univariate in t (num_vars == 1)
    PolyVector field;
  };
  std::vector<Term> terms;

  unsigned dim() const {
    if (terms.empty()) throw error("TimeDependentField: no terms");
    return terms[0].field.dim();
  }

  void validate() const {
    if (terms.empty()) throw error("TimeDependentField: no terms");
    for (const auto& t : terms) {
      if (t.time_coefficient.num_vars() != 1)
        throw dimension_error("TimeDependentField: time coefficient must be univariate");
      if (t.field.dim() != dim() || t.field.num_vars() != dim())
        throw dimension_error("TimeDependentField: fields disagree on chart dimension");
    }
  }
};

namespace detail {

// Dormand-Prince 5(4) tableau.
inline constexpr double dp_c[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
inline constexpr double dp_a[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
inline constexpr double dp_b5[7] = {35.0 / 384,      0.0,       500.0 / 1113, 125.0 / 192,
                                    -2187.0 / 6784, 11.0 / 84, 0.0};
inline constexpr double dp_b4[7] = {5179.0 / 57600,    0.0,          7571.0 / 16695, 393.0 / 640,
                                    -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

} // namespace detail

/// Integrates dy/dt = rhs(t, y) from t0 to t1 with adaptive step control.
/// `box_dim` coordinates (a prefix of the state) are subject to the bounding
/// box; appended sensitivity blocks are exempt.
inline std::vector<double> rk45_integrate(
    const std::function<std::vector<double>(double, const std::vector<double>&)>& rhs,
    std::vector<double> y, double t0, double t1, const FlowConfig& cfg, size_t box_dim) {
  if (t1 == t0) return y;
  const double direction = t1 > t0 ? 1.0 : -1.0;
  double t = t0;
  double h = direction * std::min(1e-2, std::abs(t1 - t0));
  const size_t n = y.size();
  std::vector<std::vector<double>> k(7, std::vector<double>(n));
  unsigned long steps = 0;

  auto check_box = [&](const std::vector<double>& state) {
    for (size_t i = 0; i < box_dim; ++i) {
      if (!std::isfinite(state[i]) || std::abs(state[i]) > cfg.box_radius) return false;
    }
    for (size_t i = box_dim; i < state.size(); ++i)
      if (!std::isfinite(state[i])) return false;
    return true;
  };

  while (direction * (t1 - t) > 0) {
    if (++steps > cfg.max_steps)
      throw divergence_error("flow: step budget exceeded", y);
    if (direction * (t + h - t1) > 0) h = t1 - t;

    k[0] = rhs(t, y);
    std::vector<double> stage(n);
    for (int s = 1; s < 7; ++s) {
      for (size_t i = 0; i < n; ++i) {
        double acc = y[i];
        for (int j = 0; j < s; ++j) acc += h * detail::dp_a[s][j] * k[j][i];
        stage[i] = acc;
      }
      k[s] = rhs(t + detail::dp_c[s] * h, stage);
    }

    std::vector<double> y5(n);
    double err = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double acc5 = y[i], acc4 = y[i];
      for (int s = 0; s < 7; ++s) {
        acc5 += h * detail::dp_b5[s] * k[s][i];
        acc4 += h * detail::dp_b4[s] * k[s][i];
      }
      y5[i] = acc5;
      double scale = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(acc5));
      double e = (acc5 - acc4) / scale;
      err += e * e;
    }
    err = std::sqrt(err / static_cast<double>(n));
    if (!std::isfinite(err)) {
      h *= 0.2;
      if (std::abs(h) < 1e-15 * std::max(1.0, std::abs(t)))
        throw divergence_error("flow: non-finite right-hand side", y);
      continue;
    }

    if (err <= 1.0) {
      t += h;
      y = y5;
      if (!check_box(y))
        throw divergence_error("flow: trajectory left the bounding box", y);
    }
    double factor = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
    factor = std::min(5.0, std::max(0.2, factor));
    h *= factor;
    if (std::abs(h) < 1e-15 * std::max(1.0, std::abs(t)))
      throw divergence_error("flow: step size underflow", y);
  }
  return y;
}

/// Endpoint of the time-`time` flow of X from x0.
inline std::vector<double> exp_flow(const PolyVector& x_field, const std::vector<double>& x0,
                                    double time, const FlowConfig& cfg = {}) {
  if (x0.size() != x_field.dim()) throw dimension_error("exp_flow: point dimension mismatch");
  auto rhs = [&](double, const std::vector<double>& y) { return x_field.evaluate(y); };
  return rk45_integrate(rhs, x0, 0.0, time, cfg, x0.size());
}

/// Exact rational Jacobian matrix of X at a symbolic zero of X.
/// Entry (i, j) is dX_i/dx_j evaluated at x.
inline RatMatrix linearization(const PolyVector& x_field, const std::vector<Rational>& x) {
  const unsigned d = x_field.dim();
  for (const auto& v : x_field.evaluate(x))
    if (!v.is_zero()) throw error("linearization: the field does not vanish at the point");
  RatMatrix m(d, RatVector(d, Rational(0)));
  for (unsigned i = 0; i < d; ++i)
    for (unsigned j = 0; j < d; ++j) m[i][j] = x_field[i].partial_derivative(j).evaluate(x);
  return m;
}

inline Eigen::MatrixXd to_eigen(const RatMatrix& m) {
  Eigen::MatrixXd e(m.size(), m.empty() ? 0 : m[0].size());
  for (size_t i = 0; i < m.size(); ++i)
    for (size_t j = 0; j < m[i].size(); ++j) e(static_cast<long>(i), static_cast<long>(j)) = m[i][j].to_double();
  return e;
}

struct VariationalResult {
  std::vector<double> endpoint;
  Eigen::MatrixXd jacobian;  // d(flow_t)/d(x0)
};

namespace detail {

/// Shared kernel: integrates the state together with the variational
/// equation dJ/dt = DX(x) J for a possibly time-dependent right-hand side.
inline VariationalResult variational_integrate(
    const std::function<std::vector<double>(double, const std::vector<double>&)>& field,
    const std::function<Eigen::MatrixXd(double, const std::vector<double>&)>& field_jacobian,
    const std::vector<double>& x0, double t0, double t1, const FlowConfig& cfg) {
  const size_t d = x0.size();
  std::vector<double> state(d + d * d, 0.0);
  for (size_t i = 0; i < d; ++i) state[i] = x0[i];
  for (size_t i = 0; i < d; ++i) state[d + i * d + i] = 1.0;

  auto rhs = [&](double t, const std::vector<double>& s) {
    std::vector<double> x(s.begin(), s.begin() + static_cast<long>(d));
    std::vector<double> out(d + d * d);
    std::vector<double> fx = field(t, x);
    Eigen::MatrixXd a = field_jacobian(t, x);
    for (size_t i = 0; i < d; ++i) out[i] = fx[i];
    // dJ/dt = A J, J stored row-major after the state.
    for (size_t i = 0; i < d; ++i)
      for (size_t j = 0; j < d; ++j) {
        double acc = 0.0;
        for (size_t l = 0; l < d; ++l)
          acc += a(static_cast<long>(i), static_cast<long>(l)) * s[d + l * d + j];
        out[d + i * d + j] = acc;
      }
    return out;
  };

  std::vector<double> end = rk45_integrate(rhs, state, t0, t1, cfg, d);
  VariationalResult r;
  r.endpoint.assign(end.begin(), end.begin() + static_cast<long>(d));
  r.jacobian.resize(static_cast<long>(d), static_cast<long>(d));
  for (size_t i = 0; i < d; ++i)
    for (size_t j = 0; j < d; ++j)
      r.jacobian(static_cast<long>(i), static_cast<long>(j)) = end[d + i * d + j];
  return r;
}

inline Eigen::MatrixXd poly_field_jacobian(const PolyVector& x_field, const std::vector<double>& x) {
  const unsigned d = x_field.dim();
  Eigen::MatrixXd a(d, d);
  for (unsigned i = 0; i < d; ++i)
    for (unsigned j = 0; j < d; ++j) a(i, j) = x_field[i].partial_derivative(j).evaluate(x);
  return a;
}

} // namespace detail

/// Endpoint and Jacobian of the time-`time` flow of X at x0, via joint
/// integration of the variational equation.
inline VariationalResult variational_flow(const PolyVector& x_field, const std::vector<double>& x0,
                                          double time, const FlowConfig& cfg = {}) {
  if (x0.size() != x_field.dim()) throw dimension_error("variational_flow: point dimension mismatch");
  auto field = [&](double, const std::vector<double>& y) { return x_field.evaluate(y); };
  auto jac = [&](double, const std::vector<double>& y) {
    return detail::poly_field_jacobian(x_field, y);
  };
  return detail::variational_integrate(field, jac, x0, 0.0, time, cfg);
}

inline std::vector<double> evaluate_time_dependent(const TimeDependentField& x_field, double t,
                                                   const std::vector<double>& y) {
  std::vector<double> out(y.size(), 0.0);
  std::vector<double> tvec{t};
  for (const auto& term : x_field.terms) {
    double p = term.time_coefficient.evaluate(tvec);
    if (p == 0.0) continue;
    std::vector<double> fy = term.field.evaluate(y);
    for (size_t i = 0; i < y.size(); ++i) out[i] += p * fy[i];
  }
  return out;
}

inline std::vector<double> time_dependent_flow(const TimeDependentField& x_field,
                                               const std::vector<double>& x0, double t0, double t1,
                                               const FlowConfig& cfg = {}) {
  x_field.validate();
  if (x0.size() != x_field.dim())
    throw dimension_error("time_dependent_flow: point dimension mismatch");
  auto rhs = [&](double t, const std::vector<double>& y) {
    return evaluate_time_dependent(x_field, t, y);
  };
  return rk45_integrate(rhs, x0, t0, t1, cfg, x0.size());
}

inline VariationalResult time_dependent_variational_flow(const TimeDependentField& x_field,
                                                         const std::vector<double>& x0, double t0,
                                                         double t1, const FlowConfig& cfg = {}) {
  x_field.validate();
  auto field = [&](double t, const std::vector<double>& y) {
    return evaluate_time_dependent(x_field, t, y);
  };
  auto jac = [&](double t, const std::vector<double>& y) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(y.size(), y.size());
    std::vector<double> tvec{t};
    for (const auto& term : x_field.terms) {
      double p = term.time_coefficient.evaluate(tvec);
      if (p == 0.0) continue;
      a += p * detail::poly_field_jacobian(term.field, y);
    }
    return a;
  };
  return detail::variational_integrate(field, jac, x0, t0, t1, cfg);
}

} // namespace folhol

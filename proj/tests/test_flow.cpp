#include <catch2/catch_amalgamated.hpp>

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <random>

#include "folhol/flow.hpp"

using namespace folhol;

namespace {

Poly var(unsigned nv, unsigned i) { return Poly::variable(nv, i); }
Poly cst(unsigned nv, long c) { return Poly::constant(nv, Rational(c)); }
PolyVector pv(std::vector<Poly> comps) { return PolyVector(std::move(comps)); }

PolyVector rotation_field() {
  Poly x = var(2, 0), y = var(2, 1);
  return pv({-y, x});
}

} // namespace

TEST_CASE("flow of a constant field") {
  PolyVector dx = pv({cst(1, 1)});
  auto end = exp_flow(dx, {0.0}, 1.0);
  CHECK(end[0] == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("rotation flow lands on the rotation matrix image") {
  const double eps = 0.3;
  PolyVector field = Rational(3, 10) * rotation_field();
  auto end = exp_flow(field, {1.0, 0.0}, 1.0);
  CHECK(end[0] == Catch::Approx(std::cos(eps)).margin(1e-10));
  CHECK(end[1] == Catch::Approx(std::sin(eps)).margin(1e-10));
}

TEST_CASE("scaling flow is the exponential") {
  PolyVector field = Rational(1, 2) * pv({var(1, 0)});
  auto end = exp_flow(field, {2.0}, 1.0);
  CHECK(end[0] == Catch::Approx(2.0 * std::exp(0.5)).margin(1e-9));
}

TEST_CASE("flow at time zero is the identity, exactly") {
  auto end = exp_flow(rotation_field(), {0.4, -0.7}, 0.0);
  CHECK(end[0] == 0.4);
  CHECK(end[1] == -0.7);
}

TEST_CASE("divergence is reported, not clipped") {
  // dx/dt = x^2 from 1 blows up at t = 1.
  Poly x = var(1, 0);
  PolyVector field = pv({x * x});
  CHECK_THROWS_AS(exp_flow(field, {1.0}, 2.0), divergence_error);

  FlowConfig tight;
  tight.box_radius = 10.0;
  CHECK_THROWS_AS(exp_flow(pv({cst(1, 1)}), {0.0}, 100.0, tight), divergence_error);
}

TEST_CASE("variational flow of a linear field matches the matrix exponential") {
  // A = [[1/2, 1], [0, -1/3]]; Jacobian of the time-t flow is exp(tA).
  Poly x = var(2, 0), y = var(2, 1);
  PolyVector field = pv({Rational(1, 2) * x + y, Rational(-1, 3) * y});
  Eigen::Matrix2d a;
  a << 0.5, 1.0, 0.0, -1.0 / 3.0;
  const double t = 0.8;
  VariationalResult r = variational_flow(field, {0.3, -0.2}, t);
  Eigen::Matrix2d expected = (t * a).exp();
  CHECK((r.jacobian - expected).norm() < 1e-9 * expected.norm());
}

TEST_CASE("variational flow of the zero field is the identity") {
  PolyVector zero(2, 2);
  VariationalResult r = variational_flow(zero, {1.0, 2.0}, 1.0);
  CHECK((r.jacobian - Eigen::Matrix2d::Identity()).norm() == 0.0);
}

TEST_CASE("variational flow of the rotation field is a rotation matrix") {
  const double eps = 0.45;
  PolyVector field = Rational(45, 100) * rotation_field();
  VariationalResult r = variational_flow(field, {0.2, 0.9}, 1.0);
  Eigen::Matrix2d rot;
  rot << std::cos(eps), -std::sin(eps), std::sin(eps), std::cos(eps);
  CHECK((r.jacobian - rot).norm() < 1e-9);
}

TEST_CASE("variational Jacobians agree with central finite differences") {
  std::mt19937 rng(31337);
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  Poly x = var(2, 0), y = var(2, 1);
  std::vector<PolyVector> fields{
      rotation_field(),
      pv({x * y, x - y}),
      pv({Rational(1, 2) * (x * x) - y, x + Rational(1, 3) * (y * y)}),
  };
  const double h = 1e-5;
  for (const auto& field : fields) {
    std::vector<double> x0{u(rng), u(rng)};
    VariationalResult r = variational_flow(field, x0, 0.7);
    for (int j = 0; j < 2; ++j) {
      auto xp = x0, xm = x0;
      xp[j] += h;
      xm[j] -= h;
      auto fp = exp_flow(field, xp, 0.7);
      auto fm = exp_flow(field, xm, 0.7);
      for (int i = 0; i < 2; ++i) {
        double fd = (fp[i] - fm[i]) / (2 * h);
        double ref = r.jacobian(i, j);
        CHECK(std::abs(fd - ref) < 1e-5 * std::max(1.0, std::abs(ref)));
      }
    }
  }
}

TEST_CASE("flow reversibility and additivity") {
  std::mt19937 rng(4242);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  Poly x = var(2, 0), y = var(2, 1);
  std::vector<PolyVector> fields{rotation_field(), pv({x * y - y, x + x * x})};
  for (const auto& field : fields) {
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<double> x0{u(rng), u(rng)};
      auto fwd = exp_flow(field, x0, 0.6);
      auto back = exp_flow(-field, fwd, 0.6);
      CHECK(std::abs(back[0] - x0[0]) < 1e-8);
      CHECK(std::abs(back[1] - x0[1]) < 1e-8);

      auto ab = exp_flow(field, exp_flow(field, x0, 0.25), 0.35);
      auto once = exp_flow(field, x0, 0.6);
      CHECK(std::abs(ab[0] - once[0]) < 1e-8);
      CHECK(std::abs(ab[1] - once[1]) < 1e-8);
    }
  }
}

TEST_CASE("time dependent flows") {
  SECTION("autonomous embedding agrees with exp_flow") {
    TimeDependentField tf;
    tf.terms.push_back({Poly::constant(1, Rational(1)), rotation_field()});
    auto a = time_dependent_flow(tf, {1.0, 0.0}, 0.0, 1.0);
    auto b = exp_flow(rotation_field(), {1.0, 0.0}, 1.0);
    CHECK(std::abs(a[0] - b[0]) < 1e-9);
    CHECK(std::abs(a[1] - b[1]) < 1e-9);
  }
  SECTION("X_t = 2t d/dx integrates to 1") {
    TimeDependentField tf;
    Poly t = var(1, 0);
    tf.terms.push_back({Rational(2) * t, pv({cst(1, 1)})});
    auto end = time_dependent_flow(tf, {0.0}, 0.0, 1.0);
    CHECK(end[0] == Catch::Approx(1.0).margin(1e-10));
  }
  SECTION("commuting family: endpoint x0 * exp(integral of p)") {
    // p(t) = 3t^2 on x d/dx: endpoint x0 * e.
    TimeDependentField tf;
    Poly t = var(1, 0);
    tf.terms.push_back({Rational(3) * t * t, pv({var(1, 0)})});
    auto end = time_dependent_flow(tf, {0.7}, 0.0, 1.0);
    CHECK(end[0] == Catch::Approx(0.7 * std::exp(1.0)).margin(1e-9));
  }
}

TEST_CASE("linearization at a zero of the field") {
  SECTION("x d/dx at 0") {
    RatMatrix m = linearization(pv({var(1, 0)}), {Rational(0)});
    CHECK(m[0][0] == Rational(1));
  }
  SECTION("rotation field at 0 gives the skew matrix") {
    RatMatrix m = linearization(rotation_field(), {Rational(0), Rational(0)});
    CHECK(m[0][0] == Rational(0));
    CHECK(m[0][1] == Rational(-1));
    CHECK(m[1][0] == Rational(1));
    CHECK(m[1][1] == Rational(0));
  }
  SECTION("fields vanishing to second order have zero linear part") {
    Poly x = var(2, 0), y = var(2, 1);
    PolyVector g = pv({x * x, x * y});
    RatMatrix m = linearization(g, {Rational(0), Rational(0)});
    for (const auto& row : m)
      for (const auto& c : row) CHECK(c == Rational(0));
  }
  SECTION("nonvanishing point is rejected") {
    CHECK_THROWS_AS(linearization(pv({var(1, 0)}), {Rational(2)}), error);
  }
}

// Acceptance suite: every criterion prints exactly one PASS/FAIL line with
// its runtime. The process exits nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "folhol/folhol.hpp"

using namespace folhol;

namespace {

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(bool cond, const std::string& what) {
  if (!cond) throw Failure(what);
}

Poly var(unsigned nv, unsigned i) { return Poly::variable(nv, i); }
PolyVector pv(std::vector<Poly> comps) { return PolyVector(std::move(comps)); }
std::vector<Rational> origin(unsigned d) { return std::vector<Rational>(d, Rational(0)); }

FoliationDocument rotation_doc() {
  return parse_document(
      "foliation rotation { chart dim 2 vars x y; gen X = x*d(y) - y*d(x); }");
}

FoliationDocument scaling_doc() {
  return parse_document("foliation scaling { chart dim 1 vars x; gen X = x*d(x); }");
}

FoliationDocument torus_doc() {
  return parse_document(
      "foliation torus { chart dim 4 vars th1 th2 t1 t2;"
      " gen v1 = d(th1) + t1*t2*d(t1); gen v2 = d(th2) + t1*t2*d(t2);"
      " gen w1 = t1^2*t2*d(t1); gen w2 = t1*t2^2*d(t2);"
      " leaf L = { t1 = 0; t2 = 0 }; slice S = { th1 = 0; th2 = 0 }; }");
}

FoliationDocument one_form_doc() {
  return parse_document(
      "foliation one_form { chart dim 3 vars x1 x2 t;"
      " gen A1 = d(x1) + 2*t*d(t); gen A2 = d(x2) - 3*t*d(t); gen W = t^2*d(t);"
      " leaf L = { t = 0 }; }");
}

Foliation fk_foliation(unsigned k) {
  std::vector<PolyVector> gens;
  for (unsigned i = 0; i <= k; ++i) {
    Exponents e{i, k - i};
    Poly mono = Poly::monomial(2, e, Rational(1));
    gens.push_back(pv({mono, Poly(2)}));
    gens.push_back(pv({Poly(2), mono}));
  }
  return Foliation(Chart(2, {"x", "y"}), std::move(gens));
}

DomainBox wide_box() {
  DomainBox box;
  box.y_radius = 2.0;
  box.xi_radius = 10.0;
  return box;
}

DeltaOptions wide_delta() {
  DeltaOptions opts;
  opts.validity_radius = 8.0;
  return opts;
}

// --- criteria ---------------------------------------------------------------

void c1_fk_fiber_table() {
  for (unsigned k = 1; k <= 3; ++k) {
    auto t0 = std::chrono::steady_clock::now();
    FiberReport rep = fiber_report(fk_foliation(k), origin(2));
    check(rep.dim_fiber == 2 * k + 2, "dim fiber != 2k+2 at k=" + std::to_string(k));
    check(rep.dim_isotropy == 2 * k + 2, "dim isotropy != 2k+2 at k=" + std::to_string(k));
    check(rep.dim_tangent == 0, "dim tangent != 0 at k=" + std::to_string(k));
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    check(secs < 5.0, "per-k runtime over 5 s");
  }
}

void c2_rotation_pointwise() {
  Foliation f = rotation_doc().foliation();
  std::vector<std::vector<Rational>> points{
      {Rational(0), Rational(0)},       {Rational(1), Rational(0)},
      {Rational(0), Rational(1)},       {Rational(-1), Rational(1)},
      {Rational(1, 2), Rational(1, 3)}, {Rational(-2, 7), Rational(5, 4)}};
  for (const auto& q : points) {
    bool at_origin = q[0].is_zero() && q[1].is_zero();
    FiberReport rep = fiber_report(f, q);
    check(rep.dim_fiber == 1, "dim fiber != 1");
    check(rep.dim_isotropy == (at_origin ? 1u : 0u), "isotropy dim wrong");
    PointClass c = classify_point(f, q);
    check((c == PointClass::Singular) == at_origin, "classification wrong");
  }
}

void c3_scaling_pointwise() {
  Foliation f = scaling_doc().foliation();
  for (long n : {0L, 1L, -2L, 5L}) {
    std::vector<Rational> q{Rational(n, 3)};
    FiberReport rep = fiber_report(f, q);
    check(rep.dim_fiber == 1, "dim fiber != 1");
    if (n == 0) {
      check(isotropy_algebra(f, q).dim() == 1, "g_0 not one-dimensional");
    } else {
      check(classify_point(f, q) == PointClass::Regular, "nonzero point not Regular");
    }
  }
}

void c4_abelian_isotropy() {
  Poly x = var(1, 0);
  Foliation f(Chart(1, {"x"}), {pv({x * x}), pv({x * x * x})});
  LieAlgebraPresentation lp = isotropy_algebra(f, origin(1));
  for (const auto& row : lp.constants())
    for (const auto& vec : row)
      for (const auto& c : vec) check(c == Rational(0), "nonzero structure constant");
}

void c5_torus_example() {
  FoliationDocument doc = torus_doc();
  Foliation f = doc.foliation();
  const auto& v1 = f.generators()[0];
  const auto& v2 = f.generators()[1];
  const auto& w1 = f.generators()[2];
  const auto& w2 = f.generators()[3];
  Poly t1 = var(4, 2), t2 = var(4, 3);

  // The four displayed brackets, exactly.
  check(lie_bracket(v1, v2) == w2 - w1, "[v1,v2] != w2 - w1");
  check(lie_bracket(v1, w1) == t2 * w1, "[v1,w1] != t2 w1");
  check(lie_bracket(v1, w2) == t2 * (w2 - w1), "[v1,w2] != t2 (w2 - w1)");
  check(lie_bracket(w1, w2) == t1 * t2 * (w2 - w1), "[w1,w2] != t1 t2 (w2 - w1)");

  auto inv = involutivity_check(f);
  const auto* ok = std::get_if<Involutive>(&inv);
  check(ok != nullptr, "involutivity not certified");
  check(ok->witnesses.size() == 6, "expected six certified pairs");
  for (const auto& w : ok->witnesses) {
    PolyVector rebuilt(4, 4);
    for (size_t i = 0; i < w.quotients.size(); ++i)
      rebuilt += w.quotients[i] * ok->module_gb.basis[i];
    check(rebuilt == w.bracket, "witness does not reconstruct its bracket");
  }

  AlgebroidLocalData al = algebroid_local_data(f, doc.leaves.at("L"), f.generators());
  check(al.anchor[0] == pv({Poly::constant(2, Rational(1)), Poly(2)}), "anchor(v1) != d/dth1");
  check(al.anchor[1] == pv({Poly(2), Poly::constant(2, Rational(1))}), "anchor(v2) != d/dth2");
  check(al.anchor[2].is_zero() && al.anchor[3].is_zero(), "anchor(w_i) != 0");
  for (unsigned a = 0; a < 4; ++a)
    for (unsigned b = a + 1; b < 4; ++b)
      for (unsigned g = 0; g < 4; ++g) {
        const Poly& c = al.bracket_table[a][b][g];
        if (a == 0 && b == 1 && g == 2) {
          check(c == Poly::constant(2, Rational(-1)), "[v1,v2] w1-coefficient != -1");
        } else if (a == 0 && b == 1 && g == 3) {
          check(c == Poly::constant(2, Rational(1)), "[v1,v2] w2-coefficient != 1");
        } else {
          check(c.is_zero(), "unexpected nonzero algebroid bracket entry");
        }
      }

  // The fiber Lie algebra k: basis (v1, v2, w1, w2), [v1, v2] = w2 - w1.
  std::vector<std::vector<RatVector>> k(4, std::vector<RatVector>(4, RatVector(4, Rational(0))));
  k[0][1][2] = Rational(-1);
  k[0][1][3] = Rational(1);
  k[1][0][2] = Rational(1);
  k[1][0][3] = Rational(-1);
  LieAlgebraAnalysis an = lie_algebra_analysis(LieAlgebraPresentation::from_constants(k));
  check(an.lower_central_series_dims == std::vector<unsigned>{4, 1, 0},
        "lower central series is not (4, 1, 0)");
  check(an.center_dim == 2, "center dim != 2");
}

void c6_one_form_brackets() {
  FoliationDocument doc = one_form_doc();
  Foliation f = doc.foliation();
  AlgebroidLocalData al = algebroid_local_data(f, doc.leaves.at("L"), f.generators());
  check(al.bracket_table[0][2][2] == Poly::constant(2, Rational(2)), "[A1,W] != 2 W");
  check(al.bracket_table[1][2][2] == Poly::constant(2, Rational(-3)), "[A2,W] != -3 W");
  check(al.bracket_table[0][1][0].is_zero() && al.bracket_table[0][1][1].is_zero() &&
            al.bracket_table[0][1][2].is_zero(),
        "[A1,A2] != 0");
  check(al.bracket_table[0][2][0].is_zero() && al.bracket_table[0][2][1].is_zero(),
        "[A1,W] has spurious components");
}

void c7_bisubmersion_targets() {
  {
    PathHolonomyBiSubmersion u(rotation_doc().foliation(), origin(2), wide_box());
    const double eps = 0.3;
    double worst = 0.0;
    for (const auto& y : tensor_grid({0.0, 0.0}, 0.5, 5)) {
      auto t = bisubmersion_target(u, y, {eps});
      double cx = std::cos(eps) * y[0] - std::sin(eps) * y[1];
      double cy = std::sin(eps) * y[0] + std::cos(eps) * y[1];
      worst = std::max({worst, std::abs(t[0] - cx), std::abs(t[1] - cy)});
    }
    check(worst < 1e-8, "rotation target error " + std::to_string(worst));
  }
  {
    PathHolonomyBiSubmersion u(scaling_doc().foliation(), origin(1), wide_box());
    double worst = 0.0;
    for (const auto& y : tensor_grid({0.0}, 0.5, 5)) {
      for (const auto& eps : tensor_grid({0.0}, 0.5, 5)) {
        auto t = bisubmersion_target(u, y, eps);
        worst = std::max(worst, std::abs(t[0] - y[0] * std::exp(eps[0])));
      }
    }
    check(worst < 1e-8, "scaling target error " + std::to_string(worst));
  }
}

void c8_delta_and_covering() {
  Foliation f = rotation_doc().foliation();
  PathHolonomyBiSubmersion u(f, origin(2), wide_box());
  LieAlgebraPresentation lp = isotropy_algebra(f, origin(2));
  for (double k : {0.3, 1.0, 2.0}) {
    DeltaResult r = delta_map(u, lp, {k}, wide_delta());
    check(std::abs(r.xi[0] - k) < 1e-8, "Delta(k) != (0, k) at k=" + std::to_string(k));
    LinearHolonomy lh = linear_holonomy(u, r.xi);
    Eigen::Matrix2d rot;
    rot << std::cos(k), -std::sin(k), std::sin(k), std::cos(k);
    check((lh.full_jacobian - rot).cwiseAbs().maxCoeff() < 1e-7,
          "linear holonomy != R(k) at k=" + std::to_string(k));
  }
  check(kernel_linear_probe(u, {2.0 * M_PI}) == KernelProbe::Inconclusive,
        "2 pi not Inconclusive");
  check(kernel_linear_probe(u, {1.0}) == KernelProbe::NotInKernel, "1.0 not NotInKernel");
}

void c9_morphism_property() {
  std::mt19937 rng(987654321);
  std::uniform_real_distribution<double> coeff(-0.45, 0.45);

  // (a) rotation foliation at the origin.
  {
    Foliation f = rotation_doc().foliation();
    PathHolonomyBiSubmersion u(f, origin(2), wide_box());
    LieAlgebraPresentation lp = isotropy_algebra(f, origin(2));
    for (int i = 0; i < 5; ++i) {
      MorphismCheckResult r = morphism_check(u, lp, {coeff(rng)}, {coeff(rng)}, 1e-6, wide_delta());
      check(r.pass, "rotation morphism check failed, defect " + std::to_string(r.normal_defect));
    }
  }
  // (b) <x d/dx, x^2 d/dx> at 0.
  {
    Poly x = var(1, 0);
    Foliation f(Chart(1, {"x"}), {pv({x}), pv({x * x})});
    PathHolonomyBiSubmersion u(f, origin(1), wide_box());
    LieAlgebraPresentation lp = isotropy_algebra(f, origin(1));
    check(lp.dim() == 1, "g_0 of <x d/dx, x^2 d/dx> is not one-dimensional");
    for (int i = 0; i < 5; ++i) {
      MorphismCheckResult r = morphism_check(u, lp, {coeff(rng)}, {coeff(rng)}, 1e-6, wide_delta());
      check(r.pass, "scaling-pair morphism check failed, defect " + std::to_string(r.normal_defect));
    }
  }
  // (c) the torus example's slice foliation at a leaf point.
  {
    FoliationDocument doc = torus_doc();
    Foliation full = doc.foliation();
    const SliceSpec& slice = doc.slices.at("S");
    Foliation f_s = slice_restriction(tangent_subfoliation(full, slice), slice);
    PathHolonomyBiSubmersion u(f_s, origin(2), wide_box());
    LieAlgebraPresentation lp = isotropy_algebra(f_s, origin(2));
    check(lp.dim() == 2, "slice isotropy is not two-dimensional");
    for (int i = 0; i < 5; ++i) {
      MorphismCheckResult r = morphism_check(u, lp, {coeff(rng), coeff(rng)},
                                             {coeff(rng), coeff(rng)}, 1e-6, wide_delta());
      check(r.pass, "torus-slice morphism check failed, defect " + std::to_string(r.normal_defect));
    }
  }
}

void c10_discreteness_probe() {
  SliceSpec whole;
  DiscretenessProbe rot = discreteness_linear_probe(rotation_doc().foliation(), origin(2), whole);
  check(!rot.unbounded, "rotation probe unexpectedly unbounded");
  check(std::abs(rot.radius - M_PI) < 0.01 * M_PI,
        "rotation box radius " + std::to_string(rot.radius) + " not within 1% of pi");
  DiscretenessProbe sc = discreteness_linear_probe(scaling_doc().foliation(), origin(1), whole);
  check(sc.unbounded, "scaling probe not Unbounded");
}

void c11_property_suites() {
  // (a) bilinearity, antisymmetry, Jacobi on 100 random degree <= 2 triples.
  {
    std::mt19937 rng(20260809);
    std::uniform_int_distribution<int> coeff(-2, 2);
    std::uniform_int_distribution<unsigned> deg(0, 2);
    auto random_field = [&](unsigned d) {
      std::vector<Poly> comps;
      for (unsigned c = 0; c < d; ++c) {
        Poly p(d);
        for (int t = 0; t < 3; ++t) {
          Exponents e(d, 0);
          unsigned left = deg(rng);
          for (unsigned i = 0; i < d && left > 0; ++i) {
            std::uniform_int_distribution<unsigned> part(0, left);
            e[i] = part(rng);
            left -= e[i];
          }
          p.add_term(e, Rational(coeff(rng)));
        }
        comps.push_back(p);
      }
      return pv(std::move(comps));
    };
    for (int trial = 0; trial < 100; ++trial) {
      unsigned d = 2 + (trial % 2);
      PolyVector a = random_field(d), b = random_field(d), c = random_field(d);
      check(lie_bracket(a, b) == -lie_bracket(b, a), "antisymmetry failed");
      PolyVector jac = lie_bracket(a, lie_bracket(b, c)) + lie_bracket(b, lie_bracket(c, a)) +
                       lie_bracket(c, lie_bracket(a, b));
      check(jac.is_zero(), "Jacobi identity failed");
    }
  }
  // (b) dim fiber = dim tangent + dim isotropy on every (example, point) pair,
  // with the isotropy dimension recomputed independently from the witnesses.
  {
    struct Case {
      Foliation f;
      std::vector<std::vector<Rational>> points;
    };
    std::vector<Case> cases;
    cases.push_back({rotation_doc().foliation(),
                     {origin(2), {Rational(1), Rational(0)}, {Rational(1, 2), Rational(-1, 3)}}});
    cases.push_back({scaling_doc().foliation(), {origin(1), {Rational(2)}, {Rational(-1, 4)}}});
    for (unsigned k = 1; k <= 3; ++k)
      cases.push_back({fk_foliation(k), {origin(2), {Rational(1, 7), Rational(2, 5)}}});
    cases.push_back({torus_doc().foliation(),
                     {origin(4), {Rational(0), Rational(0), Rational(1, 3), Rational(-1, 2)}}});
    cases.push_back({one_form_doc().foliation(),
                     {origin(3), {Rational(1), Rational(2), Rational(0)}}});
    for (const auto& cs : cases) {
      for (const auto& q : cs.points) {
        FiberReport rep = fiber_report(cs.f, q);
        check(rep.dim_fiber == rep.dim_tangent + rep.dim_isotropy, "extension equality failed");
        LieAlgebraPresentation lp = isotropy_algebra(cs.f, q);
        check(lp.dim() == rep.dim_isotropy, "witness count disagrees with fiber report");
      }
    }
  }
  // (c) Groebner membership vs the truncated-jet oracle on 50 random small
  // instances. Generators are homogeneous, so the modules are graded and the
  // degree-capped jets decide membership exactly.
  {
    std::mt19937 rng(20240811);
    std::uniform_int_distribution<int> coeff(-3, 3);
    std::uniform_int_distribution<unsigned> nv_dist(1, 3), deg_dist(0, 3), gen_deg_dist(1, 3);
    auto random_homogeneous = [&](unsigned nv, unsigned deg) {
      Poly p(nv);
      for (int t = 0; t < 3; ++t) {
        Exponents e(nv, 0);
        unsigned left = deg;
        for (unsigned i = 0; i + 1 < nv; ++i) {
          std::uniform_int_distribution<unsigned> part(0, left);
          e[i] = part(rng);
          left -= e[i];
        }
        e[nv - 1] = left;
        p.add_term(e, Rational(coeff(rng)));
      }
      return p;
    };
    auto random_poly = [&](unsigned nv, unsigned max_deg) {
      Poly p(nv);
      for (int t = 0; t < 4; ++t) {
        Exponents e(nv, 0);
        unsigned left = deg_dist(rng) % (max_deg + 1);
        for (unsigned i = 0; i < nv && left > 0; ++i) {
          std::uniform_int_distribution<unsigned> part(0, left);
          e[i] = part(rng);
          left -= e[i];
        }
        p.add_term(e, Rational(coeff(rng)));
      }
      return p;
    };
    auto jet = [](const PolyVector& v, unsigned cap) {
      PolyVector out(v.dim(), v.num_vars());
      for (unsigned c = 0; c < v.dim(); ++c)
        for (const auto& [e, coeff] : v[c].terms())
          if (total_degree(e) <= cap) out[c].add_term(e, coeff);
      return out;
    };
    // Jet-truncated membership: the degree-cap jet of v against the space of
    // degree-cap jets of module elements. Module membership implies jet
    // membership at every cap.
    auto jet_member = [&](const PolyVector& v, const std::vector<PolyVector>& gens, unsigned cap) {
      const unsigned nv = v.num_vars();
      std::vector<Exponents> monos;
      Exponents cur(nv, 0);
      std::function<void(unsigned, unsigned)> rec = [&](unsigned pos, unsigned left) {
        if (pos == nv) {
          monos.push_back(cur);
          return;
        }
        for (unsigned e = 0; e <= left; ++e) {
          cur[pos] = e;
          rec(pos + 1, left - e);
        }
        cur[pos] = 0;
      };
      rec(0, cap);
      std::vector<PolyVector> span;
      for (const auto& g : gens) {
        if (g.is_zero()) continue;
        for (const auto& m : monos) {
          PolyVector j = jet(Poly::monomial(nv, m, Rational(1)) * g, cap);
          if (!j.is_zero()) span.push_back(std::move(j));
        }
      }
      PolyVector target = jet(v, cap);
      std::map<std::pair<unsigned, Exponents>, size_t> index;
      auto index_terms = [&](const PolyVector& w) {
        for (unsigned c = 0; c < w.dim(); ++c)
          for (const auto& [e, cf] : w[c].terms()) index.emplace(std::make_pair(c, e), index.size());
      };
      for (const auto& s : span) index_terms(s);
      index_terms(target);
      RatMatrix a(std::max<size_t>(index.size(), 1), RatVector(span.size(), Rational(0)));
      RatVector b(std::max<size_t>(index.size(), 1), Rational(0));
      for (size_t i = 0; i < span.size(); ++i)
        for (unsigned c = 0; c < span[i].dim(); ++c)
          for (const auto& [e, cf] : span[i][c].terms()) a[index.at({c, e})][i] = cf;
      for (unsigned c = 0; c < target.dim(); ++c)
        for (const auto& [e, cf] : target[c].terms()) b[index.at({c, e})] = cf;
      return solve(a, b).has_value();
    };
    int checked = 0;
    while (checked < 50) {
      unsigned nv = nv_dist(rng);
      std::vector<PolyVector> gens;
      for (unsigned g = 0; g < 1u + static_cast<unsigned>(checked % 3); ++g) {
        unsigned deg = gen_deg_dist(rng);
        std::vector<Poly> comps;
        for (unsigned c = 0; c < 2; ++c) comps.push_back(random_homogeneous(nv, deg));
        PolyVector v(std::move(comps));
        if (!v.is_zero()) gens.push_back(v);
      }
      if (gens.empty()) continue;
      ModuleGB gb = module_groebner(gens);
      PolyVector probe(2, nv);
      if (checked % 2 == 0) {
        for (const auto& g : gens) probe += random_poly(nv, 1) * g;
      } else {
        std::vector<Poly> comps;
        for (unsigned c = 0; c < 2; ++c) comps.push_back(random_poly(nv, 3));
        probe = PolyVector(std::move(comps));
      }
      unsigned cap = probe.is_zero() ? 4 : probe.degree() + 4;
      check(is_member(probe, gb) == jet_member(probe, gens, cap),
            "Groebner membership disagrees with the jet oracle");
      ++checked;
    }
  }
  // (d) variational Jacobians vs central finite differences.
  {
    Poly x = var(2, 0), y = var(2, 1);
    std::vector<PolyVector> fields{pv({-y, x}), pv({x * y, x - y})};
    const double h = 1e-5;
    for (const auto& field : fields) {
      std::vector<double> x0{0.2, -0.3};
      VariationalResult r = variational_flow(field, x0, 0.7);
      for (int j = 0; j < 2; ++j) {
        auto xp = x0, xm = x0;
        xp[j] += h;
        xm[j] -= h;
        auto fp = exp_flow(field, xp, 0.7);
        auto fm = exp_flow(field, xm, 0.7);
        for (int i = 0; i < 2; ++i) {
          double fd = (fp[i] - fm[i]) / (2 * h);
          check(std::abs(fd - r.jacobian(i, j)) < 1e-5 * std::max(1.0, std::abs(r.jacobian(i, j))),
                "variational Jacobian vs finite differences");
        }
      }
    }
  }
  // (e) flow reversibility and additivity within 1e-8.
  {
    Poly x = var(2, 0), y = var(2, 1);
    PolyVector field = pv({x * y - y, x + x * x});
    std::vector<double> x0{0.15, -0.2};
    auto fwd = exp_flow(field, x0, 0.6);
    auto back = exp_flow(-field, fwd, 0.6);
    check(std::abs(back[0] - x0[0]) < 1e-8 && std::abs(back[1] - x0[1]) < 1e-8, "reversibility");
    auto ab = exp_flow(field, exp_flow(field, x0, 0.25), 0.35);
    auto once = exp_flow(field, x0, 0.6);
    check(std::abs(ab[0] - once[0]) < 1e-8 && std::abs(ab[1] - once[1]) < 1e-8, "additivity");
  }
}

void c12_witness_check() {
  // Slice foliation F_S = <x d/dx>, so I0*F_S = <x^2 d/dx>.
  Poly x = var(1, 0);
  Foliation f(Chart(1, {"x"}), {pv({x})});
  std::vector<std::vector<double>> samples;
  for (double s : {-0.2, -0.1, 0.05, 0.1, 0.2}) samples.push_back({s});

  TimeDependentField autonomous;
  autonomous.terms.push_back({Poly::constant(1, Rational(1)), pv({x * x})});
  check(exponential_condition_witness_check(f, origin(1), autonomous, pv({x * x}), samples, 1e-9)
            .pass,
        "autonomous case failed");

  TimeDependentField commuting;
  Poly t = var(1, 0);
  commuting.terms.push_back({Rational(3) * t * t, pv({x * x})});
  check(exponential_condition_witness_check(f, origin(1), commuting, pv({x * x}), samples, 1e-9)
            .pass,
        "commuting family case failed");

  check(!exponential_condition_witness_check(f, origin(1), commuting, Rational(2) * pv({x * x}),
                                             samples, 1e-9)
             .pass,
        "mismatched Z unexpectedly passed");
}

} // namespace

int main() {
  struct Criterion {
    int id;
    const char* label;
    double budget_seconds;
    std::function<void()> run;
  };
  std::vector<Criterion> criteria{
      {1, "F^k fiber-dimension table (2k+2 for k = 1, 2, 3)", 15.0, c1_fk_fiber_table},
      {2, "rotation foliation pointwise invariants", 2.0, c2_rotation_pointwise},
      {3, "<x d/dx> pointwise invariants", 1.0, c3_scaling_pointwise},
      {4, "abelian isotropy of <x^2 d/dx, x^3 d/dx>", 2.0, c4_abelian_isotropy},
      {5, "torus example: brackets, algebroid, Heisenberg + R", 10.0, c5_torus_example},
      {6, "closed 1-form bracket table with (2, -3)", 2.0, c6_one_form_brackets},
      {7, "bi-submersion targets on 25-point grids", 5.0, c7_bisubmersion_targets},
      {8, "Delta and covering behavior on the rotation foliation", 10.0, c8_delta_and_covering},
      {9, "linearized morphism property (3 foliations, 5 random pairs)", 30.0,
       c9_morphism_property},
      {10, "discreteness linear probe (pi box / unbounded)", 5.0, c10_discreteness_probe},
      {11, "property suites (brackets, extension, oracle, jacobians, flows)", 60.0,
       c11_property_suites},
      {12, "exponential-condition witness check", 5.0, c12_witness_check},
  };

  bool all_pass = true;
  for (const auto& c : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    std::string failure;
    try {
      c.run();
    } catch (const std::exception& e) {
      failure = e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (failure.empty() && secs > c.budget_seconds) {
      std::ostringstream os;
      os << "runtime " << secs << " s over budget " << c.budget_seconds << " s";
      failure = os.str();
    }
    std::printf("[%s] criterion %2d (%6.2fs) %s%s%s\n", failure.empty() ? "PASS" : "FAIL", c.id,
                secs, c.label, failure.empty() ? "" : ": ", failure.c_str());
    if (!failure.empty()) all_pass = false;
  }
  return all_pass ? 0 : 1;
}

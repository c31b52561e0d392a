// Walks the torus example end to end: involutivity, pointwise invariants,
// the algebroid over the 2-torus leaf, and the identification of the fiber
// Lie algebra.

#include <iostream>

#include "folhol/folhol.hpp"

using namespace folhol;

int main() {
  const std::string src = R"(
    foliation torus {
      chart dim 4 vars th1 th2 t1 t2;
      gen v1 = d(th1) + t1*t2*d(t1);
      gen v2 = d(th2) + t1*t2*d(t2);
      gen w1 = t1^2*t2*d(t1);
      gen w2 = t1*t2^2*d(t2);
      leaf L = { t1 = 0; t2 = 0 };
    }
  )";
  FoliationDocument doc = parse_document(src);
  Foliation f = doc.foliation();

  auto involutive = involutivity_check(f);
  std::cout << "involutive: " << (std::holds_alternative<Involutive>(involutive) ? "yes" : "unknown")
            << "\n";

  std::vector<Rational> x(4, Rational(0));
  FiberReport rep = fiber_report(f, x);
  std::cout << "at the leaf point: dim F_x = " << rep.dim_tangent
            << ", dim fiber = " << rep.dim_fiber << ", dim g_x = " << rep.dim_isotropy << "\n";

  AlgebroidLocalData al = algebroid_local_data(f, doc.leaves.at("L"), f.generators());
  std::cout << "anchor(v1) = " << al.anchor[0].str(al.leaf_chart.var_names, {"d(th1)", "d(th2)"})
            << "\n";

  // The fiber Lie algebra k: v1, v2, w1, w2 with [v1, v2] = w2 - w1. Its lower
  // central series and center identify it as Heisenberg + R.
  std::vector<std::vector<RatVector>> c(4, std::vector<RatVector>(4, RatVector(4, Rational(0))));
  c[0][1][3] = Rational(1);
  c[0][1][2] = Rational(-1);
  c[1][0][3] = Rational(-1);
  c[1][0][2] = Rational(1);
  LieAlgebraAnalysis an = lie_algebra_analysis(LieAlgebraPresentation::from_constants(c));
  std::cout << "fiber algebra lower central series:";
  for (unsigned d : an.lower_central_series_dims) std::cout << " " << d;
  std::cout << "\ncenter dim: " << an.center_dim << "\n";
  return 0;
}

#include <catch2/catch_amalgamated.hpp>

#include "folhol/dsl.hpp"
#include "folhol/report.hpp"

using namespace folhol;

namespace {

bool documents_equal(const FoliationDocument& a, const FoliationDocument& b) {
  if (a.name != b.name || a.chart.var_names != b.chart.var_names) return false;
  if (a.generators.size() != b.generators.size()) return false;
  for (size_t i = 0; i < a.generators.size(); ++i) {
    if (a.generators[i].first != b.generators[i].first) return false;
    if (a.generators[i].second != b.generators[i].second) return false;
  }
  auto specs_equal = [](const std::map<std::string, SliceSpec>& x,
                        const std::map<std::string, SliceSpec>& y) {
    if (x.size() != y.size()) return false;
    for (const auto& [k, v] : x) {
      auto it = y.find(k);
      if (it == y.end() || it->second.fixed != v.fixed) return false;
    }
    return true;
  };
  return specs_equal(a.leaves, b.leaves) && specs_equal(a.slices, b.slices);
}

} // namespace

TEST_CASE("parsing the rotation document") {
  auto doc = parse_document("foliation rot { chart dim 2 vars x y; gen X = x*d(y) - y*d(x); }");
  CHECK(doc.name == "rot");
  CHECK(doc.chart.dim == 2);
  REQUIRE(doc.generators.size() == 1);
  Poly x = Poly::variable(2, 0), y = Poly::variable(2, 1);
  PolyVector expected({-y, x});
  CHECK(doc.generators[0].second == expected);
}

TEST_CASE("missing chart declaration") {
  CHECK_THROWS_WITH(parse_document("foliation f { gen X = d(x); }"),
                    Catch::Matchers::ContainsSubstring("chart declaration required"));
}

TEST_CASE("rational coefficients parse exactly") {
  auto doc = parse_document("foliation f { chart dim 1 vars x; gen X = 1/3*d(x); }");
  CHECK(doc.generators[0].second[0] == Poly::constant(1, Rational(1, 3)));
}

TEST_CASE("powers, parentheses and unary minus") {
  auto doc = parse_document(
      "foliation f { chart dim 2 vars x y; gen X = (x + y)^2*d(x) - -3/2*y*d(y); }");
  Poly x = Poly::variable(2, 0), y = Poly::variable(2, 1);
  CHECK(doc.generators[0].second[0] == (x + y) * (x + y));
  CHECK(doc.generators[0].second[1] == Rational(3, 2) * y);
}

TEST_CASE("leaves and slices") {
  auto doc = parse_document(
      "foliation f { chart dim 3 vars a b c; gen X = d(a); leaf L = { b = 1/2; c = -1 }; "
      "slice S = { a = 0 }; }");
  REQUIRE(doc.leaves.count("L") == 1);
  CHECK(doc.leaves.at("L").fixed.at(1) == Rational(1, 2));
  CHECK(doc.leaves.at("L").fixed.at(2) == Rational(-1));
  CHECK(doc.slices.at("S").fixed.at(0) == Rational(0));
}

TEST_CASE("diagnostics carry positions") {
  try {
    parse_document("foliation f {\n  chart dim 1 vars x;\n  gen X = z*d(x);\n}");
    FAIL("expected a parse error");
  } catch (const parse_error& e) {
    CHECK(e.line == 3);
    CHECK(std::string(e.what()).find("unknown variable 'z'") != std::string::npos);
  }
}

TEST_CASE("type errors in expressions") {
  CHECK_THROWS_WITH(
      parse_document("foliation f { chart dim 1 vars x; gen X = d(x)*d(x); }"),
      Catch::Matchers::ContainsSubstring("multiply two vector fields"));
  CHECK_THROWS_WITH(parse_document("foliation f { chart dim 1 vars x; gen X = x + d(x); }"),
                    Catch::Matchers::ContainsSubstring("add a scalar and a vector"));
  CHECK_THROWS_WITH(parse_document("foliation f { chart dim 1 vars x; gen X = x*x; }"),
                    Catch::Matchers::ContainsSubstring("scalar, not a vector field"));
}

TEST_CASE("print round-trips through the parser") {
  const char* sources[] = {
      "foliation rot { chart dim 2 vars x y; gen X = x*d(y) - y*d(x); }",
      "foliation torus { chart dim 4 vars th1 th2 t1 t2;"
      " gen v1 = d(th1) + t1*t2*d(t1); gen v2 = d(th2) + t1*t2*d(t2);"
      " gen w1 = t1^2*t2*d(t1); gen w2 = t1*t2^2*d(t2);"
      " leaf L = { t1 = 0; t2 = 0 }; slice S = { th1 = 0; th2 = 0 }; }",
      "foliation q { chart dim 2 vars x y; gen A = (1/3*x^2 - 2*y + 5)*d(x) + x*y*d(y); }",
  };
  for (const char* src : sources) {
    FoliationDocument doc = parse_document(src);
    FoliationDocument again = parse_document(print_document(doc));
    CHECK(documents_equal(doc, again));
    // Printing is a fixed point after one round.
    CHECK(print_document(doc) == print_document(again));
  }
}

TEST_CASE("standalone expression parsing for the CLI") {
  Chart chart(2, {"u", "v"});
  PolyVector f = parse_field_expression("u^2*d(v)", chart);
  Poly u = Poly::variable(2, 0);
  CHECK(f[1] == u * u);
  CHECK(f[0].is_zero());
  Poly p = parse_scalar_expression("3*t^2", Chart(1, {"t"}));
  Poly t = Poly::variable(1, 0);
  CHECK(p == Rational(3) * (t * t));
  CHECK_THROWS_AS(parse_field_expression("u*v", chart), parse_error);
}

TEST_CASE("json report formatting is deterministic") {
  Report rep("demo.fol", "demo", 1e-6);
  Json data;
  data["value"] = json_double(0.1);
  data["rat"] = json_rational(Rational(-7, 3));
  rep.add_ok("fiber", Json::object(), data, "text\n");
  std::string a = rep.to_json_string();

  Report rep2("demo.fol", "demo", 1e-6);
  Json data2;
  data2["value"] = json_double(0.1);
  data2["rat"] = json_rational(Rational(-7, 3));
  rep2.add_ok("fiber", Json::object(), data2, "text\n");
  CHECK(a == rep2.to_json_string());
  CHECK(a.find("\"0.10000000000000001\"") != std::string::npos);
  CHECK(a.find("\"num\": \"-7\"") != std::string::npos);
  CHECK(a.find("\"den\": \"3\"") != std::string::npos);
  CHECK(a.find("\"tool\": \"folhol\"") != std::string::npos);
}

TEST_CASE("error reports carry a nonzero-exit marker") {
  Report rep("x.fol", "x", 1e-6);
  rep.add_error("fiber", Json::object(), "boom");
  CHECK(rep.has_error());
  CHECK(rep.to_json_string().find("\"outcome\": \"error\"") != std::string::npos);
  CHECK(rep.to_text().find("error: boom") != std::string::npos);
}

/// The foliation definition language:
///
///   foliation rot {
///     chart dim 2 vars x y;
///     gen X = x*d(y) - y*d(x);
///     leaf L = { x = 0; y = 0 };
///     slice S = { y = 0 };
///   }
///
/// Expressions are polynomial arithmetic over the declared variables and
/// exact rationals, with d(var) denoting the coordinate vector fields.
/// Diagnostics carry line and column positions.
#pragma once

#include <cctype>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "folhol/foliation.hpp"

namespace folhol {

struct FoliationDocument {
  std::string name;
  Chart chart;
  std::vector<std::pair<std::string, PolyVector>> generators;
  std::map<std::string, SliceSpec> leaves;
  std::map<std::string, SliceSpec> slices;

  Foliation foliation() const {
    std::vector<PolyVector> gens;
    for (const auto& [n, g] : generators) gens.push_back(g);
    return Foliation(chart, std::move(gens));
  }

  const PolyVector& generator(const std::string& gen_name) const {
    for (const auto& [n, g] : generators)
      if (n == gen_name) return g;
    throw error("unknown generator '" + gen_name + "'");
  }
};

namespace dsl_detail {

enum class Tok { Ident, Int, Symbol, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1;
  int col = 1;
};

class Lexer {
public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }

  Token next() {
    Token t = tok_;
    advance();
    return t;
  }

private:
  void advance() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '\n') {
        ++line_;
        col_ = 1;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++col_;
        ++pos_;
      } else if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= src_.size()) {
      tok_.kind = Tok::End;
      tok_.text.clear();
      return;
    }
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      tok_.kind = Tok::Ident;
      tok_.text = src_.substr(start, pos_ - start);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      tok_.kind = Tok::Int;
      tok_.text = src_.substr(start, pos_ - start);
    } else {
      tok_.kind = Tok::Symbol;
      tok_.text = std::string(1, c);
      ++pos_;
    }
    col_ += static_cast<int>(tok_.text.size());
  }

  const std::string& src_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token tok_;
};

/// Either a polynomial or a polynomial vector field, with enough type
/// discipline to reject products of vector fields.
struct Value {
  bool is_vector = false;
  Poly scalar;
  PolyVector vector{1, 0};
};

class Parser {
public:
  Parser(const std::string& src) : lex_(src) {}

  FoliationDocument parse_document() {
    expect_ident("foliation");
    FoliationDocument doc;
    doc.name = expect(Tok::Ident, "foliation name").text;
    expect_symbol("{");
    if (!(lex_.peek().kind == Tok::Ident && lex_.peek().text == "chart")) {
      const Token& t = lex_.peek();
      throw parse_error("chart declaration required", t.line, t.col);
    }
    doc.chart = parse_chart();
    chart_ = &doc.chart;
    while (!(lex_.peek().kind == Tok::Symbol && lex_.peek().text == "}")) {
      Token t = lex_.peek();
      if (t.kind != Tok::Ident)
        throw parse_error("expected a declaration", t.line, t.col);
      if (t.text == "gen") {
        parse_gen(doc);
      } else if (t.text == "leaf") {
        parse_subspace(doc, true);
      } else if (t.text == "slice") {
        parse_subspace(doc, false);
      } else {
        throw parse_error("unknown declaration '" + t.text + "'", t.line, t.col);
      }
    }
    expect_symbol("}");
    if (doc.generators.empty()) {
      throw parse_error("at least one generator is required", 1, 1);
    }
    return doc;
  }

  /// Parses a standalone expression over a given chart; must be a vector field.
  PolyVector parse_field_expression(const Chart& chart) {
    chart_ = &chart;
    Value v = parse_expr();
    Token t = lex_.peek();
    if (t.kind != Tok::End) throw parse_error("trailing input after expression", t.line, t.col);
    if (!v.is_vector) throw parse_error("expected a vector field expression", 1, 1);
    return v.vector;
  }

  /// Parses a standalone scalar polynomial over a given chart.
  Poly parse_scalar_expression(const Chart& chart) {
    chart_ = &chart;
    Value v = parse_expr();
    Token t = lex_.peek();
    if (t.kind != Tok::End) throw parse_error("trailing input after expression", t.line, t.col);
    if (v.is_vector) throw parse_error("expected a scalar expression", 1, 1);
    return v.scalar;
  }

private:
  Chart parse_chart() {
    expect_ident("chart");
    expect_ident("dim");
    Token dim_tok = expect(Tok::Int, "chart dimension");
    unsigned dim = static_cast<unsigned>(std::stoul(dim_tok.text));
    expect_ident("vars");
    std::vector<std::string> names;
    while (lex_.peek().kind == Tok::Ident) names.push_back(lex_.next().text);
    Token semi = expect_symbol(";");
    if (names.size() != dim)
      throw parse_error("chart declares " + std::to_string(dim) + " dims but " +
                            std::to_string(names.size()) + " variable names",
                        semi.line, semi.col);
    try {
      return Chart(dim, names);
    } catch (const error& e) {
      throw parse_error(e.what(), dim_tok.line, dim_tok.col);
    }
  }

  void parse_gen(FoliationDocument& doc) {
    expect_ident("gen");
    Token name = expect(Tok::Ident, "generator name");
    expect_symbol("=");
    Value v = parse_expr();
    Token semi = expect_symbol(";");
    if (!v.is_vector)
      throw parse_error("generator '" + name.text + "' is a scalar, not a vector field",
                        semi.line, semi.col);
    for (const auto& [n, g] : doc.generators)
      if (n == name.text)
        throw parse_error("duplicate generator name '" + name.text + "'", name.line, name.col);
    doc.generators.emplace_back(name.text, v.vector);
  }

  void parse_subspace(FoliationDocument& doc, bool is_leaf) {
    lex_.next();  // leaf | slice
    Token name = expect(Tok::Ident, "subspace name");
    expect_symbol("=");
    expect_symbol("{");
    SliceSpec spec;
    while (!(lex_.peek().kind == Tok::Symbol && lex_.peek().text == "}")) {
      Token var = expect(Tok::Ident, "variable name");
      unsigned index;
      try {
        index = chart_->index_of(var.text);
      } catch (const error&) {
        throw parse_error("unknown variable '" + var.text + "'", var.line, var.col);
      }
      expect_symbol("=");
      Rational value = parse_rational();
      if (spec.fixed.count(index))
        throw parse_error("variable '" + var.text + "' fixed twice", var.line, var.col);
      spec.fixed[index] = value;
      if (lex_.peek().kind == Tok::Symbol &&
          (lex_.peek().text == ";" || lex_.peek().text == ","))
        lex_.next();
    }
    expect_symbol("}");
    expect_symbol(";");
    auto& map = is_leaf ? doc.leaves : doc.slices;
    if (map.count(name.text))
      throw parse_error("duplicate subspace name '" + name.text + "'", name.line, name.col);
    map[name.text] = spec;
  }

  Rational parse_rational() {
    bool negative = false;
    while (lex_.peek().kind == Tok::Symbol && lex_.peek().text == "-") {
      negative = !negative;
      lex_.next();
    }
    Token num = expect(Tok::Int, "rational literal");
    std::string text = num.text;
    if (lex_.peek().kind == Tok::Symbol && lex_.peek().text == "/") {
      lex_.next();
      Token den = expect(Tok::Int, "denominator");
      text += "/" + den.text;
    }
    Rational r = Rational::parse(text);
    return negative ? -r : r;
  }

  // expr := term (("+" | "-") term)*
  Value parse_expr() {
    Value acc = parse_term();
    while (lex_.peek().kind == Tok::Symbol &&
           (lex_.peek().text == "+" || lex_.peek().text == "-")) {
      Token op = lex_.next();
      Value rhs = parse_term();
      acc = combine_additive(acc, rhs, op);
    }
    return acc;
  }

  // term := factor ("*" factor)*
  Value parse_term() {
    Value acc = parse_factor();
    while (lex_.peek().kind == Tok::Symbol && lex_.peek().text == "*") {
      Token op = lex_.next();
      Value rhs = parse_factor();
      acc = combine_multiplicative(acc, rhs, op);
    }
    return acc;
  }

  // factor := atom ("^" INT)?
  Value parse_factor() {
    Value v = parse_atom();
    if (lex_.peek().kind == Tok::Symbol && lex_.peek().text == "^") {
      Token caret = lex_.next();
      Token power = expect(Tok::Int, "exponent");
      if (v.is_vector)
        throw parse_error("cannot exponentiate a vector field", caret.line, caret.col);
      unsigned long e = std::stoul(power.text);
      Poly result = Poly::constant(chart_->dim, Rational(1));
      for (unsigned long i = 0; i < e; ++i) result = result * v.scalar;
      v.scalar = result;
    }
    return v;
  }

  Value parse_atom() {
    Token t = lex_.peek();
    if (t.kind == Tok::Symbol && t.text == "-") {
      lex_.next();
      Value v = parse_atom();
      if (v.is_vector)
        v.vector = -v.vector;
      else
        v.scalar = -v.scalar;
      return v;
    }
    if (t.kind == Tok::Symbol && t.text == "(") {
      lex_.next();
      Value v = parse_expr();
      expect_symbol(")");
      return v;
    }
    if (t.kind == Tok::Int) {
      Rational r = parse_rational();
      Value v;
      v.scalar = Poly::constant(chart_->dim, r);
      return v;
    }
    if (t.kind == Tok::Ident) {
      lex_.next();
      if (t.text == "d" && lex_.peek().kind == Tok::Symbol && lex_.peek().text == "(") {
        lex_.next();
        Token var = expect(Tok::Ident, "variable name");
        expect_symbol(")");
        unsigned index;
        try {
          index = chart_->index_of(var.text);
        } catch (const error&) {
          throw parse_error("unknown variable '" + var.text + "'", var.line, var.col);
        }
        Value v;
        v.is_vector = true;
        v.vector = PolyVector(chart_->dim, chart_->dim);
        v.vector[index] = Poly::constant(chart_->dim, Rational(1));
        return v;
      }
      unsigned index;
      try {
        index = chart_->index_of(t.text);
      } catch (const error&) {
        throw parse_error("unknown variable '" + t.text + "'", t.line, t.col);
      }
      Value v;
      v.scalar = Poly::variable(chart_->dim, index);
      return v;
    }
    throw parse_error("unexpected token '" + t.text + "'", t.line, t.col);
  }

  Value combine_additive(const Value& a, const Value& b, const Token& op) {
    if (a.is_vector != b.is_vector)
      throw parse_error("cannot add a scalar and a vector field", op.line, op.col);
    Value v;
    v.is_vector = a.is_vector;
    if (a.is_vector)
      v.vector = op.text == "+" ? a.vector + b.vector : a.vector - b.vector;
    else
      v.scalar = op.text == "+" ? a.scalar + b.scalar : a.scalar - b.scalar;
    return v;
  }

  Value combine_multiplicative(const Value& a, const Value& b, const Token& op) {
    if (a.is_vector && b.is_vector)
      throw parse_error("cannot multiply two vector fields", op.line, op.col);
    Value v;
    if (a.is_vector || b.is_vector) {
      v.is_vector = true;
      v.vector = a.is_vector ? b.scalar * a.vector : a.scalar * b.vector;
    } else {
      v.scalar = a.scalar * b.scalar;
    }
    return v;
  }

  Token expect(Tok kind, const std::string& what) {
    Token t = lex_.next();
    if (t.kind != kind)
      throw parse_error("expected " + what + ", found '" + t.text + "'", t.line, t.col);
    return t;
  }

  Token expect_symbol(const std::string& s) {
    Token t = lex_.next();
    if (t.kind != Tok::Symbol || t.text != s)
      throw parse_error("expected '" + s + "', found '" + t.text + "'", t.line, t.col);
    return t;
  }

  void expect_ident(const std::string& s) {
    Token t = lex_.next();
    if (t.kind != Tok::Ident || t.text != s)
      throw parse_error("expected '" + s + "', found '" + t.text + "'", t.line, t.col);
  }

  Lexer lex_;
  const Chart* chart_ = nullptr;
};

} // namespace dsl_detail

inline FoliationDocument parse_document(const std::string& source) {
  dsl_detail::Parser p(source);
  return p.parse_document();
}

inline PolyVector parse_field_expression(const std::string& source, const Chart& chart) {
  dsl_detail::Parser p(source);
  return p.parse_field_expression(chart);
}

inline Poly parse_scalar_expression(const std::string& source, const Chart& chart) {
  dsl_detail::Parser p(source);
  return p.parse_scalar_expression(chart);
}

/// Canonical printer; parse(print(parse(s))) == parse(s).
inline std::string print_document(const FoliationDocument& doc) {
  std::ostringstream os;
  os << "foliation " << doc.name << " {\n";
  os << "  chart dim " << doc.chart.dim << " vars";
  for (const auto& n : doc.chart.var_names) os << " " << n;
  os << ";\n";
  for (const auto& [name, g] : doc.generators) {
    os << "  gen " << name << " =";
    bool any = false;
    for (unsigned i = 0; i < g.dim(); ++i) {
      if (g[i].is_zero()) continue;
      os << (any ? " + " : " ") << "(" << g[i].str(doc.chart.var_names) << ")*d("
         << doc.chart.var_names[i] << ")";
      any = true;
    }
    if (!any) os << " 0*d(" << doc.chart.var_names[0] << ")";
    os << ";\n";
  }
  auto print_spec = [&](const char* kw, const std::map<std::string, SliceSpec>& m) {
    for (const auto& [name, spec] : m) {
      os << "  " << kw << " " << name << " = {";
      bool first = true;
      for (const auto& [var, val] : spec.fixed) {
        os << (first ? " " : "; ") << doc.chart.var_names[var] << " = " << val.str();
        first = false;
      }
      os << " };\n";
    }
  };
  print_spec("leaf", doc.leaves);
  print_spec("slice", doc.slices);
  os << "}\n";
  return os.str();
}

} // namespace folhol

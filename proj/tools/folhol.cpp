// folhol: command-line driver for the singular foliation toolkit.
//
// Exit codes: 0 success, 1 analysis error (embedded in the report),
// 2 parse/usage error.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "folhol/folhol.hpp"

namespace {

using namespace folhol;

struct CommonOpts {
  std::string file;
  std::string point;
  std::string lambda;
  std::string xi;
  std::string leaf;
  std::string slice;
  std::string json_out;
  double tol = 1e-6;
  double box_y = 0.5;
  double box_xi = 8.0;
  double validity = 8.0;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

std::vector<Rational> parse_point(const std::string& s, unsigned dim) {
  std::vector<Rational> p;
  for (const auto& c : split(s, ',')) p.push_back(Rational::parse(c));
  if (p.size() != dim)
    throw error("--point needs " + std::to_string(dim) + " comma-separated rationals");
  return p;
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> p;
  for (const auto& c : split(s, ',')) {
    size_t used = 0;
    p.push_back(std::stod(c, &used));
    if (used != c.size()) throw error("cannot parse '" + c + "' as a number");
  }
  return p;
}

std::string field_str(const PolyVector& g, const Chart& chart) {
  std::vector<std::string> basis;
  for (const auto& n : chart.var_names) basis.push_back("d(" + n + ")");
  return g.str(chart.var_names, basis);
}

Json json_matrix(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (long i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (long j = 0; j < m.cols(); ++j) row.push_back(json_double(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string text_matrix(const Eigen::MatrixXd& m) {
  std::ostringstream os;
  for (long i = 0; i < m.rows(); ++i) {
    os << "  [";
    for (long j = 0; j < m.cols(); ++j) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.12g", m(i, j));
      os << (j ? ", " : " ") << buf;
    }
    os << " ]\n";
  }
  return os.str();
}

const SliceSpec& named_spec(const FoliationDocument& doc, const std::string& name, bool leaf) {
  const auto& map = leaf ? doc.leaves : doc.slices;
  auto it = map.find(name);
  if (it == map.end())
    throw error(std::string(leaf ? "leaf" : "slice") + " '" + name + "' is not declared");
  return it->second;
}

void run_fiber(const FoliationDocument& doc, const CommonOpts& o, Report& rep) {
  Foliation f = doc.foliation();
  auto x = parse_point(o.point, f.dim());
  Json params;
  params["point"] = json_point(x);
  FiberReport r = fiber_report(f, x);
  Json data;
  data["dim_tangent"] = r.dim_tangent;
  data["dim_fiber"] = r.dim_fiber;
  data["dim_isotropy"] = r.dim_isotropy;
  Json rel = Json::array();
  for (const auto& row : r.relation_basis) {
    Json jr = Json::array();
    for (const auto& c : row) jr.push_back(json_rational(c));
    rel.push_back(std::move(jr));
  }
  data["relation_basis"] = rel;
  data["fiber_basis_indices"] = r.fiber_basis_indices;
  std::ostringstream text;
  text << "dim F_x (leaf tangent)  = " << r.dim_tangent << "\n"
       << "dim fiber F/IxF         = " << r.dim_fiber << "\n"
       << "dim isotropy g_x        = " << r.dim_isotropy << "\n";
  text << "fiber basis generators  =";
  for (unsigned i : r.fiber_basis_indices) text << " " << doc.generators[i].first;
  text << "\n";
  rep.add_ok("fiber", params, data, text.str());
}

void run_isotropy(const FoliationDocument& doc, const CommonOpts& o, Report& rep) {
  Foliation f = doc.foliation();
  auto x = parse_point(o.point, f.dim());
  Json params;
  params["point"] = json_point(x);
  LieAlgebraPresentation lp = isotropy_algebra(f, x);
  LieAlgebraAnalysis an = lie_algebra_analysis(lp);
  Json data;
  data["dim"] = lp.dim();
  Json wits = Json::array();
  for (const auto& w : lp.witnesses()) wits.push_back(field_str(w, f.chart()));
  data["witnesses"] = wits;
  Json constants = Json::array();
  for (unsigned a = 0; a < lp.dim(); ++a)
    for (unsigned b = a + 1; b < lp.dim(); ++b)
      for (unsigned g = 0; g < lp.dim(); ++g) {
        if (lp.constants()[a][b][g].is_zero()) continue;
        Json c;
        c["a"] = a;
        c["b"] = b;
        c["g"] = g;
        c["value"] = json_rational(lp.constants()[a][b][g]);
        constants.push_back(std::move(c));
      }
  data["structure_constants"] = constants;
  data["abelian"] = an.abelian;
  data["derived_series_dims"] = an.derived_series_dims;
  data["lower_central_series_dims"] = an.lower_central_series_dims;
  data["center_dim"] = an.center_dim;
  std::ostringstream text;
  text << "dim g_x = " << lp.dim() << (an.abelian ? " (abelian)" : "") << "\n";
  for (size_t i = 0; i < lp.witnesses().size(); ++i)
    text << "  W" << i + 1 << " = " << field_str(lp.witnesses()[i], f.chart()) << "\n";
  if (!an.abelian) {
    for (unsigned a = 0; a < lp.dim(); ++a)
      for (unsigned b = a + 1; b < lp.dim(); ++b)
        for (unsigned g = 0; g < lp.dim(); ++g)
          if (!lp.constants()[a][b][g].is_zero())
            text << "  [W" << a + 1 << ", W" << b + 1 << "] has W" << g + 1
                 << "-coefficient " << lp.constants()[a][b][g] << "\n";
  }
  text << "lower central series dims:";
  for (unsigned d : an.lower_central_series_dims) text << " " << d;
  text << "\ncenter dim = " << an.center_dim << "\n";
  rep.add_ok("isotropy", params, data, text.str());
}

void run_classify(const FoliationDocument& doc, const CommonOpts& o, Report& rep) {
  Foliation f = doc.foliation();
  auto x = parse_point(o.point, f.dim());
  Json params;
  params["point"] = json_point(x);
  PointClass c = classify_point(f, x);
  Json data;
  data["class"] = c == PointClass::Regular ? "Regular" : "Singular";
  rep.add_ok("classify", params, data,
             c == PointClass::Regular ? "Regular point\n" : "Singular point\n");
}

void run_involutivity(const FoliationDocument& doc, Report& rep) {
  Foliation f = doc.foliation();
  InvolutivityResult r = involutivity_check(f);
  Json data;
  std::ostringstream text;
  if (const auto* inv = std::get_if<Involutive>(&r)) {
    data["verdict"] = "Involutive";
    Json ws = Json::array();
    text << "Involutive (all generator brackets certified in the module)\n";
    for (const auto& w : inv->witnesses) {
      Json jw;
      jw["i"] = w.i;
      jw["j"] = w.j;
      jw["bracket"] = field_str(w.bracket, f.chart());
      ws.push_back(std::move(jw));
      text << "  [" << doc.generators[w.i].first << ", " << doc.generators[w.j].first
           << "] = " << field_str(w.bracket, f.chart()) << "\n";
    }
    data["witnesses"] = ws;
    rep.add_ok("involutivity", Json::object(), data, text.str());
  } else {
    const auto& unk = std::get<InvolutivityUnknown>(r);
    data["verdict"] = "Unknown";
    data["pair"] = Json::array({unk.i, unk.j});
    data["bracket"] = field_str(unk.bracket, f.chart());
    data["residue"] = field_str(unk.residue, f.chart());
    text << "Unknown: [" << doc.generators[unk.i].first << ", " << doc.generators[unk.j].first
         << "] = " << field_str(unk.bracket, f.chart())
         << " is not certified in the polynomial module (residue "
         << field_str(unk.residue, f.chart()) << ")\n";
    rep.add_ok("involutivity", Json::object(), data, text.str());
  }
}

void run_bracket_table(const FoliationDocument& doc, Report& rep) {
  Foliation f = doc.foliation();
  Json data = Json::array();
  std::ostringstream text;
  for (unsigned i = 0; i < f.num_generators(); ++i)
    for (unsigned j = i + 1; j < f.num_generators(); ++j) {
      PolyVector b = lie_bracket(f.generators()[i], f.generators()[j]);
      Json entry;
      entry["i"] = i;
      entry["j"] = j;
      entry["bracket"] = field_str(b, f.chart());
      data.push_back(std::move(entry));
      text << "[" << doc.generators[i].first << ", " << doc.generators[j].first
           << "] = " << field_str(b, f.chart()) << "\n";
    }
  rep.add_ok("bracket-table", Json::object(), data, text.str());
}

void run_algebroid(const FoliationDocument& doc, const CommonOpts& o, Report& rep) {
  if (o.leaf.empty()) throw error("algebroid requires --leaf");
  Foliation f = doc.foliation();
  const SliceSpec& leaf = named_spec(doc, o.leaf, true);
  AlgebroidLocalData data_al = algebroid_local_data(f, leaf, f.generators());
  Json params;
  params["leaf"] = o.leaf;
  Json data;
  Json anchor = Json::array();
  std::ostringstream text;
  text << "frame: generator classes mod IL*F\n";
  for (size_t i = 0; i < data_al.anchor.size(); ++i) {
    std::string a = field_str(data_al.anchor[i], data_al.leaf_chart);
    Json ja;
    ja["frame"] = doc.generators[i].first;
    ja["anchor"] = a;
    anchor.push_back(std::move(ja));
    text << "  anchor(" << doc.generators[i].first << ") = " << a << "\n";
  }
  data["anchor"] = anchor;
  Json brackets = Json::array();
  const unsigned l = static_cast<unsigned>(data_al.frame.size());
  for (unsigned a = 0; a < l; ++a)
    for (unsigned b = a + 1; b < l; ++b) {
      bool nonzero = false;
      std::ostringstream expr;
      for (unsigned g = 0; g < l; ++g) {
        const Poly& c = data_al.bracket_table[a][b][g];
        if (c.is_zero()) continue;
        if (nonzero) expr << " + ";
        expr << "(" << c.str(data_al.leaf_chart.var_names) << ")*" << doc.generators[g].first;
        nonzero = true;
      }
      Json jb;
      jb["a"] = doc.generators[a].first;
      jb["b"] = doc.generators[b].first;
      jb["value"] = nonzero ? expr.str() : "0";
      brackets.push_back(std::move(jb));
      if (nonzero)
        text << "  [" << doc.generators[a].first << ", " << doc.generators[b].first
             << "]_{A_L} = " << expr.str() << "\n";
    }
  data["brackets"] = brackets;
  rep.add_ok("algebroid", params, data, text.str());
}

void run_holonomy(const FoliationDocument& doc, const CommonOpts& o, Report& rep) {
  Foliation f = doc.foliation();
  auto x = parse_point(o.point, f.dim());
  if (o.lambda.empty() == o.xi.empty())
    throw error("holonomy requires exactly one of --lambda or --xi");
  DomainBox box;
  box.y_radius = o.box_y;
  box.xi_radius = o.box_xi;
  PathHolonomyBiSubmersion u(f, x, box);
  Json params;
  params["point"] = json_point(x);

  std::vector<double> xi;
  std::ostringstream text;
  Json data;
  if (!o.lambda.empty()) {
    std::vector<double> lambda = parse_doubles(o.lambda);
    params["lambda"] = json_doubles(lambda);
    LieAlgebraPresentation lp = isotropy_algebra(f, x);
    DeltaOptions opts;
    opts.validity_radius = o.validity;
    DeltaResult dr = delta_map(u, lp, lambda, opts);
    xi = dr.xi;
    data["delta_xi"] = json_doubles(dr.xi);
    data["target_drift"] = json_double(dr.target_drift);
    text << "Delta(lambda) = (x,";
    for (double c : dr.xi) text << " " << format_double(c);
    text << ")\n";
  } else {
    xi = parse_doubles(o.xi);
    params["xi"] = json_doubles(xi);
  }
  LinearHolonomy lh = linear_holonomy(u, xi);
  data["full_jacobian"] = json_matrix(lh.full_jacobian);
  data["normal_matrix"] = json_matrix(lh.normal_matrix);
  data["leaf_dim"] = static_cast<unsigned>(lh.leaf_basis.size());
  text << "full Jacobian:\n" << text_matrix(lh.full_jacobian);
  text << "normal matrix on N_xL:\n" << text_matrix(lh.normal_matrix);
  rep.add_ok("holonomy", params, data, text.str());
}

void run_probe_kernel(const FoliationDocument& doc, const CommonOpts& o, Report& rep) {
  Foliation f = doc.foliation();
  auto x = parse_point(o.point, f.dim());
  if (o.xi.empty()) throw error("probe-kernel requires --xi");
  std::vector<double> xi = parse_doubles(o.xi);
  DomainBox box;
  box.y_radius = o.box_y;
  box.xi_radius = o.box_xi;
  PathHolonomyBiSubmersion u(f, x, box);
  Json params;
  params["point"] = json_point(x);
  params["xi"] = json_doubles(xi);
  KernelProbe p = kernel_linear_probe(u, xi, o.tol);
  Json data;
  data["verdict"] = p == KernelProbe::NotInKernel ? "NotInKernel" : "Inconclusive";
  rep.add_ok("probe-kernel", params, data,
             p == KernelProbe::NotInKernel
                 ? "NotInKernel: the normal linear holonomy is not the identity\n"
                 : "Inconclusive: the normal linear holonomy is the identity within tolerance\n");
}

void run_probe_discreteness(const FoliationDocument& doc, const CommonOpts& o, Report& rep) {
  Foliation f = doc.foliation();
  auto x = parse_point(o.point, f.dim());
  SliceSpec slice;
  if (!o.slice.empty()) slice = named_spec(doc, o.slice, false);
  Json params;
  params["point"] = json_point(x);
  params["slice"] = o.slice.empty() ? "(whole chart)" : o.slice;
  DiscretenessProbe p = discreteness_linear_probe(f, x, slice);
  Json data;
  std::ostringstream text;
  if (p.unbounded) {
    data["verdict"] = "Unbounded";
    data["degenerate_span"] = p.degenerate;
    text << "Unbounded injectivity box"
         << (p.degenerate ? " (degenerate: all linearizations vanish)" : "") << "\n";
  } else {
    data["verdict"] = "Box";
    data["radius"] = json_double(p.radius);
    text << "Injectivity box |gamma|_inf < " << format_double(p.radius) << "\n";
  }
  rep.add_ok("probe-discreteness", params, data, text.str());
}

void run_check_witness(const FoliationDocument& doc, const CommonOpts& o,
                       const std::vector<std::string>& xt_specs, const std::string& z_expr,
                       double sample_radius, unsigned samples_per_dim, Report& rep) {
  Foliation f = doc.foliation();
  auto x = parse_point(o.point, f.dim());

  Foliation f_slice = f;
  std::vector<Rational> x_slice = x;
  Chart slice_chart = f.chart();
  if (!o.slice.empty()) {
    const SliceSpec& slice = named_spec(doc, o.slice, false);
    for (const auto& [var, val] : slice.fixed)
      if (val != x[var]) throw error("check-witness: the point must lie on the slice");
    f_slice = slice_restriction(tangent_subfoliation(f, slice), slice);
    slice_chart = f_slice.chart();
    std::vector<Rational> restricted;
    for (unsigned i : slice.free_indices(f.dim())) restricted.push_back(x[i]);
    x_slice = restricted;
  }

  if (xt_specs.empty()) throw error("check-witness requires at least one --xt 'poly @ gen'");
  if (z_expr.empty()) throw error("check-witness requires --z");

  Chart time_chart(1, {"t"});
  TimeDependentField tf;
  for (const auto& spec : xt_specs) {
    auto at = spec.find('@');
    if (at == std::string::npos)
      throw error("--xt expects 'time-poly @ field-expression', e.g. '3*t^2 @ x^2*d(x)'");
    Poly p = parse_scalar_expression(spec.substr(0, at), time_chart);
    PolyVector g = parse_field_expression(spec.substr(at + 1), slice_chart);
    tf.terms.push_back({p, g});
  }
  PolyVector z = parse_field_expression(z_expr, slice_chart);

  std::vector<double> center;
  for (const auto& c : x_slice) center.push_back(c.to_double());
  std::vector<std::vector<double>> samples = tensor_grid(center, sample_radius, samples_per_dim);

  Json params;
  params["point"] = json_point(x);
  params["xt"] = xt_specs;
  params["z"] = z_expr;
  WitnessCheckResult r =
      exponential_condition_witness_check(f_slice, x_slice, tf, z, samples, o.tol);
  Json data;
  data["pass"] = r.pass;
  data["max_deviation"] = json_double(r.max_deviation);
  std::ostringstream text;
  text << (r.pass ? "pass" : "fail") << ": max deviation " << format_double(r.max_deviation)
       << " over " << samples.size() << " samples (tol " << format_double(o.tol) << ")\n";
  rep.add_ok("check-witness", params, data, text.str());
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"folhol: pointwise invariants and holonomy probes for polynomial singular foliations"};
  app.require_subcommand(1);

  CommonOpts opts;
  if (const char* env = std::getenv("FOLHOL_TOL")) opts.tol = std::atof(env);

  std::vector<std::string> xt_specs;
  std::string z_expr;
  double sample_radius = 0.2;
  unsigned samples_per_dim = 5;

  auto add_common = [&](CLI::App* cmd, bool needs_point) {
    cmd->add_option("file", opts.file, "foliation definition file (.fol)")->required();
    auto* p = cmd->add_option("--point", opts.point, "rational point, comma separated");
    if (needs_point) p->required();
    cmd->add_option("--json", opts.json_out, "write the JSON report to this path");
    cmd->add_option("--tol", opts.tol, "comparison tolerance");
    cmd->add_option("--box-y", opts.box_y, "bi-submersion base radius");
    cmd->add_option("--box-xi", opts.box_xi, "bi-submersion xi radius");
    cmd->add_option("--validity", opts.validity, "validity box radius for Delta/BCH");
  };

  auto* c_fiber = app.add_subcommand("fiber", "fiber, tangent and isotropy dimensions at a point");
  add_common(c_fiber, true);
  auto* c_iso = app.add_subcommand("isotropy", "isotropy Lie algebra with structure constants");
  add_common(c_iso, true);
  auto* c_cls = app.add_subcommand("classify", "regular/singular classification of a point");
  add_common(c_cls, true);
  auto* c_inv = app.add_subcommand("involutivity", "bracket-closure certificate for the module");
  add_common(c_inv, false);
  auto* c_brk = app.add_subcommand("bracket-table", "pairwise Lie brackets of the generators");
  add_common(c_brk, false);
  auto* c_alg = app.add_subcommand("algebroid", "local Lie algebroid data over a declared leaf");
  add_common(c_alg, false);
  c_alg->add_option("--leaf", opts.leaf, "name of a declared leaf")->required();
  auto* c_hol = app.add_subcommand("holonomy", "linear holonomy, via Delta or at explicit xi");
  add_common(c_hol, true);
  c_hol->add_option("--lambda", opts.lambda, "group coordinates in the isotropy witness basis");
  c_hol->add_option("--xi", opts.xi, "explicit xi coordinates in U");
  auto* c_ker = app.add_subcommand("probe-kernel", "one-sided essential isotropy kernel probe");
  add_common(c_ker, true);
  c_ker->add_option("--xi", opts.xi, "xi coordinates of a point of U_x^x")->required();
  auto* c_disc = app.add_subcommand("probe-discreteness", "matrix-exponential injectivity box");
  add_common(c_disc, true);
  c_disc->add_option("--slice", opts.slice, "name of a declared slice (default: whole chart)");
  auto* c_wit = app.add_subcommand("check-witness", "exponential condition witness check");
  add_common(c_wit, true);
  c_wit->add_option("--slice", opts.slice, "name of a declared slice (default: whole chart)");
  c_wit->add_option("--xt", xt_specs, "time-dependent term 'time-poly @ field-expression'");
  c_wit->add_option("--z", z_expr, "candidate field Z, an expression over the slice chart");
  c_wit->add_option("--sample-radius", sample_radius, "sample grid radius");
  c_wit->add_option("--sample-per-dim", samples_per_dim, "sample grid points per axis");

  CLI11_PARSE(app, argc, argv);

  std::ifstream in(opts.file);
  if (!in) {
    std::cerr << "folhol: cannot open '" << opts.file << "'\n";
    return 2;
  }
  std::stringstream buffer;
  buffer << in.rdbuf();

  folhol::FoliationDocument doc;
  try {
    doc = folhol::parse_document(buffer.str());
  } catch (const folhol::parse_error& e) {
    std::cerr << "folhol: parse error: " << e.what() << "\n";
    return 2;
  } catch (const folhol::error& e) {
    std::cerr << "folhol: " << e.what() << "\n";
    return 2;
  }

  folhol::Report rep(opts.file, doc.name, opts.tol, folhol::print_document(doc));
  CLI::App* cmd = app.get_subcommands().front();
  const std::string name = cmd->get_name();
  try {
    if (name == "fiber") run_fiber(doc, opts, rep);
    else if (name == "isotropy") run_isotropy(doc, opts, rep);
    else if (name == "classify") run_classify(doc, opts, rep);
    else if (name == "involutivity") run_involutivity(doc, rep);
    else if (name == "bracket-table") run_bracket_table(doc, rep);
    else if (name == "algebroid") run_algebroid(doc, opts, rep);
    else if (name == "holonomy") run_holonomy(doc, opts, rep);
    else if (name == "probe-kernel") run_probe_kernel(doc, opts, rep);
    else if (name == "probe-discreteness") run_probe_discreteness(doc, opts, rep);
    else if (name == "check-witness")
      run_check_witness(doc, opts, xt_specs, z_expr, sample_radius, samples_per_dim, rep);
  } catch (const folhol::error& e) {
    rep.add_error(name, folhol::Json::object(), e.what());
  }

  std::cout << rep.to_text();
  if (!opts.json_out.empty()) {
    std::ofstream out(opts.json_out);
    if (!out) {
      std::cerr << "folhol: cannot write '" << opts.json_out << "'\n";
      return 1;
    }
    out << rep.to_json_string();
  }
  return rep.has_error() ? 1 : 0;
}
